#include <cstring>
#include <fstream>
#include <set>
#include <unistd.h>

#include "binary_io.hpp"
#include "folio/collection.hpp"
#include "folio/embedding_file.hpp"
#include "folio/error.hpp"

namespace folio {

namespace fs = std::filesystem;

namespace {

constexpr char kCollectionMagic[4] = {'M', 'V', 'C', '1'};
constexpr std::uint32_t kCollectionFormatVersion = 1;

}  // namespace

void save_collection(const Collection& collection, const fs::path& path) {
  const auto snap = collection.snapshot();
  std::vector<PageEmbedding> entries;
  entries.reserve(snap->pages.size());
  for (const auto& p : snap->pages) entries.push_back(*p);

  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
    }
    out.write(kCollectionMagic, 4);
    detail::put_u32(out, kCollectionFormatVersion);
    detail::put_string16(out, collection.name());
    detail::put_string16(out, std::string(to_string(collection.metric())));
    detail::put_u32(out, static_cast<std::uint32_t>(collection.dims()));
    encode_embeddings(out, entries);
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw Error(ErrorCode::kIo, "write failed for " + path.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::kIo, "cannot rename into " + path.string());
  }
}

std::shared_ptr<Collection> load_collection(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::error_code ec;
  const auto size = fs::file_size(path, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot stat " + path.string());

  const std::string where = path.string() + ": ";
  detail::BoundedReader reader(in, size);
  auto need = [&](std::uint64_t n) {
    if (!reader.has(n)) {
      throw Error(ErrorCode::kTruncation, where + "truncated collection header");
    }
  };
  need(8);
  char magic[4];
  reader.read_bytes(magic, 4);
  if (std::memcmp(magic, kCollectionMagic, 4) != 0) {
    throw Error(ErrorCode::kFormat, where + "bad magic; not a collection snapshot");
  }
  if (reader.u32() != kCollectionFormatVersion) {
    throw Error(ErrorCode::kFormat, where + "unsupported collection version");
  }
  auto string16 = [&] {
    need(2);
    const std::uint16_t len = reader.u16();
    need(len);
    std::string s(len, '\0');
    reader.read_bytes(s.data(), len);
    return s;
  };
  const std::string name = string16();
  const std::string metric_name = string16();
  const auto metric = try_parse_metric(metric_name);
  if (!metric) {
    throw Error(ErrorCode::kFormat, where + "unknown metric '" + metric_name + "'");
  }
  need(4);
  const std::uint32_t dims = reader.u32();

  std::vector<PageEmbedding> entries;
  try {
    entries = decode_embeddings(in, reader.remaining());
  } catch (const Error& e) {
    throw Error(e.code(), where + e.what());
  }
  for (const auto& e : entries) {
    if (e.embedding.dims() != dims) {
      throw Error(ErrorCode::kFormat, where + "page " + to_string(e.page) +
                                          " dims disagree with collection header");
    }
  }
  std::set<PageRef> keys;
  for (const auto& e : entries) {
    if (!keys.insert(e.page).second) {
      throw Error(ErrorCode::kFormat,
                  where + "duplicate page " + to_string(e.page));
    }
  }

  auto collection = std::make_shared<Collection>(name, *metric, dims);
  collection->upsert(std::move(entries));
  return collection;
}

}  // namespace folio
