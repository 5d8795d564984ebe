#include "folio/embedding_file.hpp"

#include <chrono>
#include <cstring>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "binary_io.hpp"
#include "folio/error.hpp"

namespace folio {

namespace fs = std::filesystem;

namespace {

std::string utc_now_iso8601() {
  const auto now = std::chrono::floor<std::chrono::seconds>(
      std::chrono::system_clock::now());
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

fs::path temp_sibling(const fs::path& path) {
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  return tmp;
}

}  // namespace

fs::path manifest_path(const fs::path& embedding_file) {
  fs::path p = embedding_file;
  p += ".manifest";
  return p;
}

void encode_embeddings(std::ostream& out,
                       std::span<const PageEmbedding> entries) {
  if (!entries.empty()) {
    const std::size_t dims = entries.front().embedding.dims();
    for (const auto& e : entries) {
      validate(e.page);
      if (e.embedding.dims() != dims) {
        throw Error(ErrorCode::kDimensionMismatch,
                    "page " + to_string(e.page) + " has dims " +
                        std::to_string(e.embedding.dims()) + ", expected " +
                        std::to_string(dims));
      }
    }
  }
  if (entries.size() > 0xffffffffu) {
    throw Error(ErrorCode::kValidation, "too many entries for one file");
  }

  out.write(kEmbeddingMagic, 4);
  detail::put_u32(out, kEmbeddingFormatVersion);
  detail::put_u32(out, static_cast<std::uint32_t>(entries.size()));
  for (const auto& e : entries) {
    detail::put_string16(out, e.page.volume_id);
    detail::put_u32(out, e.page.page_number);
    detail::put_u32(out, static_cast<std::uint32_t>(e.embedding.rows()));
    detail::put_u32(out, static_cast<std::uint32_t>(e.embedding.dims()));
    detail::put_f32_array(out, e.embedding.data());
  }
}

std::vector<PageEmbedding> decode_embeddings(std::istream& in,
                                             std::uint64_t byte_length) {
  detail::BoundedReader reader(in, byte_length);
  if (!reader.has(12)) {
    throw Error(ErrorCode::kFormat, "input too short for an embedding header");
  }
  char magic[4];
  reader.read_bytes(magic, 4);
  if (std::memcmp(magic, kEmbeddingMagic, 4) != 0) {
    throw Error(ErrorCode::kFormat, "bad magic; not an MVE1 embedding file");
  }
  const std::uint32_t version = reader.u32();
  if (version != kEmbeddingFormatVersion) {
    throw Error(ErrorCode::kFormat,
                "unsupported format version " + std::to_string(version));
  }
  const std::uint32_t count = reader.u32();

  std::vector<PageEmbedding> entries;
  entries.reserve(std::min<std::uint64_t>(count, reader.remaining() / 14));
  std::size_t common_dims = 0;
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::string where = "entry " + std::to_string(i);
    auto need = [&](std::uint64_t n, const char* what) {
      if (!reader.has(n)) {
        throw Error(ErrorCode::kTruncation,
                    where + ": truncated " + what + " (need " +
                        std::to_string(n) + " bytes, " +
                        std::to_string(reader.remaining()) + " left)");
      }
    };
    need(2, "volume id length");
    const std::uint16_t vlen = reader.u16();
    need(vlen, "volume id");
    PageRef page;
    page.volume_id.resize(vlen);
    reader.read_bytes(page.volume_id.data(), vlen);
    need(12, "entry header");
    page.page_number = reader.u32();
    const std::uint32_t rows = reader.u32();
    const std::uint32_t dims = reader.u32();
    try {
      validate(page);
    } catch (const Error& e) {
      throw Error(ErrorCode::kValidation, where + ": " + e.what());
    }
    if (rows == 0 || dims == 0) {
      throw Error(ErrorCode::kValidation, where + ": zero rows or dims");
    }
    if (common_dims != 0 && dims != common_dims) {
      throw Error(ErrorCode::kFormat,
                  where + ": dims " + std::to_string(dims) +
                      " inconsistent with earlier entries (" +
                      std::to_string(common_dims) + ")");
    }
    common_dims = dims;
    const std::uint64_t payload =
        static_cast<std::uint64_t>(rows) * dims * sizeof(float);
    need(payload, "matrix payload");
    std::vector<float> data(static_cast<std::size_t>(rows) * dims);
    reader.f32_array(data);
    try {
      entries.push_back({std::move(page), MultiVector(rows, dims, std::move(data))});
    } catch (const Error& e) {
      throw Error(e.code(), where + ": " + e.what());
    }
  }
  if (reader.remaining() != 0) {
    throw Error(ErrorCode::kFormat, std::to_string(reader.remaining()) +
                                        " trailing bytes after " +
                                        std::to_string(count) + " entries");
  }
  return entries;
}

void write_embedding_file(const fs::path& path,
                          std::span<const PageEmbedding> entries,
                          Manifest manifest) {
  const fs::path tmp = temp_sibling(path);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
    }
    try {
      encode_embeddings(out, entries);
    } catch (...) {
      out.close();
      std::error_code ec;
      fs::remove(tmp, ec);
      throw;
    }
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

  if (manifest.created.empty()) manifest.created = utc_now_iso8601();
  if (!entries.empty()) {
    manifest.dims = static_cast<std::uint32_t>(entries.front().embedding.dims());
    const std::size_t rows = entries.front().embedding.rows();
    bool uniform = true;
    for (const auto& e : entries) uniform = uniform && e.embedding.rows() == rows;
    manifest.rows = uniform ? static_cast<std::uint32_t>(rows) : 0;
  }
  write_manifest(manifest_path(path), manifest);
}

std::vector<PageEmbedding> read_embedding_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIo, "cannot open " + path.string());
  }
  std::error_code ec;
  const auto size = fs::file_size(path, ec);
  if (ec) {
    throw Error(ErrorCode::kIo, "cannot stat " + path.string());
  }
  try {
    return decode_embeddings(in, size);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

void write_manifest(const fs::path& path, const Manifest& m) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  }
  out << "source_file=" << m.source_file << '\n'
      << "dpi=" << m.dpi << '\n'
      << "model_id=" << m.model_id << '\n'
      << "created=" << m.created << '\n'
      << "rows=" << m.rows << '\n'
      << "dims=" << m.dims << '\n';
  for (const auto& [k, v] : m.extra) out << k << '=' << v << '\n';
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

Manifest read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  Manifest m;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kFormat, path.string() + ":" +
                                          std::to_string(lineno) +
                                          ": expected key=value");
    }
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    try {
      if (key == "source_file") m.source_file = value;
      else if (key == "dpi") m.dpi = static_cast<std::uint32_t>(std::stoul(value));
      else if (key == "model_id") m.model_id = value;
      else if (key == "created") m.created = value;
      else if (key == "rows") m.rows = static_cast<std::uint32_t>(std::stoul(value));
      else if (key == "dims") m.dims = static_cast<std::uint32_t>(std::stoul(value));
      else m.extra[key] = value;
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::kFormat, path.string() + ":" +
                                          std::to_string(lineno) +
                                          ": bad numeric value for " + key);
    }
  }
  return m;
}

}  // namespace folio
