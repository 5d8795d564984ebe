#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "folio/embedding_file.hpp"
#include "folio/error.hpp"
#include "support/test_support.hpp"

namespace folio {
namespace {

using testing::TempDir;

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no folio::Error thrown";
  return ErrorCode::kIo;
}

std::string encode(const std::vector<PageEmbedding>& entries) {
  std::ostringstream out;
  encode_embeddings(out, entries);
  return out.str();
}

std::vector<PageEmbedding> decode(const std::string& bytes) {
  std::istringstream in(bytes);
  return decode_embeddings(in, bytes.size());
}

TEST(MultiVector, RejectsBadShapesAndNonFinite) {
  EXPECT_EQ(code_of([] { MultiVector(0, 3, {}); }), ErrorCode::kValidation);
  EXPECT_EQ(code_of([] { MultiVector(1, 0, {}); }), ErrorCode::kValidation);
  EXPECT_EQ(code_of([] { MultiVector(2, 2, {1, 2, 3}); }), ErrorCode::kValidation);
  const float nan = std::numeric_limits<float>::quiet_NaN();
  EXPECT_EQ(code_of([&] { MultiVector(1, 2, {1, nan}); }), ErrorCode::kValidation);
  const float inf = std::numeric_limits<float>::infinity();
  EXPECT_EQ(code_of([&] { MultiVector(1, 2, {inf, 0}); }), ErrorCode::kValidation);
}

TEST(PageRefTest, ValidationAndOrdering) {
  EXPECT_EQ(code_of([] { validate(PageRef{"", 1}); }), ErrorCode::kValidation);
  EXPECT_EQ(code_of([] { validate(PageRef{"v", 0}); }), ErrorCode::kValidation);
  EXPECT_NO_THROW(validate(PageRef{"v", 1}));
  EXPECT_LT((PageRef{"a", 9}), (PageRef{"b", 1}));
  EXPECT_LT((PageRef{"a", 2}), (PageRef{"a", 10}));
  EXPECT_EQ(to_string(PageRef{"os", 12}), "os/12");
}

TEST(EmbeddingFile, ZeroMatrixLayout) {
  std::vector<PageEmbedding> entries{{{"v", 1}, MultiVector(2, 3, std::vector<float>(6, 0.0f))}};
  const std::string bytes = encode(entries);
  // magic, version, count, then len|"v"|page|rows|dims, then 24 payload bytes.
  EXPECT_EQ(bytes.size(), 12u + 2 + 1 + 4 + 4 + 4 + 24);
  EXPECT_EQ(bytes.substr(0, 4), "MVE1");
  EXPECT_EQ(decode(bytes), entries);
}

TEST(EmbeddingFile, LittleEndianHeader) {
  std::vector<PageEmbedding> entries{{{"ab", 258}, MultiVector(1, 1, {1.0f})}};
  const std::string b = encode(entries);
  const auto u = [&](std::size_t i) { return static_cast<unsigned char>(b[i]); };
  EXPECT_EQ(u(4), 1);  // version
  EXPECT_EQ(u(8), 1);  // count
  EXPECT_EQ(u(12), 2);
  EXPECT_EQ(u(13), 0);
  EXPECT_EQ(u(16), 2);  // page 258 = 0x0102
  EXPECT_EQ(u(17), 1);
  // 1.0f = 0x3f800000
  EXPECT_EQ(u(b.size() - 1), 0x3f);
  EXPECT_EQ(u(b.size() - 2), 0x80);
}

TEST(EmbeddingFile, LargeRoundTripIsBitwise) {
  std::mt19937_64 gen(1);
  std::vector<PageEmbedding> entries;
  for (std::uint32_t p = 1; p <= 3; ++p) {
    entries.push_back({{"vol", p}, testing::random_matrix(gen, 1030, 128)});
  }
  // A negative zero must survive.
  std::vector<float> z(128, 0.0f);
  z[0] = -0.0f;
  entries.push_back({{"zero", 1}, MultiVector(1, 128, z)});

  TempDir dir;
  const auto path = dir / "pages.mve";
  write_embedding_file(path, entries, {.source_file = "book.pdf", .dpi = 300, .model_id = "m"});
  const auto back = read_embedding_file(path);
  ASSERT_EQ(back.size(), entries.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].page, entries[i].page);
    ASSERT_EQ(back[i].embedding.data().size(), entries[i].embedding.data().size());
    EXPECT_EQ(std::memcmp(back[i].embedding.data().data(), entries[i].embedding.data().data(),
                          entries[i].embedding.data().size_bytes()),
              0);
    EXPECT_TRUE(back[i].embedding.bitwise_equal(entries[i].embedding));
  }
  EXPECT_TRUE(std::signbit(back.back().embedding.data()[0]));

  const Manifest m = read_manifest(manifest_path(path));
  EXPECT_EQ(m.source_file, "book.pdf");
  EXPECT_EQ(m.dpi, 300u);
  EXPECT_EQ(m.model_id, "m");
  EXPECT_EQ(m.dims, 128u);
  EXPECT_EQ(m.rows, 0u);  // row counts differ (1030 vs 1)
  EXPECT_FALSE(m.created.empty());
}

TEST(EmbeddingFile, PreservesOrder) {
  std::vector<PageEmbedding> entries{{{"b", 2}, MultiVector(1, 2, {1, 2})},
                                     {{"a", 1}, MultiVector(1, 2, {3, 4})},
                                     {{"b", 1}, MultiVector(2, 2, {5, 6, 7, 8})}};
  EXPECT_EQ(decode(encode(entries)), entries);
}

TEST(EmbeddingFile, MixedDimsRejected) {
  std::vector<PageEmbedding> entries{{{"a", 1}, MultiVector(1, 128, std::vector<float>(128, 1))},
                                     {{"a", 2}, MultiVector(1, 64, std::vector<float>(64, 1))}};
  EXPECT_EQ(code_of([&] { encode(entries); }), ErrorCode::kDimensionMismatch);
  TempDir dir;
  EXPECT_EQ(code_of([&] { write_embedding_file(dir / "x.mve", entries); }),
            ErrorCode::kDimensionMismatch);
  EXPECT_FALSE(std::filesystem::exists(dir / "x.mve"));
}

TEST(EmbeddingFile, BadMagic) {
  std::vector<PageEmbedding> entries{{{"a", 1}, MultiVector(1, 2, {1, 2})}};
  std::string bytes = encode(entries);
  bytes.replace(0, 4, "XXXX");
  EXPECT_EQ(code_of([&] { decode(bytes); }), ErrorCode::kFormat);
}

TEST(EmbeddingFile, TrailingBytesRejected) {
  std::vector<PageEmbedding> entries{{{"a", 1}, MultiVector(1, 2, {1, 2})}};
  EXPECT_EQ(code_of([&] { decode(encode(entries) + "x"); }), ErrorCode::kFormat);
}

TEST(EmbeddingFile, TruncationNamesEntryIndex) {
  std::vector<PageEmbedding> entries;
  for (std::uint32_t p = 1; p <= 3; ++p) {
    entries.push_back({{"v", p}, MultiVector(4, 8, std::vector<float>(32, float(p)))});
  }
  const std::string bytes = encode(entries);
  // Each entry is 2 + 1 + 4 + 4 + 4 header bytes and 128 payload bytes.
  const std::size_t entry_bytes = 15 + 4 * 8 * 4;
  const std::size_t cut = 12 + 2 * entry_bytes + 15 + 50;  // inside entry 2's matrix
  try {
    decode(bytes.substr(0, cut));
    FAIL() << "expected truncation";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTruncation);
    EXPECT_NE(std::string(e.what()).find("entry 2"), std::string::npos) << e.what();
  }
  // Cut inside entry 0's header.
  EXPECT_EQ(code_of([&] { decode(bytes.substr(0, 14)); }), ErrorCode::kTruncation);

  TempDir dir;
  const auto path = dir / "t.mve";
  {
    std::ofstream out(path, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(cut));
  }
  EXPECT_EQ(code_of([&] { read_embedding_file(path); }), ErrorCode::kTruncation);
}

TEST(EmbeddingFile, NanPayloadRejected) {
  std::vector<PageEmbedding> entries{{{"a", 1}, MultiVector(1, 2, {1, 2})}};
  std::string bytes = encode(entries);
  const float nan = std::numeric_limits<float>::quiet_NaN();
  std::memcpy(bytes.data() + bytes.size() - 4, &nan, 4);
  EXPECT_EQ(code_of([&] { decode(bytes); }), ErrorCode::kValidation);
}

TEST(EmbeddingFile, MissingFileIsIoErrorWithPath) {
  try {
    read_embedding_file("/nonexistent/dir/pages.mve");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
    EXPECT_NE(std::string(e.what()).find("/nonexistent/dir/pages.mve"), std::string::npos);
  }
}

TEST(EmbeddingFile, EmptyFileRoundTrips) {
  TempDir dir;
  write_embedding_file(dir / "e.mve", {});
  EXPECT_TRUE(read_embedding_file(dir / "e.mve").empty());
}

TEST(Manifest, ExtraKeysRoundTrip) {
  TempDir dir;
  Manifest m;
  m.source_file = "a.pdf";
  m.extra["renderer"] = "pdftoppm";
  write_manifest(dir / "m", m);
  const Manifest back = read_manifest(dir / "m");
  EXPECT_EQ(back.extra.at("renderer"), "pdftoppm");
  EXPECT_EQ(back.source_file, "a.pdf");
}

}  // namespace
}  // namespace folio
