#pragma once

// Binary embedding file ("MVE1"), all integers and floats little-endian:
//
//   magic "MVE1" | version u32 | entry count u32
//   per entry: volume_id length u16 | volume_id UTF-8 bytes | page_number u32
//              | rows u32 | dims u32 | rows*dims f32, row-major
//
// Each file is accompanied by a "<file>.manifest" sidecar of key=value lines.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "folio/embedding.hpp"

namespace folio {

inline constexpr char kEmbeddingMagic[4] = {'M', 'V', 'E', '1'};
inline constexpr std::uint32_t kEmbeddingFormatVersion = 1;

struct Manifest {
  std::string source_file;
  std::uint32_t dpi = 0;
  std::string model_id;
  std::string created;  // ISO-8601 UTC; filled on write when empty
  // Shape actually returned by the embedder (0 when the file is empty or
  // pages have differing row counts).
  std::uint32_t rows = 0;
  std::uint32_t dims = 0;
  std::map<std::string, std::string> extra;
};

std::filesystem::path manifest_path(const std::filesystem::path& embedding_file);

// Serializes entries in order. Throws kDimensionMismatch if entries disagree
// on dims, kValidation for an invalid PageRef.
void encode_embeddings(std::ostream& out, std::span<const PageEmbedding> entries);

// Parses exactly `byte_length` bytes. Throws kFormat (bad magic, version,
// trailing bytes), kTruncation (declared sizes exceed the remaining bytes;
// the message names the entry index) or kValidation (non-finite payload).
// Nothing is returned unless the whole stream validates.
std::vector<PageEmbedding> decode_embeddings(std::istream& in,
                                             std::uint64_t byte_length);

// Writes the embedding file and its manifest. The file is written to a
// temporary sibling and renamed into place. Throws kIo naming the path.
void write_embedding_file(const std::filesystem::path& path,
                          std::span<const PageEmbedding> entries,
                          Manifest manifest = {});

std::vector<PageEmbedding> read_embedding_file(const std::filesystem::path& path);

void write_manifest(const std::filesystem::path& path, const Manifest& manifest);
Manifest read_manifest(const std::filesystem::path& path);

}  // namespace folio
