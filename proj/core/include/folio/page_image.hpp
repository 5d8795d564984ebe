#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "folio/embedding.hpp"

namespace folio {

struct PageImage {
  PageRef page;
  std::vector<std::uint8_t> png;  // encoded PNG bytes
  std::uint32_t dpi = 300;
};

struct PngInfo {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
};

// Checks the PNG signature, a leading IHDR chunk and a trailing IEND chunk.
// Throws Error(kValidation) otherwise.
PngInfo inspect_png(std::span<const std::uint8_t> bytes);

// Page images on disk live at <root>/<volume_id>/<page_number>.png.
std::filesystem::path page_image_path(const std::filesystem::path& root,
                                      const PageRef& page);
void write_page_images(const std::filesystem::path& root,
                       std::span<const PageImage> images);
// Loads every <volume>/<n>.png below root, ordered by PageRef.
std::vector<PageImage> read_page_images(const std::filesystem::path& root,
                                        std::uint32_t dpi = 300);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);

}  // namespace folio
