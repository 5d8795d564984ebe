#include <algorithm>
#include <cstring>
#include <fstream>
#include <iterator>

#include "folio/error.hpp"
#include "folio/page_image.hpp"

namespace folio {

namespace fs = std::filesystem;

namespace {

constexpr std::uint8_t kPngSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

std::uint32_t be32(const std::uint8_t* p) {
  return (static_cast<std::uint32_t>(p[0]) << 24) |
         (static_cast<std::uint32_t>(p[1]) << 16) |
         (static_cast<std::uint32_t>(p[2]) << 8) | p[3];
}

}  // namespace

PngInfo inspect_png(std::span<const std::uint8_t> bytes) {
  // signature + IHDR chunk (4 len + 4 type + 13 data + 4 crc) + IEND chunk
  if (bytes.size() < 8 + 25 + 12) {
    throw Error(ErrorCode::kValidation, "PNG payload too short");
  }
  if (std::memcmp(bytes.data(), kPngSignature, 8) != 0) {
    throw Error(ErrorCode::kValidation, "missing PNG signature");
  }
  const std::uint8_t* ihdr = bytes.data() + 8;
  if (be32(ihdr) != 13 || std::memcmp(ihdr + 4, "IHDR", 4) != 0) {
    throw Error(ErrorCode::kValidation, "PNG does not start with IHDR");
  }
  const std::uint8_t* iend = bytes.data() + bytes.size() - 12;
  if (be32(iend) != 0 || std::memcmp(iend + 4, "IEND", 4) != 0) {
    throw Error(ErrorCode::kValidation, "PNG does not end with IEND");
  }
  PngInfo info{be32(ihdr + 8), be32(ihdr + 12)};
  if (info.width == 0 || info.height == 0) {
    throw Error(ErrorCode::kValidation, "PNG has zero width or height");
  }
  return info;
}

fs::path page_image_path(const fs::path& root, const PageRef& page) {
  return root / page.volume_id / (std::to_string(page.page_number) + ".png");
}

std::vector<std::uint8_t> read_file_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_page_images(const fs::path& root, std::span<const PageImage> images) {
  for (const auto& image : images) {
    const fs::path path = page_image_path(root, image.page);
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(image.png.data()),
              static_cast<std::streamsize>(image.png.size()));
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  }
}

std::vector<PageImage> read_page_images(const fs::path& root, std::uint32_t dpi) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) {
    throw Error(ErrorCode::kIo, root.string() + " is not a directory");
  }
  std::vector<PageImage> images;
  for (const auto& volume : fs::directory_iterator(root)) {
    if (!volume.is_directory()) continue;
    for (const auto& file : fs::directory_iterator(volume.path())) {
      if (file.path().extension() != ".png") continue;
      const std::string stem = file.path().stem().string();
      if (stem.empty() || !std::all_of(stem.begin(), stem.end(), ::isdigit)) continue;
      PageImage image;
      image.page = {volume.path().filename().string(),
                    static_cast<std::uint32_t>(std::stoul(stem))};
      image.png = read_file_bytes(file.path());
      image.dpi = dpi;
      validate(image.page);
      try {
        inspect_png(image.png);
      } catch (const Error& e) {
        throw Error(e.code(), file.path().string() + ": " + e.what());
      }
      images.push_back(std::move(image));
    }
  }
  std::sort(images.begin(), images.end(),
            [](const PageImage& a, const PageImage& b) { return a.page < b.page; });
  return images;
}

}  // namespace folio
