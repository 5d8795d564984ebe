#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "folio/page_image.hpp"

namespace folio {

// External PDF renderer. The command is invoked as
//   <command...> -r <dpi> -png <pdf> <output-prefix>
// and must write <output-prefix>-<n>.png per page (the pdftoppm contract;
// tools/pdfrender.py implements the same interface).
struct RendererConfig {
  std::vector<std::string> command = {"pdftoppm"};
};

// One PageImage per page, numbered from 1, volume id taken from the file
// stem. Throws kValidation for dpi outside [72, 600], kIngestion when the
// renderer fails or is missing, kEmptyVolume when no pages come back.
std::vector<PageImage> rasterize_volume(const std::filesystem::path& pdf,
                                        std::uint32_t dpi = 300,
                                        const RendererConfig& renderer = {});

}  // namespace folio
