#pragma once

#include <optional>
#include <string>

#include "uiground/geometry.hpp"

namespace uiground::image {

/// Raw file contents; throws DataError when unreadable.
std::string read_file(const std::string& path);

struct Size {
    int width = 0;
    int height = 0;
};

/// Decodes just enough to report dimensions; nullopt for non-images.
std::optional<Size> dimensions(const std::string& encoded);

/// PNG of the element region grown by `context` (normalized) on each side.
std::string crop_png(const std::string& encoded, const Box& element, double context = 0.02);

/// PNG of the full screenshot with the element outlined.
std::string mark_png(const std::string& encoded, const Box& element);

/// MIME type guessed from the leading magic bytes.
std::string mime_type(const std::string& encoded);

}  // namespace uiground::image
