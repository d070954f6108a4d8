#pragma once

#include <filesystem>

#include "isb/frame.hpp"

namespace isb {

/// Reads any PNG into an RGB frame in [0, 1]. Gray inputs are replicated to
/// three channels; alpha is dropped.
Frame read_png(const std::filesystem::path& path);

/// Writes an 8-bit RGB (or gray, for 1-channel frames) PNG. Values are clamped
/// and rounded with to_byte().
void write_png(const std::filesystem::path& path, const Frame& frame);

}  // namespace isb
