#include "isb/image_io.hpp"

#include <png.h>

#include <cstring>
#include <vector>

#include "isb/error.hpp"

namespace isb {

Frame read_png(const std::filesystem::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    fail(ErrorCode::UnreadableSource, "cannot read PNG " + path.string() + ": " + image.message);
  }
  image.format = PNG_FORMAT_RGB;
  std::vector<png_byte> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    std::string msg = image.message;
    png_image_free(&image);
    fail(ErrorCode::UnreadableSource, "cannot decode PNG " + path.string() + ": " + msg);
  }
  const int h = static_cast<int>(image.height), w = static_cast<int>(image.width);
  Frame frame(h, w, 3);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c) frame.at(y, x, c) = buffer[(static_cast<std::size_t>(y) * w + x) * 3 + c] / 255.0;
  return frame;
}

void write_png(const std::filesystem::path& path, const Frame& frame) {
  if (frame.channels() != 1 && frame.channels() != 3) {
    fail(ErrorCode::IoError, "write_png supports 1 or 3 channels, got " + std::to_string(frame.channels()));
  }
  const int h = frame.height(), w = frame.width(), ch = frame.channels();
  std::vector<png_byte> buffer(static_cast<std::size_t>(h) * w * ch);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < ch; ++c) buffer[(static_cast<std::size_t>(y) * w + x) * ch + c] = to_byte(frame.at(y, x, c));

  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(w);
  image.height = static_cast<png_uint_32>(h);
  image.format = ch == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  if (!png_image_write_to_file(&image, path.c_str(), 0, buffer.data(), 0, nullptr)) {
    fail(ErrorCode::IoError, "cannot write PNG " + path.string() + ": " + image.message);
  }
}

}  // namespace isb
