#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace stpilot {

/// Interleaved 8-bit RGB image, row-major from the top-left pixel.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  ///< width * height * 3

  Image() = default;
  Image(int w, int h);

  std::uint8_t* at(int x, int y) { return &pixels[(static_cast<std::size_t>(y) * width + x) * 3]; }
  const std::uint8_t* at(int x, int y) const {
    return &pixels[(static_cast<std::size_t>(y) * width + x) * 3];
  }

  bool operator==(const Image&) const = default;
};

using FrameSequence = std::vector<Image>;

/// Real-valued image used by the quality metrics.
struct ImageF {
  int width = 0;
  int height = 0;
  int channels = 3;
  std::vector<double> samples;  ///< interleaved, width * height * channels

  ImageF() = default;
  ImageF(int w, int h, int c, double fill = 0.0);
  explicit ImageF(const Image& img);

  double& at(int x, int y, int c) {
    return samples[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  double at(int x, int y, int c) const {
    return samples[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
};

/// Deterministic 8-bit RGB PNG encoding (no timestamps or text chunks).
std::vector<std::uint8_t> encode_png(const Image& img);
Image decode_png(const std::vector<std::uint8_t>& bytes);

void write_png(const std::filesystem::path& path, const Image& img);
Image read_png(const std::filesystem::path& path);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);

}  // namespace stpilot
