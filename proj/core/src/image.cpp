#include "stpilot/image.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>

#include <png.h>

#include "stpilot/error.hpp"

namespace stpilot {
namespace {

struct WriteBuffer {
  std::vector<std::uint8_t>* out;
};

void png_write_to_vector(png_structp png, png_bytep data, png_size_t length) {
  auto* buf = static_cast<WriteBuffer*>(png_get_io_ptr(png));
  buf->out->insert(buf->out->end(), data, data + length);
}

void png_flush_noop(png_structp) {}

struct ReadBuffer {
  const std::vector<std::uint8_t>* in;
  std::size_t offset;
};

void png_read_from_vector(png_structp png, png_bytep data, png_size_t length) {
  auto* buf = static_cast<ReadBuffer*>(png_get_io_ptr(png));
  if (buf->offset + length > buf->in->size()) png_error(png, "truncated PNG data");
  std::memcpy(data, buf->in->data() + buf->offset, length);
  buf->offset += length;
}

thread_local char g_png_error[256];

// libpng reports errors by longjmp; record the message first.
void png_record_error(png_structp png, png_const_charp msg) {
  std::snprintf(g_png_error, sizeof(g_png_error), "%s", msg);
  png_longjmp(png, 1);
}

void png_warn_silent(png_structp, png_const_charp) {}

}  // namespace

Image::Image(int w, int h)
    : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 3, 0) {
  require(w > 0 && h > 0, ErrorKind::InvalidArgument, "image dimensions must be positive");
}

ImageF::ImageF(int w, int h, int c, double fill)
    : width(w), height(h), channels(c),
      samples(static_cast<std::size_t>(w) * h * c, fill) {
  require(w > 0 && h > 0 && c > 0, ErrorKind::InvalidArgument, "image dimensions must be positive");
}

ImageF::ImageF(const Image& img)
    : width(img.width), height(img.height), channels(3),
      samples(img.pixels.begin(), img.pixels.end()) {}

std::vector<std::uint8_t> encode_png(const Image& img) {
  require(img.width > 0 && img.height > 0 &&
              img.pixels.size() == static_cast<std::size_t>(img.width) * img.height * 3,
          ErrorKind::InvalidArgument, "image buffer does not match its dimensions");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_record_error, png_warn_silent);
  require(png != nullptr, ErrorKind::Io, "png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  std::vector<std::uint8_t> out;
  WriteBuffer buf{&out};
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fail(ErrorKind::Io, std::string("PNG encode: ") + g_png_error);
  }
  png_set_write_fn(png, &buf, png_write_to_vector, png_flush_noop);
  png_set_IHDR(png, info, static_cast<png_uint_32>(img.width), static_cast<png_uint_32>(img.height),
               8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_set_compression_level(png, 6);
  png_write_info(png, info);
  for (int y = 0; y < img.height; ++y) {
    png_write_row(png, const_cast<png_bytep>(img.at(0, y)));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

Image decode_png(const std::vector<std::uint8_t>& bytes) {
  require(bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0, ErrorKind::Io,
          "not a PNG file");
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_record_error, png_warn_silent);
  require(png != nullptr, ErrorKind::Io, "png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  ReadBuffer buf{&bytes, 0};
  Image img;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(ErrorKind::Io, std::string("PNG decode: ") + g_png_error);
  }
  png_set_read_fn(png, &buf, png_read_from_vector);
  png_read_info(png, info);
  const auto w = png_get_image_width(png, info);
  const auto h = png_get_image_height(png, info);
  const int color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (depth == 16) png_set_strip_16(png);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_gray_to_rgb(png);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  png_read_update_info(png, info);
  img.width = static_cast<int>(w);
  img.height = static_cast<int>(h);
  img.pixels.assign(static_cast<std::size_t>(w) * h * 3, 0);
  for (int y = 0; y < img.height; ++y) png_read_row(png, img.at(0, y), nullptr);
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorKind::Io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.good(), ErrorKind::Io, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  require(out.good(), ErrorKind::Io, "write failed for " + path.string());
}

void write_png(const std::filesystem::path& path, const Image& img) {
  write_file_bytes(path, encode_png(img));
}

Image read_png(const std::filesystem::path& path) {
  try {
    return decode_png(read_file_bytes(path));
  } catch (const Error& e) {
    fail(e.kind(), path.string() + ": " + e.what());
  }
}

}  // namespace stpilot
