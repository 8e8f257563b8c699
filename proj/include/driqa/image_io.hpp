#pragma once

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "driqa/errors.hpp"
#include "driqa/image.hpp"

namespace driqa {

namespace io_detail {

inline std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec))
    throw IoError("cannot open '" + path.string() + "': no such file");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed for '" + path.string() + "'");
  return bytes;
}

inline void write_file(const std::filesystem::path& path, const void* data, std::size_t n) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

inline std::string lower_ext(const std::filesystem::path& p) {
  std::string e = p.extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
  return e;
}

inline RgbImage decode_png(const std::vector<std::uint8_t>& bytes, const std::string& name) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size()))
    throw FormatError("corrupt PNG '" + name + "': " + image.message);
  if (image.format & PNG_FORMAT_FLAG_LINEAR) {
    png_image_free(&image);
    throw FormatError("16-bit PNG not supported: '" + name + "'");
  }
  const bool color = image.format & PNG_FORMAT_FLAG_COLOR;
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr))
    throw FormatError("corrupt PNG '" + name + "': " + image.message);
  RgbImage out{static_cast<int>(image.width), static_cast<int>(image.height), {}};
  if (color) {
    out.data = std::move(buf);
  } else {
    out.data.resize(3 * buf.size());
    for (std::size_t i = 0; i < buf.size(); ++i)
      out.data[3 * i] = out.data[3 * i + 1] = out.data[3 * i + 2] = buf[i];
  }
  return out;
}

inline RgbImage decode_pnm(const std::vector<std::uint8_t>& bytes, const std::string& name) {
  std::size_t pos = 2;
  const bool rgb = bytes[1] == '6';
  auto next_int = [&]() -> long {
    for (;;) {
      while (pos < bytes.size() && std::isspace(bytes[pos])) ++pos;
      if (pos < bytes.size() && bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
        continue;
      }
      break;
    }
    if (pos >= bytes.size() || !std::isdigit(bytes[pos]))
      throw FormatError("malformed PNM header in '" + name + "'");
    long v = 0;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) {
      v = v * 10 + (bytes[pos++] - '0');
      if (v > (1L << 24)) throw FormatError("PNM dimension too large in '" + name + "'");
    }
    return v;
  };
  const long w = next_int(), h = next_int(), maxval = next_int();
  if (w <= 0 || h <= 0) throw FormatError("PNM with empty dimensions: '" + name + "'");
  if (maxval != 255) throw FormatError("only maxval 255 PNM is supported: '" + name + "'");
  if (pos >= bytes.size() || !std::isspace(bytes[pos]))
    throw FormatError("malformed PNM header in '" + name + "'");
  ++pos;
  const std::size_t n = static_cast<std::size_t>(w) * h * (rgb ? 3 : 1);
  if (bytes.size() - pos < n) throw FormatError("truncated PNM '" + name + "'");
  RgbImage out{static_cast<int>(w), static_cast<int>(h), {}};
  if (rgb) {
    out.data.assign(bytes.begin() + pos, bytes.begin() + pos + n);
  } else {
    out.data.resize(3 * n);
    for (std::size_t i = 0; i < n; ++i)
      out.data[3 * i] = out.data[3 * i + 1] = out.data[3 * i + 2] = bytes[pos + i];
  }
  return out;
}

inline bool is_gray(const RgbImage& img) {
  for (std::size_t i = 0; i < img.data.size(); i += 3)
    if (img.data[i] != img.data[i + 1] || img.data[i] != img.data[i + 2]) return false;
  return true;
}

}  // namespace io_detail

/// Reads PNG (8-bit gray/RGB) or binary PGM/PPM. Grayscale sources come back with R=G=B.
inline RgbImage load_image(const std::filesystem::path& path) {
  const auto bytes = io_detail::read_file(path);
  const std::string name = path.string();
  static constexpr std::uint8_t kPngSig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (bytes.size() >= 8 && std::equal(kPngSig, kPngSig + 8, bytes.begin()))
    return io_detail::decode_png(bytes, name);
  if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '5' || bytes[1] == '6'))
    return io_detail::decode_pnm(bytes, name);
  throw FormatError("unsupported image format: '" + name + "'");
}

/// Writes by extension: .png, .pgm (gray; RGB input must have R=G=B), .ppm.
inline void save_image(const std::filesystem::path& path, const RgbImage& img) {
  if (!img.valid()) throw DomainError("save_image: malformed RgbImage");
  const std::string ext = io_detail::lower_ext(path);
  if (ext == ".png") {
    const bool gray = io_detail::is_gray(img);
    std::vector<std::uint8_t> pix;
    if (gray) {
      pix.resize(img.data.size() / 3);
      for (std::size_t i = 0; i < pix.size(); ++i) pix[i] = img.data[3 * i];
    }
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(img.width);
    image.height = static_cast<png_uint_32>(img.height);
    image.format = gray ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
    png_alloc_size_t size = 0;
    const void* src = gray ? pix.data() : img.data.data();
    if (!png_image_write_to_memory(&image, nullptr, &size, 0, src, 0, nullptr))
      throw FormatError(std::string("PNG encode failed: ") + image.message);
    std::vector<std::uint8_t> out(size);
    if (!png_image_write_to_memory(&image, out.data(), &size, 0, src, 0, nullptr))
      throw FormatError(std::string("PNG encode failed: ") + image.message);
    io_detail::write_file(path, out.data(), size);
  } else if (ext == ".pgm" || ext == ".ppm") {
    const bool pgm = ext == ".pgm";
    if (pgm && !io_detail::is_gray(img))
      throw DomainError("save_image: PGM output requires a grayscale image");
    std::string header = std::string(pgm ? "P5\n" : "P6\n") + std::to_string(img.width) + " " +
                         std::to_string(img.height) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    if (pgm) {
      for (std::size_t i = 0; i < img.data.size(); i += 3) out.push_back(img.data[i]);
    } else {
      out.insert(out.end(), img.data.begin(), img.data.end());
    }
    io_detail::write_file(path, out.data(), out.size());
  } else {
    throw FormatError("unsupported output extension '" + ext + "'");
  }
}

/// Saves a plane as 8-bit grayscale (clamped, rounded half away from zero).
inline void save_plane(const std::filesystem::path& path, const ImagePlane& plane) {
  save_image(path, to_rgb(plane));
}

/// load_image followed by to_luminance.
inline ImagePlane load_plane(const std::filesystem::path& path) {
  return to_luminance(load_image(path));
}

}  // namespace driqa
