#pragma once

// Raster export of fields, labels and masks as PNG or binary PGM/PPM.
// Images put maximum y at the top, so row 0 of a grid is the bottom row.

#include <png.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "ldbc/errors.hpp"
#include "ldbc/io.hpp"
#include "ldbc/model.hpp"

namespace ldbc::render {

using Rgb = std::array<std::uint8_t, 3>;

inline constexpr Rgb kWhite{255, 255, 255};
inline constexpr Rgb kBlack{0, 0, 0};
inline constexpr Rgb kBlue{40, 70, 220};
inline constexpr Rgb kGreen{60, 180, 75};
inline constexpr Rgb kDarkGreen{0, 90, 30};
inline constexpr Rgb kRed{220, 30, 30};
inline constexpr Rgb kHighlight{255, 140, 0};

struct Image {
  std::size_t width = 0;
  std::size_t height = 0;
  bool gray = false;
  std::vector<std::uint8_t> pixels;  // row-major from the top, 1 or 3 bytes each

  Image(std::size_t w, std::size_t h, bool grayscale)
      : width(w), height(h), gray(grayscale), pixels(w * h * (grayscale ? 1 : 3), 255) {}

  // Grid pixel (i, j) with i counted from minimum y.
  void set(std::size_t i, std::size_t j, Rgb c) {
    const std::size_t row = height - 1 - i;
    if (gray) {
      pixels[row * width + j] = c[0];
    } else {
      std::copy(c.begin(), c.end(), pixels.begin() + static_cast<std::ptrdiff_t>(3 * (row * width + j)));
    }
  }
};

inline Rgb label_color(Label l) {
  switch (l) {
    case Label::WeaklyStable: return kWhite;
    case Label::Unstable: return kBlue;
    case Label::Crash: return kGreen;
    case Label::InsideBody: return kDarkGreen;
    case Label::Error: return kRed;
  }
  return kRed;
}

// Linear-interpolated percentile of the finite values; NaN if there are none.
inline double percentile(std::vector<double> v, double q) {
  std::erase_if(v, [](double x) { return !std::isfinite(x); });
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const double pos = q / 100.0 * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

// Grayscale with the display range clipped to [lo_pct, hi_pct] percentiles;
// non-finite pixels are drawn black.
inline Image field_image(const ScalarField& field, double lo_pct = 2.0, double hi_pct = 98.0) {
  const std::size_t n = field.spec.n;
  const std::vector<double> values(field.values.begin(), field.values.end());
  const double lo = percentile(values, lo_pct);
  const double hi = percentile(values, hi_pct);
  Image img(n, n, true);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double v = field.values(i, j);
      double t = 0.0;
      if (std::isfinite(v) && hi > lo) t = std::clamp((v - lo) / (hi - lo), 0.0, 1.0);
      const auto g = static_cast<std::uint8_t>(std::lround(255.0 * t));
      img.set(i, j, {g, g, g});
    }
  }
  return img;
}

inline Image labels_image(const LabelField& labels) {
  const std::size_t n = labels.spec.n;
  Image img(n, n, false);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) img.set(i, j, label_color(labels.labels(i, j)));
  return img;
}

inline Image mask_image(const Mask& mask, Rgb on) {
  const std::size_t n = mask.n();
  Image img(n, n, false);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) img.set(i, j, mask(i, j) ? on : kWhite);
  return img;
}

// Paints the set pixels of `mask` over an existing image.
inline Image overlay(Image img, const Mask& mask, Rgb color) {
  if (mask.n() != img.width || mask.n() != img.height) throw ShapeError("overlay: size mismatch");
  if (img.gray) {
    Image rgb(img.width, img.height, false);
    for (std::size_t k = 0; k < img.pixels.size(); ++k)
      for (int c = 0; c < 3; ++c) rgb.pixels[3 * k + static_cast<std::size_t>(c)] = img.pixels[k];
    img = std::move(rgb);
  }
  const std::size_t n = mask.n();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (mask(i, j)) img.set(i, j, color);
  return img;
}

inline std::string encode_pnm(const Image& img) {
  std::string out = std::string(img.gray ? "P5" : "P6") + "\n" + std::to_string(img.width) + " " +
                    std::to_string(img.height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(img.pixels.data()), img.pixels.size());
  return out;
}

inline std::string encode_png(const Image& img) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("png: cannot create writer");
  png_infop info = png_create_info_struct(png);
  std::string out;
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, info ? &info : nullptr);
    throw IoError("png: encoding failed");
  }
  png_set_write_fn(
      png, &out,
      [](png_structp p, png_bytep data, png_size_t len) {
        static_cast<std::string*>(png_get_io_ptr(p))->append(reinterpret_cast<const char*>(data), len);
      },
      nullptr);
  png_set_IHDR(png, info, static_cast<png_uint_32>(img.width), static_cast<png_uint_32>(img.height), 8,
               img.gray ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const std::size_t stride = img.width * (img.gray ? 1 : 3);
  for (std::size_t r = 0; r < img.height; ++r)
    png_write_row(png, const_cast<png_bytep>(img.pixels.data() + r * stride));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

// PNG for ".png", PGM/PPM otherwise.
inline void write_image(const std::filesystem::path& path, const Image& img) {
  const bool png = path.extension() == ".png";
  io::write_atomic(path, png ? encode_png(img) : encode_pnm(img));
}

}  // namespace ldbc::render
