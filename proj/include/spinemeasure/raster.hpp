#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "spinemeasure/errors.hpp"

namespace spine {

// Binary segmentation mask. Pixels are stored row-major, one byte per
// pixel, strictly 0 (background) or 1 (foreground). Image frame: origin
// top-left, y grows downward. Immutable by convention after construction.
struct BinaryMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  static BinaryMask filled(int w, int h, std::uint8_t value = 0);

  bool in_bounds(int x, int y) const {
    return x >= 0 && x < width && y >= 0 && y < height;
  }
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * width + x;
  }
  std::uint8_t at(int x, int y) const { return pixels[index(x, y)]; }
  void set(int x, int y, std::uint8_t v) { pixels[index(x, y)] = v; }

  bool operator==(const BinaryMask&) const = default;
};

// Sub-pixel coordinate in the image frame (y downward). Geometry that
// needs a math frame (y upward) converts explicitly.
struct Point {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Point&) const = default;
};

// Decodes a P5 PGM or an 8-bit grayscale PNG and binarizes it: a pixel is
// foreground iff its intensity >= threshold.
BinaryMask load_mask(std::span<const std::uint8_t> bytes, int threshold = 128);
BinaryMask load_mask_file(const std::string& path, int threshold = 128);

// Encodes as binary P5 PGM, foreground = 255, background = 0.
std::vector<std::uint8_t> save_mask(const BinaryMask& mask);
void save_mask_file(const BinaryMask& mask, const std::string& path);

std::uint64_t foreground_count(const BinaryMask& mask);

// Internal entry point for the PNG decoder (8-bit grayscale only).
// Returns raw intensities; throws SpineError on malformed/unsupported data.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> intensity;
};
GrayImage decode_png_gray8(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> read_file_bytes(const std::string& path);
void write_file_bytes(const std::string& path,
                      std::span<const std::uint8_t> bytes);

}  // namespace spine
