#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace aiml {

struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major

  std::uint8_t at(int x, int y) const { return pixels[y * width + x]; }
  std::uint8_t& at(int x, int y) { return pixels[y * width + x]; }
  static GrayImage filled(int width, int height, std::uint8_t value);
};

struct IdxImages {
  int count = 0;
  int rows = 0;
  int cols = 0;
  std::vector<std::uint8_t> data;  // count * rows * cols bytes

  GrayImage image(int index) const;
};

struct IdxLabels {
  std::vector<std::uint8_t> values;
};

/// Parsed IDX payload: exactly one of images/labels is set, keyed on the
/// 4-byte big-endian magic (2051 images, 2049 labels).
struct IdxContent {
  std::optional<IdxImages> images;
  std::optional<IdxLabels> labels;
};

/// Byte-exact IDX parser. Throws ParseError (with the byte offset) on a bad
/// magic, a truncated stream, or a count/size mismatch.
IdxContent parse_idx(std::span<const std::uint8_t> bytes);

/// Reads a file, transparently inflating gzip content (0x1f 0x8b prefix).
std::vector<std::uint8_t> read_idx_file(const std::string& path);

/// Bilinear resize with half-pixel-center alignment; border samples clamp to
/// the edge, values round half away from zero.
GrayImage resize_bilinear(const GrayImage& img, int out_width, int out_height);

GrayImage crop(const GrayImage& img, int dx, int dy, int width, int height);

/// Rotation about the image center (positive degrees counterclockwise) with
/// bilinear sampling and zero padding outside the source.
GrayImage rotate_bilinear(const GrayImage& img, double degrees);

/// Resize to a x a with a drawn from {29, 30, 31, 32}, then random-crop back
/// to 28 x 28; deterministic per seed.
GrayImage augment_resize_crop(const GrayImage& img, std::uint64_t seed);

/// Rotate by b drawn uniformly from [-10, 10] degrees, then the same
/// resize-and-crop as augment_resize_crop. The rotation angle draws from its
/// own substream, so a zero angle reproduces the crop-only pipeline byte for
/// byte under the same seed.
GrayImage augment_rotate_resize_crop(const GrayImage& img, std::uint64_t seed);

/// Row-major flatten scaled into [0, 1] by 1/255.
Eigen::VectorXd flatten_normalize(const GrayImage& img);

}  // namespace aiml
