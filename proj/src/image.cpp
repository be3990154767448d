#include "aiml/image.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numbers>

#include "aiml/errors.hpp"
#include "aiml/rng.hpp"

namespace aiml {

namespace {

enum : std::uint64_t { kTagRotate = 21, kTagResize = 22, kTagCropX = 23, kTagCropY = 24 };

constexpr std::uint32_t kMagicImages = 2051;
constexpr std::uint32_t kMagicLabels = 2049;

std::uint32_t read_be32(std::span<const std::uint8_t> bytes, std::size_t offset) {
  if (offset + 4 > bytes.size()) {
    throw ParseError("idx: truncated stream at offset " + std::to_string(offset));
  }
  return (static_cast<std::uint32_t>(bytes[offset]) << 24) |
         (static_cast<std::uint32_t>(bytes[offset + 1]) << 16) |
         (static_cast<std::uint32_t>(bytes[offset + 2]) << 8) |
         static_cast<std::uint32_t>(bytes[offset + 3]);
}

std::uint8_t round_to_byte(double v) {
  // half away from zero, clamped to the byte range
  const double r = std::floor(std::abs(v) + 0.5) * (v < 0.0 ? -1.0 : 1.0);
  if (r <= 0.0) return 0;
  if (r >= 255.0) return 255;
  return static_cast<std::uint8_t>(r);
}

// Bilinear sample at source coordinates; outside pixels contribute `pad`
// (or clamp to the edge when `pad` is negative).
double sample_bilinear(const GrayImage& img, double sx, double sy, double pad) {
  const int x0f = static_cast<int>(std::floor(sx));
  const int y0f = static_cast<int>(std::floor(sy));
  const double fx = sx - x0f;
  const double fy = sy - y0f;
  auto fetch = [&](int x, int y) -> double {
    if (x >= 0 && x < img.width && y >= 0 && y < img.height) {
      return img.at(x, y);
    }
    if (pad >= 0.0) return pad;
    const int cx = std::min(std::max(x, 0), img.width - 1);
    const int cy = std::min(std::max(y, 0), img.height - 1);
    return img.at(cx, cy);
  };
  const double top = (1.0 - fx) * fetch(x0f, y0f) + fx * fetch(x0f + 1, y0f);
  const double bot = (1.0 - fx) * fetch(x0f, y0f + 1) + fx * fetch(x0f + 1, y0f + 1);
  return (1.0 - fy) * top + fy * bot;
}

}  // namespace

GrayImage GrayImage::filled(int width, int height, std::uint8_t value) {
  GrayImage img;
  img.width = width;
  img.height = height;
  img.pixels.assign(static_cast<std::size_t>(width) * height, value);
  return img;
}

GrayImage IdxImages::image(int index) const {
  GrayImage img;
  img.width = cols;
  img.height = rows;
  const std::size_t stride = static_cast<std::size_t>(rows) * cols;
  img.pixels.assign(data.begin() + index * stride,
                    data.begin() + (index + 1) * stride);
  return img;
}

IdxContent parse_idx(std::span<const std::uint8_t> bytes) {
  const std::uint32_t magic = read_be32(bytes, 0);
  IdxContent out;
  if (magic == kMagicImages) {
    IdxImages images;
    images.count = static_cast<int>(read_be32(bytes, 4));
    images.rows = static_cast<int>(read_be32(bytes, 8));
    images.cols = static_cast<int>(read_be32(bytes, 12));
    const std::size_t expected =
        16 + static_cast<std::size_t>(images.count) * images.rows * images.cols;
    if (bytes.size() != expected) {
      throw ParseError("idx: image payload is " + std::to_string(bytes.size()) +
                       " bytes, header implies " + std::to_string(expected));
    }
    images.data.assign(bytes.begin() + 16, bytes.end());
    out.images = std::move(images);
  } else if (magic == kMagicLabels) {
    IdxLabels labels;
    const std::size_t count = read_be32(bytes, 4);
    if (bytes.size() != 8 + count) {
      throw ParseError("idx: label payload is " + std::to_string(bytes.size()) +
                       " bytes, header implies " + std::to_string(8 + count));
    }
    labels.values.assign(bytes.begin() + 8, bytes.end());
    out.labels = std::move(labels);
  } else {
    throw ParseError("idx: bad magic " + std::to_string(magic) +
                     " at offset 0 (expected 2051 or 2049)");
  }
  return out;
}

std::vector<std::uint8_t> read_idx_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::uint8_t> raw((std::istreambuf_iterator<char>(in)),
                                std::istreambuf_iterator<char>());
  if (raw.size() >= 2 && raw[0] == 0x1f && raw[1] == 0x8b) {
    z_stream zs{};
    if (inflateInit2(&zs, 15 + 16) != Z_OK) {
      throw ParseError("gzip: inflateInit failed for " + path);
    }
    std::vector<std::uint8_t> out;
    std::vector<std::uint8_t> buf(1 << 16);
    zs.next_in = raw.data();
    zs.avail_in = static_cast<uInt>(raw.size());
    int rc = Z_OK;
    while (rc != Z_STREAM_END) {
      zs.next_out = buf.data();
      zs.avail_out = static_cast<uInt>(buf.size());
      rc = inflate(&zs, Z_NO_FLUSH);
      if (rc != Z_OK && rc != Z_STREAM_END) {
        inflateEnd(&zs);
        throw ParseError("gzip: corrupt stream in " + path);
      }
      out.insert(out.end(), buf.data(), buf.data() + (buf.size() - zs.avail_out));
    }
    inflateEnd(&zs);
    return out;
  }
  return raw;
}

GrayImage resize_bilinear(const GrayImage& img, int out_width, int out_height) {
  if (out_width < 1 || out_height < 1) throw ConfigError("resize: bad output size");
  GrayImage out;
  out.width = out_width;
  out.height = out_height;
  out.pixels.resize(static_cast<std::size_t>(out_width) * out_height);
  const double scale_x = static_cast<double>(img.width) / out_width;
  const double scale_y = static_cast<double>(img.height) / out_height;
  for (int y = 0; y < out_height; ++y) {
    const double sy = (y + 0.5) * scale_y - 0.5;
    for (int x = 0; x < out_width; ++x) {
      const double sx = (x + 0.5) * scale_x - 0.5;
      out.at(x, y) = round_to_byte(sample_bilinear(img, sx, sy, -1.0));
    }
  }
  return out;
}

GrayImage crop(const GrayImage& img, int dx, int dy, int width, int height) {
  if (dx < 0 || dy < 0 || dx + width > img.width || dy + height > img.height) {
    throw ConfigError("crop: window outside the image");
  }
  GrayImage out;
  out.width = width;
  out.height = height;
  out.pixels.resize(static_cast<std::size_t>(width) * height);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) out.at(x, y) = img.at(dx + x, dy + y);
  return out;
}

GrayImage rotate_bilinear(const GrayImage& img, double degrees) {
  const double rad = degrees * std::numbers::pi / 180.0;
  const double c = std::cos(rad), s = std::sin(rad);
  const double cx = (img.width - 1) / 2.0, cy = (img.height - 1) / 2.0;
  GrayImage out;
  out.width = img.width;
  out.height = img.height;
  out.pixels.resize(img.pixels.size());
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      // inverse-rotate the output pixel into the source frame
      const double rx = x - cx, ry = y - cy;
      const double sx = c * rx + s * ry + cx;
      const double sy = -s * rx + c * ry + cy;
      out.at(x, y) = round_to_byte(sample_bilinear(img, sx, sy, 0.0));
    }
  }
  return out;
}

namespace {

GrayImage resize_crop_with(const GrayImage& img, std::uint64_t seed) {
  Rng size_rng(Rng::derive(seed, {kTagResize}));
  const int a = 29 + static_cast<int>(size_rng.next_below(4));
  const GrayImage big = resize_bilinear(img, a, a);
  Rng cx_rng(Rng::derive(seed, {kTagCropX}));
  Rng cy_rng(Rng::derive(seed, {kTagCropY}));
  const int dx = static_cast<int>(cx_rng.next_below(a - 27));
  const int dy = static_cast<int>(cy_rng.next_below(a - 27));
  return crop(big, dx, dy, 28, 28);
}

}  // namespace

GrayImage augment_resize_crop(const GrayImage& img, std::uint64_t seed) {
  if (img.width != 28 || img.height != 28) {
    throw ConfigError("augment: expected a 28x28 input image");
  }
  return resize_crop_with(img, seed);
}

GrayImage augment_rotate_resize_crop(const GrayImage& img, std::uint64_t seed) {
  if (img.width != 28 || img.height != 28) {
    throw ConfigError("augment: expected a 28x28 input image");
  }
  Rng rot_rng(Rng::derive(seed, {kTagRotate}));
  const double degrees = rot_rng.uniform(-10.0, 10.0);
  return resize_crop_with(rotate_bilinear(img, degrees), seed);
}

Eigen::VectorXd flatten_normalize(const GrayImage& img) {
  Eigen::VectorXd v(img.pixels.size());
  for (std::size_t i = 0; i < img.pixels.size(); ++i) v(i) = img.pixels[i] / 255.0;
  return v;
}

}  // namespace aiml
