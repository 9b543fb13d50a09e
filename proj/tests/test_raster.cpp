#include <doctest.h>

#include <zlib.h>

#include <random>
#include <string>

#include "spinemeasure/raster.hpp"

using namespace spine;

namespace {

std::vector<std::uint8_t> pgm_bytes(int w, int h,
                                    const std::vector<std::uint8_t>& body) {
  std::string header =
      "P5\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  std::vector<std::uint8_t> bytes(header.begin(), header.end());
  bytes.insert(bytes.end(), body.begin(), body.end());
  return bytes;
}

void push_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(std::uint8_t(v >> 24));
  out.push_back(std::uint8_t(v >> 16));
  out.push_back(std::uint8_t(v >> 8));
  out.push_back(std::uint8_t(v));
}

void push_chunk(std::vector<std::uint8_t>& out, const char* type,
                const std::vector<std::uint8_t>& data) {
  push_be32(out, std::uint32_t(data.size()));
  std::vector<std::uint8_t> body(type, type + 4);
  body.insert(body.end(), data.begin(), data.end());
  out.insert(out.end(), body.begin(), body.end());
  push_be32(out, std::uint32_t(crc32(0L, body.data(), uInt(body.size()))));
}

std::vector<std::uint8_t> zlib_deflate(const std::vector<std::uint8_t>& in) {
  uLongf out_len = compressBound(uLong(in.size()));
  std::vector<std::uint8_t> out(out_len);
  REQUIRE(compress(out.data(), &out_len, in.data(), uLong(in.size())) ==
          Z_OK);
  out.resize(out_len);
  return out;
}

// Gray 8-bit PNG with a chosen per-row filter applied at encode time.
std::vector<std::uint8_t> png_bytes(int w, int h,
                                    const std::vector<std::uint8_t>& gray,
                                    std::uint8_t color_type = 0,
                                    std::uint8_t filter = 0) {
  const int channels = color_type == 2 ? 3 : 1;
  std::vector<std::uint8_t> raw;
  std::vector<std::uint8_t> prev(std::size_t(w) * channels, 0);
  for (int y = 0; y < h; ++y) {
    raw.push_back(filter);
    std::vector<std::uint8_t> row(std::size_t(w) * channels);
    for (int x = 0; x < w * channels; ++x)
      row[x] = gray[(std::size_t(y) * w * channels) + x];
    for (int x = 0; x < w * channels; ++x) {
      const std::uint8_t left = x > 0 ? row[x - 1] : 0;
      const std::uint8_t up = prev[x];
      std::uint8_t encoded = row[x];
      switch (filter) {
        case 0: break;
        case 1: encoded = std::uint8_t(row[x] - left); break;
        case 2: encoded = std::uint8_t(row[x] - up); break;
        case 3: encoded = std::uint8_t(row[x] - ((left + up) >> 1)); break;
        case 4: {
          const std::uint8_t c = (x > 0 && y > 0) ? prev[x - 1] : 0;
          const int p = int(left) + int(up) - int(c);
          const int pa = std::abs(p - int(left)), pb = std::abs(p - int(up)),
                    pc = std::abs(p - int(c));
          std::uint8_t pred = c;
          if (pa <= pb && pa <= pc)
            pred = left;
          else if (pb <= pc)
            pred = up;
          encoded = std::uint8_t(row[x] - pred);
          break;
        }
      }
      raw.push_back(encoded);
    }
    prev = row;
  }

  std::vector<std::uint8_t> png{0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
  std::vector<std::uint8_t> ihdr;
  push_be32(ihdr, std::uint32_t(w));
  push_be32(ihdr, std::uint32_t(h));
  ihdr.push_back(8);           // bit depth
  ihdr.push_back(color_type);  // 0 gray, 2 rgb
  ihdr.push_back(0);
  ihdr.push_back(0);
  ihdr.push_back(0);  // no interlace
  push_chunk(png, "IHDR", ihdr);
  push_chunk(png, "IDAT", zlib_deflate(raw));
  push_chunk(png, "IEND", {});
  return png;
}

BinaryMask random_mask(std::mt19937& rng, int w, int h) {
  std::uniform_int_distribution<int> coin(0, 1);
  BinaryMask m = BinaryMask::filled(w, h, 0);
  for (auto& p : m.pixels) p = std::uint8_t(coin(rng));
  return m;
}

}  // namespace

TEST_CASE("pgm load thresholds at >=") {
  // uniform 255 -> all foreground
  auto mask =
      load_mask(pgm_bytes(4, 2, std::vector<std::uint8_t>(8, 255)), 128);
  CHECK(mask.width == 4);
  CHECK(mask.height == 2);
  CHECK(foreground_count(mask) == 8);

  // checkerboard of {0, 255}
  std::vector<std::uint8_t> board(9);
  for (int i = 0; i < 9; ++i) board[i] = (i % 2) ? 255 : 0;
  mask = load_mask(pgm_bytes(3, 3, board), 128);
  for (int i = 0; i < 9; ++i) CHECK(mask.pixels[i] == (i % 2 ? 1 : 0));

  // value 127 everywhere, threshold 128 -> all background (>= rule)
  mask = load_mask(pgm_bytes(5, 5, std::vector<std::uint8_t>(25, 127)), 128);
  CHECK(foreground_count(mask) == 0);
  // and threshold 127 flips everything to foreground
  mask = load_mask(pgm_bytes(5, 5, std::vector<std::uint8_t>(25, 127)), 127);
  CHECK(foreground_count(mask) == 25);
}

TEST_CASE("pgm errors name the byte offset") {
  const std::string text = "P5\n3 bogus\n255\n";
  std::vector<std::uint8_t> bytes(text.begin(), text.end());
  try {
    load_mask(bytes, 128);
    FAIL("expected throw");
  } catch (const SpineError& e) {
    CHECK(e.kind() == ErrorKind::Format);
    CHECK(std::string(e.what()).find("at byte 5") != std::string::npos);
  }

  // truncated raster
  auto short_bytes = pgm_bytes(4, 4, std::vector<std::uint8_t>(7, 0));
  CHECK_THROWS_AS(load_mask(short_bytes, 128), SpineError);
  try {
    load_mask(short_bytes, 128);
  } catch (const SpineError& e) {
    CHECK(e.kind() == ErrorKind::Format);
  }

  // P6 is unsupported rather than malformed
  std::string p6 = "P6\n2 2\n255\n";
  std::vector<std::uint8_t> p6b(p6.begin(), p6.end());
  p6b.resize(p6b.size() + 12, 0);
  try {
    load_mask(p6b, 128);
    FAIL("expected throw");
  } catch (const SpineError& e) {
    CHECK(e.kind() == ErrorKind::UnsupportedFormat);
  }
}

TEST_CASE("save/load round-trip and uniform encodings") {
  BinaryMask one = BinaryMask::filled(1, 1, 1);
  const auto bytes = save_mask(one);
  const std::string expect_header = "P5\n1 1\n255\n";
  REQUIRE(bytes.size() == expect_header.size() + 1);
  CHECK(std::equal(expect_header.begin(), expect_header.end(),
                   bytes.begin()));
  CHECK(bytes.back() == 255);

  BinaryMask empty3 = BinaryMask::filled(3, 3, 0);
  const auto empty_bytes = save_mask(empty3);
  for (std::size_t i = empty_bytes.size() - 9; i < empty_bytes.size(); ++i)
    CHECK(empty_bytes[i] == 0);

  std::mt19937 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const BinaryMask m = random_mask(rng, 1 + trial, 2 + trial / 2);
    CHECK(load_mask(save_mask(m), 128) == m);
  }
}

TEST_CASE("foreground_count partitions the grid") {
  CHECK(foreground_count(BinaryMask::filled(10, 10, 0)) == 0);
  CHECK(foreground_count(BinaryMask::filled(10, 10, 1)) == 100);

  BinaryMask m = BinaryMask::filled(10, 10, 0);
  for (int y = 4; y < 7; ++y)
    for (int x = 2; x < 5; ++x) m.set(x, y, 1);
  CHECK(foreground_count(m) == 9);

  std::mt19937 rng(3);
  const BinaryMask r = random_mask(rng, 33, 17);
  std::uint64_t bg = 0;
  for (auto p : r.pixels) bg += p == 0;
  CHECK(foreground_count(r) + bg == 33u * 17u);
}

TEST_CASE("threshold monotonicity: raising it never adds foreground") {
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> level(0, 255);
  std::vector<std::uint8_t> gray(24 * 13);
  for (auto& g : gray) g = std::uint8_t(level(rng));
  const auto bytes = pgm_bytes(24, 13, gray);

  std::uint64_t prev = UINT64_MAX;
  for (int thr : {0, 17, 64, 127, 128, 200, 255}) {
    const std::uint64_t count = foreground_count(load_mask(bytes, thr));
    CHECK(count <= prev);
    prev = count;
  }
}

TEST_CASE("png grayscale decoding with every filter type") {
  std::mt19937 rng(9);
  std::uniform_int_distribution<int> level(0, 255);
  const int w = 13, h = 7;
  std::vector<std::uint8_t> gray(std::size_t(w) * h);
  for (auto& g : gray) g = std::uint8_t(level(rng));

  for (std::uint8_t filter : {0, 1, 2, 3, 4}) {
    CAPTURE(int(filter));
    const auto png = png_bytes(w, h, gray, 0, filter);
    const GrayImage img = decode_png_gray8(png);
    CHECK(img.width == w);
    CHECK(img.height == h);
    CHECK(img.intensity == gray);
  }

  // thresholding matches the PGM path
  const auto png = png_bytes(w, h, gray, 0, 2);
  const BinaryMask from_png = load_mask(png, 100);
  const BinaryMask from_pgm = load_mask(pgm_bytes(w, h, gray), 100);
  CHECK(from_png == from_pgm);
}

TEST_CASE("multi-channel png is rejected as unsupported") {
  std::vector<std::uint8_t> rgb(2 * 2 * 3, 80);
  const auto png = png_bytes(2, 2, rgb, 2, 0);
  try {
    load_mask(png, 128);
    FAIL("expected throw");
  } catch (const SpineError& e) {
    CHECK(e.kind() == ErrorKind::UnsupportedFormat);
  }
}

TEST_CASE("corrupt png crc is a format error with offset") {
  std::vector<std::uint8_t> gray(4 * 4, 10);
  auto png = png_bytes(4, 4, gray);
  png[20] ^= 0xFF;  // inside IHDR data
  try {
    load_mask(png, 128);
    FAIL("expected throw");
  } catch (const SpineError& e) {
    CHECK(e.kind() == ErrorKind::Format);
    CHECK(std::string(e.what()).find("byte 8") != std::string::npos);
  }
}
