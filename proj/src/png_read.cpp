// Minimal PNG reader for the one flavor the pipeline accepts: 8-bit
// grayscale, non-interlaced. Chunk walking and defiltering are done here;
// DEFLATE and CRC32 come from zlib.

#include <zlib.h>

#include <cstdlib>
#include <cstring>

#include "spinemeasure/raster.hpp"

namespace spine {

namespace {

[[noreturn]] void fail_at(std::size_t offset, const std::string& what) {
  raise(ErrorKind::Format,
        "PNG parse error at byte " + std::to_string(offset) + ": " + what);
}

std::uint32_t read_be32(const std::uint8_t* p) {
  return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) |
         (std::uint32_t(p[2]) << 8) | std::uint32_t(p[3]);
}

std::uint8_t paeth(std::uint8_t a, std::uint8_t b, std::uint8_t c) {
  const int p = int(a) + int(b) - int(c);
  const int pa = std::abs(p - int(a));
  const int pb = std::abs(p - int(b));
  const int pc = std::abs(p - int(c));
  if (pa <= pb && pa <= pc) return a;
  if (pb <= pc) return b;
  return c;
}

std::vector<std::uint8_t> inflate_all(std::span<const std::uint8_t> in,
                                      std::size_t expected) {
  std::vector<std::uint8_t> out(expected);
  z_stream zs{};
  if (inflateInit(&zs) != Z_OK)
    raise(ErrorKind::Io, "zlib inflateInit failed");
  zs.next_in = const_cast<Bytef*>(in.data());
  zs.avail_in = static_cast<uInt>(in.size());
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = inflate(&zs, Z_FINISH);
  const std::size_t produced = out.size() - zs.avail_out;
  inflateEnd(&zs);
  if (rc != Z_STREAM_END || produced != expected)
    raise(ErrorKind::Format,
          "PNG parse error at byte 0: IDAT stream malformed or wrong size "
          "(got " +
              std::to_string(produced) + " bytes, expected " +
              std::to_string(expected) + ")");
  return out;
}

}  // namespace

GrayImage decode_png_gray8(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8) fail_at(0, "truncated signature");

  std::size_t pos = 8;
  bool seen_ihdr = false;
  bool seen_iend = false;
  std::uint32_t width = 0, height = 0;
  std::vector<std::uint8_t> idat;

  while (pos < bytes.size() && !seen_iend) {
    const std::size_t chunk_off = pos;
    if (bytes.size() - pos < 12) fail_at(chunk_off, "truncated chunk header");
    const std::uint32_t len = read_be32(bytes.data() + pos);
    if (len > 0x7FFFFFFFu) fail_at(chunk_off, "chunk length out of range");
    if (bytes.size() - pos - 12 < len)
      fail_at(chunk_off, "chunk data truncated");
    const std::uint8_t* type = bytes.data() + pos + 4;
    const std::uint8_t* data = bytes.data() + pos + 8;
    const std::uint32_t crc_stored = read_be32(data + len);
    std::uint32_t crc = crc32(0L, Z_NULL, 0);
    crc = crc32(crc, type, 4 + len);
    if (crc != crc_stored) fail_at(chunk_off, "chunk CRC mismatch");

    if (std::memcmp(type, "IHDR", 4) == 0) {
      if (len != 13) fail_at(chunk_off, "IHDR length must be 13");
      width = read_be32(data);
      height = read_be32(data + 4);
      const std::uint8_t bit_depth = data[8];
      const std::uint8_t color_type = data[9];
      const std::uint8_t interlace = data[12];
      if (width == 0 || height == 0) fail_at(chunk_off, "zero dimension");
      if (color_type != 0) {
        raise(ErrorKind::UnsupportedFormat,
              "PNG color type " + std::to_string(color_type) +
                  " not supported; expected 8-bit grayscale (multi-channel "
                  "images must be converted first)");
      }
      if (bit_depth != 8)
        raise(ErrorKind::UnsupportedFormat,
              "PNG bit depth " + std::to_string(bit_depth) +
                  " not supported; expected 8");
      if (interlace != 0)
        raise(ErrorKind::UnsupportedFormat, "interlaced PNG not supported");
      seen_ihdr = true;
    } else if (std::memcmp(type, "IDAT", 4) == 0) {
      if (!seen_ihdr) fail_at(chunk_off, "IDAT before IHDR");
      idat.insert(idat.end(), data, data + len);
    } else if (std::memcmp(type, "IEND", 4) == 0) {
      seen_iend = true;
    }
    // ancillary chunks (tEXt, pHYs, ...) are skipped
    pos += 12 + len;
  }

  if (!seen_ihdr) fail_at(pos, "missing IHDR");
  if (!seen_iend) fail_at(pos, "missing IEND");
  if (idat.empty()) fail_at(pos, "missing IDAT");

  const std::size_t stride = std::size_t(width) + 1;  // filter byte + row
  const std::size_t raw_size = stride * height;
  std::vector<std::uint8_t> raw = inflate_all(idat, raw_size);

  GrayImage img;
  img.width = static_cast<int>(width);
  img.height = static_cast<int>(height);
  img.intensity.resize(std::size_t(width) * height);

  for (std::uint32_t y = 0; y < height; ++y) {
    const std::uint8_t filter = raw[y * stride];
    const std::uint8_t* src = raw.data() + y * stride + 1;
    std::uint8_t* row = img.intensity.data() + std::size_t(y) * width;
    const std::uint8_t* prev =
        y > 0 ? img.intensity.data() + std::size_t(y - 1) * width : nullptr;
    switch (filter) {
      case 0:
        std::memcpy(row, src, width);
        break;
      case 1:
        for (std::uint32_t x = 0; x < width; ++x)
          row[x] = std::uint8_t(src[x] + (x > 0 ? row[x - 1] : 0));
        break;
      case 2:
        for (std::uint32_t x = 0; x < width; ++x)
          row[x] = std::uint8_t(src[x] + (prev ? prev[x] : 0));
        break;
      case 3:
        for (std::uint32_t x = 0; x < width; ++x) {
          const int left = x > 0 ? row[x - 1] : 0;
          const int up = prev ? prev[x] : 0;
          row[x] = std::uint8_t(src[x] + ((left + up) >> 1));
        }
        break;
      case 4:
        for (std::uint32_t x = 0; x < width; ++x) {
          const std::uint8_t a = x > 0 ? row[x - 1] : 0;
          const std::uint8_t b = prev ? prev[x] : 0;
          const std::uint8_t c = (x > 0 && prev) ? prev[x - 1] : 0;
          row[x] = std::uint8_t(src[x] + paeth(a, b, c));
        }
        break;
      default:
        fail_at(0, "unknown scanline filter " + std::to_string(filter) +
                       " in row " + std::to_string(y));
    }
  }
  return img;
}

}  // namespace spine
