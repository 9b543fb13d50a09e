#include "spinemeasure/raster.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>

#include "spinemeasure/kernels.hpp"

namespace spine {

namespace {

bool looks_like_png(std::span<const std::uint8_t> bytes) {
  static const std::uint8_t sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A,
                                      '\n'};
  if (bytes.size() < 8) return false;
  for (int i = 0; i < 8; ++i)
    if (bytes[i] != sig[i]) return false;
  return true;
}

// PGM (P5) header scanner. Tracks the byte offset for error messages and
// skips '#' comments, as emitted by common annotation tools.
struct PgmScanner {
  std::span<const std::uint8_t> bytes;
  std::size_t pos = 0;

  [[noreturn]] void fail(const std::string& what) const {
    raise(ErrorKind::Format,
          "PGM parse error at byte " + std::to_string(pos) + ": " + what);
  }

  void skip_space_and_comments() {
    while (pos < bytes.size()) {
      const std::uint8_t c = bytes[pos];
      if (c == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(c)) {
        ++pos;
      } else {
        return;
      }
    }
  }

  long read_int(const char* field) {
    skip_space_and_comments();
    if (pos >= bytes.size()) fail(std::string("missing ") + field);
    if (!std::isdigit(bytes[pos]))
      fail(std::string("expected digit for ") + field);
    long value = 0;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) {
      value = value * 10 + (bytes[pos] - '0');
      if (value > 1'000'000'000L) fail(std::string(field) + " out of range");
      ++pos;
    }
    return value;
  }
};

BinaryMask load_pgm(std::span<const std::uint8_t> bytes, int threshold) {
  PgmScanner sc{bytes};
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
    if (bytes.size() >= 2 && bytes[0] == 'P' &&
        (bytes[1] == '2' || bytes[1] == '6')) {
      raise(ErrorKind::UnsupportedFormat,
            "only binary P5 PGM is supported (got P" +
                std::string(1, static_cast<char>(bytes[1])) + ")");
    }
    sc.fail("not a P5 PGM file");
  }
  sc.pos = 2;
  const long w = sc.read_int("width");
  const long h = sc.read_int("height");
  const long maxval = sc.read_int("maxval");
  if (w <= 0 || h <= 0) sc.fail("non-positive dimensions");
  if (maxval <= 0 || maxval > 65535) sc.fail("invalid maxval");
  if (maxval > 255)
    raise(ErrorKind::UnsupportedFormat,
          "16-bit PGM not supported (maxval " + std::to_string(maxval) + ")");
  // exactly one whitespace byte separates the header from the raster
  if (sc.pos >= bytes.size() || !std::isspace(bytes[sc.pos]))
    sc.fail("missing whitespace before raster data");
  ++sc.pos;
  const std::size_t need = static_cast<std::size_t>(w) * h;
  if (bytes.size() - sc.pos < need) {
    sc.pos = bytes.size();
    sc.fail("raster truncated, expected " + std::to_string(need) + " bytes");
  }

  BinaryMask mask;
  mask.width = static_cast<int>(w);
  mask.height = static_cast<int>(h);
  mask.pixels.resize(need);
  kernels::active().threshold_ge_u8(mask.pixels.data(), bytes.data() + sc.pos,
                                    static_cast<std::uint8_t>(threshold),
                                    need);
  return mask;
}

}  // namespace

BinaryMask BinaryMask::filled(int w, int h, std::uint8_t value) {
  BinaryMask m;
  m.width = w;
  m.height = h;
  m.pixels.assign(static_cast<std::size_t>(w) * h, value);
  return m;
}

BinaryMask load_mask(std::span<const std::uint8_t> bytes, int threshold) {
  if (threshold < 0 || threshold > 255)
    raise(ErrorKind::Domain,
          "threshold must be in [0, 255], got " + std::to_string(threshold));
  if (bytes.empty()) raise(ErrorKind::Format, "empty input");
  if (looks_like_png(bytes)) {
    GrayImage img = decode_png_gray8(bytes);
    BinaryMask mask;
    mask.width = img.width;
    mask.height = img.height;
    mask.pixels.resize(img.intensity.size());
    kernels::active().threshold_ge_u8(mask.pixels.data(), img.intensity.data(),
                                      static_cast<std::uint8_t>(threshold),
                                      img.intensity.size());
    return mask;
  }
  return load_pgm(bytes, threshold);
}

BinaryMask load_mask_file(const std::string& path, int threshold) {
  return load_mask(read_file_bytes(path), threshold);
}

std::vector<std::uint8_t> save_mask(const BinaryMask& mask) {
  char header[64];
  const int len = std::snprintf(header, sizeof(header), "P5\n%d %d\n255\n",
                                mask.width, mask.height);
  std::vector<std::uint8_t> out;
  out.reserve(static_cast<std::size_t>(len) + mask.pixels.size());
  out.insert(out.end(), header, header + len);
  for (std::uint8_t p : mask.pixels) out.push_back(p ? 255 : 0);
  return out;
}

void save_mask_file(const BinaryMask& mask, const std::string& path) {
  const auto bytes = save_mask(mask);
  write_file_bytes(path, bytes);
}

std::uint64_t foreground_count(const BinaryMask& mask) {
  return kernels::active().count_nonzero_u8(mask.pixels.data(),
                                            mask.pixels.size());
}

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorKind::Io, "cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) raise(ErrorKind::Io, "read failure on " + path);
  return bytes;
}

void write_file_bytes(const std::string& path,
                      std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) raise(ErrorKind::Io, "cannot create " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) raise(ErrorKind::Io, "write failure on " + path);
}

}  // namespace spine
