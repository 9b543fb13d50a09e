#include <algorithm>
#include <bit>
#include <cstring>

#include <nlohmann/json.hpp>

#include "spinemeasure/punet.hpp"

namespace spine::punet {

namespace {

using json = nlohmann::ordered_json;

void append_f32_le(std::vector<std::uint8_t>& out, float v) {
  const auto bits = std::bit_cast<std::uint32_t>(v);
  out.push_back(std::uint8_t(bits & 0xFF));
  out.push_back(std::uint8_t((bits >> 8) & 0xFF));
  out.push_back(std::uint8_t((bits >> 16) & 0xFF));
  out.push_back(std::uint8_t((bits >> 24) & 0xFF));
}

float read_f32_le(const std::uint8_t* p) {
  const std::uint32_t bits = std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) |
                             (std::uint32_t(p[2]) << 16) |
                             (std::uint32_t(p[3]) << 24);
  return std::bit_cast<float>(bits);
}

}  // namespace

std::vector<std::uint8_t> serialize_weights(const WeightSet& ws) {
  json header;
  header["format"] = "punet-weights";
  header["version"] = 1;
  header["seed"] = ws.seed;
  json params = json::array();
  for (const Param& p : ws.params) {
    json entry;
    entry["name"] = p.name;
    entry["shape"] = p.shape;
    params.push_back(std::move(entry));
  }
  header["params"] = std::move(params);

  const std::string line = header.dump();  // compact: no embedded newlines
  std::vector<std::uint8_t> out(line.begin(), line.end());
  out.push_back('\n');
  for (const Param& p : ws.params)
    for (float v : p.values) append_f32_le(out, v);
  return out;
}

WeightSet parse_weights(std::span<const std::uint8_t> bytes) {
  const auto newline =
      std::find(bytes.begin(), bytes.end(), std::uint8_t('\n'));
  if (newline == bytes.end())
    raise(ErrorKind::Format, "weight stream: missing header line");
  const std::string line(bytes.begin(), newline);

  json header = json::parse(line, nullptr, false);
  if (header.is_discarded() || header.value("format", "") != "punet-weights")
    raise(ErrorKind::Format, "weight stream: bad JSON header");

  WeightSet ws;
  ws.seed = header.value("seed", std::uint64_t{0});
  std::size_t offset = std::size_t(newline - bytes.begin()) + 1;
  for (const json& entry : header.at("params")) {
    Param p;
    p.name = entry.at("name").get<std::string>();
    p.shape = entry.at("shape").get<std::vector<int>>();
    std::size_t count = 1;
    for (int d : p.shape) {
      if (d <= 0) raise(ErrorKind::Format, "weight stream: bad shape");
      count *= std::size_t(d);
    }
    if (bytes.size() - offset < count * 4)
      raise(ErrorKind::Format, "weight stream: truncated values for " +
                                   p.name + " at byte " +
                                   std::to_string(offset));
    p.values.resize(count);
    for (std::size_t i = 0; i < count; ++i)
      p.values[i] = read_f32_le(bytes.data() + offset + i * 4);
    offset += count * 4;
    ws.params.push_back(std::move(p));
  }
  if (offset != bytes.size())
    raise(ErrorKind::Format,
          "weight stream: " + std::to_string(bytes.size() - offset) +
              " trailing bytes");
  return ws;
}

}  // namespace spine::punet
