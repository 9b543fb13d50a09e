#include "report_json.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>

#include "spinemeasure/kernels.hpp"
#include "spinemeasure/raster.hpp"

namespace spine::cli {

namespace {

ordered_json point_to_json(const Point& p) {
  return ordered_json::array({p.x, p.y});
}

const char* pair_rule_name(PairRule rule) {
  return rule == PairRule::MaximizeTheta ? "maximize_theta" : "extreme_tilts";
}

}  // namespace

std::string format_angle(double deg) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", deg);
  return buf;
}

std::string iso_timestamp_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

ordered_json config_to_json(const MeasureConfig& config) {
  ordered_json j;
  j["min_contour_pixels"] = config.min_contour_pixels;
  j["expected_vertebrae"] = config.expected_vertebrae;
  j["iou_threshold"] = config.iou_threshold;
  j["gap"] = config.gap;
  j["severity_boundaries"] =
      ordered_json::array({config.severity_boundaries.mild,
                           config.severity_boundaries.moderate,
                           config.severity_boundaries.severe});
  j["pair_rule"] = pair_rule_name(config.pair_rule);
  return j;
}

MeasureConfig config_from_json(const nlohmann::json& j) {
  MeasureConfig config;
  if (!j.is_object()) raise(ErrorKind::Format, "config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "min_contour_pixels") {
      config.min_contour_pixels = value.get<std::uint64_t>();
    } else if (key == "expected_vertebrae") {
      config.expected_vertebrae = value.get<int>();
    } else if (key == "iou_threshold") {
      config.iou_threshold = value.get<double>();
    } else if (key == "gap") {
      config.gap = value.get<int>();
    } else if (key == "severity_boundaries") {
      if (!value.is_array() || value.size() != 3)
        raise(ErrorKind::Format,
              "severity_boundaries must be an array of three angles");
      config.severity_boundaries.mild = value[0].get<double>();
      config.severity_boundaries.moderate = value[1].get<double>();
      config.severity_boundaries.severe = value[2].get<double>();
    } else if (key == "pair_rule") {
      const std::string name = value.get<std::string>();
      if (name == "maximize_theta") {
        config.pair_rule = PairRule::MaximizeTheta;
      } else if (name == "extreme_tilts") {
        config.pair_rule = PairRule::ExtremeTilts;
      } else {
        raise(ErrorKind::Format, "unknown pair_rule: " + name);
      }
    } else {
      raise(ErrorKind::Format, "unknown config key: " + key);
    }
  }
  config.validate();
  return config;
}

MeasureConfig load_config(const std::string& path) {
  if (path.empty()) return {};
  const auto bytes = read_file_bytes(path);
  const auto j = nlohmann::json::parse(bytes.begin(), bytes.end(), nullptr,
                                       false);
  if (j.is_discarded())
    raise(ErrorKind::Format, "config " + path + " is not valid JSON");
  return config_from_json(j);
}

synth::SynthSpec synth_spec_from_json(const nlohmann::json& j) {
  synth::SynthSpec spec;
  if (!j.is_object())
    raise(ErrorKind::Format, "synth spec must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "canvas_width") {
      spec.canvas_width = value.get<int>();
    } else if (key == "canvas_height") {
      spec.canvas_height = value.get<int>();
    } else if (key == "vertebra_count") {
      spec.vertebra_count = value.get<int>();
    } else if (key == "centerline") {
      const std::string name = value.get<std::string>();
      if (name == "sinusoid") {
        spec.centerline = synth::CenterlineKind::Sinusoid;
      } else if (name == "polynomial") {
        spec.centerline = synth::CenterlineKind::Polynomial;
      } else {
        raise(ErrorKind::Format, "unknown centerline kind: " + name);
      }
    } else if (key == "amplitude_px") {
      spec.amplitude_px = value.get<double>();
    } else if (key == "wavelength_px") {
      spec.wavelength_px = value.get<double>();
    } else if (key == "phase_rad") {
      spec.phase_rad = value.get<double>();
    } else if (key == "poly_coeffs") {
      spec.poly_coeffs = value.get<std::vector<double>>();
    } else if (key == "base_width") {
      spec.base_width = value.get<double>();
    } else if (key == "base_height") {
      spec.base_height = value.get<double>();
    } else if (key == "scales") {
      spec.scales = value.get<std::vector<double>>();
    } else if (key == "gap_px") {
      spec.gap_px = value.get<double>();
    } else if (key == "seed") {
      spec.seed = value.get<std::uint64_t>();
    } else if (key == "jitter_px") {
      spec.jitter_px = value.get<double>();
    } else {
      raise(ErrorKind::Format, "unknown synth spec key: " + key);
    }
  }
  return spec;
}

ordered_json synth_spec_to_json(const synth::SynthSpec& spec) {
  ordered_json j;
  j["canvas_width"] = spec.canvas_width;
  j["canvas_height"] = spec.canvas_height;
  j["vertebra_count"] = spec.vertebra_count;
  j["centerline"] = spec.centerline == synth::CenterlineKind::Sinusoid
                        ? "sinusoid"
                        : "polynomial";
  j["amplitude_px"] = spec.amplitude_px;
  j["wavelength_px"] = spec.wavelength_px;
  j["phase_rad"] = spec.phase_rad;
  j["poly_coeffs"] = spec.poly_coeffs;
  j["base_width"] = spec.base_width;
  j["base_height"] = spec.base_height;
  j["scales"] = spec.scales;
  j["gap_px"] = spec.gap_px;
  j["seed"] = spec.seed;
  j["jitter_px"] = spec.jitter_px;
  return j;
}

ordered_json cobb_result_to_json(const CobbResult& result) {
  ordered_json j;
  j["upper_label"] = result.upper_label;
  j["lower_label"] = result.lower_label;
  j["upper_index"] = result.upper_index;
  j["lower_index"] = result.lower_index;
  j["theta_deg"] = result.theta_deg;
  j["severity"] = to_string(result.severity);
  return j;
}

ordered_json spine_to_json(const LabeledSpine& spine) {
  ordered_json arr = ordered_json::array();
  for (const LabeledVertebra& v : spine.vertebrae) {
    ordered_json entry;
    entry["label"] = v.label;
    entry["corners"] = ordered_json::array(
        {point_to_json(v.quad.upper_left), point_to_json(v.quad.upper_right),
         point_to_json(v.quad.lower_left),
         point_to_json(v.quad.lower_right)});
    entry["centroid"] = point_to_json(v.quad.centroid);
    entry["upper_angle_deg"] = v.quad.upper_angle_deg;
    entry["lower_angle_deg"] = v.quad.lower_angle_deg;
    arr.push_back(std::move(entry));
  }
  return arr;
}

ordered_json measure_report(const std::string& input_path,
                            const MeasureOutcome& outcome,
                            const MeasureConfig& config, bool timestamp) {
  ordered_json j;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["input"] = input_path;
  j["config"] = config_to_json(config);
  j["result"] = cobb_result_to_json(outcome.result);
  j["vertebrae"] = spine_to_json(outcome.spine);
  j["warnings"] = outcome.warnings;
  if (timestamp) j["timestamp"] = iso_timestamp_utc();
  return j;
}

ordered_json metrics_report(const std::string& pred_path,
                            const std::string& ref_path, const SegMetrics& m,
                            const MeasureConfig& config, bool timestamp) {
  ordered_json j;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["pred"] = pred_path;
  j["ref"] = ref_path;
  j["config"] = config_to_json(config);
  ordered_json metrics;
  metrics["dice"] = m.dice;
  metrics["ssim"] = m.ssim;
  metrics["avg_hausdorff"] = m.avg_hausdorff;
  metrics["f1"] = m.f1;
  j["metrics"] = std::move(metrics);
  if (timestamp) j["timestamp"] = iso_timestamp_utc();
  return j;
}

ordered_json truth_to_json(const synth::GroundTruth& truth) {
  ordered_json arr = ordered_json::array();
  for (const synth::VertebraTruth& v : truth.vertebrae) {
    ordered_json entry;
    entry["corners"] = ordered_json::array(
        {point_to_json(v.corners[0]), point_to_json(v.corners[1]),
         point_to_json(v.corners[2]), point_to_json(v.corners[3])});
    entry["centroid"] = point_to_json(v.centroid);
    entry["tilt_deg"] = v.tilt_deg;
    entry["upper_angle_deg"] = v.upper_angle_deg;
    entry["lower_angle_deg"] = v.lower_angle_deg;
    arr.push_back(std::move(entry));
  }
  ordered_json j;
  j["vertebrae"] = std::move(arr);
  j["cobb"] = cobb_result_to_json(truth.cobb);
  return j;
}

ordered_json netcheck_report(const punet::NetSpec& spec,
                             const punet::ForwardResult& smoke) {
  ordered_json j;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["input"] = ordered_json::array(
      {spec.input.c, spec.input.h, spec.input.w});
  j["depth"] = spec.depth;
  j["base_channels"] = spec.base_channels;
  j["dropout_rate"] = spec.dropout_rate;

  ordered_json sides = ordered_json::array();
  for (const punet::TensorShape& s : spec.side_output_shapes())
    sides.push_back(ordered_json::array({s.c, s.h, s.w}));
  j["side_outputs"] = std::move(sides);
  j["param_count"] = spec.param_count();

  ordered_json layers = ordered_json::array();
  for (const punet::LayerSpec& l : spec.layers) {
    ordered_json entry;
    entry["name"] = l.name;
    entry["kind"] = punet::to_string(l.kind);
    entry["out_shape"] =
        ordered_json::array({l.out_shape.c, l.out_shape.h, l.out_shape.w});
    entry["params"] = l.param_count();
    layers.push_back(std::move(entry));
  }
  j["layers"] = std::move(layers);

  float lo = 1.0f, hi = 0.0f;
  for (float v : smoke.final_map.data) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  ordered_json fwd;
  fwd["output_min"] = lo;
  fwd["output_max"] = hi;
  fwd["in_unit_interval"] = lo > 0.0f && hi < 1.0f;
  fwd["backend"] = kernels::active().name;
  j["forward_smoke"] = std::move(fwd);
  return j;
}

ordered_json error_to_json(const SpineError& e) {
  ordered_json j;
  j["error"]["kind"] = to_string(e.kind());
  j["error"]["message"] = e.what();
  return j;
}

}  // namespace spine::cli
