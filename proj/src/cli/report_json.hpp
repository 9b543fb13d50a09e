#pragma once

#include <nlohmann/json.hpp>

#include "spinemeasure/cobb.hpp"
#include "spinemeasure/metrics.hpp"
#include "spinemeasure/punet.hpp"
#include "spinemeasure/synthspine.hpp"

namespace spine::cli {

inline constexpr const char* kToolName = "spinemeasure";
inline constexpr const char* kToolVersion = "0.1.0";

using ordered_json = nlohmann::ordered_json;

ordered_json config_to_json(const MeasureConfig& config);
MeasureConfig config_from_json(const nlohmann::json& j);
// empty path -> defaults
MeasureConfig load_config(const std::string& path);

synth::SynthSpec synth_spec_from_json(const nlohmann::json& j);
ordered_json synth_spec_to_json(const synth::SynthSpec& spec);

ordered_json cobb_result_to_json(const CobbResult& result);
ordered_json spine_to_json(const LabeledSpine& spine);
ordered_json measure_report(const std::string& input_path,
                            const MeasureOutcome& outcome,
                            const MeasureConfig& config, bool timestamp);
ordered_json metrics_report(const std::string& pred_path,
                            const std::string& ref_path, const SegMetrics& m,
                            const MeasureConfig& config, bool timestamp);
ordered_json truth_to_json(const synth::GroundTruth& truth);
ordered_json netcheck_report(const punet::NetSpec& spec,
                             const punet::ForwardResult& smoke);
ordered_json error_to_json(const SpineError& e);

std::string iso_timestamp_utc();
std::string format_angle(double deg);  // fixed 2 decimals, Table-style

}  // namespace spine::cli
