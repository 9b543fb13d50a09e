#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

namespace spine::cli {

struct MeasureArgs {
  std::string mask_path;
  std::string config_path;   // optional
  std::string overlay_path;  // optional SVG output
  std::string json_path;     // optional; default prints to stdout
  bool timestamp = false;
};

struct EvalArgs {
  std::string pred_path;
  std::string ref_path;
  std::string config_path;
  bool timestamp = false;
};

struct SynthArgs {
  std::string spec_path;
  std::string out_dir;
  int count = 1;
  std::uint64_t seed = 0;
  bool seed_given = false;  // otherwise the spec's seed is the base
};

struct NetcheckArgs {
  int height = 0;
  int width = 0;
  int depth = 4;
  int base_channels = 16;
};

struct BatchArgs {
  std::string dir;
  std::string config_path;
  std::string csv_path;         // optional CSV output file
  std::string angles_csv_path;  // bypass mode: pre-computed angle pairs
  bool timestamp = false;
};

// Exit codes: 0 success, 1 partial batch failure, 2 input/spec error.
int cmd_measure(const MeasureArgs& args, std::ostream& out, std::ostream& err);
int cmd_eval(const EvalArgs& args, std::ostream& out, std::ostream& err);
int cmd_synth(const SynthArgs& args, std::ostream& out, std::ostream& err);
int cmd_netcheck(const NetcheckArgs& args, std::ostream& out,
                 std::ostream& err);
int cmd_batch(const BatchArgs& args, std::ostream& out, std::ostream& err);

}  // namespace spine::cli
