#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <map>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "report_json.hpp"
#include "svg_overlay.hpp"
#include "spinemeasure/metrics.hpp"
#include "spinemeasure/punet.hpp"
#include "spinemeasure/raster.hpp"
#include "spinemeasure/synthspine.hpp"

namespace fs = std::filesystem;

namespace spine::cli {

namespace {

void emit(const ordered_json& j, std::ostream& out) {
  out << j.dump(2) << "\n";
}

template <typename Fn>
int guarded(std::ostream& out, std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const SpineError& e) {
    emit(error_to_json(e), out);
    err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    ordered_json j;
    j["error"]["kind"] = "internal";
    j["error"]["message"] = e.what();
    emit(j, out);
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  write_file_bytes(path, std::span<const std::uint8_t>(
                             reinterpret_cast<const std::uint8_t*>(
                                 text.data()),
                             text.size()));
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(v));
  return buf;
}

std::string csv_safe(std::string text) {
  for (char& c : text)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return text;
}

// ------------------------------------------------------------- batch rows

struct BatchRow {
  std::string id;
  bool ok = false;
  std::string error;
  CobbResult ref;
  CobbResult pred;
  double abs_diff = 0.0;
  bool severity_match = false;
};

std::string batch_csv(const std::vector<BatchRow>& rows) {
  std::ostringstream csv;
  csv << "id,ref_upper,ref_lower,ref_angle_deg,ref_severity,pred_upper,"
         "pred_lower,pred_angle_deg,pred_severity,abs_diff_deg,"
         "severity_match,error\n";
  for (const BatchRow& r : rows) {
    if (r.ok) {
      csv << r.id << "," << r.ref.upper_label << "," << r.ref.lower_label
          << "," << format_angle(r.ref.theta_deg) << ","
          << to_string(r.ref.severity) << "," << r.pred.upper_label << ","
          << r.pred.lower_label << "," << format_angle(r.pred.theta_deg)
          << "," << to_string(r.pred.severity) << ","
          << format_angle(r.abs_diff) << ","
          << (r.severity_match ? "true" : "false") << ",\n";
    } else {
      csv << r.id << ",,,,,,,,,,," << csv_safe(r.error) << "\n";
    }
  }
  return csv.str();
}

ordered_json batch_summary(const std::string& mode,
                           const std::vector<BatchRow>& rows,
                           const MeasureConfig& config, bool timestamp) {
  std::vector<double> diffs;
  std::size_t agree = 0, ok = 0;
  for (const BatchRow& r : rows) {
    if (!r.ok) continue;
    ++ok;
    diffs.push_back(r.abs_diff);
    if (r.severity_match) ++agree;
  }
  double mean = 0.0;
  for (double d : diffs) mean += d;
  mean = diffs.empty() ? 0.0 : mean / double(diffs.size());
  std::vector<double> sorted = diffs;
  std::sort(sorted.begin(), sorted.end());
  double median = 0.0;
  if (!sorted.empty()) {
    const std::size_t mid = sorted.size() / 2;
    median = sorted.size() % 2 ? sorted[mid]
                               : (sorted[mid - 1] + sorted[mid]) / 2.0;
  }

  ordered_json j;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["mode"] = mode;
  j["config"] = config_to_json(config);
  j["cases"] = rows.size();
  j["errored"] = rows.size() - ok;
  j["mean_abs_angle_diff_deg"] = mean;
  j["median_abs_angle_diff_deg"] = median;
  j["severity_agreement_rate"] =
      ok == 0 ? 0.0 : double(agree) / double(ok);
  if (timestamp) j["timestamp"] = iso_timestamp_utc();
  return j;
}

std::vector<BatchRow> run_mask_batch(const std::string& dir,
                                     const MeasureConfig& config) {
  if (!fs::is_directory(dir))
    raise(ErrorKind::Io, dir + " is not a directory");

  // ids come from *_pred.* / *_ref.* pairs
  std::map<std::string, std::pair<std::string, std::string>> cases;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string stem = entry.path().stem().string();
    const std::string ext = entry.path().extension().string();
    if (ext != ".pgm" && ext != ".png") continue;
    if (stem.size() > 5 && stem.ends_with("_pred"))
      cases[stem.substr(0, stem.size() - 5)].first = entry.path().string();
    else if (stem.size() > 4 && stem.ends_with("_ref"))
      cases[stem.substr(0, stem.size() - 4)].second = entry.path().string();
  }
  if (cases.empty())
    raise(ErrorKind::Io,
          "no <id>_pred/<id>_ref mask pairs found in " + dir);

  std::vector<std::pair<std::string, std::pair<std::string, std::string>>>
      ordered(cases.begin(), cases.end());
  std::vector<BatchRow> rows(ordered.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= ordered.size()) return;
      BatchRow& row = rows[i];
      row.id = ordered[i].first;
      const auto& [pred_path, ref_path] = ordered[i].second;
      try {
        if (pred_path.empty())
          raise(ErrorKind::Io, "missing _pred mask for id " + row.id);
        if (ref_path.empty())
          raise(ErrorKind::Io, "missing _ref mask for id " + row.id);
        const MeasureOutcome ref =
            measure(load_mask_file(ref_path), config);
        const MeasureOutcome pred =
            measure(load_mask_file(pred_path), config);
        row.ref = ref.result;
        row.pred = pred.result;
        row.abs_diff = std::abs(ref.result.theta_deg - pred.result.theta_deg);
        row.severity_match = ref.result.severity == pred.result.severity;
        row.ok = true;
      } catch (const std::exception& e) {
        row.ok = false;
        row.error = e.what();
      }
    }
  };

  const std::size_t pool = std::min<std::size_t>(
      std::max(1u, std::thread::hardware_concurrency()), ordered.size());
  std::vector<std::thread> threads;
  for (std::size_t t = 0; t < pool; ++t) threads.emplace_back(worker);
  for (std::thread& t : threads) t.join();
  return rows;  // already ordered by id via the map
}

std::vector<BatchRow> run_angles_csv(const std::string& path,
                                     const MeasureConfig& config) {
  const auto bytes = read_file_bytes(path);
  std::istringstream in(std::string(bytes.begin(), bytes.end()));
  std::string line;
  if (!std::getline(in, line))
    raise(ErrorKind::Format, path + ": empty angle CSV");

  auto split = [](const std::string& s) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(s);
    while (std::getline(ls, field, ',')) fields.push_back(field);
    return fields;
  };

  const auto header = split(line);
  int id_col = -1, ref_col = -1, pred_col = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "id") id_col = int(i);
    if (header[i] == "ref_angle_deg") ref_col = int(i);
    if (header[i] == "pred_angle_deg") pred_col = int(i);
  }
  if (id_col < 0 || ref_col < 0 || pred_col < 0)
    raise(ErrorKind::Format,
          path + ": header must contain id, ref_angle_deg, pred_angle_deg");

  std::vector<BatchRow> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    if (line.back() == '\r') line.pop_back();
    const auto fields = split(line);
    BatchRow row;
    const std::size_t need =
        std::size_t(std::max({id_col, ref_col, pred_col})) + 1;
    if (fields.size() < need) {
      row.id = fields.empty() ? "?" : fields[0];
      row.error = "short row";
      rows.push_back(row);
      continue;
    }
    row.id = fields[id_col];
    try {
      const double ref_angle = std::stod(fields[ref_col]);
      const double pred_angle = std::stod(fields[pred_col]);
      row.ref.theta_deg = ref_angle;
      row.ref.severity =
          classify_severity(ref_angle, config.severity_boundaries);
      row.ref.upper_label = row.ref.lower_label = "-";
      row.pred.theta_deg = pred_angle;
      row.pred.severity =
          classify_severity(pred_angle, config.severity_boundaries);
      row.pred.upper_label = row.pred.lower_label = "-";
      row.abs_diff = std::abs(ref_angle - pred_angle);
      row.severity_match = row.ref.severity == row.pred.severity;
      row.ok = true;
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

int cmd_measure(const MeasureArgs& args, std::ostream& out,
                std::ostream& err) {
  return guarded(out, err, [&]() {
    const MeasureConfig config = load_config(args.config_path);
    const BinaryMask mask = load_mask_file(args.mask_path);
    const MeasureOutcome outcome = measure(mask, config);
    const ordered_json report =
        measure_report(args.mask_path, outcome, config, args.timestamp);
    if (!args.overlay_path.empty())
      write_text_file(args.overlay_path,
                      render_overlay_svg(mask.width, mask.height, outcome));
    if (!args.json_path.empty())
      write_text_file(args.json_path, report.dump(2) + "\n");
    else
      emit(report, out);
    return 0;
  });
}

int cmd_eval(const EvalArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(out, err, [&]() {
    const MeasureConfig config = load_config(args.config_path);
    const BinaryMask pred = load_mask_file(args.pred_path);
    const BinaryMask ref = load_mask_file(args.ref_path);
    const SegMetrics metrics = evaluate(pred, ref, config);
    emit(metrics_report(args.pred_path, args.ref_path, metrics, config,
                        args.timestamp),
         out);
    return 0;
  });
}

int cmd_synth(const SynthArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(out, err, [&]() {
    if (args.count < 1) raise(ErrorKind::Domain, "count must be >= 1");
    const auto bytes = read_file_bytes(args.spec_path);
    const auto spec_json =
        nlohmann::json::parse(bytes.begin(), bytes.end(), nullptr, false);
    if (spec_json.is_discarded())
      raise(ErrorKind::Format, args.spec_path + " is not valid JSON");
    synth::SynthSpec spec = synth_spec_from_json(spec_json);
    if (args.seed_given) spec.seed = args.seed;
    spec.validate();

    fs::create_directories(args.out_dir);
    const std::uint64_t base_seed = spec.seed;
    const ordered_json spec_echo = synth_spec_to_json(spec);

    ordered_json files = ordered_json::array();
    for (int i = 0; i < args.count; ++i) {
      synth::SynthSpec case_spec = spec;
      case_spec.seed = base_seed + std::uint64_t(i);
      const synth::SynthResult result = synth::generate(case_spec);

      char id[32];
      std::snprintf(id, sizeof(id), "spine_%04d", i);
      const std::string mask_name = std::string(id) + ".pgm";
      const std::string truth_name = std::string(id) + "_truth.json";
      save_mask_file(result.mask,
                     (fs::path(args.out_dir) / mask_name).string());
      ordered_json truth = truth_to_json(result.truth);
      truth["id"] = id;
      truth["seed"] = case_spec.seed;
      write_text_file((fs::path(args.out_dir) / truth_name).string(),
                      truth.dump(2) + "\n");

      ordered_json entry;
      entry["id"] = id;
      entry["mask"] = mask_name;
      entry["truth"] = truth_name;
      entry["seed"] = case_spec.seed;
      entry["theta_deg"] = result.truth.cobb.theta_deg;
      entry["severity"] = to_string(result.truth.cobb.severity);
      files.push_back(std::move(entry));
    }

    ordered_json manifest;
    manifest["tool"] = kToolName;
    manifest["version"] = kToolVersion;
    manifest["count"] = args.count;
    manifest["seed"] = base_seed;
    manifest["spec"] = spec_echo;
    manifest["spec_hash"] = hex64(fnv1a64(spec_echo.dump()));
    manifest["files"] = std::move(files);
    write_text_file((fs::path(args.out_dir) / "manifest.json").string(),
                    manifest.dump(2) + "\n");
    emit(manifest, out);
    return 0;
  });
}

int cmd_netcheck(const NetcheckArgs& args, std::ostream& out,
                 std::ostream& err) {
  return guarded(out, err, [&]() {
    const punet::NetSpec spec = punet::build_spec(
        {1, args.height, args.width}, args.depth, args.base_channels);
    const punet::WeightSet weights = punet::init_weights(spec, 42);

    punet::Tensor image = punet::Tensor::zeros(spec.input);
    std::mt19937_64 rng(1234);
    for (float& v : image.data)
      v = float(double(rng() >> 11) * 0x1.0p-53);

    const punet::ForwardResult smoke = punet::forward(spec, weights, image);
    emit(netcheck_report(spec, smoke), out);
    return 0;
  });
}

int cmd_batch(const BatchArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(out, err, [&]() {
    const MeasureConfig config = load_config(args.config_path);
    const bool bypass = !args.angles_csv_path.empty();
    const std::vector<BatchRow> rows =
        bypass ? run_angles_csv(args.angles_csv_path, config)
               : run_mask_batch(args.dir, config);

    const std::string csv = batch_csv(rows);
    if (!args.csv_path.empty()) write_text_file(args.csv_path, csv);

    emit(batch_summary(bypass ? "angles_csv" : "masks", rows, config,
                       args.timestamp),
         out);
    const bool any_error =
        std::any_of(rows.begin(), rows.end(),
                    [](const BatchRow& r) { return !r.ok; });
    return any_error ? 1 : 0;
  });
}

}  // namespace spine::cli
