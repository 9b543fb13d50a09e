// spinemeasure: scoliosis measurement from binary vertebra masks.
//
//   measure  <mask> [--config F] [--overlay F.svg] [--json F]
//   eval     <pred> <ref> [--config F]
//   synth    <spec.json> <outdir> --count N --seed S
//   netcheck <H> <W> [--depth D] [--base-channels C]
//   batch    <dir> [--config F] [--csv F] [--angles-csv F]

#include <CLI11.hpp>

#include <iostream>

#include "../src/cli/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Cobb angle measurement and vertebra segmentation toolkit"};
  app.require_subcommand(1);

  spine::cli::MeasureArgs measure_args;
  auto* measure = app.add_subcommand(
      "measure", "Measure the Cobb angle from a segmentation mask");
  measure->add_option("mask", measure_args.mask_path, "Mask file (PGM or PNG)")
      ->required();
  measure->add_option("--config", measure_args.config_path,
                      "JSON measurement config");
  measure->add_option("--overlay", measure_args.overlay_path,
                      "Write an SVG measurement overlay");
  measure->add_option("--json", measure_args.json_path,
                      "Write the JSON report to a file instead of stdout");
  measure->add_flag("--timestamp", measure_args.timestamp,
                    "Embed a UTC timestamp in the report");

  spine::cli::EvalArgs eval_args;
  auto* eval = app.add_subcommand(
      "eval", "Segmentation metrics between predicted and reference masks");
  eval->add_option("pred", eval_args.pred_path, "Predicted mask")->required();
  eval->add_option("ref", eval_args.ref_path, "Reference mask")->required();
  eval->add_option("--config", eval_args.config_path,
                   "JSON measurement config");
  eval->add_flag("--timestamp", eval_args.timestamp,
                 "Embed a UTC timestamp in the report");

  spine::cli::SynthArgs synth_args;
  auto* synth = app.add_subcommand(
      "synth", "Generate synthetic spine masks with analytic ground truth");
  synth->add_option("spec", synth_args.spec_path, "SynthSpec JSON file")
      ->required();
  synth->add_option("outdir", synth_args.out_dir, "Output directory")
      ->required();
  synth->add_option("--count", synth_args.count, "Number of masks")
      ->required();
  auto* seed_opt =
      synth->add_option("--seed", synth_args.seed, "Base random seed")
          ->required();

  spine::cli::NetcheckArgs net_args;
  auto* netcheck = app.add_subcommand(
      "netcheck", "Progressive U-Net shape audit and forward smoke run");
  netcheck->add_option("height", net_args.height, "Input height")->required();
  netcheck->add_option("width", net_args.width, "Input width")->required();
  netcheck->add_option("--depth", net_args.depth, "Encoder stage count");
  netcheck->add_option("--base-channels", net_args.base_channels,
                       "Channels of the first encoder stage");

  spine::cli::BatchArgs batch_args;
  auto* batch = app.add_subcommand(
      "batch", "Measure a directory of <id>_pred / <id>_ref mask pairs");
  batch->add_option("dir", batch_args.dir, "Directory of mask pairs")
      ->required();
  batch->add_option("--config", batch_args.config_path,
                    "JSON measurement config");
  batch->add_option("--csv", batch_args.csv_path, "Write per-case CSV here");
  batch->add_option("--angles-csv", batch_args.angles_csv_path,
                    "Bypass masks: classify pre-computed angle pairs");
  batch->add_flag("--timestamp", batch_args.timestamp,
                  "Embed a UTC timestamp in the summary");

  CLI11_PARSE(app, argc, argv);

  if (measure->parsed())
    return spine::cli::cmd_measure(measure_args, std::cout, std::cerr);
  if (eval->parsed())
    return spine::cli::cmd_eval(eval_args, std::cout, std::cerr);
  if (synth->parsed()) {
    synth_args.seed_given = seed_opt->count() > 0;
    return spine::cli::cmd_synth(synth_args, std::cout, std::cerr);
  }
  if (netcheck->parsed())
    return spine::cli::cmd_netcheck(net_args, std::cout, std::cerr);
  if (batch->parsed())
    return spine::cli::cmd_batch(batch_args, std::cout, std::cerr);
  return 2;
}
