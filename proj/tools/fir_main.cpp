#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "fir/config.hpp"
#include "fir/errors.hpp"
#include "fir/pipeline.hpp"
#include "fir/seqio.hpp"

namespace {

struct GlobalArgs {
  std::string config_path;
  std::string out_dir = "out";
  int jobs = 1;
  std::uint64_t seed = 1;
};

fir::cli::BatchOptions make_batch(const GlobalArgs& g, const std::string& manifest) {
  fir::cli::BatchOptions opts;
  opts.manifest_path = manifest;
  opts.out_dir = g.out_dir;
  opts.jobs = g.jobs;
  if (!g.config_path.empty()) opts.config = fir::parse_run_config(g.config_path);
  return opts;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"facial expression intensity responses from landmark sequences"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  GlobalArgs g;
  app.add_option("--config", g.config_path, "key=value run configuration file");
  app.add_option("--out", g.out_dir, "output directory");
  app.add_option("--jobs", g.jobs, "worker threads for batch commands")->check(CLI::PositiveNumber);
  app.add_option("--seed", g.seed, "base seed for synthetic generation");

  std::string manifest, truth, annotations, spec_path;
  std::string plot_in, plot_out;
  fir::cli::SynthOptions synth_opts;
  std::string synth_format = "json";
  int cluster_k = 0;

  CLI::App* respond = app.add_subcommand("respond", "intensity responses + weights per sequence");
  respond->add_option("--manifest", manifest, "sequence manifest csv")->required();

  CLI::App* align = app.add_subcommand("align", "warp responses onto the template");
  align->add_option("--manifest", manifest, "sequence manifest csv")->required();

  CLI::App* eval = app.add_subcommand("eval", "MAE/PCC/ICC against ground-truth intensities");
  eval->add_option("--manifest", manifest, "sequence manifest csv")->required();
  eval->add_option("--truth", truth, "ground-truth csv (per-frame or apex form)")->required();

  CLI::App* cluster = app.add_subcommand("cluster", "weight-vector subclusters per label");
  cluster->add_option("--manifest", manifest, "sequence manifest csv")->required();
  cluster->add_option("--k", cluster_k, "cluster count (overrides config)");

  CLI::App* au = app.add_subcommand("au", "action-unit responses and thresholded weights");
  au->add_option("--manifest", manifest, "sequence manifest csv")->required();
  au->add_option("--annotations", annotations, "AU annotation csv")->required();

  CLI::App* synth = app.add_subcommand("synth", "generate benchmark sequences with ground truth");
  synth->add_option("--spec", spec_path, "synthesis spec json");
  synth->add_option("--variant", synth_opts.variant, "default | rise | fall | tracked");
  synth->add_option("--count", synth_opts.count, "number of sequences")->check(CLI::PositiveNumber);
  synth->add_option("--format", synth_format, "json | long | wide");
  synth->add_flag("--jump-outlier", synth_opts.jump_outlier,
                  "corrupt one static landmark per sequence");

  CLI::App* plot = app.add_subcommand("plot", "render an emitted csv as svg");
  plot->add_option("--input", plot_in, "csv produced by this tool")->required();
  plot->add_option("--output", plot_out, "svg path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (respond->parsed()) return fir::cli::cmd_respond(make_batch(g, manifest));
    if (align->parsed()) return fir::cli::cmd_align(make_batch(g, manifest));
    if (eval->parsed()) return fir::cli::cmd_eval(make_batch(g, manifest), truth);
    if (cluster->parsed()) {
      fir::cli::BatchOptions opts = make_batch(g, manifest);
      if (cluster_k > 0) opts.config.cluster_k = cluster_k;
      return fir::cli::cmd_cluster(opts);
    }
    if (au->parsed()) return fir::cli::cmd_au(make_batch(g, manifest), annotations);
    if (synth->parsed()) {
      synth_opts.out_dir = g.out_dir;
      synth_opts.spec_path = spec_path;
      synth_opts.seed = g.seed;
      synth_opts.format = fir::seq_format_from_string(synth_format);
      return fir::cli::cmd_synth(synth_opts);
    }
    if (plot->parsed()) return fir::cli::cmd_plot(plot_in, plot_out);
  } catch (const fir::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
