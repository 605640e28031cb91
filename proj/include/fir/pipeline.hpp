#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fir/config.hpp"
#include "fir/seqio.hpp"

namespace fir::cli {

// Shared driver state for the batch subcommands. Per-sequence failures are
// logged to <out_dir>/errors.csv and the batch continues; every command
// returns 0 iff that file ends up empty.
struct BatchOptions {
  std::string manifest_path;
  std::string out_dir;
  int jobs = 1;
  RunConfig config;
};

struct SynthOptions {
  std::string out_dir;
  std::string spec_path;            // JSON spec; empty -> built-in suite
  std::string variant = "default";  // default | rise | fall | tracked
  int count = 1;
  std::uint64_t seed = 1;
  SeqFormat format = SeqFormat::Json;
  bool jump_outlier = false;  // corrupt one static landmark per sequence
};

int cmd_respond(const BatchOptions& opts);
int cmd_align(const BatchOptions& opts);
int cmd_eval(const BatchOptions& opts, const std::string& truth_path);
int cmd_cluster(const BatchOptions& opts);
int cmd_au(const BatchOptions& opts, const std::string& annotations_path);
int cmd_synth(const SynthOptions& opts);
int cmd_plot(const std::string& csv_path, const std::string& svg_path);

// `id` made safe for use inside a file name.
std::string sanitize_id(const std::string& id);

}  // namespace fir::cli
