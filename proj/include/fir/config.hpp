#pragma once

#include <string>

#include "fir/response.hpp"

namespace fir {

// Everything a batch run needs beyond the manifest; parsed from a
// `key=value` file ('#' comments allowed, unknown keys rejected).
struct RunConfig {
  ResponseConfig response;

  int template_total = 100;
  int template_transition = 30;
  int template_smoothing = 5;
  bool template_from_data = false;  // median of the batch responses instead of parametric
  int window = 30;

  int cluster_k = 3;
  double keep_fraction = 0.25;

  // 0 rescales predictions to the truth's own peak before MAE
  double eval_peak = 0.0;
  bool eval_concat = false;  // score one concatenated series instead of per-sequence means
};

RunConfig parse_run_config(const std::string& path);
RunConfig parse_run_config_text(const std::string& text, const std::string& origin);

std::string run_config_to_text(const RunConfig& cfg);

}  // namespace fir
