#include "fir/config.hpp"

#include <sstream>

#include "fir/errors.hpp"
#include "fir/textio.hpp"

namespace fir {

namespace {

bool parse_bool(std::string_view v, std::string_view key) {
  if (v == "true" || v == "1" || v == "on") return true;
  if (v == "false" || v == "0" || v == "off") return false;
  fail(Errc::ConfigError, "bad boolean '" + std::string(v) + "' for " + std::string(key));
}

}  // namespace

RunConfig parse_run_config_text(const std::string& text, const std::string& origin) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string_view sv(line);
    while (!sv.empty() && (sv.front() == ' ' || sv.front() == '\t')) sv.remove_prefix(1);
    if (sv.empty() || sv.front() == '#') continue;
    const std::size_t eq = sv.find('=');
    if (eq == std::string_view::npos)
      fail(Errc::ConfigError,
           origin + ":" + std::to_string(lineno) + ": expected key=value");
    const std::string_view key = sv.substr(0, eq);
    const std::string_view value = sv.substr(eq + 1);
    const std::string ctx = origin + ":" + std::to_string(lineno);

    if (key == "kernel") {
      if (value == "central")
        cfg.response.kernel = DerivativeKernel::CentralDiff;
      else if (value == "forward")
        cfg.response.kernel = DerivativeKernel::ForwardDiff;
      else
        fail(Errc::ConfigError, ctx + ": kernel must be central or forward");
    } else if (key == "sigma") {
      cfg.response.sigma = textio::parse_double(value, ctx);
    } else if (key == "peak_sigma") {
      cfg.response.peak_sigma = textio::parse_double(value, ctx);
    } else if (key == "min_prominence") {
      cfg.response.min_prominence = textio::parse_double(value, ctx);
    } else if (key == "min_separation") {
      cfg.response.min_separation = static_cast<int>(textio::parse_int(value, ctx));
    } else if (key == "peak_window") {
      cfg.response.peak_window = static_cast<int>(textio::parse_int(value, ctx));
    } else if (key == "refine_passes") {
      cfg.response.refine_passes = static_cast<int>(textio::parse_int(value, ctx));
    } else if (key == "refine_fraction") {
      cfg.response.refine_fraction = textio::parse_double(value, ctx);
    } else if (key == "refine_peak_sigma") {
      cfg.response.refine_peak_sigma = textio::parse_double(value, ctx);
    } else if (key == "refine_min_prominence") {
      cfg.response.refine_min_prominence = textio::parse_double(value, ctx);
    } else if (key == "refine_peak_window") {
      cfg.response.refine_peak_window = static_cast<int>(textio::parse_int(value, ctx));
    } else if (key == "median_excludes_degenerate") {
      cfg.response.median_excludes_degenerate = parse_bool(value, key);
    } else if (key == "fallback_enabled") {
      cfg.response.fallback_enabled = parse_bool(value, key);
    } else if (key == "reference_point") {
      cfg.response.reference_point = static_cast<int>(textio::parse_int(value, ctx));
    } else if (key == "template_total") {
      cfg.template_total = static_cast<int>(textio::parse_int(value, ctx));
    } else if (key == "template_transition") {
      cfg.template_transition = static_cast<int>(textio::parse_int(value, ctx));
    } else if (key == "template_smoothing") {
      cfg.template_smoothing = static_cast<int>(textio::parse_int(value, ctx));
    } else if (key == "template_from_data") {
      cfg.template_from_data = parse_bool(value, key);
    } else if (key == "window") {
      cfg.window = static_cast<int>(textio::parse_int(value, ctx));
    } else if (key == "cluster_k") {
      cfg.cluster_k = static_cast<int>(textio::parse_int(value, ctx));
    } else if (key == "keep_fraction") {
      cfg.keep_fraction = textio::parse_double(value, ctx);
    } else if (key == "eval_peak") {
      cfg.eval_peak = textio::parse_double(value, ctx);
    } else if (key == "eval_concat") {
      cfg.eval_concat = parse_bool(value, key);
    } else {
      fail(Errc::ConfigError, ctx + ": unknown key '" + std::string(key) + "'");
    }
  }
  return cfg;
}

RunConfig parse_run_config(const std::string& path) {
  const auto lines = textio::read_lines(path);
  std::string text;
  for (const std::string& l : lines) {
    text += l;
    text += '\n';
  }
  return parse_run_config_text(text, path);
}

std::string run_config_to_text(const RunConfig& cfg) {
  std::string out;
  const auto add = [&out](const std::string& k, const std::string& v) {
    out += k;
    out += '=';
    out += v;
    out += '\n';
  };
  add("kernel", cfg.response.kernel == DerivativeKernel::CentralDiff ? "central" : "forward");
  add("sigma", textio::format_double(cfg.response.sigma));
  add("peak_sigma", textio::format_double(cfg.response.peak_sigma));
  add("min_prominence", textio::format_double(cfg.response.min_prominence));
  add("min_separation", std::to_string(cfg.response.min_separation));
  add("peak_window", std::to_string(cfg.response.peak_window));
  add("refine_passes", std::to_string(cfg.response.refine_passes));
  add("refine_fraction", textio::format_double(cfg.response.refine_fraction));
  add("refine_peak_sigma", textio::format_double(cfg.response.refine_peak_sigma));
  add("refine_min_prominence", textio::format_double(cfg.response.refine_min_prominence));
  add("refine_peak_window", std::to_string(cfg.response.refine_peak_window));
  add("median_excludes_degenerate",
      cfg.response.median_excludes_degenerate ? "true" : "false");
  add("fallback_enabled", cfg.response.fallback_enabled ? "true" : "false");
  if (cfg.response.reference_point)
    add("reference_point", std::to_string(*cfg.response.reference_point));
  add("template_total", std::to_string(cfg.template_total));
  add("template_transition", std::to_string(cfg.template_transition));
  add("template_smoothing", std::to_string(cfg.template_smoothing));
  add("template_from_data", cfg.template_from_data ? "true" : "false");
  add("window", std::to_string(cfg.window));
  add("cluster_k", std::to_string(cfg.cluster_k));
  add("keep_fraction", textio::format_double(cfg.keep_fraction));
  add("eval_peak", textio::format_double(cfg.eval_peak));
  add("eval_concat", cfg.eval_concat ? "true" : "false");
  return out;
}

}  // namespace fir
