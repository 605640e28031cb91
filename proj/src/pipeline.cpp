#include "fir/pipeline.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <thread>

#include "fir/align.hpp"
#include "fir/analysis.hpp"
#include "fir/baseline.hpp"
#include "fir/errors.hpp"
#include "fir/kernels.hpp"
#include "fir/metrics.hpp"
#include "fir/plot.hpp"
#include "fir/response.hpp"
#include "fir/synth.hpp"
#include "fir/textio.hpp"

namespace fir::cli {

namespace {

namespace fs = std::filesystem;
using textio::format_double;

struct BatchError {
  std::size_t entry_index = 0;
  std::string sequence_id;
  std::string stage;
  std::string message;
};

class ErrorLog {
 public:
  void add(std::size_t index, const std::string& id, const std::string& stage,
           const std::string& message) {
    std::lock_guard<std::mutex> lock(mu_);
    errors_.push_back({index, id, stage, sanitize_message(message)});
  }

  // errors.csv is always written so its absence never masks a failed run
  int flush(const std::string& out_dir) {
    std::sort(errors_.begin(), errors_.end(),
              [](const BatchError& a, const BatchError& b) { return a.entry_index < b.entry_index; });
    std::string csv = "sequence_id,stage,message\n";
    for (const BatchError& e : errors_) csv += e.sequence_id + "," + e.stage + "," + e.message + "\n";
    textio::write_file((fs::path(out_dir) / "errors.csv").string(), csv);
    return errors_.empty() ? 0 : 1;
  }

  bool empty() const { return errors_.empty(); }

 private:
  static std::string sanitize_message(std::string m) {
    for (char& c : m)
      if (c == ',' || c == '\n' || c == '\r') c = ';';
    return m;
  }

  std::mutex mu_;
  std::vector<BatchError> errors_;
};

void ensure_out_dir(const std::string& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) fail(Errc::IoError, "cannot create output directory " + out_dir);
}

// Output files are keyed by sanitized id, so colliding ids would let two
// workers race on one file.
void require_unique_ids(const std::vector<ManifestEntry>& entries) {
  std::set<std::string> seen;
  for (const ManifestEntry& e : entries)
    if (!seen.insert(sanitize_id(e.sequence_id)).second)
      fail(Errc::ParseError,
           "duplicate (or colliding) sequence_id '" + e.sequence_id + "' in manifest");
}

// Runs fn(i) over all entries on `jobs` workers. fn must only touch its own
// slot of any result vector; files it writes must be keyed by sequence id.
void parallel_foreach(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn) {
  const int workers = std::max(1, jobs);
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        fn(i);
      }
    });
  }
  for (std::thread& t : pool) t.join();
}

std::string quantile_row(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const auto q = [&](double p) {
    const double pos = p * (static_cast<double>(values.size()) - 1.0);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    if (values[lo] == values[hi]) return values[lo];
    const double frac = pos - static_cast<double>(lo);
    return values[lo] * (1.0 - frac) + values[hi] * frac;
  };
  return format_double(q(0.05)) + "," + format_double(q(0.25)) + "," + format_double(q(0.5)) +
         "," + format_double(q(0.75)) + "," + format_double(q(0.95));
}

std::string transition_fields(const IntensityResult& r) {
  std::string t1 = "", t2 = "", mode = "none";
  if (r.transitions) {
    if (r.transitions->t1) t1 = std::to_string(*r.transitions->t1);
    if (r.transitions->t2) t2 = std::to_string(*r.transitions->t2);
    switch (r.transitions->mode) {
      case TransitionMode::TwoSided: mode = "two_sided"; break;
      case TransitionMode::RiseOnly: mode = "rise_only"; break;
      case TransitionMode::FallOnly: mode = "fall_only"; break;
    }
  }
  return t1 + "," + t2 + "," + mode + "," + (r.low_confidence ? "1" : "0");
}

void write_intensity_csvs(const IntensityResult& r, const std::string& out_dir,
                          const std::string& safe_id) {
  std::string resp = "t,final,final_norm,approx\n";
  for (std::size_t t = 0; t < r.final.size(); ++t) {
    resp += std::to_string(t);
    resp += ',';
    resp += format_double(r.final[t]);
    resp += ',';
    resp += format_double(r.final_norm[t]);
    resp += ',';
    resp += format_double(r.approx[t]);
    resp += '\n';
  }
  textio::write_file((fs::path(out_dir) / ("response_" + safe_id + ".csv")).string(), resp);

  std::string wcsv = "point,weight,distance,flipped\n";
  for (std::size_t i = 0; i < r.weights.size(); ++i) {
    wcsv += std::to_string(i);
    wcsv += ',';
    wcsv += format_double(r.weights[i]);
    wcsv += ',';
    wcsv += format_double(r.distances[i]);
    wcsv += ',';
    wcsv += r.flipped[i] ? '1' : '0';
    wcsv += '\n';
  }
  textio::write_file((fs::path(out_dir) / ("weights_" + safe_id + ".csv")).string(), wcsv);
}

}  // namespace

std::string sanitize_id(const std::string& id) {
  std::string out = id;
  for (char& c : out)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
  return out.empty() ? "_" : out;
}

int cmd_respond(const BatchOptions& opts) {
  ensure_out_dir(opts.out_dir);
  const std::vector<ManifestEntry> entries = load_manifest(opts.manifest_path);
  require_unique_ids(entries);
  ErrorLog errors;
  std::vector<std::optional<std::string>> transition_rows(entries.size());

  parallel_foreach(entries.size(), opts.jobs, [&](std::size_t i) {
    const ManifestEntry& e = entries[i];
    try {
      const Sequence seq = load_manifest_entry(e);
      const IntensityResult r = estimate_intensity(seq, opts.config.response);
      write_intensity_csvs(r, opts.out_dir, sanitize_id(e.sequence_id));
      transition_rows[i] = e.sequence_id + "," + transition_fields(r);
    } catch (const std::exception& ex) {
      errors.add(i, e.sequence_id, "respond", ex.what());
    }
  });

  std::string tcsv = "sequence_id,t1,t2,mode,low_confidence\n";
  for (const auto& row : transition_rows)
    if (row) tcsv += *row + "\n";
  textio::write_file((fs::path(opts.out_dir) / "transitions.csv").string(), tcsv);
  return errors.flush(opts.out_dir);
}

int cmd_align(const BatchOptions& opts) {
  ensure_out_dir(opts.out_dir);
  const std::vector<ManifestEntry> entries = load_manifest(opts.manifest_path);
  require_unique_ids(entries);
  const int window = opts.config.window;
  ErrorLog errors;

  struct Prepared {
    Sequence seq;
    IntensityResult intensity;
  };
  std::vector<std::optional<Prepared>> prepared(entries.size());
  parallel_foreach(entries.size(), opts.jobs, [&](std::size_t i) {
    try {
      Prepared p;
      p.seq = load_manifest_entry(entries[i]);
      p.intensity = estimate_intensity(p.seq, opts.config.response);
      prepared[i] = std::move(p);
    } catch (const std::exception& ex) {
      errors.add(i, entries[i].sequence_id, "align", ex.what());
    }
  });

  ScalarResponse tpl;
  if (opts.config.template_from_data) {
    std::vector<ScalarResponse> responses;
    for (const auto& p : prepared)
      if (p) responses.push_back(p->intensity.final_norm);
    if (responses.empty()) {
      textio::write_file((fs::path(opts.out_dir) / "alignment_report.csv").string(),
                         "sequence_id,cost,chosen_transition,window_error_first,window_error_second\n");
      textio::write_file((fs::path(opts.out_dir) / "aligned_distribution.csv").string(),
                         "frame,q05,q25,median,q75,q95\n");
      textio::write_file((fs::path(opts.out_dir) / "alignment_mse.csv").string(), "feature,mse\n");
      return errors.flush(opts.out_dir);
    }
    tpl = make_template_from_responses(responses, opts.config.template_total,
                                       opts.config.template_smoothing);
  } else {
    tpl = make_template(opts.config.template_total, opts.config.template_transition,
                        opts.config.template_smoothing);
  }

  struct Row {
    std::string report;
    std::vector<double> warped;          // proposed response on template time
    std::vector<double> window_proposed; // selected transition window
    std::vector<double> window_pca;
  };
  std::vector<std::optional<Row>> rows(entries.size());

  parallel_foreach(entries.size(), opts.jobs, [&](std::size_t i) {
    if (!prepared[i]) return;
    const ManifestEntry& e = entries[i];
    try {
      const Sequence& seq = prepared[i]->seq;
      const IntensityResult& r = prepared[i]->intensity;
      const AlignmentResult a =
          select_transition(dtw_align(r.final_norm, tpl), tpl, window);

      const Sequence centered = center_sequence(seq, opts.config.response.reference_point);
      const ScalarResponse pca = global_pca_response(centered, r.final_norm);
      const AlignmentResult apca = select_transition(dtw_align(pca, tpl), tpl, window);

      const std::string safe = sanitize_id(e.sequence_id);
      std::string pcsv = "src_frame,tpl_frame\n";
      for (const auto& [s, t] : a.path.pairs)
        pcsv += std::to_string(s) + "," + std::to_string(t) + "\n";
      textio::write_file((fs::path(opts.out_dir) / ("warp_" + safe + ".csv")).string(), pcsv);

      const Sequence warped_seq =
          warp_sequence(centered, a.path, opts.config.template_total);
      save_sequence(warped_seq,
                    (fs::path(opts.out_dir) / ("aligned_" + safe + ".csv")).string(),
                    SeqFormat::LongCsv);

      Row row;
      row.report = e.sequence_id + "," + format_double(a.cost) + "," +
                   (a.chosen_transition == TransitionChoice::First ? "first" : "second_flipped") +
                   "," + format_double(a.window_error_first) + "," +
                   format_double(a.window_error_second);
      row.warped = a.warped.values;
      row.window_proposed = selected_window(a, window);
      row.window_pca = selected_window(apca, window);
      rows[i] = std::move(row);
    } catch (const std::exception& ex) {
      errors.add(i, e.sequence_id, "align", ex.what());
    }
  });

  std::string report = "sequence_id,cost,chosen_transition,window_error_first,window_error_second\n";
  std::vector<ScalarResponse> prop_windows, pca_windows;
  std::vector<const std::vector<double>*> warped_all;
  for (const auto& row : rows) {
    if (!row) continue;
    report += row->report + "\n";
    prop_windows.emplace_back(row->window_proposed, ResponseKind::Aligned);
    pca_windows.emplace_back(row->window_pca, ResponseKind::Aligned);
    warped_all.push_back(&row->warped);
  }
  textio::write_file((fs::path(opts.out_dir) / "alignment_report.csv").string(), report);

  std::string dist = "frame,q05,q25,median,q75,q95\n";
  if (!warped_all.empty()) {
    for (int t = 0; t < opts.config.template_total; ++t) {
      std::vector<double> column;
      column.reserve(warped_all.size());
      for (const auto* w : warped_all) column.push_back((*w)[t]);
      dist += std::to_string(t) + "," + quantile_row(std::move(column)) + "\n";
    }
  }
  textio::write_file((fs::path(opts.out_dir) / "aligned_distribution.csv").string(), dist);

  std::string mse = "feature,mse\n";
  if (!prop_windows.empty()) {
    mse += "proposed," + format_double(alignment_mse(prop_windows, tpl, window)) + "\n";
    mse += "global_pca," + format_double(alignment_mse(pca_windows, tpl, window)) + "\n";
  }
  textio::write_file((fs::path(opts.out_dir) / "alignment_mse.csv").string(), mse);
  return errors.flush(opts.out_dir);
}

namespace {

struct TruthTable {
  // either per-frame curves or apex rows
  std::map<std::string, std::vector<double>> curves;
  std::map<std::string, std::pair<int, double>> apexes;  // frame, peak
  bool per_frame = false;
};

TruthTable load_truth(const std::string& path, double default_peak) {
  const std::vector<std::string> lines = textio::read_lines(path);
  if (lines.empty()) fail(Errc::ParseError, "empty truth file " + path);
  TruthTable table;
  const auto header = textio::split(lines[0], ',');
  if (header.size() == 3 && header[0] == "sequence_id" && header[1] == "t" &&
      header[2] == "intensity") {
    table.per_frame = true;
    std::map<std::string, std::map<long long, double>> rows;
    for (std::size_t li = 1; li < lines.size(); ++li) {
      if (lines[li].empty()) continue;
      const auto f = textio::split(lines[li], ',');
      if (f.size() != 3) fail(Errc::ParseError, "bad truth row in " + path);
      rows[std::string(f[0])][textio::parse_int(f[1], path)] = textio::parse_double(f[2], path);
    }
    for (auto& [id, frames] : rows) {
      std::vector<double> curve;
      long long expect = 0;
      for (const auto& [t, v] : frames) {
        if (t != expect) fail(Errc::ShapeError, "truth frames not contiguous for " + id);
        curve.push_back(v);
        ++expect;
      }
      table.curves[id] = std::move(curve);
    }
  } else if ((header.size() == 2 || header.size() == 3) && header[0] == "sequence_id" &&
             header[1] == "apex_frame") {
    for (std::size_t li = 1; li < lines.size(); ++li) {
      if (lines[li].empty()) continue;
      const auto f = textio::split(lines[li], ',');
      if (f.size() != header.size()) fail(Errc::ParseError, "bad truth row in " + path);
      const double peak =
          header.size() == 3 ? textio::parse_double(f[2], path) : default_peak;
      table.apexes[std::string(f[0])] = {static_cast<int>(textio::parse_int(f[1], path)), peak};
    }
  } else {
    fail(Errc::ParseError, "unrecognized truth header in " + path);
  }
  return table;
}

}  // namespace

int cmd_eval(const BatchOptions& opts, const std::string& truth_path) {
  ensure_out_dir(opts.out_dir);
  const std::vector<ManifestEntry> entries = load_manifest(opts.manifest_path);
  require_unique_ids(entries);
  const double default_peak = opts.config.eval_peak > 0.0 ? opts.config.eval_peak : 1.0;
  const TruthTable truth = load_truth(truth_path, default_peak);
  ErrorLog errors;
  std::vector<std::optional<SequenceEval>> rows(entries.size());
  std::vector<std::optional<std::pair<std::vector<double>, std::vector<double>>>> series(
      entries.size());

  parallel_foreach(entries.size(), opts.jobs, [&](std::size_t i) {
    const ManifestEntry& e = entries[i];
    try {
      const Sequence seq = load_manifest_entry(e);
      ScalarResponse truth_curve;
      if (truth.per_frame) {
        const auto it = truth.curves.find(e.sequence_id);
        if (it == truth.curves.end()) fail(Errc::ParseError, "no truth for " + e.sequence_id);
        if (static_cast<int>(it->second.size()) != seq.num_frames())
          fail(Errc::LengthMismatch, "truth length != num_frames for " + e.sequence_id);
        truth_curve = ScalarResponse(it->second, ResponseKind::Approximated);
      } else {
        const auto it = truth.apexes.find(e.sequence_id);
        if (it == truth.apexes.end()) fail(Errc::ParseError, "no truth for " + e.sequence_id);
        truth_curve =
            pseudo_ground_truth_triangle(it->second.first, seq.num_frames(), it->second.second);
      }
      const IntensityResult r = estimate_intensity(seq, opts.config.response);
      // predictions are rescaled to the truth's intensity range before MAE
      const double scale = opts.config.eval_peak > 0.0
                               ? opts.config.eval_peak
                               : *std::max_element(truth_curve.values.begin(),
                                                   truth_curve.values.end());
      ScalarResponse pred = r.final_norm;
      for (double& v : pred.values) v *= scale;
      SequenceEval ev;
      ev.sequence_id = e.sequence_id;
      ev.mae = mae(pred, truth_curve);
      ev.pcc = pcc(pred, truth_curve);
      ev.icc = icc(pred, truth_curve);
      rows[i] = ev;
      if (opts.config.eval_concat)
        series[i] = std::make_pair(pred.values, truth_curve.values);
    } catch (const std::exception& ex) {
      errors.add(i, e.sequence_id, "eval", ex.what());
    }
  });

  std::vector<SequenceEval> ok_rows;
  for (const auto& r : rows)
    if (r) ok_rows.push_back(*r);
  const EvalReport report = aggregate_eval(std::move(ok_rows));
  std::string csv = "sequence_id,mae,pcc,icc\n";
  for (const SequenceEval& e : report.per_sequence)
    csv += e.sequence_id + "," + format_double(e.mae) + "," + format_double(e.pcc) + "," +
           format_double(e.icc) + "\n";
  if (opts.config.eval_concat && !report.per_sequence.empty()) {
    // one score over all frames of all sequences glued together
    std::vector<double> pred_all, truth_all;
    for (const auto& s : series) {
      if (!s) continue;
      pred_all.insert(pred_all.end(), s->first.begin(), s->first.end());
      truth_all.insert(truth_all.end(), s->second.begin(), s->second.end());
    }
    const ScalarResponse pa(pred_all, ResponseKind::Final);
    const ScalarResponse ta(truth_all, ResponseKind::Approximated);
    csv += "summary," + format_double(mae(pa, ta)) + "," + format_double(pcc(pa, ta)) + "," +
           format_double(icc(pa, ta)) + "\n";
  } else {
    csv += "summary," + format_double(report.mae) + "," + format_double(report.pcc) + "," +
           format_double(report.icc) + "\n";
  }
  textio::write_file((fs::path(opts.out_dir) / "eval_report.csv").string(), csv);
  return errors.flush(opts.out_dir);
}

int cmd_cluster(const BatchOptions& opts) {
  ensure_out_dir(opts.out_dir);
  const std::vector<ManifestEntry> entries = load_manifest(opts.manifest_path);
  require_unique_ids(entries);
  ErrorLog errors;

  struct Item {
    std::string id;
    std::string label;
    std::vector<double> weights;
    std::vector<double> apex_shape;
    int dim = 0;
  };
  std::vector<std::optional<Item>> items(entries.size());

  parallel_foreach(entries.size(), opts.jobs, [&](std::size_t i) {
    const ManifestEntry& e = entries[i];
    try {
      const Sequence seq = load_manifest_entry(e);
      const IntensityResult r = estimate_intensity(seq, opts.config.response);
      Item item;
      item.id = e.sequence_id;
      item.label = e.label.empty() ? "unlabeled" : e.label;
      item.weights = r.weights.weights;
      // full-expression frame: transition midpoint when both edges exist,
      // otherwise the strongest frame of the response
      int apex = 0;
      if (r.transitions && r.transitions->mode == TransitionMode::TwoSided) {
        apex = apex_frame(*r.transitions);
      } else {
        const auto& v = r.final_norm.values;
        apex = static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
      }
      const Sequence centered = center_sequence(seq, opts.config.response.reference_point);
      item.apex_shape = centered.frame(apex);
      item.dim = seq.dim();
      items[i] = std::move(item);
    } catch (const std::exception& ex) {
      errors.add(i, e.sequence_id, "cluster", ex.what());
    }
  });

  // group by label in manifest order
  std::vector<std::string> group_order;
  std::map<std::string, std::vector<const Item*>> groups;
  for (const auto& item : items) {
    if (!item) continue;
    if (groups.find(item->label) == groups.end()) group_order.push_back(item->label);
    groups[item->label].push_back(&*item);
  }

  const int k = opts.config.cluster_k;
  for (const std::string& label : group_order) {
    const auto& members = groups[label];
    const std::string safe = sanitize_id(label);
    if (static_cast<int>(members.size()) < k) {
      errors.add(entries.size(), label, "cluster",
                 "BadK: group '" + label + "' has " + std::to_string(members.size()) +
                     " sequences, needs at least " + std::to_string(k));
      continue;
    }
    std::vector<std::vector<double>> rows;
    std::vector<std::vector<double>> shapes;
    for (const Item* m : members) {
      rows.push_back(m->weights);
      shapes.push_back(m->apex_shape);
    }
    ClusterResult cr;
    try {
      cr = ward_cluster(rows, k, &shapes);
    } catch (const std::exception& ex) {
      errors.add(entries.size(), label, "cluster", ex.what());
      continue;
    }

    std::string labels_csv = "sequence_id,cluster\n";
    for (std::size_t m = 0; m < members.size(); ++m)
      labels_csv += members[m]->id + "," + std::to_string(cr.labels[m]) + "\n";
    textio::write_file((fs::path(opts.out_dir) / ("cluster_labels_" + safe + ".csv")).string(),
                       labels_csv);

    std::string tree_csv = "step,node_a,node_b,height,size\n";
    for (std::size_t s = 0; s < cr.merge_tree.size(); ++s)
      tree_csv += std::to_string(s) + "," + std::to_string(cr.merge_tree[s].node_a) + "," +
                  std::to_string(cr.merge_tree[s].node_b) + "," +
                  format_double(cr.merge_tree[s].height) + "," +
                  std::to_string(cr.merge_tree[s].size) + "\n";
    textio::write_file((fs::path(opts.out_dir) / ("merge_tree_" + safe + ".csv")).string(),
                       tree_csv);

    std::string mw_csv = "cluster,point,weight\n";
    for (int c = 0; c < cr.k; ++c)
      for (std::size_t p = 0; p < cr.mean_weights[c].size(); ++p)
        mw_csv += std::to_string(c) + "," + std::to_string(p) + "," +
                  format_double(cr.mean_weights[c][p]) + "\n";
    textio::write_file((fs::path(opts.out_dir) / ("mean_weights_" + safe + ".csv")).string(),
                       mw_csv);

    const int d = members.front()->dim;
    for (int c = 0; c < cr.k; ++c) {
      const int n_points = static_cast<int>(cr.mean_shapes[c].size()) / d;
      Sequence shape(d, n_points, 2);  // sequences carry >= 2 frames; repeat the mean shape
      shape.id = label + "_cluster" + std::to_string(c);
      for (int p = 0; p < n_points; ++p)
        for (int a = 0; a < d; ++a) {
          shape.set(a, p, 0, cr.mean_shapes[c][static_cast<std::size_t>(p) * d + a]);
          shape.set(a, p, 1, cr.mean_shapes[c][static_cast<std::size_t>(p) * d + a]);
        }
      save_sequence(
          shape,
          (fs::path(opts.out_dir) / ("mean_shape_" + safe + "_" + std::to_string(c) + ".json"))
              .string(),
          SeqFormat::Json);
    }
  }
  return errors.flush(opts.out_dir);
}

namespace {

struct Annotation {
  std::string sequence_id;
  AUEvent event;
};

std::vector<Annotation> load_annotations(const std::string& path) {
  const std::vector<std::string> lines = textio::read_lines(path);
  if (lines.empty()) fail(Errc::ParseError, "empty annotation file " + path);
  if (lines[0] != "sequence_id,au_id,ne_start,onset,apex,offset,ne_end")
    fail(Errc::ParseError, "bad annotation header in " + path);
  std::vector<Annotation> out;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (lines[li].empty()) continue;
    const auto f = textio::split(lines[li], ',');
    if (f.size() != 7) fail(Errc::ParseError, "bad annotation row in " + path);
    Annotation a;
    a.sequence_id = std::string(f[0]);
    a.event.au_id = std::string(f[1]);
    a.event.ne_start = static_cast<int>(textio::parse_int(f[2], path));
    a.event.onset = static_cast<int>(textio::parse_int(f[3], path));
    a.event.apex = static_cast<int>(textio::parse_int(f[4], path));
    a.event.offset = static_cast<int>(textio::parse_int(f[5], path));
    a.event.ne_end = static_cast<int>(textio::parse_int(f[6], path));
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace

int cmd_au(const BatchOptions& opts, const std::string& annotations_path) {
  ensure_out_dir(opts.out_dir);
  const std::vector<ManifestEntry> entries = load_manifest(opts.manifest_path);
  require_unique_ids(entries);
  const std::vector<Annotation> annotations = load_annotations(annotations_path);
  ErrorLog errors;

  std::map<std::string, std::vector<const Annotation*>> by_sequence;
  for (const Annotation& a : annotations) by_sequence[a.sequence_id].push_back(&a);
  {
    std::set<std::string> known;
    for (const ManifestEntry& e : entries) known.insert(e.sequence_id);
    std::size_t row = entries.size();
    for (const auto& [id, evs] : by_sequence)
      if (!known.count(id))
        errors.add(row++, id, "au", "annotation references unknown sequence_id");
  }

  struct EventRow {
    std::string au_id;
    std::string csv_row;
    double mse_pca = 0.0, mse_full = 0.0, mse_thr = 0.0;
  };
  std::vector<std::optional<std::vector<EventRow>>> results(entries.size());

  parallel_foreach(entries.size(), opts.jobs, [&](std::size_t i) {
    const ManifestEntry& e = entries[i];
    const auto it = by_sequence.find(e.sequence_id);
    if (it == by_sequence.end()) return;
    try {
      const Sequence seq = load_manifest_entry(e);
      const Sequence centered = center_sequence(seq, opts.config.response.reference_point);
      std::vector<EventRow> rows;
      std::map<std::string, int> event_counter;
      for (const Annotation* a : it->second) {
        const int idx = event_counter[a->event.au_id]++;
        const AuIntensityResult r =
            au_intensity(seq, a->event, opts.config.response, opts.config.keep_fraction);
        const ScalarResponse pca = global_pca_response(centered, r.base.final_norm);
        const double mse_pca = kernels::l2sq(pca.values, r.base.approx.values);

        const std::string safe = sanitize_id(e.sequence_id) + "_" +
                                 sanitize_id(a->event.au_id) + "_" + std::to_string(idx);
        std::string csv = "t,approx,final_full_norm,final_thresholded_norm,global_pca\n";
        for (std::size_t t = 0; t < r.base.approx.size(); ++t) {
          csv += std::to_string(t);
          csv += ',';
          csv += format_double(r.base.approx[t]);
          csv += ',';
          csv += format_double(r.base.final_norm[t]);
          csv += ',';
          csv += format_double(r.final_thresholded_norm[t]);
          csv += ',';
          csv += format_double(pca[t]);
          csv += '\n';
        }
        textio::write_file((fs::path(opts.out_dir) / ("au_response_" + safe + ".csv")).string(),
                           csv);

        std::string wcsv = "point,weight,weight_thresholded\n";
        for (std::size_t p = 0; p < r.base.weights.size(); ++p)
          wcsv += std::to_string(p) + "," + format_double(r.base.weights[p]) + "," +
                  format_double(r.thresholded_weights[p]) + "\n";
        textio::write_file((fs::path(opts.out_dir) / ("au_weights_" + safe + ".csv")).string(),
                           wcsv);

        EventRow row;
        row.au_id = a->event.au_id;
        row.mse_pca = mse_pca;
        row.mse_full = r.mse_full;
        row.mse_thr = r.mse_thresholded;
        row.csv_row = e.sequence_id + "," + a->event.au_id + "," + std::to_string(idx) + "," +
                      format_double(mse_pca) + "," + format_double(r.mse_full) + "," +
                      format_double(r.mse_thresholded);
        rows.push_back(std::move(row));
      }
      results[i] = std::move(rows);
    } catch (const std::exception& ex) {
      errors.add(i, e.sequence_id, "au", ex.what());
    }
  });

  std::string events_csv = "sequence_id,au_id,event,mse_pca,mse_full,mse_thresholded\n";
  std::vector<std::string> au_order;
  std::map<std::string, std::array<double, 4>> summary;  // pca, full, thr, count
  for (const auto& rows : results) {
    if (!rows) continue;
    for (const EventRow& row : *rows) {
      events_csv += row.csv_row + "\n";
      if (summary.find(row.au_id) == summary.end()) au_order.push_back(row.au_id);
      auto& acc = summary[row.au_id];
      acc[0] += row.mse_pca;
      acc[1] += row.mse_full;
      acc[2] += row.mse_thr;
      acc[3] += 1.0;
    }
  }
  textio::write_file((fs::path(opts.out_dir) / "au_events.csv").string(), events_csv);

  std::sort(au_order.begin(), au_order.end());
  std::string sum_csv = "au_id,mse_pca,mse_full,mse_thresholded\n";
  for (const std::string& au : au_order) {
    const auto& acc = summary[au];
    sum_csv += au + "," + format_double(acc[0] / acc[3]) + "," + format_double(acc[1] / acc[3]) +
               "," + format_double(acc[2] / acc[3]) + "\n";
  }
  textio::write_file((fs::path(opts.out_dir) / "au_summary.csv").string(), sum_csv);
  return errors.flush(opts.out_dir);
}

int cmd_synth(const SynthOptions& opts) {
  ensure_out_dir(opts.out_dir);

  std::vector<synth::SynthSpec> specs;
  if (!opts.spec_path.empty()) {
    specs.push_back(synth::spec_from_json_file(opts.spec_path));
  } else {
    for (int i = 0; i < opts.count; ++i) {
      const std::uint64_t seed = opts.seed + static_cast<std::uint64_t>(i);
      synth::SynthSpec spec;
      if (opts.variant == "default")
        spec = synth::default_suite_spec(seed);
      else if (opts.variant == "rise")
        spec = synth::rise_only_suite_spec(seed);
      else if (opts.variant == "fall")
        spec = synth::fall_only_suite_spec(seed);
      else if (opts.variant == "tracked")
        spec = synth::tracked_face_spec(seed);
      else
        fail(Errc::BadSpec, "unknown suite variant '" + opts.variant + "'");
      if (opts.jump_outlier) {
        // corrupt the first landmark that neither moves nor anchors
        // centering; when every landmark moves, sacrifice a mover (the
        // jumps overwrite its frames anyway)
        std::vector<char> is_mover(spec.num_points, 0);
        for (const synth::Mover& m : spec.movers) is_mover[m.point] = 1;
        int victim = -1;
        for (int p = 0; p < spec.num_points && victim < 0; ++p)
          if (p != spec.nose_index && !is_mover[p]) victim = p;
        for (int p = 0; p < spec.num_points && victim < 0; ++p)
          if (p != spec.nose_index) victim = p;
        if (victim >= 0) {
          synth::Outlier o;
          o.point = victim;
          o.mode = synth::OutlierMode::JumpEveryFrame;
          spec.outliers.push_back(o);
        }
      }
      specs.push_back(std::move(spec));
    }
  }

  const char* ext = opts.format == SeqFormat::Json ? ".json" : ".csv";
  std::string manifest = "sequence_id,path,format,label,subject,nose_index\n";
  std::string truth_int = "sequence_id,t,intensity\n";
  std::string truth_tr = "sequence_id,t1,t2\n";
  std::string truth_pts = "sequence_id,point,role\n";

  for (const synth::SynthSpec& spec : specs) {
    const auto [seq, truth] = synth::generate(spec);
    const std::string safe = sanitize_id(spec.id);
    const std::string fname = "seq_" + safe + ext;
    save_sequence(seq, (fs::path(opts.out_dir) / fname).string(), opts.format);
    manifest += spec.id + "," + fname + "," + seq_format_name(opts.format) + ",synthetic,," +
                std::to_string(spec.nose_index) + "\n";
    for (std::size_t t = 0; t < truth.intensity.size(); ++t)
      truth_int += spec.id + "," + std::to_string(t) + "," +
                   format_double(truth.intensity[t]) + "\n";
    truth_tr += spec.id + "," + (truth.t1 ? std::to_string(*truth.t1) : "") + "," +
                (truth.t2 ? std::to_string(*truth.t2) : "") + "\n";
    for (int p : truth.moving_set) truth_pts += spec.id + "," + std::to_string(p) + ",moving\n";
    for (int p : truth.static_set) truth_pts += spec.id + "," + std::to_string(p) + ",static\n";
    for (int p : truth.outlier_set)
      truth_pts += spec.id + "," + std::to_string(p) + ",outlier\n";
  }
  textio::write_file((fs::path(opts.out_dir) / "manifest.csv").string(), manifest);
  textio::write_file((fs::path(opts.out_dir) / "truth_intensity.csv").string(), truth_int);
  textio::write_file((fs::path(opts.out_dir) / "truth_transitions.csv").string(), truth_tr);
  textio::write_file((fs::path(opts.out_dir) / "truth_points.csv").string(), truth_pts);
  return 0;
}

int cmd_plot(const std::string& csv_path, const std::string& svg_path) {
  plot::render_csv_to_file(csv_path, svg_path);
  return 0;
}

}  // namespace fir::cli
