#include "fir/seqio.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>

#include <json.hpp>

#include "fir/errors.hpp"
#include "fir/textio.hpp"

namespace fir {

namespace {

using textio::format_double;
using textio::parse_double;
using textio::parse_int;
using textio::split;

// Maps raw ids to a dense 0-based range; ids must be contiguous.
int remap_contiguous(std::vector<long long>& ids, const char* what) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  if (ids.empty()) fail(Errc::ShapeError, std::string("no ") + what + " ids found");
  if (ids.front() < 0) fail(Errc::ParseError, std::string(what) + " ids must be non-negative");
  if (ids.back() - ids.front() + 1 != static_cast<long long>(ids.size()))
    fail(Errc::ShapeError, std::string(what) + " ids are not contiguous");
  return static_cast<int>(ids.front());
}

void check_finite(double v, const std::string& path) {
  if (!std::isfinite(v)) fail(Errc::ValueError, "non-finite coordinate in " + path);
}

Sequence load_long_csv(const std::string& path) {
  const std::vector<std::string> lines = textio::read_lines(path);
  if (lines.empty()) fail(Errc::ParseError, "empty file " + path);
  const auto header = split(lines[0], ',');
  int dim = 0;
  if (header.size() == 4 && header[0] == "frame" && header[1] == "point" && header[2] == "x" &&
      header[3] == "y")
    dim = 2;
  else if (header.size() == 5 && header[0] == "frame" && header[1] == "point" &&
           header[2] == "x" && header[3] == "y" && header[4] == "z")
    dim = 3;
  else
    fail(Errc::ParseError, "bad long-csv header in " + path);

  struct Cell {
    long long frame, point;
    double xyz[3];
  };
  std::vector<Cell> cells;
  std::vector<long long> frame_ids, point_ids;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (lines[li].empty()) continue;
    const auto f = split(lines[li], ',');
    if (f.size() != static_cast<std::size_t>(dim) + 2)
      fail(Errc::ParseError, "wrong field count at line " + std::to_string(li + 1) + " of " + path);
    Cell c{};
    c.frame = parse_int(f[0], path);
    c.point = parse_int(f[1], path);
    for (int k = 0; k < dim; ++k) {
      c.xyz[k] = parse_double(f[2 + k], path);
      check_finite(c.xyz[k], path);
    }
    frame_ids.push_back(c.frame);
    point_ids.push_back(c.point);
    cells.push_back(c);
  }
  const long long frame_base = remap_contiguous(frame_ids, "frame");
  const long long point_base = remap_contiguous(point_ids, "point");
  const int T = static_cast<int>(frame_ids.size());
  const int N = static_cast<int>(point_ids.size());
  if (static_cast<long long>(cells.size()) != static_cast<long long>(T) * N)
    fail(Errc::ShapeError, "expected " + std::to_string(static_cast<long long>(T) * N) +
                               " rows, got " + std::to_string(cells.size()) + " in " + path);

  Sequence seq(dim, N, T);
  std::vector<char> seen(static_cast<std::size_t>(N) * T, 0);
  for (const Cell& c : cells) {
    const int t = static_cast<int>(c.frame - frame_base);
    const int p = static_cast<int>(c.point - point_base);
    char& s = seen[static_cast<std::size_t>(p) * T + t];
    if (s) fail(Errc::ParseError, "duplicate (frame,point) cell in " + path);
    s = 1;
    for (int k = 0; k < dim; ++k) seq.set(k, p, t, c.xyz[k]);
  }
  return seq;
}

Sequence load_wide_csv(const std::string& path) {
  const std::vector<std::string> lines = textio::read_lines(path);
  if (lines.empty()) fail(Errc::ParseError, "empty file " + path);
  const auto header = split(lines[0], ',');
  if (header.size() < 3 || header[0] != "frame")
    fail(Errc::ParseError, "bad wide-csv header in " + path);
  int dim = 0;
  // p0_x,p0_y[,p0_z] fixes d; remaining columns must repeat the pattern.
  if (header.size() >= 4 && header[3] == "p0_z") dim = 3;
  if (dim == 0) dim = 2;
  const std::size_t coord_cols = header.size() - 1;
  if (coord_cols % dim != 0) fail(Errc::ParseError, "ragged wide-csv header in " + path);
  const int N = static_cast<int>(coord_cols / dim);
  static const char* axis_names[3] = {"x", "y", "z"};
  for (int p = 0; p < N; ++p)
    for (int c = 0; c < dim; ++c) {
      std::string expect = "p";
      expect += std::to_string(p);
      expect += '_';
      expect += axis_names[c];
      if (header[1 + static_cast<std::size_t>(p) * dim + c] != expect)
        fail(Errc::ParseError, "expected column '" + expect + "' in " + path);
    }

  std::vector<long long> frame_ids;
  std::vector<std::vector<double>> rows;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (lines[li].empty()) continue;
    const auto f = split(lines[li], ',');
    if (f.size() != header.size())
      fail(Errc::ParseError, "wrong field count at line " + std::to_string(li + 1) + " of " + path);
    frame_ids.push_back(parse_int(f[0], path));
    std::vector<double> row(coord_cols);
    for (std::size_t k = 0; k < coord_cols; ++k) {
      row[k] = parse_double(f[1 + k], path);
      check_finite(row[k], path);
    }
    rows.push_back(std::move(row));
  }
  std::vector<long long> sorted_ids = frame_ids;
  const long long frame_base = remap_contiguous(sorted_ids, "frame");
  const int T = static_cast<int>(sorted_ids.size());
  if (static_cast<int>(rows.size()) != T) fail(Errc::ShapeError, "duplicate frame row in " + path);

  Sequence seq(dim, N, T);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const int t = static_cast<int>(frame_ids[r] - frame_base);
    for (int p = 0; p < N; ++p)
      for (int c = 0; c < dim; ++c)
        seq.set(c, p, t, rows[r][static_cast<std::size_t>(p) * dim + c]);
  }
  return seq;
}

Sequence load_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::IoError, "cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::ParseError, std::string("bad json in ") + path + ": " + e.what());
  }
  try {
    if (!j.is_object() || !j.contains("dim") || !j.contains("frames"))
      fail(Errc::ParseError, "json sequence needs 'dim' and 'frames' in " + path);
    if (!j["dim"].is_number_integer()) fail(Errc::ParseError, "non-integer dim in " + path);
    const int dim = j["dim"].get<int>();
    const auto& frames = j["frames"];
    if (!frames.is_array() || frames.empty()) fail(Errc::ShapeError, "empty frames in " + path);
    const int T = static_cast<int>(frames.size());
    if (!frames[0].is_array() || frames[0].empty())
      fail(Errc::ShapeError, "empty frame 0 in " + path);
    const int N = static_cast<int>(frames[0].size());

    Sequence seq(dim, N, T);
    for (int t = 0; t < T; ++t) {
      const auto& frame = frames[t];
      if (!frame.is_array() || static_cast<int>(frame.size()) != N)
        fail(Errc::ShapeError, "frame " + std::to_string(t) + " has wrong point count in " + path);
      for (int p = 0; p < N; ++p) {
        const auto& pt = frame[p];
        if (!pt.is_array() || static_cast<int>(pt.size()) != dim)
          fail(Errc::ShapeError, "point with wrong dimension in " + path);
        for (int c = 0; c < dim; ++c) {
          if (!pt[c].is_number()) fail(Errc::ValueError, "non-numeric coordinate in " + path);
          const double v = pt[c].get<double>();
          check_finite(v, path);
          seq.set(c, p, t, v);
        }
      }
    }
    if (j.contains("id") && j["id"].is_string()) seq.id = j["id"].get<std::string>();
    if (j.contains("nose_index") && !j["nose_index"].is_null()) {
      if (!j["nose_index"].is_number_integer())
        fail(Errc::ParseError, "non-integer nose_index in " + path);
      seq.nose_index = j["nose_index"].get<int>();
    }
    return seq;
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::ParseError, std::string("bad json structure in ") + path + ": " + e.what());
  }
}

std::string render_long_csv(const Sequence& seq) {
  std::string out = seq.dim() == 3 ? "frame,point,x,y,z\n" : "frame,point,x,y\n";
  for (int t = 0; t < seq.num_frames(); ++t)
    for (int p = 0; p < seq.num_points(); ++p) {
      out += std::to_string(t);
      out += ',';
      out += std::to_string(p);
      for (int c = 0; c < seq.dim(); ++c) {
        out += ',';
        out += format_double(seq.at(c, p, t));
      }
      out += '\n';
    }
  return out;
}

std::string render_wide_csv(const Sequence& seq) {
  static const char* axis_names[3] = {"x", "y", "z"};
  std::string out = "frame";
  for (int p = 0; p < seq.num_points(); ++p)
    for (int c = 0; c < seq.dim(); ++c)
      out += ",p" + std::to_string(p) + "_" + axis_names[c];
  out += '\n';
  for (int t = 0; t < seq.num_frames(); ++t) {
    out += std::to_string(t);
    for (int p = 0; p < seq.num_points(); ++p)
      for (int c = 0; c < seq.dim(); ++c) {
        out += ',';
        out += format_double(seq.at(c, p, t));
      }
    out += '\n';
  }
  return out;
}

std::string render_json(const Sequence& seq) {
  nlohmann::json j;
  j["id"] = seq.id;
  j["dim"] = seq.dim();
  if (seq.nose_index)
    j["nose_index"] = *seq.nose_index;
  else
    j["nose_index"] = nullptr;
  nlohmann::json frames = nlohmann::json::array();
  for (int t = 0; t < seq.num_frames(); ++t) {
    nlohmann::json frame = nlohmann::json::array();
    for (int p = 0; p < seq.num_points(); ++p) {
      nlohmann::json pt = nlohmann::json::array();
      for (int c = 0; c < seq.dim(); ++c) pt.push_back(seq.at(c, p, t));
      frame.push_back(std::move(pt));
    }
    frames.push_back(std::move(frame));
  }
  j["frames"] = std::move(frames);
  return j.dump(2) + "\n";
}

}  // namespace

SeqFormat seq_format_from_string(const std::string& name) {
  if (name == "long" || name == "longcsv" || name == "long_csv") return SeqFormat::LongCsv;
  if (name == "wide" || name == "widecsv" || name == "wide_csv") return SeqFormat::WideCsv;
  if (name == "json") return SeqFormat::Json;
  fail(Errc::ParseError, "unknown sequence format '" + name + "'");
}

const char* seq_format_name(SeqFormat f) {
  switch (f) {
    case SeqFormat::LongCsv: return "long";
    case SeqFormat::WideCsv: return "wide";
    case SeqFormat::Json: return "json";
  }
  return "long";
}

Sequence load_sequence(const std::string& path, SeqFormat format) {
  Sequence seq;
  switch (format) {
    case SeqFormat::LongCsv: seq = load_long_csv(path); break;
    case SeqFormat::WideCsv: seq = load_wide_csv(path); break;
    case SeqFormat::Json: seq = load_json(path); break;
  }
  seq.validate();
  return seq;
}

void save_sequence(const Sequence& seq, const std::string& path, SeqFormat format) {
  switch (format) {
    case SeqFormat::LongCsv: textio::write_file(path, render_long_csv(seq)); break;
    case SeqFormat::WideCsv: textio::write_file(path, render_wide_csv(seq)); break;
    case SeqFormat::Json: textio::write_file(path, render_json(seq)); break;
  }
}

std::vector<ManifestEntry> load_manifest(const std::string& path) {
  const std::vector<std::string> lines = textio::read_lines(path);
  if (lines.empty()) fail(Errc::ParseError, "empty manifest " + path);
  if (lines[0] != "sequence_id,path,format,label,subject,nose_index")
    fail(Errc::ParseError, "bad manifest header in " + path);
  const std::filesystem::path base = std::filesystem::path(path).parent_path();

  std::vector<ManifestEntry> entries;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (lines[li].empty()) continue;
    const auto f = split(lines[li], ',');
    if (f.size() != 6)
      fail(Errc::ParseError, "manifest line " + std::to_string(li + 1) + " needs 6 fields");
    ManifestEntry e;
    e.sequence_id = std::string(f[0]);
    if (e.sequence_id.empty()) fail(Errc::ParseError, "empty sequence_id in " + path);
    std::filesystem::path p{std::string(f[1])};
    e.path = p.is_absolute() ? p.string() : (base / p).string();
    e.format = seq_format_from_string(std::string(f[2]));
    e.label = std::string(f[3]);
    e.subject = std::string(f[4]);
    if (!f[5].empty()) e.nose_index = static_cast<int>(parse_int(f[5], path));
    entries.push_back(std::move(e));
  }
  return entries;
}

Sequence load_manifest_entry(const ManifestEntry& entry) {
  Sequence seq = load_sequence(entry.path, entry.format);
  seq.id = entry.sequence_id;
  if (!entry.label.empty()) seq.label = entry.label;
  if (!entry.subject.empty()) seq.subject = entry.subject;
  if (entry.nose_index) seq.nose_index = entry.nose_index;
  seq.validate();
  return seq;
}

}  // namespace fir
