#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fir/sequence.hpp"

namespace fir {

enum class SeqFormat { LongCsv, WideCsv, Json };

SeqFormat seq_format_from_string(const std::string& name);
const char* seq_format_name(SeqFormat f);

// LongCsv:  header `frame,point,x,y[,z]`, one row per (frame, point), any order.
// WideCsv:  header `frame,p0_x,p0_y[,p0_z],p1_x,...`, one row per frame.
// Json:     { "id": str, "dim": int, "nose_index": int|null,
//             "frames": [ [ [x,y(,z)], ... N points ], ... T frames ] }
//
// Frame and point ids must each form a contiguous integer range (0- or
// 1-based); they are remapped to 0-based on load. A hole in the grid is a
// ShapeError, never interpolated.
Sequence load_sequence(const std::string& path, SeqFormat format);
void save_sequence(const Sequence& seq, const std::string& path, SeqFormat format);

struct ManifestEntry {
  std::string sequence_id;
  std::string path;
  SeqFormat format = SeqFormat::LongCsv;
  std::string label;
  std::string subject;
  std::optional<int> nose_index;
};

// CSV `sequence_id,path,format,label,subject,nose_index`; empty nose_index
// cell means "use whatever the file provides". Relative paths resolve
// against the manifest's directory.
std::vector<ManifestEntry> load_manifest(const std::string& path);

// Loads the entry's file and applies id/label/subject/nose_index overrides.
Sequence load_manifest_entry(const ManifestEntry& entry);

}  // namespace fir
