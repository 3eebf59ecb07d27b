#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "polylearn/booster.hpp"
#include "polylearn/geometry.hpp"
#include "polylearn/stream.hpp"

namespace polylearn {

/// Shortest-width decimal rendering that still round-trips a double exactly
/// (17 significant digits).
std::string format_g17(double v);

/// Strict full-token parses; throw ConfigError on trailing garbage, overflow,
/// or empty input.
double parse_double_strict(const std::string& tok);
long long parse_int_strict(const std::string& tok);

/// Text record holding an intersection of halfspaces, either a raw target
/// (rows in the ambient space, unit normals) or a learned cover (rows in the
/// lifted space, norms ≤ 1, thresholds all zero).
///
///   polylearn-record v1
///   kind intersection|cover
///   dim <d>
///   rows <k>
///   radius <R>
///   row <w_0> ... <w_{d-1}> <theta>
///
/// Lines starting with '#' are ignored on read; writers may front-load them
/// with the resolved run configuration.
struct RecordRow {
    Vec w;
    double theta = 0.0;
};

struct HypothesisRecord {
    enum class Kind { intersection, cover };
    Kind kind = Kind::intersection;
    int dim = 0;
    double radius = 1.0;
    std::vector<RecordRow> rows;
};

HypothesisRecord make_record(const TargetIntersection& target);
HypothesisRecord make_record(const CoverHypothesis& cover);
TargetIntersection to_intersection(const HypothesisRecord& rec);
CoverHypothesis to_cover(const HypothesisRecord& rec);

void write_record(std::ostream& out, const HypothesisRecord& rec,
                  const std::vector<std::string>& preamble = {});
HypothesisRecord read_record(std::istream& in);
void save_record(const std::string& path, const HypothesisRecord& rec,
                 const std::vector<std::string>& preamble = {});
HypothesisRecord load_record(const std::string& path);

/// Dataset CSV: header x0,..,x{n-1},label then one row per example.
/// Prediction CSV appends a final `prediction` column. '#' lines before the
/// header carry the embedded configuration and are skipped on read.
void write_dataset_csv(std::ostream& out, const std::vector<LabeledExample>& rows, int dim,
                       const std::vector<std::string>& preamble = {});
std::vector<LabeledExample> read_dataset_csv(std::istream& in, int* dim_out = nullptr);
void save_dataset_csv(const std::string& path, const std::vector<LabeledExample>& rows, int dim,
                      const std::vector<std::string>& preamble = {});
std::vector<LabeledExample> load_dataset_csv(const std::string& path, int* dim_out = nullptr);

void write_predictions_csv(std::ostream& out, const std::vector<LabeledExample>& rows,
                           const std::vector<int>& predictions, int dim,
                           const std::vector<std::string>& preamble = {});

/// Creates the directory (and parents) if missing, then opens for writing.
/// Throws ConfigError when the path cannot be opened.
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace polylearn
