#include "polylearn/io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "polylearn/errors.hpp"

namespace polylearn {

namespace {

constexpr const char* kRecordHeader = "polylearn-record v1";

std::string trimmed(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

/// Next non-empty, non-comment line; false at end of stream.
bool next_content_line(std::istream& in, std::string& line) {
    while (std::getline(in, line)) {
        line = trimmed(line);
        if (!line.empty() && line[0] != '#') return true;
    }
    return false;
}

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream iss(s);
    std::vector<std::string> out;
    std::string tok;
    while (iss >> tok) out.push_back(tok);
    return out;
}

std::vector<std::string> split_on(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

void ensure_parent_dir(const std::string& path) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
}

void write_preamble(std::ostream& out, const std::vector<std::string>& preamble) {
    for (const auto& line : preamble) out << "# " << line << "\n";
}

}  // namespace

std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double_strict(const std::string& tok) {
    if (tok.empty()) throw ConfigError("expected a number, got an empty token");
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size() || errno == ERANGE)
        throw ConfigError("not a valid number: '" + tok + "'");
    return v;
}

long long parse_int_strict(const std::string& tok) {
    if (tok.empty()) throw ConfigError("expected an integer, got an empty token");
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(tok.c_str(), &end, 10);
    if (end != tok.c_str() + tok.size() || errno == ERANGE)
        throw ConfigError("not a valid integer: '" + tok + "'");
    return v;
}

HypothesisRecord make_record(const TargetIntersection& target) {
    HypothesisRecord rec;
    rec.kind = HypothesisRecord::Kind::intersection;
    rec.dim = target.dim();
    rec.radius = target.ambient_radius;
    for (const auto& h : target.halfspaces) rec.rows.push_back({h.w, h.theta});
    return rec;
}

HypothesisRecord make_record(const CoverHypothesis& cover) {
    HypothesisRecord rec;
    rec.kind = HypothesisRecord::Kind::cover;
    rec.dim = cover.lifted_dim();
    rec.radius = cover.lift_radius;
    for (const auto& w : cover.regions) rec.rows.push_back({w, 0.0});
    return rec;
}

TargetIntersection to_intersection(const HypothesisRecord& rec) {
    if (rec.kind != HypothesisRecord::Kind::intersection)
        throw ConfigError("record does not hold a target intersection");
    std::vector<Halfspace> rows;
    rows.reserve(rec.rows.size());
    for (const auto& r : rec.rows) rows.emplace_back(r.w, r.theta);
    return TargetIntersection(std::move(rows), rec.radius);
}

CoverHypothesis to_cover(const HypothesisRecord& rec) {
    if (rec.kind != HypothesisRecord::Kind::cover)
        throw ConfigError("record does not hold a cover hypothesis");
    if (rec.dim < 3) throw ConfigError("cover record dimension must be at least 3");
    CoverHypothesis cover;
    cover.base_dim = rec.dim - 2;
    cover.lift_radius = rec.radius;
    for (const auto& r : rec.rows) {
        if (r.theta != 0.0) throw ConfigError("cover record rows must have zero threshold");
        cover.regions.push_back(r.w);
    }
    return cover;
}

void write_record(std::ostream& out, const HypothesisRecord& rec,
                  const std::vector<std::string>& preamble) {
    write_preamble(out, preamble);
    out << kRecordHeader << "\n";
    out << "kind "
        << (rec.kind == HypothesisRecord::Kind::intersection ? "intersection" : "cover") << "\n";
    out << "dim " << rec.dim << "\n";
    out << "rows " << rec.rows.size() << "\n";
    out << "radius " << format_g17(rec.radius) << "\n";
    for (const auto& r : rec.rows) {
        out << "row";
        for (double c : r.w) out << ' ' << format_g17(c);
        out << ' ' << format_g17(r.theta) << "\n";
    }
}

HypothesisRecord read_record(std::istream& in) {
    std::string line;
    if (!next_content_line(in, line) || line != kRecordHeader)
        throw ConfigError("missing record header '" + std::string(kRecordHeader) + "'");

    HypothesisRecord rec;
    long long row_count = -1;
    for (const char* field : {"kind", "dim", "rows", "radius"}) {
        if (!next_content_line(in, line)) throw ConfigError("record truncated before " +
                                                            std::string(field));
        const auto toks = split_ws(line);
        if (toks.size() != 2 || toks[0] != field)
            throw ConfigError("expected '" + std::string(field) + " <value>', got '" + line + "'");
        const std::string& value = toks[1];
        if (toks[0] == std::string("kind")) {
            if (value == "intersection")
                rec.kind = HypothesisRecord::Kind::intersection;
            else if (value == "cover")
                rec.kind = HypothesisRecord::Kind::cover;
            else
                throw ConfigError("unknown record kind: " + value);
        } else if (toks[0] == std::string("dim")) {
            rec.dim = static_cast<int>(parse_int_strict(value));
            if (rec.dim < 1) throw ConfigError("record dim must be >= 1");
        } else if (toks[0] == std::string("rows")) {
            row_count = parse_int_strict(value);
            if (row_count < 0) throw ConfigError("record row count must be >= 0");
        } else {
            rec.radius = parse_double_strict(value);
        }
    }
    for (long long i = 0; i < row_count; ++i) {
        if (!next_content_line(in, line)) throw ConfigError("record truncated in rows");
        const auto toks = split_ws(line);
        if (toks.size() != static_cast<std::size_t>(rec.dim) + 2 || toks[0] != "row")
            throw ConfigError("malformed record row: '" + line + "'");
        RecordRow r;
        r.w.reserve(static_cast<std::size_t>(rec.dim));
        for (int j = 0; j < rec.dim; ++j) r.w.push_back(parse_double_strict(toks[j + 1]));
        r.theta = parse_double_strict(toks.back());
        rec.rows.push_back(std::move(r));
    }
    return rec;
}

void save_record(const std::string& path, const HypothesisRecord& rec,
                 const std::vector<std::string>& preamble) {
    std::ostringstream oss;
    write_record(oss, rec, preamble);
    write_text_file(path, oss.str());
}

HypothesisRecord load_record(const std::string& path) {
    std::istringstream iss(read_text_file(path));
    return read_record(iss);
}

void write_dataset_csv(std::ostream& out, const std::vector<LabeledExample>& rows, int dim,
                       const std::vector<std::string>& preamble) {
    write_preamble(out, preamble);
    for (int j = 0; j < dim; ++j) out << 'x' << j << ',';
    out << "label\n";
    for (const auto& e : rows) {
        if (static_cast<int>(e.x.size()) != dim)
            throw ConfigError("dataset row dimension mismatch");
        for (double c : e.x) out << format_g17(c) << ',';
        out << e.label << "\n";
    }
}

std::vector<LabeledExample> read_dataset_csv(std::istream& in, int* dim_out) {
    std::string line;
    if (!next_content_line(in, line)) throw ConfigError("dataset is empty");
    const auto header = split_on(line, ',');
    if (header.size() < 2 || trimmed(header.back()) != "label")
        throw ConfigError("dataset header must end with 'label'");
    const int dim = static_cast<int>(header.size()) - 1;
    for (int j = 0; j < dim; ++j)
        if (trimmed(header[j]) != "x" + std::to_string(j))
            throw ConfigError("dataset header column " + std::to_string(j) + " must be x" +
                              std::to_string(j));

    std::vector<LabeledExample> rows;
    while (next_content_line(in, line)) {
        const auto toks = split_on(line, ',');
        if (toks.size() != header.size())
            throw ConfigError("dataset row has " + std::to_string(toks.size()) +
                              " fields, expected " + std::to_string(header.size()));
        LabeledExample e;
        e.x.reserve(static_cast<std::size_t>(dim));
        for (int j = 0; j < dim; ++j) e.x.push_back(parse_double_strict(trimmed(toks[j])));
        const long long label = parse_int_strict(trimmed(toks.back()));
        if (label != -1 && label != +1) throw ConfigError("dataset labels must be -1 or +1");
        e.label = static_cast<int>(label);
        rows.push_back(std::move(e));
    }
    if (dim_out) *dim_out = dim;
    return rows;
}

void save_dataset_csv(const std::string& path, const std::vector<LabeledExample>& rows, int dim,
                      const std::vector<std::string>& preamble) {
    std::ostringstream oss;
    write_dataset_csv(oss, rows, dim, preamble);
    write_text_file(path, oss.str());
}

std::vector<LabeledExample> load_dataset_csv(const std::string& path, int* dim_out) {
    std::istringstream iss(read_text_file(path));
    return read_dataset_csv(iss, dim_out);
}

void write_predictions_csv(std::ostream& out, const std::vector<LabeledExample>& rows,
                           const std::vector<int>& predictions, int dim,
                           const std::vector<std::string>& preamble) {
    if (rows.size() != predictions.size())
        throw ConfigError("predictions do not match the dataset size");
    write_preamble(out, preamble);
    for (int j = 0; j < dim; ++j) out << 'x' << j << ',';
    out << "label,prediction\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (double c : rows[i].x) out << format_g17(c) << ',';
        out << rows[i].label << ',' << predictions[i] << "\n";
    }
}

void write_text_file(const std::string& path, const std::string& content) {
    ensure_parent_dir(path);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw ConfigError("write to '" + path + "' failed");
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + path + "' for reading");
    std::ostringstream oss;
    oss << in.rdbuf();
    return oss.str();
}

}  // namespace polylearn
