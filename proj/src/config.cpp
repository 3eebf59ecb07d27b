#include "polylearn/config.hpp"

#include <cstdlib>
#include <sstream>

#include "polylearn/errors.hpp"
#include "polylearn/io.hpp"

namespace polylearn {

namespace {

std::string trimmed(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

bool parse_bool(const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("not a boolean: '" + v + "'");
}

int parse_pos_int(const std::string& v, const char* what) {
    const long long x = parse_int_strict(v);
    if (x < 1 || x > 1000000000LL) throw ConfigError(std::string(what) + " out of range");
    return static_cast<int>(x);
}

std::uint64_t parse_seed(const std::string& v) {
    const long long x = parse_int_strict(v);
    if (x < 0) throw ConfigError("seed must be nonnegative");
    return static_cast<std::uint64_t>(x);
}

void apply_key(RunConfig& cfg, const std::string& section, const std::string& key,
               const std::string& value) {
    const std::string where = section + "." + key;
    if (section == "run") {
        if (key == "kind") {
            cfg.kind = experiment_kind_from_string(value);
            return;
        }
    } else if (section == "source") {
        if (key == "kind") { cfg.source = source_kind_from_string(value); return; }
        if (key == "n") { cfg.n = parse_pos_int(value, "source.n"); return; }
        if (key == "k") { cfg.k = parse_pos_int(value, "source.k"); return; }
        if (key == "rho") { cfg.rho = parse_double_strict(value); return; }
        if (key == "balance") { cfg.balance = parse_double_strict(value); return; }
        if (key == "balance_tolerance") { cfg.balance_tolerance = parse_double_strict(value); return; }
        if (key == "one_sided") { cfg.one_sided = parse_bool(value); return; }
        if (key == "weight_bound") { cfg.weight_bound = parse_pos_int(value, "source.weight_bound"); return; }
        if (key == "gap") { cfg.gap = parse_double_strict(value); return; }
        if (key == "sigma") { cfg.sigma = parse_double_strict(value); return; }
        if (key == "seed") { cfg.source_seed = parse_seed(value); return; }
        if (key == "count") { cfg.count = parse_int_strict(value); return; }
    } else if (section == "learner") {
        if (key == "epsilon") { cfg.epsilon = parse_double_strict(value); return; }
        if (key == "gamma") { cfg.gamma = parse_double_strict(value); return; }
        if (key == "m_minus_override") { cfg.m_minus_override = parse_int_strict(value); return; }
        if (key == "m_plus_override") { cfg.m_plus_override = parse_int_strict(value); return; }
        if (key == "m_check") { cfg.m_check = parse_int_strict(value); return; }
        if (key == "attempt_budget") { cfg.attempt_budget = parse_pos_int(value, "learner.attempt_budget"); return; }
        if (key == "seed") { cfg.learner_seed = parse_seed(value); return; }
    } else if (section == "sampler") {
        if (key == "steps_per_sample") { cfg.steps_per_sample = parse_int_strict(value); return; }
        if (key == "diag_samples") { cfg.diag_samples = parse_int_strict(value); return; }
    } else if (section == "boost") {
        if (key == "rounds_budget") { cfg.rounds_budget = parse_pos_int(value, "boost.rounds_budget"); return; }
        if (key == "m_train") { cfg.m_train = parse_pos_int(value, "boost.m_train"); return; }
        if (key == "m_holdout") { cfg.m_holdout = parse_pos_int(value, "boost.m_holdout"); return; }
        if (key == "per_round_attempts") { cfg.per_round_attempts = parse_pos_int(value, "boost.per_round_attempts"); return; }
    } else if (section == "cover") {
        if (key == "repetitions") { cfg.repetitions = parse_pos_int(value, "cover.repetitions"); return; }
        if (key == "holdout") { cfg.holdout = parse_int_strict(value); return; }
    } else if (section == "output") {
        if (key == "dir") { cfg.out_dir = value; return; }
        if (key == "model_in") { cfg.model_in = value; return; }
        if (key == "data_in") { cfg.data_in = value; return; }
    } else {
        throw ConfigError("unknown config section: [" + section + "]");
    }
    throw ConfigError("unknown config key: " + where);
}

}  // namespace

const char* to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::gen: return "gen";
        case ExperimentKind::learn_boost: return "learn-boost";
        case ExperimentKind::learn_cover: return "learn-cover";
        case ExperimentKind::sample_diag: return "sample-diag";
        case ExperimentKind::paper_check: return "paper-check";
        case ExperimentKind::eval: return "eval";
    }
    return "unknown";
}

ExperimentKind experiment_kind_from_string(const std::string& s) {
    if (s == "gen") return ExperimentKind::gen;
    if (s == "learn-boost") return ExperimentKind::learn_boost;
    if (s == "learn-cover") return ExperimentKind::learn_cover;
    if (s == "sample-diag") return ExperimentKind::sample_diag;
    if (s == "paper-check") return ExperimentKind::paper_check;
    if (s == "eval") return ExperimentKind::eval;
    throw ConfigError("unknown experiment kind: " + s);
}

RunConfig parse_config_text(const std::string& text, RunConfig base) {
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto comment = line.find_first_of("#;");
        if (comment != std::string::npos) line = line.substr(0, comment);
        line = trimmed(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
            section = trimmed(line.substr(1, line.size() - 2));
            if (section.empty())
                throw ConfigError("line " + std::to_string(lineno) + ": empty section name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trimmed(line.substr(0, eq));
        const std::string value = trimmed(line.substr(eq + 1));
        if (section.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": key outside any section");
        if (key.empty() || value.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": empty key or value");
        apply_key(base, section, key, value);
    }
    return base;
}

RunConfig load_config_file(const std::string& path, RunConfig base) {
    return parse_config_text(read_text_file(path), std::move(base));
}

void validate(const RunConfig& cfg) {
    if (cfg.n < 1) throw ConfigError("n must be >= 1");
    if (cfg.k < 1) throw ConfigError("k must be >= 1");
    if (!(cfg.rho > 0.0 && cfg.rho < 1.0)) throw ConfigError("rho must lie in (0, 1)");
    if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0)) throw ConfigError("epsilon must lie in (0, 1)");
    if (!(cfg.gamma > 0.0 && cfg.gamma < 0.5)) throw ConfigError("gamma must lie in (0, 1/2)");
    if (!(cfg.balance > 0.0 && cfg.balance < 1.0)) throw ConfigError("balance must lie in (0, 1)");
    if (!(cfg.balance_tolerance > 0.0)) throw ConfigError("balance_tolerance must be positive");
    if (cfg.weight_bound < 1) throw ConfigError("weight_bound must be >= 1");
    if (!(cfg.gap > 0.0)) throw ConfigError("gap must be positive");
    if (!(cfg.sigma > 0.0)) throw ConfigError("sigma must be positive");
    if (cfg.count < 1) throw ConfigError("count must be >= 1");
    if (cfg.m_minus_override < 0 || cfg.m_plus_override < 0)
        throw ConfigError("sample-size overrides must be >= 0 (0 keeps the formula)");
    if (cfg.m_check < 0) throw ConfigError("m_check must be >= 0 (0 = auto)");
    if (cfg.steps_per_sample < 0) throw ConfigError("steps_per_sample must be >= 0 (0 = auto)");
    if (cfg.diag_samples < 1) throw ConfigError("diag_samples must be >= 1");
    if (cfg.holdout < 1) throw ConfigError("holdout must be >= 1");
    if (cfg.out_dir.empty()) throw ConfigError("output dir must be nonempty");
    if (cfg.kind == ExperimentKind::eval) {
        if (cfg.model_in.empty()) throw ConfigError("eval needs output.model_in");
        if (cfg.data_in.empty()) throw ConfigError("eval needs output.data_in");
    }
}

std::string render_config(const RunConfig& cfg) {
    std::ostringstream out;
    out << "[run]\n";
    out << "kind = " << to_string(cfg.kind) << "\n";
    out << "[source]\n";
    out << "kind = " << to_string(cfg.source) << "\n";
    out << "n = " << cfg.n << "\n";
    out << "k = " << cfg.k << "\n";
    out << "rho = " << format_g17(cfg.rho) << "\n";
    out << "balance = " << format_g17(cfg.balance) << "\n";
    out << "balance_tolerance = " << format_g17(cfg.balance_tolerance) << "\n";
    out << "one_sided = " << (cfg.one_sided ? "true" : "false") << "\n";
    out << "weight_bound = " << cfg.weight_bound << "\n";
    out << "gap = " << format_g17(cfg.gap) << "\n";
    out << "sigma = " << format_g17(cfg.sigma) << "\n";
    out << "seed = " << cfg.source_seed << "\n";
    out << "count = " << cfg.count << "\n";
    out << "[learner]\n";
    out << "epsilon = " << format_g17(cfg.epsilon) << "\n";
    out << "gamma = " << format_g17(cfg.gamma) << "\n";
    out << "m_minus_override = " << cfg.m_minus_override << "\n";
    out << "m_plus_override = " << cfg.m_plus_override << "\n";
    out << "m_check = " << cfg.m_check << "\n";
    out << "attempt_budget = " << cfg.attempt_budget << "\n";
    out << "seed = " << cfg.learner_seed << "\n";
    out << "[sampler]\n";
    out << "steps_per_sample = " << cfg.steps_per_sample << "\n";
    out << "diag_samples = " << cfg.diag_samples << "\n";
    out << "[boost]\n";
    out << "rounds_budget = " << cfg.rounds_budget << "\n";
    out << "m_train = " << cfg.m_train << "\n";
    out << "m_holdout = " << cfg.m_holdout << "\n";
    out << "per_round_attempts = " << cfg.per_round_attempts << "\n";
    out << "[cover]\n";
    out << "repetitions = " << cfg.repetitions << "\n";
    out << "holdout = " << cfg.holdout << "\n";
    out << "[output]\n";
    out << "dir = " << cfg.out_dir << "\n";
    if (!cfg.model_in.empty()) out << "model_in = " << cfg.model_in << "\n";
    if (!cfg.data_in.empty()) out << "data_in = " << cfg.data_in << "\n";
    return out.str();
}

std::vector<std::string> config_comment_lines(const RunConfig& cfg) {
    std::vector<std::string> out;
    std::istringstream in(render_config(cfg));
    std::string line;
    std::string section;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.front() == '[') {
            section = line.substr(1, line.size() - 2);
            continue;
        }
        out.push_back(section + "." + line);
    }
    return out;
}

void apply_env_overrides(RunConfig& cfg) {
    if (const char* root = std::getenv("POLYLEARN_OUT"); root && *root) cfg.out_dir = root;
}

LabeledSource make_source(const RunConfig& cfg) {
    switch (cfg.source) {
        case SourceKind::sphere_margin: {
            SphereMarginOptions opts;
            opts.balance_tolerance = cfg.balance_tolerance;
            opts.one_sided = cfg.one_sided;
            return make_sphere_margin_source(cfg.n, cfg.k, cfg.rho, cfg.source_seed, cfg.balance,
                                             opts);
        }
        case SourceKind::cube:
            return make_cube_source(cfg.n, cfg.k, cfg.weight_bound, cfg.source_seed);
        case SourceKind::pancake:
            return make_pancake_source(cfg.n, cfg.gap, cfg.sigma, cfg.source_seed);
    }
    throw ConfigError("unknown source kind");
}

}  // namespace polylearn
