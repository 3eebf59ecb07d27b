#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "polylearn/distributions.hpp"

namespace polylearn {

enum class ExperimentKind { gen, learn_boost, learn_cover, sample_diag, paper_check, eval };
const char* to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& s);

/// Full run configuration. Every field has the default shown here; a config
/// file or CLI flags overlay the defaults, and the fully resolved state is
/// echoed into every artifact the run writes.
struct RunConfig {
    ExperimentKind kind = ExperimentKind::gen;

    // [source]
    SourceKind source = SourceKind::sphere_margin;
    int n = 3;
    int k = 2;
    double rho = 0.2;
    double balance = 0.5;
    double balance_tolerance = 0.05;
    bool one_sided = false;
    int weight_bound = 3;     // cube source
    double gap = 1.0;         // pancake source
    double sigma = 0.1;       // pancake source
    std::uint64_t source_seed = 1;
    long long count = 1000;   // examples for gen / eval input cap

    // [learner]
    double epsilon = 0.1;
    double gamma = 0.02;
    long long m_minus_override = 0;  // 0 keeps the formula value
    long long m_plus_override = 0;
    long long m_check = 0;           // 0 = auto
    int attempt_budget = 20;
    std::uint64_t learner_seed = 1;

    // [sampler]
    long long steps_per_sample = 0;  // 0 = auto
    long long diag_samples = 1000;   // sample-diag draw count

    // [boost]
    int rounds_budget = 200;
    int m_train = 6000;
    int m_holdout = 4000;
    int per_round_attempts = 8;

    // [cover]
    int repetitions = 1;      // confidence amplification: best-of-r reruns
    long long holdout = 10000;

    // [output]
    std::string out_dir = "out";
    std::string model_in;     // eval: record to load
    std::string data_in;      // eval: dataset to score
};

/// Parses the flat sectioned key-value format:
///
///   [source]
///   kind = sphere_margin
///   n = 3
///
/// '#' or ';' start comments. Unknown sections or keys are hard errors so a
/// misspelled override can never fall back to a default silently.
RunConfig parse_config_text(const std::string& text, RunConfig base = {});
RunConfig load_config_file(const std::string& path, RunConfig base = {});

/// Range checks (throws ConfigError): n ≥ 1, k ≥ 1, rho ∈ (0,1),
/// epsilon ∈ (0,1], gamma ∈ (0,1/2), counts positive, gap/sigma > 0, ...
void validate(const RunConfig& cfg);

/// Canonical echo of the resolved config, in parse_config_text's own format;
/// parse(render(cfg)) == cfg.
std::string render_config(const RunConfig& cfg);

/// The same content as "# section.key = value" lines, for artifact preambles.
std::vector<std::string> config_comment_lines(const RunConfig& cfg);

/// Applies the POLYLEARN_OUT environment variable (output root only).
void apply_env_overrides(RunConfig& cfg);

/// Builds the configured synthetic source.
LabeledSource make_source(const RunConfig& cfg);

}  // namespace polylearn
