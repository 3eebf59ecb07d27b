#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "polylearn/sampler.hpp"
#include "polylearn/stream.hpp"

namespace polylearn {

/// Sample-size parameters of the weak learner. m_minus/m_plus hold the
/// formula values (exact reals plus ceilings); desk-scale runs set overrides,
/// which are recorded next to the formula values rather than replacing them.
struct WeakParams {
    int n = 0;
    int k = 0;
    double rho = 0.0;
    double epsilon = 0.0;

    double m_minus_exact = 0.0;
    long long m_minus = 0;        // ⌈m_minus_exact⌉, clamped to ≥ 1
    double exponent = 0.0;        // √(n·log₂(9/ρ)·log₂(2k/ε))
    double m_plus_exact = 0.0;    // (200·k·n²·m_minus/ε⁴)² · 2^exponent
    double good_threshold = 0.0;  // (100·n/ε²)·log₂(M₊)/M₊ at the formula M₊

    std::optional<long long> m_minus_override;
    std::optional<long long> m_plus_override;

    long long effective_m_minus() const;
    /// Throws ConfigError when the formula value is not executable at desk
    /// scale (> 10⁸) and no override is set.
    long long effective_m_plus() const;

    double good_threshold_for(double m_plus_value) const;
};

/// Evaluates the sample-size formulas. Domain: n ≥ 1, k ≥ 1, rho ∈ (0, 9)
/// (so log₂(9/ρ) > 0), epsilon ∈ (0, 1] with 2k/ε > 1.
WeakParams compute_params(int n, int k, double rho, double epsilon);

/// ⌈(32/ε) · d · log₂(1/ε)⌉: sample size at which an ε-dense set is hit.
long long hitting_set_size(int vc_dim, double epsilon);

/// Halfspace over the lifted space: classifies x by sign(w · lift(x)) with
/// sign(0) = +1.
struct HalfspaceHypothesis {
    Vec w;  // ‖w‖ ≤ 1, dimension base_dim + 2
    int base_dim = 0;
    double lift_radius = 1.0;

    int evaluate(std::span<const double> x) const;
    int evaluate_lifted(std::span<const double> lifted_x) const;
};

struct AttemptRecord {
    int attempt = 0;
    bool polytope_feasible = false;
    double interior_slack = 0.0;
    bool returned = false;     // a consistent hypothesis came back
    bool checked = false;      // check_good ran
    bool passed = false;
    double p_neg_region = 0.0;
    double p_correct = 0.0;
};

/// The lifted training sets an attempt used, for consistency auditing.
struct TrainingDump {
    std::vector<Vec> lifted_positives;
    std::vector<Vec> lifted_negatives;
};

/// One attempt of the weak learner: draw m_minus negatives and m_plus
/// positives, lift them, intersect the consistency polytope, and return one
/// approximately-uniform consistent halfspace. Infeasible or too-thin bodies
/// are expected attempt failures and yield nullopt (the caller retries);
/// starvation of a label stream propagates.
std::optional<HalfspaceHypothesis> find_good_halfspace(ExampleStream& src, const WeakParams& params,
                                                       const WalkConfig& walk, std::uint64_t seed,
                                                       AttemptRecord* record = nullptr,
                                                       TrainingDump* dump = nullptr);

struct GoodnessReport {
    double p_neg_region = 0.0;          // Pr[h(x) = −1] estimate
    double p_correct_given_region = 0.0;  // Pr[f(x) = −1 | h(x) = −1] estimate
    long long samples_used = 0;
    bool verdict = false;
};

/// Estimates the two region properties on fresh draws and verdicts against
/// the thresholds: region mass ≥ gamma (strict on the estimate) and purity
/// ≥ 1 − ε − ε/3 (the estimation slack is spent on the purity side; a
/// gamma − ε/3 region threshold would be vacuous at desk scale). m_check must
/// be at least ⌈50/(γ·ε²)⌉. Starvation while conditioning on the region is an
/// automatic fail.
GoodnessReport check_good(const HalfspaceHypothesis& h, ExampleStream& src, double epsilon,
                          double gamma, long long m_check);

long long default_m_check(double epsilon, double gamma);

struct RegionLearnerResult {
    std::optional<HalfspaceHypothesis> region;  // empty = exhausted
    GoodnessReport report;                      // report of the accepted region
    int attempts_used = 0;
    std::vector<AttemptRecord> attempts;
};

/// Repeats find_good_halfspace + check_good until a region passes or the
/// attempt budget is exhausted (exhaustion is a value, not an error: the
/// caller reads it as the soft-margin stopping condition).
RegionLearnerResult region_learner(ExampleStream& src, double epsilon, double rho, double gamma,
                                   int attempt_budget, const WeakParams& params,
                                   const WalkConfig& walk, std::uint64_t seed);

}  // namespace polylearn
