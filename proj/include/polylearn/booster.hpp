#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "polylearn/learner.hpp"

namespace polylearn {

/// Conjunction of halfspace regions over the lifted space; predicts +1 iff
/// every region evaluates +1 on lift(x). regions[0] is normally the trivial
/// all-pass sentinel so the output shape matches the cover loop literally;
/// constants are encoded through the bias axis (see all_sentinel /
/// none_sentinel), so they round-trip through the ordinary record format.
struct CoverHypothesis {
    int base_dim = 0;
    double lift_radius = 1.0;
    std::vector<Vec> regions;  // lifted-space normals, ‖w‖ ≤ 1

    int evaluate(std::span<const double> x) const;
    int evaluate_lifted(std::span<const double> lifted_x) const;

    int lifted_dim() const { return base_dim + 2; }
    /// Number of regions excluding sentinel rows.
    int learned_region_count() const;

    static Vec all_sentinel(int lifted_dim);   // +e_last: accepts everything
    static Vec none_sentinel(int lifted_dim);  // −e_last: rejects everything
    static bool is_sentinel(const Vec& w);
};

int evaluate_cover(const CoverHypothesis& h, std::span<const double> x);

enum class CoverTag { constant, ret_bad, ret_good };
const char* to_string(CoverTag tag);

struct RoundRecord {
    int round = 0;
    double q_plus = 0.0;             // Pr̂[f=+1 ∧ conjunction=1] before the round
    double q_minus = 0.0;            // Pr̂[f=−1 ∧ conjunction=1]
    double conjunction_mass = 0.0;   // q_plus + q_minus
    bool region_found = false;
    bool recheck_passed = false;
    double p_region = 0.0;           // fresh-recheck estimates
    double p_correct = 0.0;
};

struct CoverConfig {
    std::uint64_t seed = 1;
    long long mass_check_samples = 0;  // 0 = auto (Hoeffding for ε/3 accuracy)
};

struct CoverOutcome {
    CoverHypothesis hypothesis;
    CoverTag tag = CoverTag::ret_good;
    std::vector<RoundRecord> rounds;
    int region_learner_calls = 0;
    double bias_p_plus = 0.0;
    double bias_p_minus = 0.0;
};

using RegionFn = std::function<RegionLearnerResult(ExampleStream&, std::uint64_t seed)>;

/// Cover loop: constant shortcut when one label has mass ≤ 5ε; otherwise
/// conjoin fresh-rechecked regions, conditioning the stream on the running
/// conjunction, while both joint masses stay ≥ ε and fewer than
/// ⌈γ⁻¹·log₂(1/ε)⌉ rounds have run. A failed region search or failed fresh
/// recheck returns early with tag ret_bad; normal loop exit returns ret_good.
CoverOutcome cover_learner(ExampleStream& src, const RegionFn& region_fn, double epsilon,
                           double gamma, const CoverConfig& cfg = {});

long long cover_max_rounds(double epsilon, double gamma);

/// One boosting round: either a constant vote everywhere or a confidence-rated
/// region voter (−1 on its region, abstain elsewhere).
struct BoostRound {
    bool is_constant = false;
    int constant_label = 0;
    std::optional<HalfspaceHypothesis> region;
    double alpha = 0.0;
    double err = 0.0;       // weighted error on the non-abstained mass
    double edge = 0.0;      // 1/2 − err
    double coverage = 0.0;  // weighted non-abstained mass
    double holdout_error = 0.0;

    int vote(std::span<const double> x) const;  // −1, 0 (abstain), or +1
};

/// Weighted vote over the rounds; ties go to +1.
struct WeightedBoostHypothesis {
    int base_dim = 0;
    double lift_radius = 1.0;
    std::vector<BoostRound> rounds;

    int evaluate(std::span<const double> x) const;
};

struct BoostConfig {
    int m_train = 6000;
    int m_holdout = 4000;
    int per_round_attempts = 8;
    std::uint64_t seed = 1;
};

using WeakFn = std::function<std::optional<HalfspaceHypothesis>(ExampleStream&, std::uint64_t seed)>;

/// Boosting by resampling with abstaining weak hypotheses: each round draws
/// from the reweighted empirical distribution, falls back to a constant vote
/// when one label holds ≥ 2/3 of the weight, weights votes by
/// ½·ln((1−err)/err) (err clamped away from {0,1}), and stops once held-out
/// error is ≤ epsilon or the round budget runs out. A round in which no
/// candidate reaches edge ≥ gamma raises BoostStallError.
WeightedBoostHypothesis weighted_boost(ExampleStream& src, const WeakFn& weak_fn, double epsilon,
                                       double gamma, int rounds_budget, const BoostConfig& cfg = {});

struct ErrorDecomposition {
    double false_positive = 0.0;  // Pr̂[f=−1 ∧ h=+1]
    double false_negative = 0.0;  // Pr̂[f=+1 ∧ h=−1]
    double total = 0.0;
};

/// Held-out error split over m fresh draws.
ErrorDecomposition error_decomposition(const std::function<int(const Vec&)>& predict,
                                       ExampleStream& src, long long m);

}  // namespace polylearn
