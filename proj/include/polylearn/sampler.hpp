#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "polylearn/errors.hpp"
#include "polylearn/rng.hpp"

namespace polylearn {

/// Intersection of the unit ball with homogeneous halfspace constraints:
///   { w : ‖w‖ ≤ 1,  w·c ≥ 0 ∀c ∈ pos_constraints,  w·c ≤ 0 ∀c ∈ neg_constraints }.
struct ConsistencyPolytope {
    int dim = 0;
    std::vector<Vec> pos_constraints;
    std::vector<Vec> neg_constraints;
};

/// Exact membership: ‖w‖ ≤ 1 and every constraint holds (boundary inside).
bool membership(const ConsistencyPolytope& H, std::span<const double> w);

/// min over: normalized constraint slacks (distance to each constraint
/// hyperplane, signed toward feasibility) and the ball slack 1 − ‖w‖.
double min_slack(const ConsistencyPolytope& H, std::span<const double> w);

struct Chord {
    double t_lo = 0.0;
    double t_hi = 0.0;
};

/// Maximal interval {t : p + t·d ∈ H}. Returns nullopt when the interval is
/// degenerate (width < 1e−12), which callers treat as "retry with a new
/// direction". Requires p ∈ H; then t_lo ≤ 0 ≤ t_hi.
std::optional<Chord> chord(const ConsistencyPolytope& H, std::span<const double> p,
                           std::span<const double> d);

/// Point with min normalized constraint slack ≥ slack_target and
/// ‖w‖ ≤ 1 − slack_target, found by max-margin iteration on the least-slack
/// constraint (min-norm-point form, which also certifies infeasibility when
/// no such point exists). slack_target = 0 runs to convergence and returns
/// the best centered point. Throws ThinBodyError when the body provably has
/// no ball of the requested slack or the iteration budget (default 10⁴·dim)
/// runs out undecided.
Vec find_interior(const ConsistencyPolytope& H, double slack_target, long max_iters = 0);

struct WalkConfig {
    long steps_per_sample = 0;  // must be ≥ 1 when a walk runs
    Vec warm_start;             // must satisfy membership
    std::uint64_t rng_seed = 0;
};

/// Default walk length: ⌈50 · dim · ln(1/(0.01·rho))⌉.
long auto_steps(int dim, double rho);

/// Hit-and-run walk over H: uniform direction, uniform point on the chord.
/// More than 100 consecutive degenerate chords raise ThinBodyError. Every
/// produced point satisfies membership exactly.
class HitAndRunWalker {
 public:
    HitAndRunWalker(const ConsistencyPolytope& H, const WalkConfig& cfg);

    /// Advances steps_per_sample steps and returns the new point.
    const Vec& next();
    const Vec& current() const { return current_; }

 private:
    void step();

    const ConsistencyPolytope& body_;
    Vec current_;
    long steps_per_sample_;
    Rng rng_;
};

/// One approximately-uniform point: steps_per_sample hit-and-run steps from
/// cfg.warm_start.
Vec sample_uniform(const ConsistencyPolytope& H, const WalkConfig& cfg);

struct VolumeFractionEstimate {
    double fraction = 0.0;
    double std_error = 0.0;
    int samples = 0;
};

/// Fraction of m walk samples from H_outer that satisfy the predicate, with
/// the binomial standard error.
VolumeFractionEstimate estimate_volume_fraction(const ConsistencyPolytope& H_outer,
                                                const std::function<bool(const Vec&)>& predicate,
                                                int m, const WalkConfig& cfg);

}  // namespace polylearn
