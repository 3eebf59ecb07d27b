#include "polylearn/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace polylearn {

namespace {

constexpr double kDegenerateChordWidth = 1e-12;
constexpr int kMaxConsecutiveDegenerate = 100;

void check_dim(const ConsistencyPolytope& H, std::span<const double> w, const char* where) {
    if (static_cast<int>(w.size()) != H.dim)
        throw std::invalid_argument(std::string(where) + ": point dimension " +
                                    std::to_string(w.size()) + " != body dimension " +
                                    std::to_string(H.dim));
}

/// All constraints as unit inward normals a (feasible means a·w ≥ 0).
std::vector<Vec> inward_normals(const ConsistencyPolytope& H) {
    std::vector<Vec> out;
    out.reserve(H.pos_constraints.size() + H.neg_constraints.size());
    for (const auto& c : H.pos_constraints) out.push_back(normalized(c));
    for (const auto& c : H.neg_constraints) out.push_back(scaled(normalized(c), -1.0));
    return out;
}

}  // namespace

bool membership(const ConsistencyPolytope& H, std::span<const double> w) {
    check_dim(H, w, "membership");
    if (norm_squared(w) > 1.0) return false;
    for (const auto& c : H.pos_constraints)
        if (dot(w, c) < 0.0) return false;
    for (const auto& c : H.neg_constraints)
        if (dot(w, c) > 0.0) return false;
    return true;
}

double min_slack(const ConsistencyPolytope& H, std::span<const double> w) {
    check_dim(H, w, "min_slack");
    double worst = 1.0 - norm(w);
    for (const auto& c : H.pos_constraints)
        worst = std::min(worst, dot(w, c) / norm(c));
    for (const auto& c : H.neg_constraints)
        worst = std::min(worst, -dot(w, c) / norm(c));
    return worst;
}

std::optional<Chord> chord(const ConsistencyPolytope& H, std::span<const double> p,
                           std::span<const double> d) {
    check_dim(H, p, "chord");
    check_dim(H, d, "chord direction");

    // Ball boundary: ‖p + t·d‖ = 1 with ‖d‖ = 1.
    const double pd = dot(p, d);
    const double disc = pd * pd + 1.0 - norm_squared(p);
    if (disc < 0.0) return std::nullopt;
    const double root = std::sqrt(disc);
    double t_lo = -pd - root;
    double t_hi = -pd + root;

    auto tighten = [&](const Vec& c, double sign) {
        // sign·(p + t·d)·c ≥ 0
        const double a = sign * dot(d, c);
        const double b = sign * dot(p, c);
        if (a == 0.0) return;
        const double bound = -b / a;
        if (a > 0.0)
            t_lo = std::max(t_lo, bound);
        else
            t_hi = std::min(t_hi, bound);
    };
    for (const auto& c : H.pos_constraints) tighten(c, +1.0);
    for (const auto& c : H.neg_constraints) tighten(c, -1.0);

    if (!(t_hi - t_lo >= kDegenerateChordWidth)) return std::nullopt;
    return Chord{t_lo, t_hi};
}

Vec find_interior(const ConsistencyPolytope& H, double slack_target, long max_iters) {
    if (H.dim < 1) throw std::invalid_argument("find_interior: body dimension must be >= 1");
    if (!(slack_target >= 0.0 && slack_target < 1.0))
        throw std::invalid_argument("find_interior: slack target must lie in [0, 1)");
    if (max_iters <= 0) max_iters = 10000L * H.dim;

    const std::vector<Vec> normals = inward_normals(H);
    if (normals.empty()) return Vec(static_cast<std::size_t>(H.dim), 0.0);

    // The body is cone ∩ ball; a unit direction ŵ whose worst constraint
    // slack is s yields the interior point ŵ/(1+s) with overall slack
    // s/(1+s), which is the largest slack any scaling of ŵ achieves. The
    // needed directional slack is therefore:
    const double s_needed = slack_target / (1.0 - slack_target);

    // Minimum-norm point v over conv(normals): ‖v‖ is an upper bound on the
    // best achievable directional slack at every iterate (and equals it in
    // the limit), so ‖v‖ < s_needed certifies the body is too thin.
    Vec v(static_cast<std::size_t>(H.dim), 0.0);
    for (const auto& a : normals) axpy(v, 1.0 / double(normals.size()), a);

    double best_s = -std::numeric_limits<double>::infinity();
    Vec best_w;

    for (long iter = 0; iter < max_iters; ++iter) {
        const double vn = norm(v);
        if (vn < s_needed - 1e-15)
            throw ThinBodyError("no interior point with slack " + std::to_string(slack_target) +
                                " exists (directional slack bounded by " + std::to_string(vn) + ")");
        if (vn <= 1e-15) {
            // Only reachable in converge mode; the cone has no interior.
            throw ThinBodyError("consistency body has an empty interior");
        }

        // Least-slack normal relative to v; s_v/‖v‖ is the slack the unit
        // direction v/‖v‖ actually achieves.
        const Vec* a_min = nullptr;
        double s_v = std::numeric_limits<double>::infinity();
        for (const auto& a : normals) {
            const double av = dot(a, v);
            if (av < s_v) {
                s_v = av;
                a_min = &a;
            }
        }
        const double s = s_v / vn;
        if (s > best_s) {
            best_s = s;
            best_w = scaled(v, 1.0 / vn);
        }

        if (slack_target > 0.0 && best_s / (1.0 + best_s) >= slack_target) {
            Vec candidate = scaled(best_w, 1.0 / (1.0 + best_s));
            if (min_slack(H, candidate) >= slack_target) return candidate;
        }
        if (slack_target == 0.0 && best_s > 0.0 && vn - best_s <= 1e-12) break;

        // Gilbert step: line-search the minimum-norm objective toward the
        // least-slack normal.
        Vec diff = *a_min;
        axpy(diff, -1.0, v);
        const double denom = norm_squared(diff);
        if (denom <= 1e-30) break;  // v coincides with the least-slack normal
        const double t = std::clamp((vn * vn - s_v) / denom, 0.0, 1.0);
        if (t <= 0.0) break;  // v is already the minimum-norm point
        axpy(v, t, diff);
    }

    if (best_s > 0.0) {
        Vec candidate = scaled(best_w, 1.0 / (1.0 + best_s));
        if (slack_target == 0.0 || min_slack(H, candidate) >= slack_target) return candidate;
    }
    throw ThinBodyError("interior search undecided after " + std::to_string(max_iters) +
                        " iterations (best slack " + std::to_string(best_s) + ")");
}

long auto_steps(int dim, double rho) {
    if (dim < 1) throw std::invalid_argument("auto_steps: dim must be >= 1");
    if (!(rho > 0.0)) throw std::invalid_argument("auto_steps: rho must be positive");
    return static_cast<long>(std::ceil(50.0 * dim * std::log(1.0 / (0.01 * rho))));
}

HitAndRunWalker::HitAndRunWalker(const ConsistencyPolytope& H, const WalkConfig& cfg)
    : body_(H), current_(cfg.warm_start), steps_per_sample_(cfg.steps_per_sample),
      rng_(cfg.rng_seed) {
    if (steps_per_sample_ < 1) throw ConfigError("walk: steps_per_sample must be >= 1");
    if (!membership(body_, current_)) throw ConfigError("walk: warm start is not in the body");
}

void HitAndRunWalker::step() {
    int degenerate = 0;
    for (;;) {
        const Vec d = rng_.unit_vector(body_.dim);
        const auto ch = chord(body_, current_, d);
        if (!ch) {
            if (++degenerate > kMaxConsecutiveDegenerate)
                throw ThinBodyError("hit-and-run: " + std::to_string(degenerate) +
                                    " consecutive degenerate chords");
            continue;
        }
        double t = rng_.uniform(ch->t_lo, ch->t_hi);
        Vec candidate = current_;
        axpy(candidate, t, d);
        // Rounding at the chord ends can land a hair outside; pull the step
        // toward the current (interior) point until membership is exact.
        for (int shrink = 0; shrink < 200 && !membership(body_, candidate); ++shrink) {
            t *= 0.9;
            candidate = current_;
            axpy(candidate, t, d);
        }
        if (!membership(body_, candidate)) continue;
        current_ = std::move(candidate);
        return;
    }
}

const Vec& HitAndRunWalker::next() {
    for (long i = 0; i < steps_per_sample_; ++i) step();
    return current_;
}

Vec sample_uniform(const ConsistencyPolytope& H, const WalkConfig& cfg) {
    HitAndRunWalker walker(H, cfg);
    return walker.next();
}

VolumeFractionEstimate estimate_volume_fraction(const ConsistencyPolytope& H_outer,
                                                const std::function<bool(const Vec&)>& predicate,
                                                int m, const WalkConfig& cfg) {
    if (m < 1) throw std::invalid_argument("volume fraction: m must be >= 1");
    HitAndRunWalker walker(H_outer, cfg);
    int hits = 0;
    for (int i = 0; i < m; ++i)
        if (predicate(walker.next())) ++hits;
    VolumeFractionEstimate est;
    est.samples = m;
    est.fraction = double(hits) / double(m);
    est.std_error = std::sqrt(est.fraction * (1.0 - est.fraction) / double(m));
    return est;
}

}  // namespace polylearn
