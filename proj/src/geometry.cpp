#include "polylearn/geometry.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "polylearn/errors.hpp"

namespace polylearn {

Halfspace::Halfspace(Vec w_in, double theta_in) : w(std::move(w_in)), theta(theta_in) {
    if (w.empty()) throw std::invalid_argument("halfspace normal is empty");
    const double len = norm(w);
    if (len <= kUnitNormTolerance) throw std::invalid_argument("halfspace normal is zero");
    if (std::abs(len - 1.0) > kUnitNormTolerance) {
        std::fprintf(stderr, "warning: renormalizing halfspace normal (|w| = %.17g)\n", len);
        scale_in_place(w, 1.0 / len);
        theta /= len;
    }
}

TargetIntersection::TargetIntersection(std::vector<Halfspace> hs, double radius)
    : halfspaces(std::move(hs)), ambient_radius(radius) {
    if (halfspaces.empty()) throw std::invalid_argument("intersection needs at least one halfspace");
    if (!(radius > 0.0)) throw std::invalid_argument("ambient radius must be positive");
    const int d = halfspaces.front().dim();
    for (const auto& h : halfspaces) {
        if (h.dim() != d) throw std::invalid_argument("halfspace dimensions disagree");
        if (std::abs(h.theta) > radius * (1.0 + kRadiusSlack) + kRadiusSlack)
            throw std::invalid_argument("halfspace threshold exceeds the ambient radius");
    }
}

int evaluate_target(const TargetIntersection& f, std::span<const double> x) {
    for (const auto& h : f.halfspaces)
        if (h.slack(x) <= 0.0) return -1;
    return +1;
}

double min_constraint_slack(const TargetIntersection& f, std::span<const double> x) {
    double worst = f.halfspaces.front().slack(x);
    for (std::size_t i = 1; i < f.halfspaces.size(); ++i)
        worst = std::min(worst, f.halfspaces[i].slack(x));
    return worst;
}

double point_margin(const TargetIntersection& f, std::span<const double> x) {
    return -min_constraint_slack(f, x) / f.ambient_radius;
}

LiftedPoint lift_point(std::span<const double> x, double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("lift radius must be positive");
    const double r2 = radius * radius;
    const double n2 = norm_squared(x);
    if (n2 > r2 * (1.0 + 1e-6)) throw std::invalid_argument("point lies outside the lift ball");
    const double rest = std::sqrt(std::max(0.0, r2 - n2));
    LiftedPoint out;
    out.coords.resize(x.size() + 2);
    const double c = kInvSqrt2 / radius;
    for (std::size_t i = 0; i < x.size(); ++i) out.coords[i] = x[i] * c;
    out.coords[x.size()] = rest * c;
    out.coords[x.size() + 1] = kInvSqrt2;
    return out;
}

LiftedHalfspace lift_halfspace(const Halfspace& h, double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("lift radius must be positive");
    const double t = h.theta / radius;
    const double inv = 1.0 / std::sqrt(1.0 + t * t);
    LiftedHalfspace out;
    out.w_prime.resize(h.w.size() + 2);
    for (std::size_t i = 0; i < h.w.size(); ++i) out.w_prime[i] = h.w[i] * inv;
    out.w_prime[h.w.size()] = 0.0;
    out.w_prime[h.w.size() + 1] = -t * inv;
    return out;
}

double soft_margin_estimate(const TargetIntersection& f, const std::vector<Vec>& sample,
                            double rho) {
    if (sample.empty()) throw std::invalid_argument("soft margin needs a nonempty sample");
    if (!(rho >= 0.0)) throw std::invalid_argument("rho must be nonnegative");
    long long inside = 0;
    for (const auto& x : sample) {
        const double s = min_constraint_slack(f, x) / f.ambient_radius;
        if (s <= 0.0 && s >= -rho) ++inside;
    }
    return static_cast<double>(inside) / static_cast<double>(sample.size());
}

MarginWitnessReport robust_margin_witness(const TargetIntersection& f,
                                          const std::vector<Vec>& support, double rho) {
    if (!(rho > 0.0)) throw std::invalid_argument("rho must be positive");
    bool has_positive = false;
    for (const auto& x : support)
        if (evaluate_target(f, x) == +1) {
            has_positive = true;
            break;
        }
    if (!has_positive)
        throw std::invalid_argument("margin witness needs a positive point in the support");

    MarginWitnessReport report;
    report.required_margin = 0.5 * rho * rho;
    for (std::size_t i = 0; i < support.size(); ++i) {
        if (evaluate_target(f, support[i]) != -1) continue;
        ++report.negatives_checked;
        if (point_margin(f, support[i]) < report.required_margin - 1e-12)
            report.violators.push_back(i);
    }
    return report;
}

}  // namespace polylearn
