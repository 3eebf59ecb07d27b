#pragma once

#include <span>
#include <vector>

#include "polylearn/linalg.hpp"

namespace polylearn {

inline constexpr double kUnitNormTolerance = 1e-9;
inline constexpr double kRadiusSlack = 1e-9;
inline constexpr double kInvSqrt2 = 0.70710678118654752440;

/// Classifier sign(w·x − theta) with unit normal. Inputs whose norm is off by
/// more than 1e-9 are renormalized (theta rescaled along, so the classifier is
/// unchanged) with a warning on stderr.
struct Halfspace {
    Vec w;
    double theta = 0.0;

    Halfspace(Vec w_in, double theta_in);
    int dim() const { return static_cast<int>(w.size()); }
    double slack(std::span<const double> x) const { return dot(w, x) - theta; }
};

/// Intersection of k halfspaces over the ball of radius ambient_radius:
/// f(x) = +1 iff w_i·x − θ_i > 0 for every i, −1 otherwise (ties negative).
struct TargetIntersection {
    std::vector<Halfspace> halfspaces;
    double ambient_radius = 1.0;

    TargetIntersection(std::vector<Halfspace> hs, double radius);
    int dim() const { return halfspaces.front().dim(); }
    int k() const { return static_cast<int>(halfspaces.size()); }
};

int evaluate_target(const TargetIntersection& f, std::span<const double> x);

/// min_i (w_i·x − θ_i): the worst (most negative) unnormalized constraint slack.
double min_constraint_slack(const TargetIntersection& f, std::span<const double> x);

/// −min_i (w_i·x − θ_i)/R. A negative point has margin ρ iff this is ≥ ρ.
double point_margin(const TargetIntersection& f, std::span<const double> x);

/// Image of a point in the ball of radius R on the unit sphere of dimension
/// n+2; the last coordinate is the constant 1/√2.
struct LiftedPoint {
    Vec coords;
};

/// Origin-centered image of (w, θ): unit vector in dimension n+2 whose
/// sphere-completion slot (coordinate n) is zero. Signs agree with the raw
/// classifier and |w'·x'| ≥ |w·x − θ|/(2R).
struct LiftedHalfspace {
    Vec w_prime;
};

LiftedPoint lift_point(std::span<const double> x, double radius);
LiftedHalfspace lift_halfspace(const Halfspace& h, double radius);

/// Fraction of the sample whose worst normalized slack lies in [−rho, 0].
double soft_margin_estimate(const TargetIntersection& f, const std::vector<Vec>& sample, double rho);

struct MarginWitnessReport {
    double required_margin = 0.0;        // ρ²/2
    std::size_t negatives_checked = 0;
    std::vector<std::size_t> violators;  // indices into the support
    bool ok() const { return violators.empty(); }
};

/// Checks that every negative support point clears the ρ²/2 margin implied by
/// ρ-robustness. Requires at least one positive point in the support.
MarginWitnessReport robust_margin_witness(const TargetIntersection& f,
                                          const std::vector<Vec>& support, double rho);

}  // namespace polylearn
