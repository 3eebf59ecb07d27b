#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "polylearn/rng.hpp"
#include "polylearn/stream.hpp"

namespace polylearn {

enum class SourceKind { sphere_margin, cube, pancake };

const char* to_string(SourceKind kind);
SourceKind source_kind_from_string(const std::string& name);

struct SphereMarginOptions {
    double balance_tolerance = 0.05;  // guaranteed |positive fraction − balance|
    bool one_sided = false;           // keep band positives, reject only band negatives
    int retry_budget = 4000;          // normal resamples before giving up on balance
};

/// Seeded synthetic distribution. Two sources built with the same kind,
/// parameters and seed emit byte-identical example sequences; fork() derives
/// an independent substream over the same target.
class LabeledSource final : public ExampleStream {
 public:
    LabeledExample next() override;
    const TargetIntersection& target() const override { return target_; }

    SourceKind kind() const { return kind_; }
    std::uint64_t seed() const { return seed_; }
    std::uint64_t emitted() const { return emitted_; }
    std::uint64_t base_draws() const { return base_draws_; }

    /// Same target and parameters, independent deterministic substream.
    LabeledSource fork(std::uint64_t stream) const;

    /// Pancake only: closed-form mass of the band min-slack/R ∈ [−rho, 0].
    double analytic_band_mass(double rho) const;
    /// Pancake only: the hidden thin direction.
    const Vec& pancake_axis() const;
    double pancake_gap() const;
    double pancake_sigma() const;

    /// Cube only: the raw integer weight rows and half-integer thresholds.
    const std::vector<std::vector<long long>>& integer_weights() const;
    const std::vector<double>& raw_thresholds() const;

    double margin_parameter() const { return rho_; }

    friend LabeledSource make_sphere_margin_source(int n, int k, double rho, std::uint64_t seed,
                                                   double balance, const SphereMarginOptions& opts);
    friend LabeledSource make_cube_source(int n, int k, int weight_bound, std::uint64_t seed);
    friend LabeledSource make_pancake_source(int n, double gap, double sigma, std::uint64_t seed);

 private:
    LabeledSource(SourceKind kind, TargetIntersection target, std::uint64_t seed, Rng emit_rng);

    LabeledExample next_sphere();
    LabeledExample next_cube();
    LabeledExample next_pancake();

    SourceKind kind_;
    TargetIntersection target_;
    std::uint64_t seed_;
    Rng rng_;
    std::uint64_t emitted_ = 0;
    std::uint64_t base_draws_ = 0;

    double rho_ = 0.0;  // sphere band half-width (0 for other kinds)
    SphereMarginOptions sphere_opts_;
    double balance_ = 0.5;

    std::vector<std::vector<long long>> int_weights_;
    std::vector<double> raw_thetas_;

    double gap_ = 0.0;
    double sigma_ = 0.0;
    Vec axis_;
};

/// Unit-sphere source labeled by k random origin-centered halfspaces; points
/// inside the two-sided band |w_i·x| < rho are rejected, so every emitted
/// negative has margin ≥ rho. Normals are resampled until the positive
/// fraction lands within balance_tolerance of balance.
LabeledSource make_sphere_margin_source(int n, int k, double rho, std::uint64_t seed,
                                        double balance = 0.5,
                                        const SphereMarginOptions& opts = {});

/// Uniform hypercube {−1,+1}^n labeled by k integer-weight halfspaces with
/// half-integer thresholds, so |w_i·x − θ_i| ≥ 1/2 exactly and the normalized
/// margin is at least 1/(2·weight_bound·n). Ambient radius is √n.
LabeledSource make_cube_source(int n, int k, int weight_bound, std::uint64_t seed);

/// Two-component Gaussian mixture separated by `gap` along a hidden unit
/// direction, standard deviation `sigma` along it and 1 in the orthogonal
/// directions; labels come from the halfspace through the midpoint. The
/// ambient radius is set to mean + 6·sd of the radial distribution and points
/// beyond it are rejected.
LabeledSource make_pancake_source(int n, double gap, double sigma, std::uint64_t seed);

/// Pancake instance tuned so the analytic band mass at band_rho equals
/// band_mass (solves for the gap at fixed sigma).
LabeledSource make_pancake_source_with_band_mass(int n, double band_rho, double band_mass,
                                                 std::uint64_t seed, double sigma = 0.1);

/// Deterministic ambient radius used by the pancake source.
double pancake_radius(int n, double gap, double sigma);

/// Standard normal CDF.
double std_normal_cdf(double z);

/// Inverse standard normal CDF (bisection; |error| < 1e-14).
double std_normal_quantile(double p);

}  // namespace polylearn
