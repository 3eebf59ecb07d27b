#include "polylearn/distributions.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "polylearn/errors.hpp"

namespace polylearn {

namespace {

constexpr std::uint64_t kEmitStream = 1;
constexpr std::uint64_t kSetupStreamBase = 1000003;
constexpr std::uint64_t kMaxConsecutiveRejects = 1'000'000;

bool sphere_accept(const TargetIntersection& target, const Vec& x, double rho, bool one_sided) {
    if (one_sided) {
        const double worst = min_constraint_slack(target, x);
        return worst > 0.0 || worst <= -rho;
    }
    for (const auto& h : target.halfspaces)
        if (std::abs(h.slack(x)) < rho) return false;
    return true;
}

/// Positive fraction among `m` band-accepted sphere points.
double sphere_pilot_fraction(const TargetIntersection& target, double rho, bool one_sided,
                             Rng rng, long long m) {
    long long plus = 0;
    const int n = target.dim();
    for (long long i = 0; i < m; ++i) {
        std::uint64_t consecutive = 0;
        for (;;) {
            Vec x = rng.unit_vector(n);
            if (sphere_accept(target, x, rho, one_sided)) {
                if (evaluate_target(target, x) == +1) ++plus;
                break;
            }
            if (++consecutive > kMaxConsecutiveRejects)
                throw StarvationError("sphere band rejection starved during balance pilot");
        }
    }
    return static_cast<double>(plus) / static_cast<double>(m);
}

}  // namespace

const char* to_string(SourceKind kind) {
    switch (kind) {
        case SourceKind::sphere_margin: return "sphere_margin";
        case SourceKind::cube: return "cube";
        case SourceKind::pancake: return "pancake";
    }
    return "unknown";
}

SourceKind source_kind_from_string(const std::string& name) {
    if (name == "sphere_margin" || name == "sphere-margin") return SourceKind::sphere_margin;
    if (name == "cube") return SourceKind::cube;
    if (name == "pancake") return SourceKind::pancake;
    throw ConfigError("unknown source kind: " + name);
}

LabeledSource::LabeledSource(SourceKind kind, TargetIntersection target, std::uint64_t seed,
                             Rng emit_rng)
    : kind_(kind), target_(std::move(target)), seed_(seed), rng_(emit_rng) {}

LabeledExample LabeledSource::next() {
    LabeledExample e;
    switch (kind_) {
        case SourceKind::sphere_margin: e = next_sphere(); break;
        case SourceKind::cube: e = next_cube(); break;
        case SourceKind::pancake: e = next_pancake(); break;
    }
    ++emitted_;
    return e;
}

LabeledExample LabeledSource::next_sphere() {
    std::uint64_t consecutive = 0;
    for (;;) {
        Vec x = rng_.unit_vector(target_.dim());
        ++base_draws_;
        if (sphere_accept(target_, x, rho_, sphere_opts_.one_sided)) {
            const int label = evaluate_target(target_, x);
            return {std::move(x), label};
        }
        if (++consecutive > kMaxConsecutiveRejects)
            throw StarvationError("sphere band rejection exceeded its budget");
    }
}

LabeledExample LabeledSource::next_cube() {
    Vec x(static_cast<std::size_t>(target_.dim()));
    for (double& c : x) c = rng_.coin() ? 1.0 : -1.0;
    ++base_draws_;
    int label = evaluate_target(target_, x);
    return {std::move(x), label};
}

LabeledExample LabeledSource::next_pancake() {
    const int n = target_.dim();
    const double radius = target_.ambient_radius;
    std::uint64_t consecutive = 0;
    for (;;) {
        const double center = rng_.coin() ? 0.5 * gap_ : -0.5 * gap_;
        const double along = center + sigma_ * rng_.gaussian();
        Vec g = rng_.gaussian_vector(n);
        ++base_draws_;
        const double g_axis = dot(g, axis_);
        Vec x = g;
        axpy(x, along - g_axis, axis_);  // replace the axis component
        if (norm(x) <= radius) {
            const int label = evaluate_target(target_, x);
            return {std::move(x), label};
        }
        if (++consecutive > kMaxConsecutiveRejects)
            throw StarvationError("pancake radial rejection exceeded its budget");
    }
}

LabeledSource LabeledSource::fork(std::uint64_t stream) const {
    LabeledSource copy = *this;
    copy.rng_ = rng_.split(stream);
    copy.emitted_ = 0;
    copy.base_draws_ = 0;
    return copy;
}

double LabeledSource::analytic_band_mass(double rho) const {
    if (kind_ != SourceKind::pancake)
        throw std::invalid_argument("analytic band mass is defined for the pancake source only");
    if (!(rho >= 0.0)) throw std::invalid_argument("rho must be nonnegative");
    const double half = 0.5 * gap_;
    const double depth = rho * target_.ambient_radius;
    const double lo_plus = std_normal_cdf((-depth - half) / sigma_);
    const double hi_plus = std_normal_cdf((0.0 - half) / sigma_);
    const double lo_minus = std_normal_cdf((-depth + half) / sigma_);
    const double hi_minus = std_normal_cdf((0.0 + half) / sigma_);
    return 0.5 * (hi_plus - lo_plus) + 0.5 * (hi_minus - lo_minus);
}

const Vec& LabeledSource::pancake_axis() const {
    if (kind_ != SourceKind::pancake)
        throw std::invalid_argument("pancake axis is defined for the pancake source only");
    return axis_;
}

double LabeledSource::pancake_gap() const {
    if (kind_ != SourceKind::pancake)
        throw std::invalid_argument("pancake gap is defined for the pancake source only");
    return gap_;
}

double LabeledSource::pancake_sigma() const {
    if (kind_ != SourceKind::pancake)
        throw std::invalid_argument("pancake sigma is defined for the pancake source only");
    return sigma_;
}

const std::vector<std::vector<long long>>& LabeledSource::integer_weights() const {
    if (kind_ != SourceKind::cube)
        throw std::invalid_argument("integer weights are defined for the cube source only");
    return int_weights_;
}

const std::vector<double>& LabeledSource::raw_thresholds() const {
    if (kind_ != SourceKind::cube)
        throw std::invalid_argument("raw thresholds are defined for the cube source only");
    return raw_thetas_;
}

LabeledSource make_sphere_margin_source(int n, int k, double rho, std::uint64_t seed,
                                        double balance, const SphereMarginOptions& opts) {
    if (n < 1) throw ConfigError("sphere source: n must be >= 1");
    if (k < 1) throw ConfigError("sphere source: k must be >= 1");
    if (!(rho > 0.0 && rho < 1.0)) throw ConfigError("sphere source: rho must lie in (0,1)");
    if (!(balance > 0.0 && balance < 1.0))
        throw ConfigError("sphere source: balance must lie in (0,1)");
    if (!(opts.balance_tolerance > 0.0))
        throw ConfigError("sphere source: balance tolerance must be positive");
    if (opts.retry_budget < 1) throw ConfigError("sphere source: retry budget must be >= 1");

    const Rng root(seed);
    const double accept_threshold =
        std::max(0.15 * opts.balance_tolerance, opts.balance_tolerance - 0.03);
    const double stage1_threshold = accept_threshold + 0.025;

    for (int attempt = 0; attempt < opts.retry_budget; ++attempt) {
        Rng normals_rng = root.split(kSetupStreamBase + 2 * static_cast<std::uint64_t>(attempt));
        std::vector<Halfspace> rows;
        rows.reserve(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) rows.emplace_back(normals_rng.unit_vector(n), 0.0);
        TargetIntersection target(std::move(rows), 1.0);

        // A single origin-centered halfspace with two-sided band rejection is
        // exactly balanced by symmetry; no pilot needed.
        const bool symmetric_case =
            k == 1 && !opts.one_sided && std::abs(balance - 0.5) <= 1e-12;
        if (!symmetric_case) {
            Rng pilot_rng =
                root.split(kSetupStreamBase + 2 * static_cast<std::uint64_t>(attempt) + 1);
            const double p1 =
                sphere_pilot_fraction(target, rho, opts.one_sided, pilot_rng.split(0), 2000);
            if (std::abs(p1 - balance) > stage1_threshold) continue;
            const double p2 =
                sphere_pilot_fraction(target, rho, opts.one_sided, pilot_rng.split(1), 20000);
            if (std::abs(p2 - balance) > accept_threshold) continue;
        }

        LabeledSource src(SourceKind::sphere_margin, std::move(target), seed,
                          root.split(kEmitStream));
        src.rho_ = rho;
        src.sphere_opts_ = opts;
        src.balance_ = balance;
        return src;
    }
    throw ConfigError("sphere source: balance " + std::to_string(balance) +
                      " not reached within " + std::to_string(opts.retry_budget) + " retries");
}

LabeledSource make_cube_source(int n, int k, int weight_bound, std::uint64_t seed) {
    if (n < 1) throw ConfigError("cube source: n must be >= 1");
    if (k < 1) throw ConfigError("cube source: k must be >= 1");
    if (weight_bound < 1) throw ConfigError("cube source: weight bound must be >= 1");

    const Rng root(seed);
    Rng setup = root.split(kSetupStreamBase);
    const int m = std::max(1, static_cast<int>(std::floor(std::sqrt(double(n)))));

    std::vector<std::vector<long long>> weights;
    std::vector<double> thetas;
    std::vector<Halfspace> rows;
    for (int i = 0; i < k; ++i) {
        std::vector<long long> row(static_cast<std::size_t>(n));
        for (;;) {
            bool all_zero = true;
            for (auto& wj : row) {
                wj = static_cast<long long>(setup.below(2 * weight_bound + 1)) - weight_bound;
                if (wj != 0) all_zero = false;
            }
            if (!all_zero) break;
        }
        const long long s = static_cast<long long>(setup.below(2 * static_cast<std::uint64_t>(m))) - m;
        const double theta_raw = static_cast<double>(s) + 0.5;

        Vec w(row.begin(), row.end());
        const double len = norm(w);
        scale_in_place(w, 1.0 / len);
        rows.emplace_back(std::move(w), theta_raw / len);
        weights.push_back(std::move(row));
        thetas.push_back(theta_raw);
    }

    LabeledSource src(SourceKind::cube,
                      TargetIntersection(std::move(rows), std::sqrt(double(n))), seed,
                      root.split(kEmitStream));
    src.int_weights_ = std::move(weights);
    src.raw_thetas_ = std::move(thetas);
    return src;
}

double pancake_radius(int n, double gap, double sigma) {
    const double half = 0.5 * gap;
    const double m2 = half * half + sigma * sigma + (n - 1);
    const double var2 = 4.0 * half * half * sigma * sigma + 2.0 * std::pow(sigma, 4) + 2.0 * (n - 1);
    const double sd_r = std::sqrt(var2) / (2.0 * std::sqrt(m2));
    return std::sqrt(m2) + 6.0 * sd_r;
}

LabeledSource make_pancake_source(int n, double gap, double sigma, std::uint64_t seed) {
    if (n < 1) throw ConfigError("pancake source: n must be >= 1");
    if (!(gap > 0.0)) throw ConfigError("pancake source: gap must be positive");
    if (!(sigma > 0.0)) throw ConfigError("pancake source: sigma must be positive");

    const Rng root(seed);
    Rng setup = root.split(kSetupStreamBase);
    Vec axis = setup.unit_vector(n);
    const double radius = pancake_radius(n, gap, sigma);

    LabeledSource src(SourceKind::pancake,
                      TargetIntersection({Halfspace(axis, 0.0)}, radius), seed,
                      root.split(kEmitStream));
    src.gap_ = gap;
    src.sigma_ = sigma;
    src.axis_ = std::move(axis);
    return src;
}

namespace {

double analytic_band_mass_for(int n, double gap, double sigma, double rho) {
    const double half = 0.5 * gap;
    const double depth = rho * pancake_radius(n, gap, sigma);
    return 0.5 * (std_normal_cdf(-half / sigma) - std_normal_cdf((-depth - half) / sigma)) +
           0.5 * (std_normal_cdf(half / sigma) - std_normal_cdf((-depth + half) / sigma));
}

}  // namespace

LabeledSource make_pancake_source_with_band_mass(int n, double band_rho, double band_mass,
                                                 std::uint64_t seed, double sigma) {
    if (!(band_rho > 0.0 && band_rho < 1.0))
        throw ConfigError("pancake tuning: band rho must lie in (0,1)");
    if (!(band_mass > 0.0 && band_mass < 0.45))
        throw ConfigError("pancake tuning: band mass must lie in (0, 0.45)");

    double lo = 1e-9;
    if (analytic_band_mass_for(n, lo, sigma, band_rho) < band_mass)
        throw ConfigError("pancake tuning: requested band mass is unreachable");
    double hi = sigma;
    int guard = 0;
    while (analytic_band_mass_for(n, hi, sigma, band_rho) > band_mass) {
        hi *= 2.0;
        if (++guard > 200) throw ConfigError("pancake tuning: no bracketing gap found");
    }
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (analytic_band_mass_for(n, mid, sigma, band_rho) > band_mass)
            lo = mid;
        else
            hi = mid;
    }
    return make_pancake_source(n, 0.5 * (lo + hi), sigma, seed);
}

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double std_normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("quantile needs p in (0,1)");
    double lo = -40.0, hi = 40.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (std_normal_cdf(mid) < p)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace polylearn
