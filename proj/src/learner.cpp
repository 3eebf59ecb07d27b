#include "polylearn/learner.hpp"

#include <cmath>
#include <string>

#include "polylearn/errors.hpp"
#include "polylearn/geometry.hpp"

namespace polylearn {

namespace {

constexpr double kMaxExecutableMPlus = 1e8;

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return detail::mix64(seed ^ (0x632be59bd9b4e019ULL + stream * 0x9e3779b97f4a7c15ULL));
}

}  // namespace

long long WeakParams::effective_m_minus() const {
    return m_minus_override ? *m_minus_override : m_minus;
}

long long WeakParams::effective_m_plus() const {
    if (m_plus_override) return *m_plus_override;
    if (m_plus_exact > kMaxExecutableMPlus)
        throw ConfigError("positive sample size " + std::to_string(m_plus_exact) +
                          " is not executable; set an override");
    return static_cast<long long>(std::ceil(m_plus_exact));
}

double WeakParams::good_threshold_for(double m_plus_value) const {
    return (100.0 * n / (epsilon * epsilon)) * std::log2(m_plus_value) / m_plus_value;
}

WeakParams compute_params(int n, int k, double rho, double epsilon) {
    if (n < 1) throw ConfigError("compute_params: n must be >= 1");
    if (k < 1) throw ConfigError("compute_params: k must be >= 1");
    if (!(rho > 0.0 && rho < 9.0))
        throw ConfigError("compute_params: rho must lie in (0, 9)");
    if (!(epsilon > 0.0 && epsilon <= 1.0))
        throw ConfigError("compute_params: epsilon must lie in (0, 1]");
    if (!(2.0 * k / epsilon > 1.0))
        throw ConfigError("compute_params: 2k/epsilon must exceed 1");

    WeakParams p;
    p.n = n;
    p.k = k;
    p.rho = rho;
    p.epsilon = epsilon;

    const double log_rho = std::log2(9.0 / rho);
    const double log_ke = std::log2(2.0 * k / epsilon);
    p.m_minus_exact = std::sqrt(double(n) * log_rho / log_ke);
    p.m_minus = std::max(1LL, static_cast<long long>(std::ceil(p.m_minus_exact)));
    p.exponent = std::sqrt(double(n) * log_rho * log_ke);
    const double base = 200.0 * k * double(n) * double(n) * double(p.m_minus) /
                        std::pow(epsilon, 4);
    p.m_plus_exact = base * base * std::exp2(p.exponent);
    p.good_threshold = p.good_threshold_for(p.m_plus_exact);
    return p;
}

long long hitting_set_size(int vc_dim, double epsilon) {
    if (vc_dim < 1) throw ConfigError("hitting_set_size: vc_dim must be >= 1");
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw ConfigError("hitting_set_size: epsilon must lie in (0, 1)");
    return static_cast<long long>(
        std::ceil((32.0 / epsilon) * double(vc_dim) * std::log2(1.0 / epsilon)));
}

int HalfspaceHypothesis::evaluate(std::span<const double> x) const {
    return evaluate_lifted(lift_point(x, lift_radius).coords);
}

int HalfspaceHypothesis::evaluate_lifted(std::span<const double> lifted_x) const {
    return dot(w, lifted_x) >= 0.0 ? +1 : -1;
}

std::optional<HalfspaceHypothesis> find_good_halfspace(ExampleStream& src, const WeakParams& params,
                                                       const WalkConfig& walk, std::uint64_t seed,
                                                       AttemptRecord* record, TrainingDump* dump) {
    const long long m_minus = params.effective_m_minus();
    const long long m_plus = params.effective_m_plus();
    const double radius = src.radius();
    const int lifted_dim = src.dim() + 2;

    ConsistencyPolytope body;
    body.dim = lifted_dim;
    {
        FilteredStream negatives = conditioned_stream(src, -1);
        body.neg_constraints.reserve(static_cast<std::size_t>(m_minus));
        for (long long i = 0; i < m_minus; ++i)
            body.neg_constraints.push_back(lift_point(negatives.next().x, radius).coords);
    }
    {
        FilteredStream positives = conditioned_stream(src, +1);
        body.pos_constraints.reserve(static_cast<std::size_t>(m_plus));
        for (long long i = 0; i < m_plus; ++i)
            body.pos_constraints.push_back(lift_point(positives.next().x, radius).coords);
    }
    if (dump) {
        dump->lifted_negatives = body.neg_constraints;
        dump->lifted_positives = body.pos_constraints;
    }

    // Interior point for the walk start; step down through slack targets so
    // fat bodies are centered in a handful of iterations and provably thin
    // ones are rejected by the infeasibility certificate.
    Vec warm;
    bool found = false;
    for (double target : {0.25, 0.1, 0.03, 0.01, 0.003, 0.001, 1e-4, 1e-5}) {
        try {
            warm = find_interior(body, target);
            found = true;
            if (record) {
                record->polytope_feasible = true;
                record->interior_slack = min_slack(body, warm);
            }
            break;
        } catch (const ThinBodyError&) {
            continue;
        }
    }
    if (!found) {
        if (record) record->polytope_feasible = false;
        return std::nullopt;
    }

    WalkConfig cfg = walk;
    cfg.warm_start = warm;
    cfg.rng_seed = derive_seed(seed, 0);
    if (cfg.steps_per_sample <= 0) cfg.steps_per_sample = auto_steps(lifted_dim, params.rho);

    Vec w;
    try {
        w = sample_uniform(body, cfg);
    } catch (const ThinBodyError&) {
        return std::nullopt;
    }

    // Consistency: membership puts every positive on the closed nonnegative
    // side; negatives must be strictly negative for the sign(0)=+1 hypothesis.
    for (const auto& neg : body.neg_constraints)
        if (dot(w, neg) >= 0.0) return std::nullopt;

    if (record) record->returned = true;
    HalfspaceHypothesis h;
    h.w = std::move(w);
    h.base_dim = src.dim();
    h.lift_radius = radius;
    return h;
}

long long default_m_check(double epsilon, double gamma) {
    if (!(epsilon > 0.0) || !(gamma > 0.0))
        throw ConfigError("default_m_check: epsilon and gamma must be positive");
    return static_cast<long long>(std::ceil(50.0 / (gamma * epsilon * epsilon)));
}

GoodnessReport check_good(const HalfspaceHypothesis& h, ExampleStream& src, double epsilon,
                          double gamma, long long m_check) {
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw ConfigError("check_good: epsilon must lie in (0, 1)");
    if (!(gamma > 0.0 && gamma < 0.5)) throw ConfigError("check_good: gamma must lie in (0, 1/2)");
    if (m_check < default_m_check(epsilon, gamma))
        throw ConfigError("check_good: m_check below the 50/(gamma*epsilon^2) floor");

    GoodnessReport report;
    long long in_region = 0;
    for (long long i = 0; i < m_check; ++i)
        if (h.evaluate(src.next().x) == -1) ++in_region;
    report.p_neg_region = double(in_region) / double(m_check);
    report.samples_used = m_check;
    if (report.p_neg_region < gamma) {
        report.verdict = false;
        return report;
    }

    const long long m_cond =
        std::max(200LL, static_cast<long long>(std::ceil(50.0 / (epsilon * epsilon))));
    FilteredStream region_stream(
        src, [&h](const LabeledExample& e) { return h.evaluate(e.x) == -1; });
    long long correct = 0;
    try {
        for (long long i = 0; i < m_cond; ++i)
            if (region_stream.next().label == -1) ++correct;
    } catch (const StarvationError&) {
        report.verdict = false;
        report.samples_used += region_stream.accepted() + region_stream.rejected();
        return report;
    }
    report.samples_used += region_stream.accepted() + region_stream.rejected();
    report.p_correct_given_region = double(correct) / double(m_cond);
    report.verdict = report.p_correct_given_region >= 1.0 - epsilon - epsilon / 3.0;
    return report;
}

RegionLearnerResult region_learner(ExampleStream& src, double epsilon, double rho, double gamma,
                                   int attempt_budget, const WeakParams& params,
                                   const WalkConfig& walk, std::uint64_t seed) {
    if (attempt_budget < 1) throw ConfigError("region_learner: attempt budget must be >= 1");

    WalkConfig cfg = walk;
    if (cfg.steps_per_sample <= 0) cfg.steps_per_sample = auto_steps(src.dim() + 2, rho);
    const long long m_check = default_m_check(epsilon, gamma);

    RegionLearnerResult result;
    for (int attempt = 0; attempt < attempt_budget; ++attempt) {
        AttemptRecord rec;
        rec.attempt = attempt;
        auto h = find_good_halfspace(src, params, cfg, derive_seed(seed, attempt + 1), &rec);
        if (h) {
            GoodnessReport report = check_good(*h, src, epsilon, gamma, m_check);
            rec.checked = true;
            rec.passed = report.verdict;
            rec.p_neg_region = report.p_neg_region;
            rec.p_correct = report.p_correct_given_region;
            if (report.verdict) {
                result.attempts.push_back(rec);
                result.attempts_used = attempt + 1;
                result.region = std::move(h);
                result.report = report;
                return result;
            }
        }
        result.attempts.push_back(rec);
    }
    result.attempts_used = attempt_budget;
    return result;
}

}  // namespace polylearn
