#include "polylearn/booster.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "polylearn/errors.hpp"
#include "polylearn/geometry.hpp"
#include "polylearn/rng.hpp"

namespace polylearn {

namespace {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return detail::mix64(seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1)));
}

/// Hoeffding size for additive accuracy eps/3 with per-check failure
/// probability 0.01/checks.
long long mass_check_size(double epsilon, long long checks) {
    return static_cast<long long>(
        std::ceil(9.0 / (2.0 * epsilon * epsilon) * std::log(200.0 * double(checks))));
}

/// Resampling stream over a fixed training multiset: next() draws an index
/// proportionally to the current weights.
class EmpiricalStream final : public ExampleStream {
 public:
    EmpiricalStream(const std::vector<LabeledExample>& sample, const std::vector<double>& weights,
                    const TargetIntersection& target, std::uint64_t seed)
        : sample_(sample), target_(target), rng_(seed) {
        prefix_.resize(weights.size());
        double acc = 0.0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            acc += weights[i];
            prefix_[i] = acc;
        }
        total_ = acc;
    }

    LabeledExample next() override {
        const double u = rng_.next_double() * total_;
        const auto it = std::upper_bound(prefix_.begin(), prefix_.end(), u);
        std::size_t idx = static_cast<std::size_t>(it - prefix_.begin());
        if (idx >= sample_.size()) idx = sample_.size() - 1;
        return sample_[idx];
    }

    const TargetIntersection& target() const override { return target_; }

 private:
    const std::vector<LabeledExample>& sample_;
    const TargetIntersection& target_;
    Rng rng_;
    std::vector<double> prefix_;
    double total_ = 0.0;
};

}  // namespace

Vec CoverHypothesis::all_sentinel(int lifted_dim) {
    Vec w(static_cast<std::size_t>(lifted_dim), 0.0);
    w.back() = 1.0;
    return w;
}

Vec CoverHypothesis::none_sentinel(int lifted_dim) {
    Vec w(static_cast<std::size_t>(lifted_dim), 0.0);
    w.back() = -1.0;
    return w;
}

bool CoverHypothesis::is_sentinel(const Vec& w) {
    if (w.empty() || std::abs(w.back()) != 1.0) return false;
    for (std::size_t i = 0; i + 1 < w.size(); ++i)
        if (w[i] != 0.0) return false;
    return true;
}

int CoverHypothesis::evaluate(std::span<const double> x) const {
    return evaluate_lifted(lift_point(x, lift_radius).coords);
}

int CoverHypothesis::evaluate_lifted(std::span<const double> lifted_x) const {
    for (const auto& w : regions)
        if (dot(w, lifted_x) < 0.0) return -1;
    return +1;
}

int CoverHypothesis::learned_region_count() const {
    int count = 0;
    for (const auto& w : regions)
        if (!is_sentinel(w)) ++count;
    return count;
}

int evaluate_cover(const CoverHypothesis& h, std::span<const double> x) { return h.evaluate(x); }

const char* to_string(CoverTag tag) {
    switch (tag) {
        case CoverTag::constant: return "constant";
        case CoverTag::ret_bad: return "ret-bad";
        case CoverTag::ret_good: return "ret-good";
    }
    return "unknown";
}

long long cover_max_rounds(double epsilon, double gamma) {
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw ConfigError("cover: epsilon must lie in (0, 1)");
    if (!(gamma > 0.0 && gamma < 0.5)) throw ConfigError("cover: gamma must lie in (0, 1/2)");
    return static_cast<long long>(std::ceil(std::log2(1.0 / epsilon) / gamma));
}

CoverOutcome cover_learner(ExampleStream& src, const RegionFn& region_fn, double epsilon,
                           double gamma, const CoverConfig& cfg) {
    const long long max_rounds = cover_max_rounds(epsilon, gamma);
    const long long checks = 2 + 2 * max_rounds;
    const long long m_est =
        cfg.mass_check_samples > 0 ? cfg.mass_check_samples : mass_check_size(epsilon, checks);
    const int lifted_dim = src.dim() + 2;

    CoverOutcome out;
    out.hypothesis.base_dim = src.dim();
    out.hypothesis.lift_radius = src.radius();
    out.hypothesis.regions.push_back(CoverHypothesis::all_sentinel(lifted_dim));

    const auto [p_plus, p_minus] = estimate_bias(src, m_est);
    out.bias_p_plus = p_plus;
    out.bias_p_minus = p_minus;
    if (p_plus <= 5.0 * epsilon) {
        out.hypothesis.regions.push_back(CoverHypothesis::none_sentinel(lifted_dim));
        out.tag = CoverTag::constant;
        return out;
    }
    if (p_minus <= 5.0 * epsilon) {
        out.tag = CoverTag::constant;
        return out;
    }

    for (long long round = 0; round < max_rounds; ++round) {
        RoundRecord rec;
        rec.round = static_cast<int>(round);

        const auto& hyp = out.hypothesis;
        long long joint_plus = 0, joint_minus = 0;
        for (long long i = 0; i < m_est; ++i) {
            const LabeledExample e = src.next();
            if (hyp.evaluate(e.x) != +1) continue;
            if (e.label == +1)
                ++joint_plus;
            else
                ++joint_minus;
        }
        rec.q_plus = double(joint_plus) / double(m_est);
        rec.q_minus = double(joint_minus) / double(m_est);
        rec.conjunction_mass = rec.q_plus + rec.q_minus;
        if (std::min(rec.q_plus, rec.q_minus) < epsilon) {
            out.rounds.push_back(rec);
            out.tag = CoverTag::ret_good;
            return out;
        }

        FilteredStream conditioned(
            src, [&hyp](const LabeledExample& e) { return hyp.evaluate(e.x) == +1; });

        ++out.region_learner_calls;
        RegionLearnerResult found = region_fn(conditioned, derive_seed(cfg.seed, round));
        rec.region_found = found.region.has_value();
        if (!found.region) {
            out.rounds.push_back(rec);
            out.tag = CoverTag::ret_bad;
            return out;
        }

        GoodnessReport recheck =
            check_good(*found.region, conditioned, epsilon, gamma, default_m_check(epsilon, gamma));
        rec.recheck_passed = recheck.verdict;
        rec.p_region = recheck.p_neg_region;
        rec.p_correct = recheck.p_correct_given_region;
        out.rounds.push_back(rec);
        if (!recheck.verdict) {
            out.tag = CoverTag::ret_bad;
            return out;
        }

        out.hypothesis.regions.push_back(found.region->w);
    }

    out.tag = CoverTag::ret_good;
    return out;
}

int BoostRound::vote(std::span<const double> x) const {
    if (is_constant) return constant_label;
    return region && region->evaluate(x) == -1 ? -1 : 0;
}

int WeightedBoostHypothesis::evaluate(std::span<const double> x) const {
    double score = 0.0;
    for (const auto& r : rounds) score += r.alpha * r.vote(x);
    return score >= 0.0 ? +1 : -1;
}

WeightedBoostHypothesis weighted_boost(ExampleStream& src, const WeakFn& weak_fn, double epsilon,
                                       double gamma, int rounds_budget, const BoostConfig& cfg) {
    if (rounds_budget < 1) throw ConfigError("boost: rounds budget must be >= 1");
    if (cfg.m_train < 2 || cfg.m_holdout < 1)
        throw ConfigError("boost: training and holdout sizes must be positive");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("boost: epsilon must lie in (0, 1)");
    if (!(gamma > 0.0 && gamma < 0.5)) throw ConfigError("boost: gamma must lie in (0, 1/2)");

    std::vector<LabeledExample> train;
    train.reserve(static_cast<std::size_t>(cfg.m_train));
    for (int i = 0; i < cfg.m_train; ++i) train.push_back(src.next());
    std::vector<LabeledExample> holdout;
    holdout.reserve(static_cast<std::size_t>(cfg.m_holdout));
    for (int i = 0; i < cfg.m_holdout; ++i) holdout.push_back(src.next());

    std::vector<double> weights(train.size(), 1.0 / double(train.size()));
    const double err_floor = 1.0 / (2.0 * double(train.size()));

    WeightedBoostHypothesis model;
    model.base_dim = src.dim();
    model.lift_radius = src.radius();

    for (int round = 0; round < rounds_budget; ++round) {
        double weight_plus = 0.0;
        for (std::size_t i = 0; i < train.size(); ++i)
            if (train[i].label == +1) weight_plus += weights[i];

        BoostRound chosen;
        bool have_round = false;

        if (weight_plus >= 2.0 / 3.0 || weight_plus <= 1.0 / 3.0) {
            chosen.is_constant = true;
            chosen.constant_label = weight_plus >= 2.0 / 3.0 ? +1 : -1;
            chosen.err = chosen.constant_label == +1 ? 1.0 - weight_plus : weight_plus;
            chosen.coverage = 1.0;
            chosen.edge = 0.5 - chosen.err;
            have_round = true;
        } else {
            for (int attempt = 0; attempt < cfg.per_round_attempts && !have_round; ++attempt) {
                const std::uint64_t attempt_seed =
                    derive_seed(cfg.seed, 1000003ULL * std::uint64_t(round) + std::uint64_t(attempt));
                EmpiricalStream reweighted(train, weights, src.target(), attempt_seed);
                auto h = weak_fn(reweighted, derive_seed(attempt_seed, 1));
                if (!h) continue;

                double covered = 0.0, wrong = 0.0;
                for (std::size_t i = 0; i < train.size(); ++i) {
                    if (h->evaluate(train[i].x) != -1) continue;
                    covered += weights[i];
                    if (train[i].label != -1) wrong += weights[i];
                }
                if (covered <= 0.0) continue;
                const double err = wrong / covered;
                if (0.5 - err < gamma) continue;

                chosen.is_constant = false;
                chosen.region = std::move(h);
                chosen.err = err;
                chosen.coverage = covered;
                chosen.edge = 0.5 - err;
                have_round = true;
            }
        }

        if (!have_round)
            throw BoostStallError("boost: no weak hypothesis reached edge " +
                                      std::to_string(gamma) + " in round " + std::to_string(round),
                                  round);

        const double clamped = std::clamp(chosen.err, err_floor, 1.0 - err_floor);
        chosen.alpha = 0.5 * std::log((1.0 - clamped) / clamped);

        double total = 0.0;
        for (std::size_t i = 0; i < train.size(); ++i) {
            const int v = chosen.vote(train[i].x);
            if (v != 0) weights[i] *= std::exp(-chosen.alpha * double(train[i].label) * double(v));
            total += weights[i];
        }
        for (double& w : weights) w /= total;

        model.rounds.push_back(std::move(chosen));

        long long mistakes = 0;
        for (const auto& e : holdout)
            if (model.evaluate(e.x) != e.label) ++mistakes;
        model.rounds.back().holdout_error = double(mistakes) / double(holdout.size());
        if (model.rounds.back().holdout_error <= epsilon) break;
    }
    return model;
}

ErrorDecomposition error_decomposition(const std::function<int(const Vec&)>& predict,
                                       ExampleStream& src, long long m) {
    if (m < 1) throw ConfigError("error decomposition: m must be >= 1");
    long long fp = 0, fn = 0;
    for (long long i = 0; i < m; ++i) {
        const LabeledExample e = src.next();
        const int p = predict(e.x);
        if (e.label == -1 && p == +1) ++fp;
        if (e.label == +1 && p == -1) ++fn;
    }
    ErrorDecomposition out;
    out.false_positive = double(fp) / double(m);
    out.false_negative = double(fn) / double(m);
    out.total = out.false_positive + out.false_negative;
    return out;
}

}  // namespace polylearn
