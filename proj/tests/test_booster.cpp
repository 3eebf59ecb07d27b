#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "polylearn/booster.hpp"
#include "polylearn/distributions.hpp"
#include "polylearn/errors.hpp"
#include "polylearn/geometry.hpp"

using namespace polylearn;

namespace {

class ScriptedStream final : public ExampleStream {
 public:
    ScriptedStream(std::vector<LabeledExample> script)
        : script_(std::move(script)),
          target_({Halfspace(Vec{1.0, 0.0}, 0.0)}, 1.0) {}

    LabeledExample next() override { return script_[pos_++ % script_.size()]; }
    const TargetIntersection& target() const override { return target_; }

 private:
    std::vector<LabeledExample> script_;
    std::size_t pos_ = 0;
    TargetIntersection target_;
};

ScriptedStream biased_labels(int plus_per_10) {
    std::vector<LabeledExample> script;
    for (int i = 0; i < 10; ++i) {
        const double a = 0.6283185307179586 * i;
        const int label = i < plus_per_10 ? +1 : -1;
        script.push_back({Vec{0.5 * std::cos(a), 0.5 * std::sin(a)}, label});
    }
    return ScriptedStream(std::move(script));
}

WeakParams desk_params(int n, int k, double rho, double epsilon) {
    WeakParams p = compute_params(n, k, rho, epsilon);
    p.m_minus_override = 8;
    p.m_plus_override = 300;
    return p;
}

}  // namespace

TEST_CASE("round caps are frozen against the closed form") {
    CHECK(cover_max_rounds(0.05, 0.02) == 217);
    CHECK(cover_max_rounds(0.1, 0.05) == 67);
    CHECK_THROWS_AS(cover_max_rounds(0.0, 0.05), ConfigError);
    CHECK_THROWS_AS(cover_max_rounds(0.1, 0.5), ConfigError);
}

TEST_CASE("sentinel rows encode the two constants") {
    const Vec all = CoverHypothesis::all_sentinel(4);
    const Vec none = CoverHypothesis::none_sentinel(4);
    CHECK(CoverHypothesis::is_sentinel(all));
    CHECK(CoverHypothesis::is_sentinel(none));
    CHECK_FALSE(CoverHypothesis::is_sentinel(Vec{0.5, 0.0, 0.0, 0.5}));
    CHECK_FALSE(CoverHypothesis::is_sentinel(Vec{}));

    CoverHypothesis always;
    always.base_dim = 2;
    always.regions = {all};
    CoverHypothesis never;
    never.base_dim = 2;
    never.regions = {all, none};
    CHECK(always.learned_region_count() == 0);
    CHECK(never.learned_region_count() == 0);
    for (double t = -0.9; t < 0.95; t += 0.3) {
        CHECK(always.evaluate(Vec{t, 0.1}) == +1);
        CHECK(never.evaluate(Vec{t, 0.1}) == -1);
    }
}

TEST_CASE("a cover conjunction intersects its region predicates") {
    CoverHypothesis h;
    h.base_dim = 2;
    h.lift_radius = 1.0;
    h.regions = {CoverHypothesis::all_sentinel(4),
                 lift_halfspace(Halfspace(Vec{1.0, 0.0}, 0.0), 1.0).w_prime,
                 lift_halfspace(Halfspace(Vec{0.0, 1.0}, 0.0), 1.0).w_prime};
    CHECK(h.learned_region_count() == 2);
    CHECK(h.evaluate(Vec{0.3, 0.4}) == +1);
    CHECK(h.evaluate(Vec{-0.3, 0.4}) == -1);
    CHECK(h.evaluate(Vec{0.3, -0.4}) == -1);
    CHECK(evaluate_cover(h, Vec{0.3, 0.4}) == +1);
    for (double t = -0.8; t < 0.85; t += 0.2) {
        const Vec x{t, 0.3};
        CHECK(h.evaluate(x) == h.evaluate_lifted(lift_point(x, 1.0).coords));
    }
}

TEST_CASE("cover shortcuts to a constant when one label is negligible") {
    RegionFn never_called = [](ExampleStream&, std::uint64_t) -> RegionLearnerResult {
        throw std::logic_error("region learner must not run on a constant instance");
    };
    CoverConfig cfg;
    cfg.mass_check_samples = 2000;

    ScriptedStream mostly_plus = biased_labels(9);  // p_minus = 0.1 <= 5*0.05
    CoverOutcome plus = cover_learner(mostly_plus, never_called, 0.05, 0.05, cfg);
    CHECK(plus.tag == CoverTag::constant);
    CHECK(plus.hypothesis.learned_region_count() == 0);
    CHECK(plus.hypothesis.evaluate(Vec{0.2, -0.1}) == +1);
    CHECK(plus.bias_p_minus == doctest::Approx(0.1));

    ScriptedStream mostly_minus = biased_labels(1);
    CoverOutcome minus = cover_learner(mostly_minus, never_called, 0.05, 0.05, cfg);
    CHECK(minus.tag == CoverTag::constant);
    CHECK(minus.hypothesis.regions.size() == 2);
    CHECK(minus.hypothesis.evaluate(Vec{0.2, -0.1}) == -1);
    CHECK(to_string(minus.tag) == std::string("constant"));
}

TEST_CASE("cover reports ret-bad when the region search comes back empty") {
    ScriptedStream balanced = biased_labels(5);
    RegionFn empty_handed = [](ExampleStream&, std::uint64_t) {
        return RegionLearnerResult{};
    };
    CoverConfig cfg;
    cfg.mass_check_samples = 2000;
    CoverOutcome out = cover_learner(balanced, empty_handed, 0.05, 0.05, cfg);
    CHECK(out.tag == CoverTag::ret_bad);
    CHECK(out.region_learner_calls == 1);
    REQUIRE(out.rounds.size() == 1);
    CHECK(out.rounds[0].q_plus == doctest::Approx(0.5));
    CHECK(out.rounds[0].q_minus == doctest::Approx(0.5));
    CHECK_FALSE(out.rounds[0].region_found);
    CHECK(out.hypothesis.evaluate(Vec{0.1, 0.1}) == +1);  // only the all-pass row so far
    CHECK(to_string(out.tag) == std::string("ret-bad"));
}

TEST_CASE("cover conjoins rechecked regions on a live instance") {
    LabeledSource src = make_sphere_margin_source(2, 1, 0.3, 77);
    WeakParams params = desk_params(2, 1, 0.3, 0.1);
    RegionFn region_fn = [&params](ExampleStream& s, std::uint64_t seed) {
        return region_learner(s, 0.05, 0.3, 0.05, 8, params, WalkConfig{}, seed);
    };
    CoverConfig cfg;
    cfg.seed = 5;
    cfg.mass_check_samples = 4000;
    // epsilon stays below balance/5, otherwise the constant shortcut fires
    CoverOutcome out = cover_learner(src, region_fn, 0.05, 0.05, cfg);
    CHECK(out.tag == CoverTag::ret_good);
    CHECK(out.hypothesis.learned_region_count() >= 1);
    CHECK(out.rounds.back().conjunction_mass > 0.0);
    for (const auto& r : out.rounds)
        if (r.region_found) CHECK(r.recheck_passed);

    LabeledSource fresh = src.fork(99);
    ErrorDecomposition err = error_decomposition(
        [&out](const Vec& x) { return out.hypothesis.evaluate(x); }, fresh, 4000);
    CHECK(err.total <= 0.2);
    CHECK(err.total == doctest::Approx(err.false_positive + err.false_negative));
}

TEST_CASE("boost falls back to a constant vote on a lopsided stream") {
    ScriptedStream lopsided = biased_labels(9);
    WeakFn never = [](ExampleStream&, std::uint64_t) -> std::optional<HalfspaceHypothesis> {
        throw std::logic_error("weak learner must not run when the constant vote applies");
    };
    WeightedBoostHypothesis model = weighted_boost(lopsided, never, 0.05, 0.02, 1);
    REQUIRE(model.rounds.size() == 1);
    const BoostRound& r = model.rounds[0];
    CHECK(r.is_constant);
    CHECK(r.constant_label == +1);
    CHECK(r.err == doctest::Approx(0.1));
    CHECK(r.edge == doctest::Approx(0.4));
    CHECK(r.coverage == doctest::Approx(1.0));
    CHECK(r.holdout_error == doctest::Approx(0.1));
    CHECK(model.evaluate(Vec{-0.4, 0.2}) == +1);
    CHECK(r.vote(Vec{-0.4, 0.2}) == +1);
}

TEST_CASE("boost raises a stall when no weak hypothesis clears the edge") {
    ScriptedStream balanced = biased_labels(5);
    WeakFn useless = [](ExampleStream&, std::uint64_t) -> std::optional<HalfspaceHypothesis> {
        return std::nullopt;
    };
    try {
        weighted_boost(balanced, useless, 0.05, 0.02, 5);
        FAIL("expected a stall");
    } catch (const BoostStallError& e) {
        CHECK(e.round == 0);
    }
    CHECK_THROWS_AS(weighted_boost(balanced, useless, 0.05, 0.02, 0), ConfigError);
}

TEST_CASE("boost drives holdout error below epsilon on an easy instance") {
    LabeledSource src = make_sphere_margin_source(2, 1, 0.3, 303);
    WeakParams params = desk_params(2, 1, 0.3, 0.1);
    WeakFn weak = [&params](ExampleStream& s, std::uint64_t seed) {
        return find_good_halfspace(s, params, WalkConfig{}, seed);
    };
    BoostConfig cfg;
    cfg.seed = 11;
    WeightedBoostHypothesis model = weighted_boost(src, weak, 0.05, 0.02, 40, cfg);
    REQUIRE_FALSE(model.rounds.empty());
    CHECK(model.rounds.back().holdout_error <= 0.05);

    const BoostRound& first = model.rounds[0];
    CHECK_FALSE(first.is_constant);
    if (first.err == 0.0)  // clamped at 1/(2·6000) when the region is clean
        CHECK(first.alpha == 0.5 * std::log(11999.0));
    CHECK(first.vote(Vec{0.0, 0.0}) != +1);  // region voters never vote +1
}

TEST_CASE("error decomposition splits mistakes by true label") {
    ScriptedStream quad({{Vec{0.5, 0.0}, +1},
                         {Vec{-0.5, 0.0}, -1},
                         {Vec{0.5, 0.0}, -1},
                         {Vec{-0.5, 0.0}, +1}});
    auto predict = [](const Vec& x) { return x[0] >= 0.0 ? +1 : -1; };
    ErrorDecomposition err = error_decomposition(predict, quad, 400);
    CHECK(err.false_positive == doctest::Approx(0.25));
    CHECK(err.false_negative == doctest::Approx(0.25));
    CHECK(err.total == doctest::Approx(0.5));
    CHECK_THROWS_AS(error_decomposition(predict, quad, 0), ConfigError);
}
