#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "polylearn/distributions.hpp"
#include "polylearn/errors.hpp"
#include "polylearn/geometry.hpp"
#include "polylearn/learner.hpp"

using namespace polylearn;

namespace {

/// Emits a fixed point/label cycle inside the unit ball.
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

ScriptedStream labels_only(const std::vector<int>& labels) {
    std::vector<LabeledExample> script;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const double a = double(i) / double(labels.size()) * 6.283185307179586;
        script.push_back({Vec{0.5 * std::cos(a), 0.5 * std::sin(a)}, labels[i]});
    }
    return ScriptedStream(std::move(script));
}

}  // namespace

TEST_CASE("sample-size formulas reproduce the frozen worked instance") {
    WeakParams p = compute_params(72, 8, 9.0 / 256.0, 1.0);
    CHECK(p.m_minus == 12);
    CHECK(p.m_minus_exact == doctest::Approx(12.0).epsilon(1e-12));
    CHECK(p.exponent == 48.0);
    const double base = 200.0 * 8 * 72.0 * 72.0 * 12.0;
    CHECK(p.m_plus_exact == base * base * std::exp2(48.0));
    CHECK(p.good_threshold == (100.0 * 72.0) * std::log2(p.m_plus_exact) / p.m_plus_exact);
    CHECK(p.good_threshold_for(1024.0) == doctest::Approx(7200.0 * 10.0 / 1024.0));

    CHECK_THROWS_AS(compute_params(0, 1, 0.2, 0.5), ConfigError);
    CHECK_THROWS_AS(compute_params(2, 0, 0.2, 0.5), ConfigError);
    CHECK_THROWS_AS(compute_params(2, 1, 9.0, 0.5), ConfigError);
    CHECK_THROWS_AS(compute_params(2, 1, 0.2, 1.5), ConfigError);
    CHECK_THROWS_AS(compute_params(2, 1, 0.2, 0.0), ConfigError);
}

TEST_CASE("overrides gate the astronomically large formula sizes") {
    WeakParams p = compute_params(3, 2, 0.2, 0.1);
    CHECK(p.m_plus_exact > 1e8);
    CHECK_THROWS_AS(p.effective_m_plus(), ConfigError);
    CHECK(p.effective_m_minus() == p.m_minus);

    p.m_minus_override = 8;
    p.m_plus_override = 2000;
    CHECK(p.effective_m_minus() == 8);
    CHECK(p.effective_m_plus() == 2000);
}

TEST_CASE("hitting set sizes match their frozen values") {
    CHECK(hitting_set_size(1, 0.5) == 64);
    CHECK(hitting_set_size(10, 0.1) == 10631);
    CHECK_THROWS_AS(hitting_set_size(0, 0.5), ConfigError);
    CHECK_THROWS_AS(hitting_set_size(1, 1.0), ConfigError);
}

TEST_CASE("hypothesis evaluation ties the raw and lifted views together") {
    HalfspaceHypothesis h;
    h.w = Vec{0.0, 0.0, 0.0, 0.0};
    h.base_dim = 2;
    h.lift_radius = 1.0;
    CHECK(h.evaluate(Vec{0.1, 0.2}) == +1);  // sign(0) is positive

    h.w = Vec{0.0, 0.0, 0.0, -1.0};
    CHECK(h.evaluate(Vec{0.9, 0.0}) == -1);  // last lifted slot is always 1/√2

    h.w = normalized(Vec{1.0, 0.0, 0.0, -0.3});
    for (double t = -0.9; t < 0.95; t += 0.1) {
        const Vec x{t, 0.2};
        CHECK(h.evaluate(x) == h.evaluate_lifted(lift_point(x, 1.0).coords));
    }
}

TEST_CASE("the weak learner returns a hypothesis consistent with its own sample") {
    LabeledSource src = make_sphere_margin_source(2, 1, 0.3, 41);
    WeakParams params = compute_params(2, 1, 0.3, 0.2);
    params.m_minus_override = 8;
    params.m_plus_override = 300;

    WalkConfig walk;
    std::optional<HalfspaceHypothesis> h;
    TrainingDump dump;
    AttemptRecord rec;
    for (std::uint64_t attempt = 0; attempt < 5 && !h; ++attempt) {
        rec = AttemptRecord{};
        dump = TrainingDump{};
        h = find_good_halfspace(src, params, walk, 100 + attempt, &rec, &dump);
    }
    REQUIRE(h.has_value());
    CHECK(h->base_dim == 2);
    CHECK(h->lift_radius == doctest::Approx(1.0));
    CHECK(h->w.size() == 4);
    CHECK(norm(h->w) <= 1.0 + 1e-12);
    CHECK(rec.returned);
    CHECK(rec.polytope_feasible);
    CHECK(rec.interior_slack > 0.0);
    CHECK(dump.lifted_negatives.size() == 8);
    CHECK(dump.lifted_positives.size() == 300);
    for (const auto& p : dump.lifted_positives) CHECK(h->evaluate_lifted(p) == +1);
    for (const auto& n : dump.lifted_negatives) CHECK(h->evaluate_lifted(n) == -1);
}

TEST_CASE("label starvation inside the weak learner propagates as an error") {
    ScriptedStream all_plus = labels_only({+1});
    WeakParams params = compute_params(2, 1, 0.3, 0.2);
    params.m_minus_override = 2;
    params.m_plus_override = 10;
    CHECK_THROWS_AS(find_good_halfspace(all_plus, params, WalkConfig{}, 1), StarvationError);
}

TEST_CASE("check_good verdicts follow region mass and purity") {
    HalfspaceHypothesis everywhere;  // region is the whole ball
    everywhere.w = Vec{0.0, 0.0, 0.0, -1.0};
    everywhere.base_dim = 2;
    everywhere.lift_radius = 1.0;

    ScriptedStream mostly_neg = labels_only({-1, -1, -1, -1, -1, -1, -1, -1, -1, +1});
    GoodnessReport good = check_good(everywhere, mostly_neg, 0.1, 0.05, 100000);
    CHECK(good.verdict);
    CHECK(good.p_neg_region == doctest::Approx(1.0));
    CHECK(good.p_correct_given_region == doctest::Approx(0.9));
    CHECK(good.samples_used == 100000 + 5000);

    ScriptedStream half_neg = labels_only({-1, +1});
    GoodnessReport impure = check_good(everywhere, half_neg, 0.1, 0.05, 100000);
    CHECK_FALSE(impure.verdict);
    CHECK(impure.p_correct_given_region == doctest::Approx(0.5));

    HalfspaceHypothesis nowhere;  // region is empty, fails on mass alone
    nowhere.w = Vec{0.0, 0.0, 0.0, 1.0};
    nowhere.base_dim = 2;
    nowhere.lift_radius = 1.0;
    GoodnessReport empty = check_good(nowhere, mostly_neg, 0.1, 0.05, 100000);
    CHECK_FALSE(empty.verdict);
    CHECK(empty.p_neg_region == 0.0);
    CHECK(empty.samples_used == 100000);

    CHECK(default_m_check(0.1, 0.02) == 250000);
    CHECK_THROWS_AS(check_good(everywhere, mostly_neg, 0.1, 0.02, 249999), ConfigError);
    CHECK_THROWS_AS(check_good(everywhere, mostly_neg, 0.1, 0.5, 100000), ConfigError);
}

TEST_CASE("region_learner accepts a passing region on an easy instance") {
    LabeledSource src = make_sphere_margin_source(2, 1, 0.3, 57);
    WeakParams params = compute_params(2, 1, 0.3, 0.2);
    params.m_minus_override = 8;
    params.m_plus_override = 300;

    RegionLearnerResult res = region_learner(src, 0.2, 0.3, 0.05, 12, params, WalkConfig{}, 9);
    REQUIRE(res.region.has_value());
    CHECK(res.report.verdict);
    CHECK(res.report.p_neg_region >= 0.05);
    CHECK(res.report.p_correct_given_region >= 1.0 - 0.2 - 0.2 / 3.0);
    CHECK(res.attempts_used == int(res.attempts.size()));
    CHECK(res.attempts.back().passed);

    CHECK_THROWS_AS(region_learner(src, 0.2, 0.3, 0.05, 0, params, WalkConfig{}, 9), ConfigError);
}

TEST_CASE("region_learner reports exhaustion when no attempt can succeed") {
    // the same point carries both labels, so no consistent halfspace exists
    ScriptedStream contradiction(
        {{Vec{0.4, 0.1}, +1}, {Vec{0.4, 0.1}, -1}});
    WeakParams params = compute_params(2, 1, 0.3, 0.2);
    params.m_minus_override = 4;
    params.m_plus_override = 4;

    RegionLearnerResult res =
        region_learner(contradiction, 0.2, 0.3, 0.05, 3, params, WalkConfig{}, 2);
    CHECK_FALSE(res.region.has_value());
    CHECK(res.attempts_used == 3);
    REQUIRE(res.attempts.size() == 3);
    for (const auto& a : res.attempts) {
        CHECK_FALSE(a.polytope_feasible);
        CHECK_FALSE(a.returned);
        CHECK_FALSE(a.checked);
    }
}
