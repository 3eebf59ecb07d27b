#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "polylearn/errors.hpp"
#include "polylearn/rng.hpp"
#include "polylearn/sampler.hpp"

using namespace polylearn;

namespace {

ConsistencyPolytope disk2() { return ConsistencyPolytope{2, {}, {}}; }

ConsistencyPolytope quarter_disk() {
    return ConsistencyPolytope{2, {Vec{1.0, 0.0}, Vec{0.0, 1.0}}, {}};
}

}  // namespace

TEST_CASE("membership and min_slack agree with hand geometry") {
    ConsistencyPolytope H = quarter_disk();
    CHECK(membership(H, Vec{0.3, 0.4}));
    CHECK(membership(H, Vec{0.0, 0.0}));
    CHECK(membership(H, Vec{1.0, 0.0}));
    CHECK_FALSE(membership(H, Vec{-0.1, 0.4}));
    CHECK_FALSE(membership(H, Vec{0.8, 0.8}));

    CHECK(min_slack(H, Vec{0.3, 0.4}) == doctest::Approx(0.3));
    CHECK(min_slack(H, Vec{0.0, 0.0}) == doctest::Approx(0.0));
    CHECK(min_slack(H, Vec{-0.1, 0.4}) == doctest::Approx(-0.1));

    ConsistencyPolytope neg{2, {}, {Vec{1.0, 0.0}}};
    CHECK(membership(neg, Vec{-0.5, 0.0}));
    CHECK_FALSE(membership(neg, Vec{0.01, 0.0}));
    CHECK(min_slack(neg, Vec{-0.5, 0.0}) == doctest::Approx(0.5));
}

TEST_CASE("chords carry the exact ball and constraint intersections") {
    ConsistencyPolytope ball = disk2();
    auto c = chord(ball, Vec{0.0, 0.0}, Vec{1.0, 0.0});
    REQUIRE(c.has_value());
    CHECK(c->t_lo == doctest::Approx(-1.0));
    CHECK(c->t_hi == doctest::Approx(1.0));

    // off-center start: quadratic roots at -0.5 ± something? solve (0.5+t)^2 = 1
    auto off = chord(ball, Vec{0.5, 0.0}, Vec{1.0, 0.0});
    REQUIRE(off.has_value());
    CHECK(off->t_lo == doctest::Approx(-1.5));
    CHECK(off->t_hi == doctest::Approx(0.5));

    // the positivity constraint crops the negative half of the chord
    ConsistencyPolytope half{2, {Vec{1.0, 0.0}}, {}};
    auto cropped = chord(half, Vec{0.5, 0.0}, Vec{1.0, 0.0});
    REQUIRE(cropped.has_value());
    CHECK(cropped->t_lo == doctest::Approx(-0.5));
    CHECK(cropped->t_hi == doctest::Approx(0.5));

    // direction orthogonal to a pinched slab leaves no room to move
    ConsistencyPolytope slab{2, {Vec{1.0, 0.0}}, {Vec{1.0, 0.0}}};
    CHECK_FALSE(chord(slab, Vec{0.0, 0.3}, Vec{1.0, 0.0}).has_value());
    auto along = chord(slab, Vec{0.0, 0.3}, Vec{0.0, 1.0});
    REQUIRE(along.has_value());
    CHECK(along->t_hi == doctest::Approx(0.7));
}

TEST_CASE("chord endpoints stay feasible and nothing lies beyond them") {
    Rng rng(91);
    for (int trial = 0; trial < 200; ++trial) {
        ConsistencyPolytope H{3, {}, {}};
        for (int i = 0; i < 3; ++i) H.pos_constraints.push_back(rng.unit_vector(3));
        Vec anchor = H.pos_constraints[0];
        for (int i = 1; i < 3; ++i)
            for (int j = 0; j < 3; ++j) anchor[j] += H.pos_constraints[i][j];
        double s = norm(anchor);
        for (double& c : anchor) c *= 0.3 / s;
        if (min_slack(H, anchor) < 0.05) continue;

        const Vec d = rng.unit_vector(3);
        auto c = chord(H, anchor, d);
        if (!c.has_value()) continue;
        CHECK(c->t_lo <= 0.0);
        CHECK(c->t_hi >= 0.0);
        auto at = [&](double t) {
            Vec p = anchor;
            for (int j = 0; j < 3; ++j) p[j] += t * d[j];
            return p;
        };
        const double eps = 1e-7;
        CHECK(membership(H, at(c->t_lo + eps)));
        CHECK(membership(H, at(c->t_hi - eps)));
        CHECK_FALSE(membership(H, at(c->t_lo - 1e-6)));
        CHECK_FALSE(membership(H, at(c->t_hi + 1e-6)));
    }
}

TEST_CASE("find_interior matches the exact inradius of simple bodies") {
    // one constraint: the deepest point is c itself, slack 1 at the scale cap
    ConsistencyPolytope half{2, {Vec{1.0, 0.0}}, {}};
    Vec deep = find_interior(half, 0.5);
    CHECK(deep[0] >= 0.5 - 1e-9);
    CHECK(norm(deep) <= 0.5 + 1e-9);
    CHECK(min_slack(half, deep) >= 0.5 - 1e-9);
    CHECK_THROWS_AS(find_interior(half, 0.55), ThinBodyError);

    // two orthogonal constraints: the unit deepest point is (1,1)/√2 with
    // slack 1/√2, so a slack-s ball needs s ≤ (1/√2)(1−s), max ≈ 0.4142
    ConsistencyPolytope quad = quarter_disk();
    Vec q = find_interior(quad, 0.40);
    CHECK(min_slack(quad, q) >= 0.40 - 1e-9);
    CHECK_THROWS_AS(find_interior(quad, 0.43), ThinBodyError);

    // infeasible slab: opposing constraints admit only the hyperplane itself
    ConsistencyPolytope pinched{2, {Vec{1.0, 0.0}}, {Vec{1.0, 0.0}}};
    CHECK_THROWS_AS(find_interior(pinched, 0.05), ThinBodyError);

    // slack_target 0 runs to convergence and lands near the deepest direction
    Vec centered = find_interior(quad, 0.0);
    CHECK(min_slack(quad, centered) > 0.3);
}

TEST_CASE("auto_steps is frozen against its closed form") {
    CHECK(auto_steps(5, 0.2) == 1554);
    CHECK(auto_steps(4, 0.1) == 1382);
    CHECK(auto_steps(5, 0.2) == long(std::ceil(50.0 * 5 * std::log(1.0 / (0.01 * 0.2)))));
}

TEST_CASE("walker rejects bad configs and walks inside the body") {
    ConsistencyPolytope H = quarter_disk();
    WalkConfig cfg;
    cfg.steps_per_sample = 0;
    cfg.warm_start = Vec{0.3, 0.3};
    cfg.rng_seed = 7;
    CHECK_THROWS_AS(HitAndRunWalker(H, cfg), ConfigError);

    cfg.steps_per_sample = 20;
    cfg.warm_start = Vec{-0.3, 0.3};
    CHECK_THROWS_AS(HitAndRunWalker(H, cfg), ConfigError);

    cfg.warm_start = Vec{0.3, 0.3};
    HitAndRunWalker walker(H, cfg);
    CHECK(walker.current() == Vec{0.3, 0.3});
    for (int i = 0; i < 200; ++i) {
        const Vec& w = walker.next();
        CHECK(membership(H, w));
    }

    HitAndRunWalker again_a(H, cfg);
    HitAndRunWalker again_b(H, cfg);
    for (int i = 0; i < 50; ++i) {
        const Vec wa = again_a.next();
        const Vec wb = again_b.next();
        CHECK(wa == wb);
    }
    cfg.rng_seed = 8;
    HitAndRunWalker other(H, cfg);
    bool identical = true;
    HitAndRunWalker reference(H, {20, Vec{0.3, 0.3}, 7});
    for (int i = 0; i < 50; ++i)
        if (reference.next() != other.next()) identical = false;
    CHECK_FALSE(identical);
}

TEST_CASE("a flattened body trips the degenerate-chord guard") {
    ConsistencyPolytope pinched{3, {Vec{0.0, 0.0, 1.0}}, {Vec{0.0, 0.0, 1.0}}};
    WalkConfig cfg{5, Vec{0.1, 0.1, 0.0}, 3};
    REQUIRE(membership(pinched, cfg.warm_start));
    HitAndRunWalker walker(pinched, cfg);
    CHECK_THROWS_AS([&] { for (int i = 0; i < 500; ++i) walker.next(); }(), ThinBodyError);
}

TEST_CASE("volume fractions and sample means match known disk geometry") {
    ConsistencyPolytope ball = disk2();
    WalkConfig cfg{40, Vec{0.0, 0.0}, 11};
    auto est = estimate_volume_fraction(
        ball, [](const Vec& w) { return w[0] > 0.0; }, 2000, cfg);
    CHECK(est.samples == 2000);
    CHECK(est.std_error == doctest::Approx(std::sqrt(est.fraction * (1 - est.fraction) / 2000.0)));
    CHECK(std::abs(est.fraction - 0.5) <= 4.0 * 0.0112);

    // quarter disk centroid: each coordinate averages 4/(3π)
    ConsistencyPolytope quad = quarter_disk();
    WalkConfig qcfg{40, Vec{0.3, 0.3}, 13};
    HitAndRunWalker walker(quad, qcfg);
    double sx = 0.0, sy = 0.0;
    const int m = 4000;
    for (int i = 0; i < m; ++i) {
        const Vec& w = walker.next();
        sx += w[0];
        sy += w[1];
    }
    const double centroid = 0.4244131815783876;
    CHECK(std::abs(sx / m - centroid) < 0.03);
    CHECK(std::abs(sy / m - centroid) < 0.03);

    Vec one = sample_uniform(ball, cfg);
    CHECK(membership(ball, one));
}
