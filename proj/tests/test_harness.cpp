#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "polylearn/config.hpp"
#include "polylearn/distributions.hpp"
#include "polylearn/errors.hpp"
#include "polylearn/harness.hpp"
#include "polylearn/io.hpp"

using namespace polylearn;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& leaf) {
    const fs::path dir = fs::temp_directory_path() / "polylearn_harness_test" / leaf;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("format_g17 and the strict parsers round-trip doubles exactly") {
    for (double v : {1.0 / 3.0, 1e-300, -0.0, 6.02214076e23, 5.4440055573386}) {
        CHECK(parse_double_strict(format_g17(v)) == v);
    }
    CHECK(parse_int_strict("-42") == -42);
    CHECK_THROWS_AS(parse_double_strict("1.5x"), ConfigError);
    CHECK_THROWS_AS(parse_double_strict(""), ConfigError);
    CHECK_THROWS_AS(parse_int_strict("12.5"), ConfigError);
    CHECK_THROWS_AS(parse_int_strict("99999999999999999999999"), ConfigError);
}

TEST_CASE("hypothesis records survive a write/read cycle bit for bit") {
    TargetIntersection target({Halfspace(Vec{1.0 / 3.0, std::sqrt(8.0) / 3.0}, 1e-300),
                               Halfspace(Vec{0.0, -1.0}, 0.25)},
                              2.0);
    HypothesisRecord rec = make_record(target);
    std::stringstream buf;
    write_record(buf, rec, {"made by the record round-trip test"});
    HypothesisRecord back = read_record(buf);
    CHECK(back.kind == HypothesisRecord::Kind::intersection);
    CHECK(back.dim == 2);
    CHECK(back.radius == 2.0);
    REQUIRE(back.rows.size() == 2);
    CHECK(back.rows[0].w == rec.rows[0].w);
    CHECK(back.rows[0].theta == 1e-300);
    CHECK(back.rows[1].theta == 0.25);

    TargetIntersection again = to_intersection(back);
    CHECK(again.k() == 2);
    CHECK(again.ambient_radius == 2.0);

    CoverHypothesis cover;
    cover.base_dim = 2;
    cover.lift_radius = 1.5;
    cover.regions = {CoverHypothesis::all_sentinel(4),
                     normalized(Vec{0.3, -0.2, 0.0, 0.1}),
                     CoverHypothesis::none_sentinel(4)};
    HypothesisRecord crec = make_record(cover);
    std::stringstream cbuf;
    write_record(cbuf, crec);
    CoverHypothesis cback = to_cover(read_record(cbuf));
    CHECK(cback.base_dim == 2);
    CHECK(cback.lift_radius == 1.5);
    CHECK(cback.learned_region_count() == 1);
    CHECK(cback.regions == cover.regions);

    std::stringstream broken("polylearn-record v2\nkind cover\n");
    CHECK_THROWS_AS(read_record(broken), ConfigError);
    std::stringstream truncated("polylearn-record v1\nkind cover\ndim 4\nrows 2\nradius 1\n");
    CHECK_THROWS_AS(read_record(truncated), ConfigError);
}

TEST_CASE("dataset and prediction CSV headers and payloads round-trip") {
    std::vector<LabeledExample> rows = {{Vec{0.25, -1e-17}, +1}, {Vec{-0.5, 0.125}, -1}};
    std::stringstream buf;
    write_dataset_csv(buf, rows, 2, {"preamble line"});
    CHECK(buf.str().find("# preamble line") != std::string::npos);
    CHECK(buf.str().find("x0,x1,label") != std::string::npos);

    int dim = 0;
    std::vector<LabeledExample> back = read_dataset_csv(buf, &dim);
    CHECK(dim == 2);
    REQUIRE(back.size() == 2);
    CHECK(back[0].x == rows[0].x);
    CHECK(back[1].label == -1);

    std::stringstream pred;
    write_predictions_csv(pred, rows, {+1, +1}, 2);
    CHECK(pred.str().find("x0,x1,label,prediction") != std::string::npos);
    CHECK(pred.str().find(",-1,1") != std::string::npos);  // mislabeled second row

    std::stringstream bad("x0,label\nnot_a_number,1\n");
    CHECK_THROWS_AS(read_dataset_csv(bad), ConfigError);
}

TEST_CASE("config text renders and parses back to the same state") {
    RunConfig cfg;
    cfg.kind = ExperimentKind::learn_cover;
    cfg.source = SourceKind::pancake;
    cfg.n = 5;
    cfg.rho = 0.15;
    cfg.one_sided = true;
    cfg.m_check = 1234;
    cfg.source_seed = 99;
    cfg.repetitions = 3;
    cfg.out_dir = "elsewhere";
    cfg.model_in = "m.record";

    RunConfig back = parse_config_text(render_config(cfg));
    CHECK(render_config(back) == render_config(cfg));
    CHECK(back.kind == ExperimentKind::learn_cover);
    CHECK(back.one_sided);
    CHECK(back.m_check == 1234);

    RunConfig base;
    base.n = 4;
    RunConfig overlaid = parse_config_text("[learner]\nepsilon = 0.25\n", base);
    CHECK(overlaid.n == 4);
    CHECK(overlaid.epsilon == 0.25);

    try {
        parse_config_text("[source]\nbogus = 3\n");
        FAIL("unknown keys must not parse");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("source.bogus") != std::string::npos);
    }
    try {
        parse_config_text("\n\nn = 3\n");
        FAIL("keys need a section");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }

    RunConfig invalid;
    invalid.rho = 2.0;
    CHECK_THROWS_AS(validate(invalid), ConfigError);
    invalid = RunConfig{};
    invalid.gamma = 0.5;
    CHECK_THROWS_AS(validate(invalid), ConfigError);

    CHECK(experiment_kind_from_string("paper-check") == ExperimentKind::paper_check);
    CHECK_THROWS_AS(experiment_kind_from_string("nope"), ConfigError);
    CHECK(std::string(to_string(ExperimentKind::sample_diag)) == "sample-diag");

    setenv("POLYLEARN_OUT", "/tmp/env_root", 1);
    RunConfig env_cfg;
    apply_env_overrides(env_cfg);
    CHECK(env_cfg.out_dir == "/tmp/env_root");
    unsetenv("POLYLEARN_OUT");
}

TEST_CASE("metrics serialization embeds the config and can zero the clock") {
    RunConfig cfg;
    cfg.kind = ExperimentKind::gen;
    MetricsRecord m;
    m.total_error = 0.125;
    m.wall_time_seconds = 1.5;
    m.termination = "ok";

    const std::string timed = metrics_to_json(m, cfg, true);
    const std::string stable = metrics_to_json(m, cfg, false);
    auto jt = nlohmann::json::parse(timed);
    auto js = nlohmann::json::parse(stable);
    CHECK(jt["metrics"]["wall_time_seconds"] == 1.5);
    CHECK(js["metrics"]["wall_time_seconds"] == 0.0);
    CHECK(js["metrics"]["total_error"] == 0.125);
    CHECK(js["config"]["run.kind"] == "gen");
    CHECK(js["metrics"]["termination"] == "ok");
}

TEST_CASE("unit ball volumes match the closed forms") {
    CHECK(unit_ball_volume(0) == doctest::Approx(1.0));
    CHECK(unit_ball_volume(1) == doctest::Approx(2.0));
    CHECK(unit_ball_volume(2) == doctest::Approx(3.141592653589793));
    CHECK(unit_ball_volume(3) == doctest::Approx(4.188790204786391));
    CHECK(unit_ball_volume(4) == doctest::Approx(4.934802200544679));
    CHECK_THROWS_AS(unit_ball_volume(-1), std::invalid_argument);
}

TEST_CASE("the volume oracle validates premises before it judges") {
    const Vec planted{1.0, 0.0, 0.0};
    std::vector<Vec> good_pos = {Vec{0.5, 0.5, std::sqrt(0.5)}};
    std::vector<Vec> good_neg = {Vec{-0.5, 0.5, std::sqrt(0.5)}};
    VolumeCheckReport skipped =
        oracle_volume_check_on(planted, 0.3, {Vec{0.1, 0.9, 0.0}}, good_neg, 1, 1000);
    CHECK_FALSE(skipped.applicable);
    CHECK(skipped.passed());
    CHECK_FALSE(skipped.note.empty());

    VolumeCheckReport run = oracle_volume_check(3, 0.3, 4321, 50000);
    CHECK(run.applicable);
    CHECK(run.volume_ok);
    CHECK(run.interior_ok);
    CHECK(run.passed());
    CHECK(run.fraction_estimate >= run.fraction_bound - 3.0 * run.fraction_std_error);
    CHECK(run.slack_bound == doctest::Approx(0.3 / (12.0 * 1.3)));
}

TEST_CASE("within_frontier flags only genuine dominance") {
    std::vector<FrontierPoint> frontier;
    CHECK_FALSE(within_frontier(frontier, 0.3, 0.5, 0.05));

    frontier = {{0.0, 0.2, 0.99, {}}, {1.0, 0.5, 0.9, {}}, {2.0, 0.8, 0.6, {}}};
    CHECK(within_frontier(frontier, 0.45, 0.85, 0.0));
    CHECK_FALSE(within_frontier(frontier, 0.45, 0.95, 0.0));
    CHECK(within_frontier(frontier, 0.45, 0.95, 0.06));
    CHECK_FALSE(within_frontier(frontier, 0.9, 0.5, 0.0));
    CHECK(within_frontier(frontier, 0.3, 0.5, 0.03));
}

TEST_CASE("the 2-d sweep produces a clean frontier containing the planted region") {
    LabeledSource src = make_sphere_margin_source(2, 1, 0.3, 99);
    std::vector<FrontierPoint> frontier = oracle_2d_weak(src, 180, 8000);
    REQUIRE(frontier.size() >= 3);
    for (std::size_t i = 1; i < frontier.size(); ++i) {
        CHECK(frontier[i].p_region > frontier[i - 1].p_region);
        CHECK(frontier[i].p_correct <= frontier[i - 1].p_correct);
        CHECK(norm(frontier[i].w) == doctest::Approx(1.0).epsilon(1e-9));
    }
    // the planted halfspace itself: about half the mass, almost pure
    CHECK(within_frontier(frontier, 0.45, 0.99, 0.04));
    // no region that large can stay pure on a balanced source
    CHECK_FALSE(within_frontier(frontier, 0.95, 0.99, 0.02));
}

TEST_CASE("criterion lines carry verdict, index, name and numbers") {
    CriterionResult r;
    r.index = 4;
    r.name = "walker-uniformity";
    r.measured = 9.05;
    r.bound = 18.4753;
    r.passed = true;
    r.detail = "chi2 over 8 sectors";
    const std::string line = format_criterion_line(r);
    CHECK(line.find("PASS 4 walker-uniformity") == 0);
    CHECK(line.find("measured=9.05") != std::string::npos);
    CHECK(line.find("bound=18.4753") != std::string::npos);
    CHECK(line.find("chi2 over 8 sectors") != std::string::npos);
    r.passed = false;
    CHECK(format_criterion_line(r).find("FAIL") == 0);
}

TEST_CASE("gen runs write a self-describing reproducible artifact set") {
    const fs::path dir = fresh_dir("gen");
    RunConfig cfg;
    cfg.kind = ExperimentKind::gen;
    cfg.n = 3;
    cfg.k = 2;
    cfg.rho = 0.2;
    cfg.balance = 0.4;
    cfg.balance_tolerance = 0.1;
    cfg.source_seed = 12;
    cfg.count = 200;
    cfg.out_dir = dir.string();

    ExperimentResult first = run_experiment(cfg);
    REQUIRE_FALSE(first.artifacts.empty());
    for (const auto& path : first.artifacts) CHECK(fs::exists(path));

    int dim = 0;
    std::vector<LabeledExample> rows = load_dataset_csv((dir / "dataset.csv").string(), &dim);
    CHECK(dim == 3);
    CHECK(rows.size() == 200);
    TargetIntersection target = to_intersection(load_record((dir / "target.record").string()));
    for (const auto& e : rows) CHECK(evaluate_target(target, e.x) == e.label);

    const std::string metrics_once = read_text_file((dir / "metrics.json").string());
    ExperimentResult second = run_experiment(cfg);
    CHECK(second.metrics.samples_consumed == first.metrics.samples_consumed);
    CHECK(read_text_file((dir / "metrics.json").string()) == metrics_once);
    auto j = nlohmann::json::parse(metrics_once);
    CHECK(j["metrics"]["wall_time_seconds"] == 0.0);
    CHECK(j["metrics"]["eta_hat"] >= 0.0);
}

TEST_CASE("eval runs refuse dimension mismatches and score clean inputs") {
    const fs::path dir = fresh_dir("eval");
    RunConfig gen;
    gen.kind = ExperimentKind::gen;
    gen.n = 3;
    gen.k = 1;
    gen.rho = 0.25;
    gen.source_seed = 5;
    gen.count = 150;
    gen.out_dir = (dir / "data").string();
    run_experiment(gen);

    RunConfig eval_cfg;
    eval_cfg.kind = ExperimentKind::eval;
    eval_cfg.out_dir = (dir / "scored").string();
    eval_cfg.model_in = (dir / "data" / "target.record").string();
    eval_cfg.data_in = (dir / "data" / "dataset.csv").string();
    ExperimentResult scored = run_experiment(eval_cfg);
    CHECK(scored.metrics.total_error == 0.0);  // the generating target scores its own data
    CHECK(fs::exists(dir / "scored" / "predictions.csv"));

    TargetIntersection narrow({Halfspace(Vec{1.0, 0.0}, 0.0)}, 1.0);
    save_record((dir / "narrow.record").string(), make_record(narrow));
    eval_cfg.model_in = (dir / "narrow.record").string();
    CHECK_THROWS_AS(run_experiment(eval_cfg), ConfigError);
}
