#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "polylearn/errors.hpp"
#include "polylearn/harness.hpp"
#include "polylearn/io.hpp"

namespace {

using namespace polylearn;

void add_source_options(CLI::App* cmd, RunConfig& cfg, std::string& source_str) {
    cmd->add_option("--source", source_str, "sphere-margin | cube | pancake");
    cmd->add_option("--n", cfg.n, "ambient dimension");
    cmd->add_option("--k", cfg.k, "number of halfspaces in the target");
    cmd->add_option("--rho", cfg.rho, "margin parameter in (0,1)");
    cmd->add_option("--balance", cfg.balance, "target positive-label mass (sphere)");
    cmd->add_option("--balance-tolerance", cfg.balance_tolerance,
                    "acceptable |bias - balance| (sphere)");
    cmd->add_flag("--one-sided", cfg.one_sided, "reject only negative-side band points (sphere)");
    cmd->add_option("--weight-bound", cfg.weight_bound, "integer weight range (cube)");
    cmd->add_option("--gap", cfg.gap, "slab separation (pancake)");
    cmd->add_option("--sigma", cfg.sigma, "slab thickness (pancake)");
    cmd->add_option("--source-seed", cfg.source_seed, "generator seed");
}

void add_learner_options(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--epsilon", cfg.epsilon, "target error");
    cmd->add_option("--gamma", cfg.gamma, "region mass threshold");
    cmd->add_option("--m-minus-override", cfg.m_minus_override, "negative sample size override");
    cmd->add_option("--m-plus-override", cfg.m_plus_override, "positive sample size override");
    cmd->add_option("--m-check", cfg.m_check, "override for goodness-check draws (0 = auto)");
    cmd->add_option("--attempt-budget", cfg.attempt_budget, "weak-learner attempts per region");
    cmd->add_option("--learner-seed", cfg.learner_seed, "learner seed");
    cmd->add_option("--steps-per-sample", cfg.steps_per_sample, "walk steps per sample (0 = auto)");
}

void add_out_option(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--out", cfg.out_dir, "output directory");
    cmd->add_option("-c,--config", [](const CLI::results_t&) { return true; },
                    "config file; command-line flags override its values")
        ->expected(1);
}

int dispatch(const RunConfig& cfg) {
    if (cfg.kind == ExperimentKind::paper_check) {
        const auto results = paper_check(cfg.out_dir);
        int failed = 0;
        for (const auto& r : results) {
            std::printf("%s\n", format_criterion_line(r).c_str());
            if (!r.passed) ++failed;
        }
        std::printf("%s\n", failed == 0 ? "OVERALL PASS" : "OVERALL FAIL");
        return failed == 0 ? exit_ok : exit_acceptance;
    }

    const ExperimentResult res = run_experiment(cfg);
    const MetricsRecord& m = res.metrics;
    std::printf(
        "kind=%s termination=%s total_error=%s false_positive=%s false_negative=%s "
        "eta_hat=%s regions=%d attempts=%d samples=%lld wall=%.3fs\n",
        to_string(cfg.kind), m.termination.c_str(), format_g17(m.total_error).c_str(),
        format_g17(m.false_positive).c_str(), format_g17(m.false_negative).c_str(),
        format_g17(m.eta_hat).c_str(), m.region_count, m.attempts, m.samples_consumed,
        m.wall_time_seconds);
    for (const auto& path : res.artifacts) std::printf("wrote %s\n", path.c_str());
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sub-exponential learner for intersections of margin halfspaces"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string source_str;

    // The config file forms the base layer, so it must be loaded before CLI11
    // assigns flag values; find it by hand.
    std::string config_path;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if ((a == "-c" || a == "--config") && i + 1 < argc)
            config_path = argv[i + 1];
        else if (a.rfind("--config=", 0) == 0)
            config_path = a.substr(9);
    }
    try {
        if (!config_path.empty()) cfg = load_config_file(config_path);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return exit_config;
    }

    CLI::App* gen = app.add_subcommand("gen", "draw a labeled dataset and its target record");
    gen->add_option("--count", cfg.count, "examples to draw");
    add_source_options(gen, cfg, source_str);
    add_out_option(gen, cfg);
    gen->callback([&] { cfg.kind = ExperimentKind::gen; });

    CLI::App* boost = app.add_subcommand("learn-boost", "reweighting boosting over weak regions");
    add_source_options(boost, cfg, source_str);
    add_learner_options(boost, cfg);
    boost->add_option("--rounds-budget", cfg.rounds_budget, "maximum boosting rounds");
    boost->add_option("--m-train", cfg.m_train, "training set size");
    boost->add_option("--m-holdout", cfg.m_holdout, "internal holdout size");
    boost->add_option("--per-round-attempts", cfg.per_round_attempts,
                      "weak-learner attempts per round");
    boost->add_option("--holdout", cfg.holdout, "final holdout size");
    add_out_option(boost, cfg);
    boost->callback([&] { cfg.kind = ExperimentKind::learn_boost; });

    CLI::App* cover = app.add_subcommand("learn-cover", "cover the negative region step by step");
    add_source_options(cover, cfg, source_str);
    add_learner_options(cover, cfg);
    cover->add_option("--repetitions", cfg.repetitions, "independent runs, best kept");
    cover->add_option("--holdout", cfg.holdout, "final holdout size");
    add_out_option(cover, cfg);
    cover->callback([&] { cfg.kind = ExperimentKind::learn_cover; });

    CLI::App* diag = app.add_subcommand("sample-diag", "emit raw consistency-body samples as CSV");
    add_source_options(diag, cfg, source_str);
    add_learner_options(diag, cfg);
    diag->add_option("--diag-samples", cfg.diag_samples, "samples to emit");
    add_out_option(diag, cfg);
    diag->callback([&] { cfg.kind = ExperimentKind::sample_diag; });

    CLI::App* check = app.add_subcommand("paper-check", "run the full acceptance suite");
    add_out_option(check, cfg);
    check->callback([&] { cfg.kind = ExperimentKind::paper_check; });

    CLI::App* eval = app.add_subcommand("eval", "score a stored model on a stored dataset");
    eval->add_option("--model-in", cfg.model_in, "model record path")->required();
    eval->add_option("--data-in", cfg.data_in, "dataset CSV path")->required();
    add_out_option(eval, cfg);
    eval->callback([&] { cfg.kind = ExperimentKind::eval; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (!source_str.empty()) cfg.source = source_kind_from_string(source_str);
        apply_env_overrides(cfg);
        return dispatch(cfg);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return exit_config;
    } catch (const StarvationError& e) {
        std::fprintf(stderr, "starvation: %s\n", e.what());
        return exit_starvation;
    } catch (const ThinBodyError& e) {
        std::fprintf(stderr, "thin body: %s\n", e.what());
        return exit_thin_body;
    } catch (const BoostStallError& e) {
        std::fprintf(stderr, "boost stall at round %d: %s\n", e.round, e.what());
        return exit_boost_stall;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "invalid argument: %s\n", e.what());
        return exit_config;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_config;
    }
}
