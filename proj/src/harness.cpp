#include "polylearn/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "polylearn/errors.hpp"
#include "polylearn/io.hpp"

namespace polylearn {

namespace {

using njson = nlohmann::ordered_json;

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return detail::mix64(seed ^ (0x632be59bd9b4e019ULL + stream * 0x9e3779b97f4a7c15ULL));
}

std::string join_path(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

njson config_json(const RunConfig& cfg) {
    njson j = njson::object();
    for (const auto& line : config_comment_lines(cfg)) {
        const auto eq = line.find(" = ");
        j[line.substr(0, eq)] = line.substr(eq + 3);
    }
    return j;
}

njson metrics_json_object(const MetricsRecord& m, const RunConfig& cfg, bool include_wall_time) {
    njson j;
    j["config"] = config_json(cfg);
    njson& mj = j["metrics"];
    mj["total_error"] = m.total_error;
    mj["false_positive"] = m.false_positive;
    mj["false_negative"] = m.false_negative;
    mj["eta_hat"] = m.eta_hat;
    mj["region_count"] = m.region_count;
    mj["attempts"] = m.attempts;
    mj["wall_time_seconds"] = include_wall_time ? m.wall_time_seconds : 0.0;
    mj["samples_consumed"] = m.samples_consumed;
    mj["termination"] = m.termination;
    return j;
}

njson attempt_json(const AttemptRecord& rec) {
    njson j;
    j["attempt"] = rec.attempt;
    j["polytope_feasible"] = rec.polytope_feasible;
    j["interior_slack"] = rec.interior_slack;
    j["returned"] = rec.returned;
    j["checked"] = rec.checked;
    j["passed"] = rec.passed;
    j["p_neg_region"] = rec.p_neg_region;
    j["p_correct"] = rec.p_correct;
    return j;
}

std::string jsonl(const std::vector<njson>& lines) {
    std::string out;
    for (const auto& j : lines) {
        out += j.dump();
        out += '\n';
    }
    return out;
}

WeakParams params_from_config(const RunConfig& cfg) {
    WeakParams p = compute_params(cfg.n, cfg.k, cfg.rho, cfg.epsilon);
    if (cfg.m_minus_override > 0) p.m_minus_override = cfg.m_minus_override;
    if (cfg.m_plus_override > 0) p.m_plus_override = cfg.m_plus_override;
    return p;
}

/// Lifted consistency body from one training draw.
ConsistencyPolytope draw_body(ExampleStream& src, long long m_minus, long long m_plus) {
    ConsistencyPolytope body;
    body.dim = src.dim() + 2;
    const double radius = src.radius();
    FilteredStream negatives = conditioned_stream(src, -1);
    for (long long i = 0; i < m_minus; ++i)
        body.neg_constraints.push_back(lift_point(negatives.next().x, radius).coords);
    FilteredStream positives = conditioned_stream(src, +1);
    for (long long i = 0; i < m_plus; ++i)
        body.pos_constraints.push_back(lift_point(positives.next().x, radius).coords);
    return body;
}

Vec interior_ladder(const ConsistencyPolytope& body) {
    for (double target : {0.25, 0.1, 0.03, 0.01, 0.003, 0.001, 1e-4, 1e-5}) {
        try {
            return find_interior(body, target);
        } catch (const ThinBodyError&) {
            continue;
        }
    }
    throw ThinBodyError("no interior point found down to slack 1e-5");
}

struct HoldoutEval {
    std::vector<LabeledExample> rows;
    std::vector<int> predictions;
    ErrorDecomposition errors;
    double eta_hat = 0.0;
};

HoldoutEval evaluate_holdout(ExampleStream& src, const std::function<int(const Vec&)>& predict,
                             long long m, double rho) {
    HoldoutEval ev;
    ev.rows.reserve(static_cast<std::size_t>(m));
    std::vector<Vec> xs;
    xs.reserve(static_cast<std::size_t>(m));
    long long fp = 0, fn = 0;
    for (long long i = 0; i < m; ++i) {
        LabeledExample e = src.next();
        const int p = predict(e.x);
        if (e.label == -1 && p == +1) ++fp;
        if (e.label == +1 && p == -1) ++fn;
        ev.predictions.push_back(p);
        xs.push_back(e.x);
        ev.rows.push_back(std::move(e));
    }
    ev.errors.false_positive = double(fp) / double(m);
    ev.errors.false_negative = double(fn) / double(m);
    ev.errors.total = ev.errors.false_positive + ev.errors.false_negative;
    ev.eta_hat = soft_margin_estimate(src.target(), xs, rho);
    return ev;
}

ExperimentResult run_gen(const RunConfig& cfg) {
    LabeledSource src = make_source(cfg);
    std::vector<LabeledExample> rows;
    rows.reserve(static_cast<std::size_t>(cfg.count));
    std::vector<Vec> xs;
    for (long long i = 0; i < cfg.count; ++i) {
        rows.push_back(src.next());
        xs.push_back(rows.back().x);
    }

    ExperimentResult result;
    result.metrics.eta_hat = soft_margin_estimate(src.target(), xs, cfg.rho);
    result.metrics.samples_consumed = static_cast<long long>(src.emitted());

    const auto comments = config_comment_lines(cfg);
    const std::string data_path = join_path(cfg.out_dir, "dataset.csv");
    save_dataset_csv(data_path, rows, cfg.n, comments);
    result.artifacts.push_back(data_path);
    const std::string target_path = join_path(cfg.out_dir, "target.record");
    save_record(target_path, make_record(src.target()), comments);
    result.artifacts.push_back(target_path);
    return result;
}

ExperimentResult run_sample_diag(const RunConfig& cfg) {
    LabeledSource src = make_source(cfg);
    WeakParams params = params_from_config(cfg);
    ConsistencyPolytope body =
        draw_body(src, params.effective_m_minus(), params.effective_m_plus());

    WalkConfig walk;
    walk.steps_per_sample =
        cfg.steps_per_sample > 0 ? cfg.steps_per_sample : auto_steps(body.dim, cfg.rho);
    walk.warm_start = interior_ladder(body);
    walk.rng_seed = cfg.learner_seed;

    std::ostringstream csv;
    for (const auto& line : config_comment_lines(cfg)) csv << "# " << line << "\n";
    csv << "index";
    for (int j = 0; j < body.dim; ++j) csv << ",c" << j;
    csv << ",min_slack\n";

    HitAndRunWalker walker(body, walk);
    for (long long i = 0; i < cfg.diag_samples; ++i) {
        const Vec& w = walker.next();
        csv << i;
        for (double c : w) csv << ',' << format_g17(c);
        csv << ',' << format_g17(min_slack(body, w)) << "\n";
    }

    ExperimentResult result;
    const std::string path = join_path(cfg.out_dir, "samples.csv");
    write_text_file(path, csv.str());
    result.artifacts.push_back(path);
    result.metrics.samples_consumed = static_cast<long long>(src.emitted());
    return result;
}

ExperimentResult run_learn_cover(const RunConfig& cfg) {
    LabeledSource src = make_source(cfg);
    WeakParams params = params_from_config(cfg);
    WalkConfig walk;
    walk.steps_per_sample = cfg.steps_per_sample;

    int attempts_total = 0;
    std::vector<njson> attempt_lines;
    RegionFn region_fn = [&](ExampleStream& s, std::uint64_t seed) {
        RegionLearnerResult r = region_learner(s, cfg.epsilon, cfg.rho, cfg.gamma,
                                               cfg.attempt_budget, params, walk, seed);
        attempts_total += r.attempts_used;
        for (const auto& rec : r.attempts) attempt_lines.push_back(attempt_json(rec));
        return r;
    };

    std::optional<CoverOutcome> best;
    std::optional<HoldoutEval> best_eval;
    for (int rep = 0; rep < cfg.repetitions; ++rep) {
        CoverConfig cc;
        cc.seed = derive_seed(cfg.learner_seed, static_cast<std::uint64_t>(rep));
        cc.mass_check_samples = 0;
        CoverOutcome outcome = cover_learner(src, region_fn, cfg.epsilon, cfg.gamma, cc);
        const CoverHypothesis hyp = outcome.hypothesis;
        HoldoutEval ev = evaluate_holdout(
            src, [&hyp](const Vec& x) { return hyp.evaluate(x); }, cfg.holdout, cfg.rho);
        const bool better =
            !best ||
            (outcome.tag == CoverTag::ret_good && best->tag != CoverTag::ret_good) ||
            (outcome.tag == best->tag && ev.errors.total < best_eval->errors.total);
        if (better) {
            best = std::move(outcome);
            best_eval = std::move(ev);
        }
    }

    ExperimentResult result;
    result.metrics.total_error = best_eval->errors.total;
    result.metrics.false_positive = best_eval->errors.false_positive;
    result.metrics.false_negative = best_eval->errors.false_negative;
    result.metrics.eta_hat = best_eval->eta_hat;
    result.metrics.region_count = best->hypothesis.learned_region_count();
    result.metrics.attempts = attempts_total;
    result.metrics.termination = to_string(best->tag);
    result.metrics.samples_consumed = static_cast<long long>(src.emitted());

    const auto comments = config_comment_lines(cfg);
    const std::string model_path = join_path(cfg.out_dir, "model.record");
    save_record(model_path, make_record(best->hypothesis), comments);
    result.artifacts.push_back(model_path);

    std::ostringstream pred;
    write_predictions_csv(pred, best_eval->rows, best_eval->predictions, cfg.n, comments);
    const std::string pred_path = join_path(cfg.out_dir, "predictions.csv");
    write_text_file(pred_path, pred.str());
    result.artifacts.push_back(pred_path);

    std::vector<njson> round_lines;
    for (const auto& r : best->rounds) {
        njson j;
        j["round"] = r.round;
        j["q_plus"] = r.q_plus;
        j["q_minus"] = r.q_minus;
        j["conjunction_mass"] = r.conjunction_mass;
        j["region_found"] = r.region_found;
        j["recheck_passed"] = r.recheck_passed;
        j["p_region"] = r.p_region;
        j["p_correct"] = r.p_correct;
        round_lines.push_back(j);
    }
    const std::string rounds_path = join_path(cfg.out_dir, "rounds.jsonl");
    write_text_file(rounds_path, jsonl(round_lines));
    result.artifacts.push_back(rounds_path);

    const std::string attempts_path = join_path(cfg.out_dir, "attempts.jsonl");
    write_text_file(attempts_path, jsonl(attempt_lines));
    result.artifacts.push_back(attempts_path);
    return result;
}

ExperimentResult run_learn_boost(const RunConfig& cfg) {
    LabeledSource src = make_source(cfg);
    WeakParams params = params_from_config(cfg);
    WalkConfig walk;
    walk.steps_per_sample = cfg.steps_per_sample;

    std::vector<njson> attempt_lines;
    WeakFn weak_fn = [&](ExampleStream& s, std::uint64_t seed) {
        AttemptRecord rec;
        rec.attempt = static_cast<int>(attempt_lines.size());
        auto h = find_good_halfspace(s, params, walk, seed, &rec);
        attempt_lines.push_back(attempt_json(rec));
        return h;
    };

    BoostConfig bc;
    bc.m_train = cfg.m_train;
    bc.m_holdout = cfg.m_holdout;
    bc.per_round_attempts = cfg.per_round_attempts;
    bc.seed = cfg.learner_seed;
    WeightedBoostHypothesis model =
        weighted_boost(src, weak_fn, cfg.epsilon, cfg.gamma, cfg.rounds_budget, bc);

    HoldoutEval ev = evaluate_holdout(
        src, [&model](const Vec& x) { return model.evaluate(x); }, cfg.holdout, cfg.rho);

    ExperimentResult result;
    result.metrics.total_error = ev.errors.total;
    result.metrics.false_positive = ev.errors.false_positive;
    result.metrics.false_negative = ev.errors.false_negative;
    result.metrics.eta_hat = ev.eta_hat;
    int regions = 0;
    for (const auto& r : model.rounds)
        if (!r.is_constant) ++regions;
    result.metrics.region_count = regions;
    result.metrics.attempts = static_cast<int>(attempt_lines.size());
    const bool reached_target =
        !model.rounds.empty() && model.rounds.back().holdout_error <= cfg.epsilon;
    result.metrics.termination = reached_target ? "ok" : "budget-exhausted";
    result.metrics.samples_consumed = static_cast<long long>(src.emitted());

    const auto comments = config_comment_lines(cfg);
    std::ostringstream pred;
    write_predictions_csv(pred, ev.rows, ev.predictions, cfg.n, comments);
    const std::string pred_path = join_path(cfg.out_dir, "predictions.csv");
    write_text_file(pred_path, pred.str());
    result.artifacts.push_back(pred_path);

    std::vector<njson> round_lines;
    for (std::size_t i = 0; i < model.rounds.size(); ++i) {
        const auto& r = model.rounds[i];
        njson j;
        j["round"] = i;
        j["is_constant"] = r.is_constant;
        j["constant_label"] = r.constant_label;
        j["err"] = r.err;
        j["edge"] = r.edge;
        j["alpha"] = r.alpha;
        j["coverage"] = r.coverage;
        j["holdout_error"] = r.holdout_error;
        round_lines.push_back(j);
    }
    const std::string rounds_path = join_path(cfg.out_dir, "rounds.jsonl");
    write_text_file(rounds_path, jsonl(round_lines));
    result.artifacts.push_back(rounds_path);

    const std::string attempts_path = join_path(cfg.out_dir, "attempts.jsonl");
    write_text_file(attempts_path, jsonl(attempt_lines));
    result.artifacts.push_back(attempts_path);
    return result;
}

ExperimentResult run_eval(const RunConfig& cfg) {
    const HypothesisRecord rec = load_record(cfg.model_in);
    int dim = 0;
    std::vector<LabeledExample> rows = load_dataset_csv(cfg.data_in, &dim);

    std::function<int(const Vec&)> predict;
    if (rec.kind == HypothesisRecord::Kind::intersection) {
        auto target = std::make_shared<TargetIntersection>(to_intersection(rec));
        if (target->dim() != dim) throw ConfigError("model and dataset dimensions disagree");
        predict = [target](const Vec& x) { return evaluate_target(*target, x); };
    } else {
        auto cover = std::make_shared<CoverHypothesis>(to_cover(rec));
        if (cover->base_dim != dim) throw ConfigError("model and dataset dimensions disagree");
        predict = [cover](const Vec& x) { return cover->evaluate(x); };
    }

    std::vector<int> predictions;
    long long fp = 0, fn = 0;
    for (const auto& e : rows) {
        const int p = predict(e.x);
        predictions.push_back(p);
        if (e.label == -1 && p == +1) ++fp;
        if (e.label == +1 && p == -1) ++fn;
    }

    ExperimentResult result;
    result.metrics.false_positive = rows.empty() ? 0.0 : double(fp) / double(rows.size());
    result.metrics.false_negative = rows.empty() ? 0.0 : double(fn) / double(rows.size());
    result.metrics.total_error = result.metrics.false_positive + result.metrics.false_negative;
    result.metrics.samples_consumed = static_cast<long long>(rows.size());

    const auto comments = config_comment_lines(cfg);
    std::ostringstream pred;
    write_predictions_csv(pred, rows, predictions, dim, comments);
    const std::string pred_path = join_path(cfg.out_dir, "predictions.csv");
    write_text_file(pred_path, pred.str());
    result.artifacts.push_back(pred_path);
    return result;
}

}  // namespace

std::string metrics_to_json(const MetricsRecord& metrics, const RunConfig& cfg,
                            bool include_wall_time) {
    return metrics_json_object(metrics, cfg, include_wall_time).dump(2) + "\n";
}

ExperimentResult run_experiment(const RunConfig& cfg) {
    validate(cfg);
    const auto start = std::chrono::steady_clock::now();

    ExperimentResult result;
    switch (cfg.kind) {
        case ExperimentKind::gen: result = run_gen(cfg); break;
        case ExperimentKind::sample_diag: result = run_sample_diag(cfg); break;
        case ExperimentKind::learn_cover: result = run_learn_cover(cfg); break;
        case ExperimentKind::learn_boost: result = run_learn_boost(cfg); break;
        case ExperimentKind::eval: result = run_eval(cfg); break;
        case ExperimentKind::paper_check: {
            const auto criteria = paper_check(cfg.out_dir);
            int failed = 0;
            for (const auto& c : criteria)
                if (!c.passed) ++failed;
            result.metrics.attempts = static_cast<int>(criteria.size());
            result.metrics.total_error = failed;
            result.metrics.termination = failed == 0 ? "ok" : "acceptance-failure";
            result.artifacts.push_back(join_path(cfg.out_dir, "paper_check_summary.txt"));
            result.artifacts.push_back(join_path(cfg.out_dir, "paper_check_metrics.json"));
            break;
        }
    }

    result.metrics.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    if (cfg.kind != ExperimentKind::paper_check) {
        // Timing is reported in memory only; the persisted artifact is kept
        // byte-reproducible across identical runs.
        const std::string metrics_path = join_path(cfg.out_dir, "metrics.json");
        write_text_file(metrics_path, metrics_to_json(result.metrics, cfg, false));
        result.artifacts.push_back(metrics_path);
    }
    return result;
}

double unit_ball_volume(int d) {
    if (d < 0) throw std::invalid_argument("ball volume needs d >= 0");
    return std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
}

VolumeCheckReport oracle_volume_check_on(const Vec& planted_w, double rho,
                                         const std::vector<Vec>& positives,
                                         const std::vector<Vec>& negatives, std::uint64_t mc_seed,
                                         long long mc_samples) {
    if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("volume check: rho in (0,1)");
    const int n = static_cast<int>(planted_w.size());
    VolumeCheckReport report;
    report.slack_bound = rho / (12.0 * (1.0 + rho));

    for (const auto& x : positives)
        if (dot(planted_w, x) < rho) {
            report.applicable = false;
            report.note = "positive point below the planted margin; premise unmet, check skipped";
            return report;
        }
    for (const auto& x : negatives)
        if (dot(planted_w, x) > -rho) {
            report.applicable = false;
            report.note = "negative point above the planted margin; premise unmet, check skipped";
            return report;
        }

    // Threshold body in dimension n+1: constraint vector (x, 1) per point.
    ConsistencyPolytope body;
    body.dim = n + 1;
    auto affine = [](const Vec& x) {
        Vec c = x;
        c.push_back(1.0);
        return c;
    };
    for (const auto& x : positives) body.pos_constraints.push_back(affine(x));
    for (const auto& x : negatives) body.neg_constraints.push_back(affine(x));

    const double r = rho / (3.0 * (1.0 + rho));
    report.fraction_bound =
        std::pow(r, n + 1) * unit_ball_volume(n) / unit_ball_volume(n + 1);

    Rng rng(mc_seed);
    long long hits = 0;
    for (long long i = 0; i < mc_samples; ++i)
        if (membership(body, rng.ball_point(body.dim))) ++hits;
    report.fraction_estimate = double(hits) / double(mc_samples);
    report.fraction_std_error =
        std::sqrt(report.fraction_estimate * (1.0 - report.fraction_estimate) /
                  double(mc_samples));
    report.volume_ok =
        report.fraction_estimate >= report.fraction_bound - 3.0 * report.fraction_std_error;

    try {
        const Vec inner = find_interior(body, report.slack_bound);
        report.interior_slack = min_slack(body, inner);
        report.interior_ok = report.interior_slack >= report.slack_bound;
    } catch (const ThinBodyError&) {
        report.interior_ok = false;
    }
    return report;
}

VolumeCheckReport oracle_volume_check(int n, double rho, std::uint64_t seed, long long mc_samples,
                                      long long planted_points) {
    if (n < 2) throw std::invalid_argument("volume check: n must be >= 2");
    Rng rng(seed);
    const Vec planted = rng.unit_vector(n);

    std::vector<Vec> positives, negatives;
    while (static_cast<long long>(positives.size()) + static_cast<long long>(negatives.size()) <
           planted_points) {
        Vec x = rng.unit_vector(n);
        const double s = dot(planted, x);
        if (s >= rho)
            positives.push_back(std::move(x));
        else if (s <= -rho)
            negatives.push_back(std::move(x));
    }
    if (positives.empty()) positives.push_back(planted);
    if (negatives.empty()) negatives.push_back(scaled(planted, -1.0));

    return oracle_volume_check_on(planted, rho, positives, negatives, derive_seed(seed, 1),
                                  mc_samples);
}

std::vector<FrontierPoint> oracle_2d_weak(LabeledSource& src, int resolution,
                                          long long eval_samples) {
    if (src.target().dim() != 2) throw std::invalid_argument("frontier oracle needs ambient n=2");
    if (resolution < 1) throw std::invalid_argument("frontier oracle: resolution must be >= 1");
    if (eval_samples < 1) throw std::invalid_argument("frontier oracle: eval_samples must be >= 1");

    std::vector<LabeledExample> sample;
    sample.reserve(static_cast<std::size_t>(eval_samples));
    for (long long i = 0; i < eval_samples; ++i) sample.push_back(src.next());

    struct Candidate {
        double angle;
        double offset;
        double p_region;
        double p_correct;
    };
    std::vector<Candidate> candidates;
    constexpr int kOffsets = 41;
    for (int i = 0; i < resolution; ++i) {
        const double angle = 2.0 * std::numbers::pi * double(i) / double(resolution);
        const double c = std::cos(angle), s = std::sin(angle);
        for (int j = 0; j < kOffsets; ++j) {
            const double offset = -1.0 + 2.0 * double(j) / double(kOffsets - 1);
            long long in_region = 0, correct = 0;
            for (const auto& e : sample) {
                if (c * e.x[0] + s * e.x[1] + offset < 0.0) {
                    ++in_region;
                    if (e.label == -1) ++correct;
                }
            }
            if (in_region == 0) continue;
            candidates.push_back({angle, offset, double(in_region) / double(eval_samples),
                                  double(correct) / double(in_region)});
        }
    }

    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.p_region != b.p_region) return a.p_region > b.p_region;
        return a.p_correct > b.p_correct;
    });

    std::vector<FrontierPoint> frontier;
    double best_correct = -1.0;
    for (const auto& cand : candidates) {
        if (cand.p_correct <= best_correct) continue;
        best_correct = cand.p_correct;
        FrontierPoint fp;
        fp.angle = cand.angle;
        fp.p_region = cand.p_region;
        fp.p_correct = cand.p_correct;
        fp.w = normalized(Vec{std::cos(cand.angle), std::sin(cand.angle), 0.0, cand.offset});
        frontier.push_back(std::move(fp));
    }
    std::reverse(frontier.begin(), frontier.end());  // p_region ascending
    return frontier;
}

bool within_frontier(const std::vector<FrontierPoint>& frontier, double p_region, double p_correct,
                     double ci_slack) {
    double best = -1.0;
    for (const auto& f : frontier)
        if (f.p_region >= p_region - ci_slack) best = std::max(best, f.p_correct);
    if (best < 0.0) return false;
    return best >= p_correct - ci_slack;
}

namespace {

/// Per-run summary kept by the cover criteria and pooled by the
/// false-negative criterion.
struct CoverRunStats {
    CoverTag tag = CoverTag::ret_good;
    double total_error = 0.0;
    double false_negative = 0.0;
    int regions = 0;
};

CriterionResult criterion_lift_invariant() {
    CriterionResult r;
    Rng rng(101);
    long long bad = 0;
    double worst = std::numeric_limits<double>::infinity();
    for (long long i = 0; i < 100000; ++i) {
        const int n = 2 + static_cast<int>(i % 7);
        const double radius = rng.uniform(0.1, 10.0);
        const Vec x = scaled(rng.ball_point(n), radius);
        const Vec w = rng.unit_vector(n);
        const double theta = rng.uniform(-radius, radius);
        const LiftedPoint lp = lift_point(x, radius);
        const LiftedHalfspace lh = lift_halfspace(Halfspace(w, theta), radius);
        const double lifted = dot(lh.w_prime, lp.coords);
        const double raw = dot(w, x) - theta;
        if ((lifted >= 0.0) != (raw >= 0.0)) ++bad;
        const double deficit = std::abs(lifted) - std::abs(raw) / (2.0 * radius);
        worst = std::min(worst, deficit);
        if (deficit < -1e-12) ++bad;
    }
    r.measured = double(bad);
    r.bound = 0.0;
    r.passed = bad == 0;
    r.detail = "worst_margin_deficit=" + format_g17(worst);
    return r;
}

CriterionResult criterion_robustness_margin() {
    CriterionResult r;
    const int ns[] = {2, 3, 4, 5};
    const double rhos[] = {0.1, 0.2, 0.3};
    long long violators = 0;
    long long negatives_checked = 0;
    for (int i = 0; i < 100; ++i) {
        const int n = ns[i % 4];
        const double rho = rhos[(i / 4) % 3];
        const int k = 1 + (i / 12) % 3;
        double balance = 0.5;
        SphereMarginOptions opts;
        if (k > 1) {
            balance = 0.35;
            opts.balance_tolerance = 0.2;
        }
        LabeledSource src =
            make_sphere_margin_source(n, k, rho, derive_seed(202, i), balance, opts);
        std::vector<Vec> support;
        support.reserve(150);
        for (int j = 0; j < 150; ++j) support.push_back(src.next().x);
        const MarginWitnessReport rep = robust_margin_witness(src.target(), support, rho);
        violators += static_cast<long long>(rep.violators.size());
        negatives_checked += static_cast<long long>(rep.negatives_checked);
    }
    r.measured = double(violators);
    r.bound = 0.0;
    r.passed = violators == 0;
    r.detail = "negatives_checked=" + std::to_string(negatives_checked);
    return r;
}

CriterionResult criterion_parameter_formulas() {
    CriterionResult r;
    int bad = 0;
    const WeakParams p = compute_params(72, 8, 9.0 / 256.0, 1.0);
    if (p.m_minus != 12) ++bad;
    if (p.exponent != 48.0) ++bad;
    const double threshold_expected =
        (100.0 * 72 / (1.0 * 1.0)) * std::log2(p.m_plus_exact) / p.m_plus_exact;
    if (p.good_threshold != threshold_expected) ++bad;

    const std::vector<int> grid_n = {2, 4, 8, 16, 32};
    const std::vector<int> grid_k = {1, 2, 4, 8};
    const std::vector<double> grid_rho = {9.0 / 256.0, 9.0 / 64.0, 9.0 / 16.0, 9.0 / 4.0};
    const std::vector<double> grid_eps = {0.25, 0.5, 1.0};
    auto at = [&](std::size_t a, std::size_t b, std::size_t c, std::size_t d) {
        return compute_params(grid_n[a], grid_k[b], grid_rho[c], grid_eps[d]);
    };
    int violations = 0;
    int tuples = 0;
    for (std::size_t a = 0; a < grid_n.size(); ++a)
        for (std::size_t b = 0; b < grid_k.size(); ++b)
            for (std::size_t c = 0; c < grid_rho.size(); ++c)
                for (std::size_t d = 0; d < grid_eps.size(); ++d) {
                    ++tuples;
                    const WeakParams base = at(a, b, c, d);
                    if (a + 1 < grid_n.size()) {
                        const WeakParams up = at(a + 1, b, c, d);
                        if (up.m_minus < base.m_minus) ++violations;
                        if (up.m_plus_exact < base.m_plus_exact) ++violations;
                    }
                    if (b + 1 < grid_k.size()) {
                        const WeakParams up = at(a, b + 1, c, d);
                        if (up.m_minus > base.m_minus) ++violations;
                        if (up.m_plus_exact < base.m_plus_exact) ++violations;
                    }
                    if (c + 1 < grid_rho.size()) {
                        const WeakParams up = at(a, b, c + 1, d);
                        if (up.m_minus > base.m_minus) ++violations;
                        if (up.m_plus_exact > base.m_plus_exact) ++violations;
                    }
                    if (d + 1 < grid_eps.size()) {
                        const WeakParams up = at(a, b, c, d + 1);
                        if (up.m_minus < base.m_minus) ++violations;
                        if (up.m_plus_exact > base.m_plus_exact) ++violations;
                    }
                }
    r.measured = double(bad + violations);
    r.bound = 0.0;
    r.passed = bad == 0 && violations == 0;
    r.detail = "tuples=" + std::to_string(tuples);
    return r;
}

CriterionResult criterion_walker_uniformity() {
    CriterionResult r;
    ConsistencyPolytope disk;
    disk.dim = 2;
    WalkConfig wc;
    wc.steps_per_sample = 100;
    wc.warm_start = {0.0, 0.0};
    wc.rng_seed = 404;
    HitAndRunWalker walker(disk, wc);

    constexpr long long kSamples = 10000;
    constexpr double kPi = std::numbers::pi;
    long long counts[8] = {};
    long long right = 0;
    for (long long i = 0; i < kSamples; ++i) {
        const Vec& p = walker.next();
        const double angle = std::atan2(p[1], p[0]);
        const int idx =
            std::clamp(static_cast<int>(std::floor((angle + kPi) / (kPi / 4.0))), 0, 7);
        ++counts[idx];
        if (p[0] > 0.0) ++right;
    }
    const double expect = double(kSamples) / 8.0;
    double chi2 = 0.0;
    for (long long c : counts) chi2 += (double(c) - expect) * (double(c) - expect) / expect;
    const double half = double(right) / double(kSamples);
    const double sigma = 0.5 / std::sqrt(double(kSamples));
    const bool half_ok = std::abs(half - 0.5) <= 3.0 * sigma;

    r.measured = chi2;
    r.bound = 18.4753;  // 0.99 quantile, 7 degrees of freedom
    r.passed = chi2 < r.bound && half_ok;
    r.detail = "halfball=" + format_g17(half);
    return r;
}

CriterionResult criterion_volume_bound() {
    CriterionResult r;
    int pass = 0;
    double min_volume_margin = std::numeric_limits<double>::infinity();
    for (int s = 0; s < 10; ++s) {
        const VolumeCheckReport rep = oracle_volume_check(3, 0.3, 3001 + s);
        if (rep.applicable && rep.passed()) ++pass;
        min_volume_margin = std::min(min_volume_margin,
                                     rep.fraction_estimate + 3.0 * rep.fraction_std_error -
                                         rep.fraction_bound);
    }
    r.measured = double(pass);
    r.bound = 10.0;
    r.passed = pass == 10;
    r.detail = "min_volume_margin=" + format_g17(min_volume_margin);
    return r;
}

CriterionResult criterion_training_consistency(const LabeledSource& base,
                                               const WeakParams& params) {
    CriterionResult r;
    int returned = 0;
    long long wrong = 0;
    WalkConfig wc;
    for (int run = 0; run < 50; ++run) {
        LabeledSource src = base.fork(5000 + run);
        TrainingDump dump;
        const auto h = find_good_halfspace(src, params, wc, derive_seed(606, run), nullptr, &dump);
        if (!h) continue;
        ++returned;
        for (const Vec& lp : dump.lifted_positives)
            if (h->evaluate_lifted(lp) != +1) ++wrong;
        for (const Vec& ln : dump.lifted_negatives)
            if (h->evaluate_lifted(ln) != -1) ++wrong;
    }
    r.measured = double(wrong);
    r.bound = 0.0;
    r.passed = wrong == 0 && returned >= 25;
    r.detail = "returned=" + std::to_string(returned) + "/50";
    return r;
}

CriterionResult criterion_region_properties(const LabeledSource& base3,
                                            const WeakParams& params3) {
    CriterionResult r;
    WalkConfig wc;
    LabeledSource src3 = base3.fork(7100);
    const RegionLearnerResult found3 =
        region_learner(src3, 0.1, 0.2, 0.02, 50, params3, wc, 707);

    SphereMarginOptions opts;
    opts.balance_tolerance = 0.1;
    const LabeledSource base2 = make_sphere_margin_source(2, 2, 0.2, 717, 0.4, opts);
    WeakParams params2 = compute_params(2, 2, 0.2, 0.1);
    params2.m_minus_override = 8;
    params2.m_plus_override = 2000;

    LabeledSource eval_fork = base2.fork(7300);
    const auto frontier = oracle_2d_weak(eval_fork, 720, 20000);

    int checked = 0;
    int outside = 0;
    for (int rep = 0; rep < 5; ++rep) {
        LabeledSource src2 = base2.fork(7400 + rep);
        const RegionLearnerResult res =
            region_learner(src2, 0.1, 0.2, 0.02, 50, params2, wc, derive_seed(727, rep));
        if (!res.region) continue;
        ++checked;
        if (!within_frontier(frontier, res.report.p_neg_region,
                             res.report.p_correct_given_region, 0.03))
            ++outside;
    }

    r.measured = double(outside);
    r.bound = 0.0;
    r.passed = found3.region.has_value() && checked >= 3 && outside == 0;
    r.detail = std::string("n3_region=") + (found3.region ? "yes" : "no") +
               " n2_checked=" + std::to_string(checked) + "/5";
    return r;
}

CriterionResult criterion_cover_hard(std::vector<CoverRunStats>& pooled) {
    CriterionResult r;
    const double eps = 0.05;
    const double gamma = 0.02;
    const long long region_cap = cover_max_rounds(eps, gamma);
    int good = 0;
    int small_err = 0;
    int over_cap = 0;
    double max_err = 0.0;
    for (int s = 1; s <= 10; ++s) {
        SphereMarginOptions opts;
        opts.balance_tolerance = 0.1;
        LabeledSource src = make_sphere_margin_source(3, 2, 0.2, 800 + s, 0.4, opts);
        WeakParams params = compute_params(3, 2, 0.2, eps);
        params.m_minus_override = 8;
        params.m_plus_override = 2000;
        WalkConfig wc;
        const RegionFn fn = [&](ExampleStream& stream, std::uint64_t seed) {
            return region_learner(stream, eps, 0.2, gamma, 8, params, wc, seed);
        };
        CoverConfig cc;
        cc.seed = derive_seed(808, s);
        const CoverOutcome outcome = cover_learner(src, fn, eps, gamma, cc);
        const CoverHypothesis& hyp = outcome.hypothesis;
        const ErrorDecomposition ed = error_decomposition(
            [&hyp](const Vec& x) { return hyp.evaluate(x); }, src, 10000);

        CoverRunStats st;
        st.tag = outcome.tag;
        st.total_error = ed.total;
        st.false_negative = ed.false_negative;
        st.regions = hyp.learned_region_count();
        pooled.push_back(st);

        if (st.tag == CoverTag::ret_good) ++good;
        if (ed.total <= eps) ++small_err;
        if (st.regions > region_cap) ++over_cap;
        max_err = std::max(max_err, ed.total);
    }
    r.measured = double(good);
    r.bound = 8.0;
    r.passed = good >= 8 && max_err <= 6.0 * eps && small_err >= 8 && over_cap == 0;
    r.detail = "max_err=" + format_g17(max_err) + " small_err=" + std::to_string(small_err) +
               "/10 region_cap=" + std::to_string(region_cap);
    return r;
}

CriterionResult criterion_cover_soft(std::vector<CoverRunStats>& pooled) {
    CriterionResult r;
    const double eps = 0.05;
    const double gamma = 0.02;
    const double eta = 0.08;
    const double band_rho = 0.1;
    const long long m_holdout = 10000;
    const double sigma_err = std::sqrt((eta + eps) * (1.0 - eta - eps) / double(m_holdout));
    const double bound = eta + eps + 3.0 * sigma_err;

    int within = 0;
    double max_err = 0.0;
    for (int s = 1; s <= 10; ++s) {
        LabeledSource src = make_pancake_source_with_band_mass(3, band_rho, eta, 10000 + s);
        WeakParams params = compute_params(3, 1, band_rho, eps);
        params.m_minus_override = 8;
        params.m_plus_override = 2000;
        WalkConfig wc;
        const RegionFn fn = [&](ExampleStream& stream, std::uint64_t seed) {
            return region_learner(stream, eps, band_rho, gamma, 8, params, wc, seed);
        };
        CoverConfig cc;
        cc.seed = derive_seed(10100, s);
        const CoverOutcome outcome = cover_learner(src, fn, eps, gamma, cc);
        const CoverHypothesis& hyp = outcome.hypothesis;
        const ErrorDecomposition ed = error_decomposition(
            [&hyp](const Vec& x) { return hyp.evaluate(x); }, src, m_holdout);

        CoverRunStats st;
        st.tag = outcome.tag;
        st.total_error = ed.total;
        st.false_negative = ed.false_negative;
        st.regions = hyp.learned_region_count();
        pooled.push_back(st);

        if (ed.total <= bound) ++within;
        max_err = std::max(max_err, ed.total);
    }
    r.measured = max_err;
    r.bound = bound;
    r.passed = within == 10;
    r.detail = "within=" + std::to_string(within) + "/10";
    return r;
}

CriterionResult criterion_false_negative(const std::vector<CoverRunStats>& pooled) {
    CriterionResult r;
    const double eps = 0.05;
    const long long m_holdout = 10000;
    double worst = 0.0;
    for (const auto& st : pooled) worst = std::max(worst, st.false_negative);
    r.measured = worst;
    r.bound = eps + 3.0 * std::sqrt(eps * (1.0 - eps) / double(m_holdout));
    r.passed = pooled.size() == 20 && worst <= r.bound;
    r.detail = "runs_pooled=" + std::to_string(pooled.size());
    return r;
}

CriterionResult criterion_boost() {
    CriterionResult r;
    const double eps = 0.05;
    const double gamma = 0.02;
    int success = 0;
    int stalls = 0;
    for (int s = 1; s <= 10; ++s) {
        SphereMarginOptions opts;
        opts.balance_tolerance = 0.1;
        LabeledSource src = make_sphere_margin_source(2, 2, 0.2, 1100 + s, 0.4, opts);
        WeakParams params = compute_params(2, 2, 0.2, eps);
        params.m_minus_override = 8;
        params.m_plus_override = 2000;
        WalkConfig wc;
        const WeakFn weak = [&](ExampleStream& stream, std::uint64_t seed) {
            return find_good_halfspace(stream, params, wc, seed);
        };
        BoostConfig bc;
        bc.seed = derive_seed(1111, s);
        try {
            const WeightedBoostHypothesis model = weighted_boost(src, weak, eps, gamma, 200, bc);
            if (!model.rounds.empty() && model.rounds.back().holdout_error <= eps) ++success;
        } catch (const BoostStallError&) {
            ++stalls;
        }
    }

    LabeledSource balanced = make_sphere_margin_source(2, 1, 0.2, 1199);
    auto thin_rng = std::make_shared<Rng>(derive_seed(1199, 7));
    FilteredStream biased(balanced, [thin_rng](const LabeledExample& e) {
        return e.label == +1 || thin_rng->below(9) == 0;
    });
    WeakParams params1 = compute_params(2, 1, 0.2, eps);
    params1.m_minus_override = 8;
    params1.m_plus_override = 2000;
    WalkConfig wc1;
    const WeakFn weak1 = [&](ExampleStream& stream, std::uint64_t seed) {
        return find_good_halfspace(stream, params1, wc1, seed);
    };
    BoostConfig bc1;
    bc1.seed = 4242;
    const WeightedBoostHypothesis one_round = weighted_boost(biased, weak1, eps, gamma, 1, bc1);
    const bool fallback = !one_round.rounds.empty() && one_round.rounds[0].is_constant &&
                          one_round.rounds[0].constant_label == +1 &&
                          one_round.rounds[0].edge >= 0.35;

    r.measured = double(success);
    r.bound = 8.0;
    r.passed = success >= 8 && fallback;
    r.detail = "stalls=" + std::to_string(stalls) + " fallback=" + (fallback ? "yes" : "no") +
               (one_round.rounds.empty()
                    ? ""
                    : " fallback_edge=" + format_g17(one_round.rounds[0].edge));
    return r;
}

CriterionResult criterion_determinism(const std::string& base_dir) {
    CriterionResult r;
    namespace fs = std::filesystem;

    RunConfig gen_cfg;
    gen_cfg.kind = ExperimentKind::gen;
    gen_cfg.source = SourceKind::sphere_margin;
    gen_cfg.n = 3;
    gen_cfg.k = 2;
    gen_cfg.rho = 0.2;
    gen_cfg.balance = 0.4;
    gen_cfg.balance_tolerance = 0.1;
    gen_cfg.source_seed = 1212;
    gen_cfg.count = 500;
    gen_cfg.out_dir = (fs::path(base_dir) / "c12_gen").string();

    RunConfig cov_cfg;
    cov_cfg.kind = ExperimentKind::learn_cover;
    cov_cfg.source = SourceKind::sphere_margin;
    cov_cfg.n = 2;
    cov_cfg.k = 1;
    cov_cfg.rho = 0.2;
    cov_cfg.source_seed = 1212;
    cov_cfg.learner_seed = 7;
    cov_cfg.epsilon = 0.05;
    cov_cfg.gamma = 0.05;
    cov_cfg.m_minus_override = 8;
    cov_cfg.m_plus_override = 500;
    cov_cfg.attempt_budget = 6;
    cov_cfg.holdout = 2000;
    cov_cfg.out_dir = (fs::path(base_dir) / "c12_cover").string();

    const auto snapshot = [](const ExperimentResult& res) {
        std::vector<std::pair<std::string, std::string>> bytes;
        for (const auto& path : res.artifacts) bytes.emplace_back(path, read_text_file(path));
        return bytes;
    };

    int mismatches = 0;
    std::string names;
    for (const RunConfig* cfg : {&gen_cfg, &cov_cfg}) {
        const auto first = snapshot(run_experiment(*cfg));
        const auto second = snapshot(run_experiment(*cfg));
        if (first.size() != second.size()) {
            ++mismatches;
            names += "artifact_count ";
            continue;
        }
        for (std::size_t i = 0; i < first.size(); ++i)
            if (first[i] != second[i]) {
                ++mismatches;
                names += fs::path(first[i].first).filename().string() + " ";
            }
    }
    r.measured = double(mismatches);
    r.bound = 0.0;
    r.passed = mismatches == 0;
    r.detail = mismatches == 0 ? "reruns byte-identical" : ("mismatched: " + names);
    return r;
}

}  // namespace

std::vector<CriterionResult> paper_check(const std::string& out_dir) {
    std::string scratch = out_dir;
    if (scratch.empty())
        scratch = (std::filesystem::temp_directory_path() / "polylearn_paper_check").string();

    std::vector<CriterionResult> results;
    const auto run = [&results](int index, const char* name,
                                const std::function<CriterionResult()>& body) {
        const auto start = std::chrono::steady_clock::now();
        CriterionResult r;
        try {
            r = body();
        } catch (const std::exception& e) {
            r.passed = false;
            r.measured = std::numeric_limits<double>::quiet_NaN();
            r.detail = std::string("exception: ") + e.what();
        }
        r.index = index;
        r.name = name;
        r.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        results.push_back(std::move(r));
    };

    run(1, "lift-sign-and-margin", criterion_lift_invariant);
    run(2, "robustness-implies-margin", criterion_robustness_margin);
    run(3, "parameter-formulas", criterion_parameter_formulas);
    run(4, "walker-uniformity", criterion_walker_uniformity);
    run(5, "planted-volume-bound", criterion_volume_bound);

    std::optional<LabeledSource> shared_instance;
    WeakParams shared_params = compute_params(3, 2, 0.2, 0.1);
    shared_params.m_minus_override = 8;
    shared_params.m_plus_override = 2000;
    run(6, "weak-training-consistency", [&] {
        SphereMarginOptions opts;
        opts.balance_tolerance = 0.1;
        shared_instance.emplace(make_sphere_margin_source(3, 2, 0.2, 606, 0.4, opts));
        return criterion_training_consistency(*shared_instance, shared_params);
    });
    run(7, "region-properties", [&]() -> CriterionResult {
        if (!shared_instance)
            throw ConfigError("shared instance unavailable; its construction failed earlier");
        return criterion_region_properties(*shared_instance, shared_params);
    });

    std::vector<CoverRunStats> pooled;
    run(8, "cover-hard-margin", [&] { return criterion_cover_hard(pooled); });
    run(10, "cover-soft-margin", [&] { return criterion_cover_soft(pooled); });
    run(9, "cover-false-negative", [&] { return criterion_false_negative(pooled); });
    run(11, "boost-path", criterion_boost);
    run(12, "determinism", [&] { return criterion_determinism(scratch); });

    std::sort(results.begin(), results.end(),
              [](const CriterionResult& a, const CriterionResult& b) { return a.index < b.index; });

    if (!out_dir.empty()) {
        int failed = 0;
        std::string summary;
        for (const auto& r : results) {
            summary += format_criterion_line(r);
            summary += '\n';
            if (!r.passed) ++failed;
        }
        summary += failed == 0 ? "OVERALL PASS\n" : "OVERALL FAIL\n";
        write_text_file(join_path(out_dir, "paper_check_summary.txt"), summary);

        njson arr = njson::array();
        for (const auto& r : results) {
            njson j;
            j["index"] = r.index;
            j["name"] = r.name;
            j["passed"] = r.passed;
            j["measured"] = r.measured;
            j["bound"] = r.bound;
            j["detail"] = r.detail;
            arr.push_back(j);
        }
        write_text_file(join_path(out_dir, "paper_check_metrics.json"), arr.dump(2) + "\n");
    }
    return results;
}

std::string format_criterion_line(const CriterionResult& r) {
    std::ostringstream out;
    out << (r.passed ? "PASS" : "FAIL") << ' ' << r.index << ' ' << r.name
        << " measured=" << format_g17(r.measured) << " bound=" << format_g17(r.bound);
    if (!r.detail.empty()) out << ' ' << r.detail;
    return out.str();
}

}  // namespace polylearn
