#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "polylearn/booster.hpp"
#include "polylearn/config.hpp"

namespace polylearn {

struct MetricsRecord {
    double total_error = 0.0;
    double false_positive = 0.0;  // Pr̂[f=−1 ∧ h=+1]
    double false_negative = 0.0;  // Pr̂[f=+1 ∧ h=−1]
    double eta_hat = 0.0;         // measured soft-margin mass at the configured rho
    int region_count = 0;
    int attempts = 0;
    double wall_time_seconds = 0.0;
    long long samples_consumed = 0;
    std::string termination = "ok";
};

struct ExperimentResult {
    MetricsRecord metrics;
    std::vector<std::string> artifacts;  // paths written, in creation order
};

/// Runs one experiment per cfg.kind, writes artifacts under cfg.out_dir, and
/// returns the metrics that were persisted. Deterministic given the seeds.
ExperimentResult run_experiment(const RunConfig& cfg);

/// Serializes metrics (with the resolved config embedded) as pretty JSON.
/// include_wall_time=false zeroes the timing field so byte-level comparison
/// across runs is meaningful.
std::string metrics_to_json(const MetricsRecord& metrics, const RunConfig& cfg,
                            bool include_wall_time = true);

struct VolumeCheckReport {
    bool applicable = true;  // false when the planted premise fails
    std::string note;
    double fraction_estimate = 0.0;  // vol(consistency body) / vol(unit ball)
    double fraction_std_error = 0.0;
    double fraction_bound = 0.0;  // (rho/(3(1+rho)))^{n+1} scaled to a ball fraction
    double interior_slack = 0.0;
    double slack_bound = 0.0;  // rho/(12(1+rho))
    bool volume_ok = false;
    bool interior_ok = false;
    bool passed() const { return !applicable || (volume_ok && interior_ok); }
};

/// Plants a known halfspace through the origin, draws labeled points on the
/// sphere at margin rho, and Monte-Carlo checks that the consistency body in
/// dimension n+1 keeps at least its guaranteed volume and inradius.
VolumeCheckReport oracle_volume_check(int n, double rho, std::uint64_t seed,
                                      long long mc_samples = 200000, long long planted_points = 40);

/// Same check on caller-supplied sphere points. When any point violates the
/// planted-margin premise (positives need planted_w·x ≥ rho, negatives
/// planted_w·x ≤ −rho), the check is skipped: applicable=false with a note.
VolumeCheckReport oracle_volume_check_on(const Vec& planted_w, double rho,
                                         const std::vector<Vec>& positives,
                                         const std::vector<Vec>& negatives, std::uint64_t mc_seed,
                                         long long mc_samples);

/// Unit-ball volume in dimension d.
double unit_ball_volume(int d);

struct FrontierPoint {
    double angle = 0.0;     // direction index on the sweep grid
    double p_region = 0.0;  // Pr̂[x in region]
    double p_correct = 0.0; // Pr̂[f=−1 | x in region]
    Vec w;                  // lifted direction
};

/// Brute-force sweep over `resolution` lifted directions for an ambient 2-d
/// source: measures each candidate region on a fixed evaluation sample and
/// keeps the Pareto frontier (p_correct nonincreasing as p_region grows).
std::vector<FrontierPoint> oracle_2d_weak(LabeledSource& src, int resolution,
                                          long long eval_samples = 20000);

/// True when (p_region, p_correct) does not dominate the frontier by more
/// than ci_slack in either coordinate.
bool within_frontier(const std::vector<FrontierPoint>& frontier, double p_region,
                     double p_correct, double ci_slack);

struct CriterionResult {
    int index = 0;
    std::string name;
    double measured = 0.0;
    double bound = 0.0;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;  // runtime; never serialized, so artifacts stay reproducible
};

/// Executes the full acceptance suite with fixed seeds; one result per
/// criterion, all criteria always run. Writes per-criterion metrics under
/// out_dir when it is nonempty.
std::vector<CriterionResult> paper_check(const std::string& out_dir = "");

/// Formats "PASS|FAIL <idx> <name> measured=… bound=… <detail>".
std::string format_criterion_line(const CriterionResult& r);

}  // namespace polylearn
