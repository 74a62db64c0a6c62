#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nsstab/baseflows.hpp"
#include "nsstab/diagnostics.hpp"
#include "nsstab/solver.hpp"

namespace nsstab {

struct ExperimentConfig {
    BoxSpec box = BoxSpec::cube(2.0 * pi, 64);
    SolverConfig solver;
    BaseFlowSpec base;
    PerturbationSpec perturbation;
    double horizon = 0.0;
    std::vector<double> sweep;            // optional epsilon sweep values
    std::vector<double> snapshot_times;   // optional field-snapshot times

    void validate() const;
    /// Deterministic key = value rendering; echoed into reports and hashed.
    std::string canonical_text() const;
    std::uint64_t hash() const;
};

/// One sampled row of the perturbation energy budgets. Signed s1..s4 are the
/// four trilinear terms of the z-budget identity
///   d/dt ||u_z||^2 + 2 nu ||grad u_z||^2
///     = -2 int (u_z.grad u).u_z - 2 int (u_z.grad w).u_z
///       - 2 int (w_z.grad u).u_z - 2 int (u.grad w_z).u_z ;
/// I1..I4 are the absolute-value integrals in the order (grad w, grad u,
/// w_z, grad w_z). Both vanish for z-independent data where they must.
struct BudgetRecord {
    double t = 0.0;
    double dE_dt = 0.0;           // finite-difference rate of ||u||^2
    double dissipation = 0.0;     // 2 nu ||grad u||^2
    double rhs_c5 = 0.0;          // -2 int u.grad w.u
    double dEz_dt = 0.0;          // finite-difference rate of ||u_z||^2
    double z_dissipation = 0.0;   // 2 nu ||grad u_z||^2
    double s1 = 0.0, s2 = 0.0, s3 = 0.0, s4 = 0.0;
    double I1 = 0.0, I2 = 0.0, I3 = 0.0, I4 = 0.0;
    double residual_c5 = 0.0;
    double residual_d2 = 0.0;
};

struct StabilityVerdict {
    bool stable = false;            // sup_t J(t) <= 2 J0 over the horizon
    double measured_A0 = 0.0;       // smallest A0 with J <= A0 I^(1/4) J^(5/4) + J0
    double gronwall_C = 0.0;        // K / K0
    double gronwall_bound = 0.0;    // exp(1/2 int ||grad w||_inf dt)
    bool condition_holds = false;   // measured_A0 I^(1/4) (2 J0)^(1/4) < 1/2
    bool condition_implies_stable = true;
    std::optional<double> threshold_estimate;
};

struct FieldSnapshotPair {
    double t = 0.0;
    PhysicalVectorField v, w;
};

struct ExperimentReport {
    ExperimentConfig config;
    DiagnosticSeries v_series, w_series, u_series;
    std::vector<BudgetRecord> budgets;
    std::vector<FieldSnapshotPair> snapshots;
    PaperQuantities quantities;     // of the perturbation u
    StabilityVerdict verdict;
    double max_residual_c5 = 0.0;
    double max_residual_d2 = 0.0;
    double max_consistency_residual = 0.0;
    double max_I3_rel = 0.0, max_I4_rel = 0.0;  // relative to the largest Ik
    std::pair<double, double> extra_condition{0.0, 0.0};
    double max_tail_v = 0.0, max_tail_w = 0.0;
    bool resolution_ok = true;
    bool aborted = false;
    std::string abort_reason;
};

/// Co-evolve v (from w0 + u0) and w (from w0) in lockstep with identical
/// settings and forcing; u(t) := v(t) - w(t) then solves the perturbation
/// system up to one measured consistency residual. Records everything and
/// evaluates the verdict machinery.
ExperimentReport run_experiment(const ExperimentConfig& config);

/// Max normalized residual of the perturbation energy identity
/// d/dt ||u||^2 + 2 nu ||grad u||^2 = -2 int u.grad w.u across interior
/// samples. Needs >= 3 samples.
double check_energy_budget_c5(const ExperimentReport& report);

/// Max normalized residual of the z-differentiated budget; also the place
/// where the per-sample I1..I4 live. Needs >= 3 samples.
double check_z_budget_d2(const ExperimentReport& report);

/// Verdict assembly from the accumulated quantities and the recorded series.
StabilityVerdict bootstrap_check(const PaperQuantities& q, const DiagnosticSeries& u_series,
                                 double nu);

/// Measured Groenwall constant K/K0 and its asserted bound factor
/// exp(1/2 int ||grad w||_inf dt). Rejects K0 = 0.
struct GronwallResult {
    double c_measured = 0.0;
    double bound_factor = 0.0;
};
GronwallResult gronwall_check(const ExperimentReport& report);

/// Measured constants of the L6/L4 smallness chain:
///   c1: ||u||_{L3_t L6} / ( sup_t ||u_z||^(1/3) (int ||grad u||^2 dt)^(1/3) )
///   c2: ||u||_{L4_{x,t}} / ( ||u||_{L3_t L6}^(3/4) sup_t ||u||^(1/4) )
/// Rejects z-independent reports (u_z = 0) for c1.
struct L4ChainResult {
    double c1 = 0.0;
    double c2 = 0.0;
};
L4ChainResult l4_chain_check(const ExperimentReport& report);

struct SweepMember {
    double epsilon = 0.0;
    bool stable = false;
    bool aborted = false;
    std::uint64_t config_hash = 0;
};

struct SweepResult {
    std::vector<SweepMember> members;
    std::optional<double> largest_stable;
    std::optional<double> smallest_unstable;
    std::vector<double> monotonicity_violations;  // stable epsilons above an unstable one
    std::vector<ExperimentReport> reports;
};

/// Run one experiment per sweep epsilon (shared base flow and seed), in
/// parallel up to `threads`. Returns the stability bracket; monotonicity
/// violations are reported, not hidden.
SweepResult threshold_sweep(const ExperimentConfig& config, int threads = 1);

/// Deterministic JSON summary (config echo, verdict, measured constants,
/// residual maxima). Byte-identical across reruns of the same config.
std::string report_summary_json(const ExperimentReport& report);
std::string sweep_summary_json(const ExperimentConfig& config, const SweepResult& sweep);

/// Write summary + per-trajectory CSVs (+ optional snapshots) under dir.
void write_report_files(const ExperimentReport& report, const std::string& dir);

}  // namespace nsstab
