#pragma once

#include "anonprice/quadrature.hpp"
#include "anonprice/revenue.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace anonprice {

struct PipelineParams {
    double eps = 0.0;
    double u_star = 0.0;      // R^{-1}(eps)
    double v_star = 0.0;      // min monopoly price after compression
    double kappa_star = 1.0;  // prod (1 - q_i*)
    double delta_star = 0.0;  // half the minimum C2 slack on (1, u*]
    double gamma_star = 0.0;  // R^{-1}(delta_star)
    double Delta_star = 0.0;  // (v* - 1) / (3 gamma*^2) kappa* delta*
    std::optional<double> step_override;

    double step() const { return step_override ? *step_override : Delta_star; }
};

struct PipelineState {
    double gamma = 1.0;
    double R_gamma = 0.0;  // running R(gamma), updated exactly by each step
    std::vector<Distribution> dists;
    double u = 0.0;  // current support cap
    PipelineParams params;
    std::uint64_t iteration = 0;
    double psi_total = 0.0;          // sum of peak potentials
    std::optional<double> objective;  // P1 objective, filled in by the pipeline
    Integral gap_tail;                // int_gamma^inf (1 - e^{-Q}), tracked alongside gamma
};

struct TraceRow {
    std::uint64_t iteration = 0;
    double gamma = 0.0;
    double psi_total = 0.0;
    double objective = 0.0;
    double min_slack = 0.0;
    double delta = 0.0;
    double u_bar = 0.0;
    std::size_t vanished = 0;
};

struct PreprocessReport {
    double input_objective = 0.0;     // P1 objective of the input
    double hybrid_objective = 0.0;    // P1 objective of Cont(gamma*) with the compressed dists
    double input_min_slack = 0.0;     // min C2 slack of the input on the audit grid
    double hybrid_min_slack = 0.0;    // min C2 slack of the preprocessed hybrid on (1, u*]
};

// Compression and the fixed parameters. Enforces C1 and r(0) = 0 on the input
// (feasibility_error) and the parameter bounds on the output (invariant_violation).
PipelineState preprocess(const Instance& inst, double eps, const QuadratureConfig& quad,
                         PreprocessReport* report = nullptr);

struct DiminishResult {
    std::vector<Distribution> dists;
    std::vector<double> absorbed;  // Delta_i per distribution
    double total = 0.0;
};

DiminishResult diminish(const std::vector<Distribution>& dists, double delta, double u_bar);

struct VerifyReport {
    bool objective_monotone = true;
    bool slack_ok = true;
    bool potential_drop_ok = true;
    bool regular = true;
    double objective_change = 0.0;
    double min_slack = 0.0;
    double worst_drop_error = 0.0;
    std::string detail;

    bool ok() const { return objective_monotone && slack_ok && potential_drop_ok && regular; }
};

// Checks one step: objective does not decrease (1e-7), slack >= delta* - 1e-9 on
// the audit grid over (1, u_bar], Psi drops by exactly the absorbed amount on
// (0, u_bar], and every distribution keeps a monotone virtual value.
VerifyReport verify_iteration(const PipelineState& before, const PipelineState& after, const QuadratureConfig& quad);

struct StepResult {
    PipelineState state;
    TraceRow row;
    VerifyReport verify;
};

// One SUBROUTINE iteration followed by verify_iteration. Throws
// invariant_violation when a check fails or the loop guard is already false.
StepResult subroutine_step(const PipelineState& state, const QuadratureConfig& quad);

struct PipelineResult {
    double gamma_hat = 0.0;
    double gamma_star = 0.0;
    double psi_initial = 0.0;
    double absorbed_total = 0.0;  // sum of Delta over all iterations
    std::uint64_t iteration_bound = 0;
    PipelineParams params;
    std::vector<TraceRow> trace;
    double final_objective = 0.0;  // opt_cont(gamma_hat)
    PreprocessReport preprocess;
};

struct PipelineOptions {
    std::optional<double> step_override;
    bool keep_trace = true;
    std::function<void(const TraceRow&)> on_row;  // streaming alternative to keep_trace
};

PipelineResult run_pipeline(const Instance& inst, double eps, const QuadratureConfig& quad,
                            const PipelineOptions& opts = {});

// Header iter,gamma,psi_total,objective,min_slack,delta,u_bar,vanished; 10 significant digits.
void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace);
void write_trace_header(std::ostream& out);
void write_trace_row(std::ostream& out, const TraceRow& row);

}  // namespace anonprice
