#include "isac/pipeline.hpp"

#include <chrono>

#include <json.hpp>

namespace isac {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

nlohmann::json complex_rows(const CMatrix& m) {
  auto rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    auto row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::json to_json(const RVector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace

const char* to_string(SolutionOrigin origin) {
  switch (origin) {
    case SolutionOrigin::Extracted: return "extracted";
    case SolutionOrigin::Realigned: return "realigned";
    case SolutionOrigin::DegenerateWitness: return "degenerate_witness";
  }
  return "unknown";
}

const char* to_string(SolveStatus status) {
  return status == SolveStatus::Converged ? "converged" : "iteration_cap_reached";
}

PipelineResult run_pipeline(const Scenario& scenario, const ChannelMatrix& channel,
                            const PipelineOptions& options) {
  PipelineResult out;
  const auto t0 = Clock::now();
  out.feasibility = compute_p_low(scenario, channel);
  if (!out.feasibility.feasible) {
    out.setup_seconds = seconds_since(t0);
    return out;
  }

  const DegeneracyVerdict verdict = check_degenerate(scenario, channel);
  out.degenerate = verdict.degenerate_condition_holds;
  const ReducedInstance instance = build_reduced(scenario, channel);

  if (verdict.witness) {
    out.setup_seconds = seconds_since(t0);
    out.solution = from_witness(*verdict.witness, instance);
    out.reduced_objective = out.solution->objective;
  } else {
    const DualPrecompute dual = precompute_dual(instance, options.solver.delta);
    SolverState start = initial_state(instance, out.feasibility.p_low);
    out.setup_seconds = seconds_since(t0);

    auto [state, report] = solve(instance, dual, options.solver, std::move(start));
    out.iter_seconds = report.iter_seconds;
    out.reduced_objective = report.objective;
    out.solution = extract_rank_one(state.x, instance, options.allow_realign);
    out.solve = std::move(report);
  }

  if (options.full_check) out.diagnostics = verify_solution(*out.solution, scenario, channel);
  return out;
}

std::string solution_json(const PipelineResult& result, const Scenario& scenario, int indent) {
  nlohmann::json doc;
  doc["schema_version"] = 1;
  doc["scenario"] = {{"n_tx", scenario.n_tx},
                     {"n_users", scenario.n_users},
                     {"power_budget_mw", scenario.power_budget},
                     {"noise_power_mw", scenario.noise_power},
                     {"sinr_thresholds", to_json(scenario.sinr_thresholds)}};
  doc["feasibility"] = {{"p_low_mw", result.feasibility.p_low},
                        {"feasible", result.feasibility.feasible},
                        {"near_boundary", result.feasibility.near_boundary}};
  doc["degenerate"] = result.degenerate;
  doc["timing"] = {{"setup_seconds", result.setup_seconds},
                   {"iter_seconds", result.iter_seconds}};

  if (result.solve) {
    const SolveReport& s = *result.solve;
    doc["solver"] = {{"status", to_string(s.status)},
                     {"iterations", s.iterations},
                     {"final_violation", s.final_violation.combined},
                     {"tau", s.tau},
                     {"reduced_objective", s.objective}};
  } else {
    doc["solver"] = nullptr;
  }

  if (result.solution) {
    const BeamformingSolution& sol = *result.solution;
    doc["origin"] = to_string(sol.origin);
    doc["crb_objective"] = sol.objective;
    doc["theta"] = sol.theta;
    doc["sinr"] = to_json(sol.sinr);
    doc["beamformers"] = complex_rows(sol.w);
    doc["sensing_factor"] = complex_rows(sensing_factor(sensing_cov(sol)));
  } else {
    doc["origin"] = nullptr;
    doc["crb_objective"] = nullptr;
  }

  if (result.diagnostics) {
    const SolutionDiagnostics& d = *result.diagnostics;
    doc["diagnostics"] = {{"min_sinr_margin", d.min_sinr_margin},
                          {"power_residual", d.power_residual},
                          {"sensing_min_eig", d.sensing_min_eig},
                          {"decomposition_gap", d.decomposition_gap},
                          {"null_leakage", d.null_leakage},
                          {"structure_gap", d.structure_gap},
                          {"objective_full", d.objective_full},
                          {"objective_gap", d.objective_gap},
                          {"rank_one_gap", d.rank_one_gap}};
  }
  return doc.dump(indent);
}

}  // namespace isac
