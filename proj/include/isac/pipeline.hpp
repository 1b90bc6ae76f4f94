#pragma once

#include <optional>
#include <string>

#include "isac/feasibility.hpp"
#include "isac/rbal.hpp"
#include "isac/recovery.hpp"

namespace isac {

struct PipelineOptions {
  SolverConfig solver;
  bool full_check = false;     // dense diagnostics on the recovered solution
  bool allow_realign = true;   // see extract_rank_one()
};

struct PipelineResult {
  FeasibilityReport feasibility;
  bool degenerate = false;
  std::optional<SolveReport> solve;  // empty on the closed-form path
  std::optional<BeamformingSolution> solution;  // empty when infeasible
  std::optional<SolutionDiagnostics> diagnostics;
  double reduced_objective = 0.0;  // tr(Y^-1) + (Nt-K)^2/(P_T - tr Z), or the closed form
  double setup_seconds = 0.0;      // feasibility, degeneracy test, SVD, dual precompute
  double iter_seconds = 0.0;       // R-BAL loop only
};

/**
 * feasibility -> degeneracy test -> (closed form | R-BAL) -> recovery.
 * An infeasible scenario returns early with no solution; it is not an error.
 */
PipelineResult run_pipeline(const Scenario& scenario, const ChannelMatrix& channel,
                            const PipelineOptions& options = {});

/// Solution document: schema_version 1, complex entries as [re, im], matrices
/// as arrays of rows.
std::string solution_json(const PipelineResult& result, const Scenario& scenario, int indent = 2);

const char* to_string(SolutionOrigin origin);
const char* to_string(SolveStatus status);

}  // namespace isac
