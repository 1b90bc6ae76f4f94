#include "isac/isac.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <exception>
#include <cstdlib>
#include <limits>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "isac/pipeline.hpp"
#include "isac/verification.hpp"

struct isac_scenario {
  isac::Scenario scenario;
  isac::ChannelMatrix channel;
  bool has_channel = false;
};

struct isac_result {
  isac::Scenario scenario;
  isac::PipelineResult result;
};

struct isac_verify_report {
  std::vector<isac::CheckResult> checks;
};

namespace {

thread_local std::string g_last_error;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

isac_status record(isac_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

// Runs `body`, mapping library errors onto status codes.
template <class F>
isac_status guarded(F&& body) {
  try {
    g_last_error.clear();
    return body();
  } catch (const isac::Error& e) {
    return record(static_cast<isac_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return record(ISAC_ERR_UNKNOWN, "out of memory");
  } catch (const std::exception& e) {
    return record(ISAC_ERR_UNKNOWN, e.what());
  } catch (...) {
    return record(ISAC_ERR_UNKNOWN, "unknown exception");
  }
}

void write_complex(const isac::CMatrix& m, double* out) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const auto idx = 2 * (j * m.rows() + i);
      out[idx] = m(i, j).real();
      out[idx + 1] = m(i, j).imag();
    }
}

bool has_solution(const isac_result* r) { return r && r->result.solution.has_value(); }

}  // namespace

extern "C" {

const char* isac_version(void) { return ISAC_VERSION_STRING; }

const char* isac_status_string(isac_status status) {
  switch (status) {
    case ISAC_OK: return "ok";
    case ISAC_ERR_UNAVAILABLE: return "unavailable";
    case ISAC_ERR_UNKNOWN: return "unknown error";
    default:
      if (status > 0 && status <= ISAC_ERR_INFEASIBLE)
        return isac::to_string(static_cast<isac::ErrorCode>(status));
      return "unrecognized status";
  }
}

const char* isac_last_error(void) { return g_last_error.c_str(); }

isac_status isac_scenario_create(int n_tx, int n_users, double power_budget,
                                 const double* sinr_thresholds, double noise_power,
                                 isac_scenario** out) {
  if (!out) return record(ISAC_ERR_INVALID_ARGUMENT, "isac_scenario_create: out is NULL");
  *out = nullptr;
  if (!sinr_thresholds)
    return record(ISAC_ERR_INVALID_ARGUMENT, "isac_scenario_create: thresholds are NULL");
  return guarded([&] {
    auto s = std::make_unique<isac_scenario>();
    s->scenario.n_tx = n_tx;
    s->scenario.n_users = n_users;
    s->scenario.power_budget = power_budget;
    s->scenario.noise_power = noise_power;
    s->scenario.sinr_thresholds = isac::RVector(std::max(n_users, 0));
    for (int k = 0; k < n_users; ++k) s->scenario.sinr_thresholds(k) = sinr_thresholds[k];
    s->scenario.validate();
    *out = s.release();
    return ISAC_OK;
  });
}

void isac_scenario_destroy(isac_scenario* scenario) { delete scenario; }

isac_status isac_scenario_generate_channel(isac_scenario* scenario, uint64_t seed) {
  if (!scenario) return record(ISAC_ERR_INVALID_ARGUMENT, "scenario is NULL");
  return guarded([&] {
    scenario->channel = isac::generate_channel(scenario->scenario, seed);
    scenario->has_channel = true;
    return ISAC_OK;
  });
}

isac_status isac_scenario_set_channel(isac_scenario* scenario, const double* h) {
  if (!scenario || !h) return record(ISAC_ERR_INVALID_ARGUMENT, "scenario or channel is NULL");
  const int nt = scenario->scenario.n_tx;
  const int k = scenario->scenario.n_users;
  isac::CMatrix m(nt, k);
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < nt; ++i) {
      const auto idx = 2 * (j * nt + i);
      if (!std::isfinite(h[idx]) || !std::isfinite(h[idx + 1]))
        return record(ISAC_ERR_INVALID_ARGUMENT, "channel has a non-finite entry");
      m(i, j) = isac::cplx(h[idx], h[idx + 1]);
    }
  scenario->channel.h = std::move(m);
  scenario->has_channel = true;
  return ISAC_OK;
}

isac_status isac_scenario_get_channel(const isac_scenario* scenario, double* h) {
  if (!scenario || !h) return record(ISAC_ERR_INVALID_ARGUMENT, "scenario or output is NULL");
  if (!scenario->has_channel) return record(ISAC_ERR_UNAVAILABLE, "no channel set");
  write_complex(scenario->channel.h, h);
  return ISAC_OK;
}

isac_status isac_feasibility(const isac_scenario* scenario, double* p_low, int* feasible) {
  if (!scenario) return record(ISAC_ERR_INVALID_ARGUMENT, "scenario is NULL");
  if (!scenario->has_channel) return record(ISAC_ERR_UNAVAILABLE, "no channel set");
  return guarded([&] {
    const auto rep = isac::compute_p_low(scenario->scenario, scenario->channel);
    if (p_low) *p_low = rep.p_low;
    if (feasible) *feasible = rep.feasible ? 1 : 0;
    return ISAC_OK;
  });
}

void isac_solver_options_default(isac_solver_options* options) {
  if (!options) return;
  const isac::SolverConfig d;
  options->tau = d.tau;
  options->delta = d.delta;
  options->tol_violation = d.tol_violation;
  options->max_iterations = d.max_iterations;
  options->full_check = 0;
  options->flip_z_sign = 0;
}

isac_status isac_solve(const isac_scenario* scenario, const isac_solver_options* options,
                       isac_result** out) {
  if (!out) return record(ISAC_ERR_INVALID_ARGUMENT, "isac_solve: out is NULL");
  *out = nullptr;
  if (!scenario) return record(ISAC_ERR_INVALID_ARGUMENT, "scenario is NULL");
  if (!scenario->has_channel) return record(ISAC_ERR_UNAVAILABLE, "no channel set");
  isac_solver_options opt;
  isac_solver_options_default(&opt);
  if (options) opt = *options;
  return guarded([&] {
    isac::PipelineOptions po;
    po.solver.tau = opt.tau;
    po.solver.delta = opt.delta;
    po.solver.tol_violation = opt.tol_violation;
    po.solver.max_iterations = opt.max_iterations;
    po.solver.z_sign = opt.flip_z_sign ? isac::ZStepSign::Flipped : isac::ZStepSign::Derived;
    po.full_check = opt.full_check != 0;
    auto r = std::make_unique<isac_result>();
    r->scenario = scenario->scenario;
    r->result = isac::run_pipeline(scenario->scenario, scenario->channel, po);
    const bool feasible = r->result.feasibility.feasible;
    *out = r.release();
    if (!feasible)
      return record(ISAC_ERR_INFEASIBLE, "power budget is below the minimum required power");
    return ISAC_OK;
  });
}

void isac_result_destroy(isac_result* result) { delete result; }

int isac_result_feasible(const isac_result* r) {
  return r && r->result.feasibility.feasible ? 1 : 0;
}

double isac_result_p_low(const isac_result* r) { return r ? r->result.feasibility.p_low : kNaN; }

int isac_result_degenerate(const isac_result* r) { return r && r->result.degenerate ? 1 : 0; }

int isac_result_converged(const isac_result* r) {
  if (!has_solution(r)) return 0;
  if (!r->result.solve) return 1;
  return r->result.solve->status == isac::SolveStatus::Converged ? 1 : 0;
}

long isac_result_iterations(const isac_result* r) {
  return r && r->result.solve ? r->result.solve->iterations : 0;
}

double isac_result_final_violation(const isac_result* r) {
  if (!r) return kNaN;
  return r->result.solve ? r->result.solve->final_violation.combined : 0.0;
}

double isac_result_objective(const isac_result* r) {
  return has_solution(r) ? r->result.solution->objective : kNaN;
}

double isac_result_reduced_objective(const isac_result* r) {
  return has_solution(r) ? r->result.reduced_objective : kNaN;
}

double isac_result_setup_seconds(const isac_result* r) { return r ? r->result.setup_seconds : kNaN; }

double isac_result_iter_seconds(const isac_result* r) { return r ? r->result.iter_seconds : kNaN; }

double isac_result_min_sinr_margin(const isac_result* r) {
  if (!has_solution(r)) return kNaN;
  return (r->result.solution->sinr.array() / r->scenario.sinr_thresholds.array() - 1.0).minCoeff();
}

const char* isac_result_origin(const isac_result* r) {
  return has_solution(r) ? isac::to_string(r->result.solution->origin) : "none";
}

isac_status isac_result_sinr(const isac_result* r, double* sinr) {
  if (!r || !sinr) return record(ISAC_ERR_INVALID_ARGUMENT, "result or output is NULL");
  if (!has_solution(r)) return record(ISAC_ERR_UNAVAILABLE, "no solution (infeasible)");
  const auto& s = r->result.solution->sinr;
  for (Eigen::Index k = 0; k < s.size(); ++k) sinr[k] = s(k);
  return ISAC_OK;
}

isac_status isac_result_beamformers(const isac_result* r, double* w) {
  if (!r || !w) return record(ISAC_ERR_INVALID_ARGUMENT, "result or output is NULL");
  if (!has_solution(r)) return record(ISAC_ERR_UNAVAILABLE, "no solution (infeasible)");
  write_complex(r->result.solution->w, w);
  return ISAC_OK;
}

isac_status isac_result_diagnostics(const isac_result* r, isac_diagnostics* out) {
  if (!r || !out) return record(ISAC_ERR_INVALID_ARGUMENT, "result or output is NULL");
  if (!r->result.diagnostics)
    return record(ISAC_ERR_UNAVAILABLE, "diagnostics need a feasible solve with full_check");
  const auto& d = *r->result.diagnostics;
  out->min_sinr_margin = d.min_sinr_margin;
  out->power_residual = d.power_residual;
  out->sensing_min_eig = d.sensing_min_eig;
  out->decomposition_gap = d.decomposition_gap;
  out->null_leakage = d.null_leakage;
  out->structure_gap = d.structure_gap;
  out->objective_full = d.objective_full;
  out->objective_gap = d.objective_gap;
  out->rank_one_gap = d.rank_one_gap;
  return ISAC_OK;
}

isac_status isac_result_json(const isac_result* r, char** out) {
  if (!r || !out) return record(ISAC_ERR_INVALID_ARGUMENT, "result or output is NULL");
  *out = nullptr;
  return guarded([&] {
    const std::string doc = isac::solution_json(r->result, r->scenario);
    char* buf = static_cast<char*>(std::malloc(doc.size() + 1));
    if (!buf) return record(ISAC_ERR_UNKNOWN, "out of memory");
    std::memcpy(buf, doc.c_str(), doc.size() + 1);
    *out = buf;
    return ISAC_OK;
  });
}

void isac_string_free(char* s) { std::free(s); }

isac_status isac_verify(int full, int flip_z_sign, isac_verify_report** out) {
  if (!out) return record(ISAC_ERR_INVALID_ARGUMENT, "isac_verify: out is NULL");
  *out = nullptr;
  return guarded([&] {
    auto rep = std::make_unique<isac_verify_report>();
    rep->checks = isac::run_verification_suite(
        full ? isac::VerifyLevel::Full : isac::VerifyLevel::Quick,
        flip_z_sign ? isac::ZStepSign::Flipped : isac::ZStepSign::Derived);
    *out = rep.release();
    return ISAC_OK;
  });
}

void isac_verify_destroy(isac_verify_report* report) { delete report; }

int isac_verify_count(const isac_verify_report* report) {
  return report ? static_cast<int>(report->checks.size()) : 0;
}

isac_status isac_verify_item(const isac_verify_report* report, int index, const char** name,
                             double* measured, double* threshold, int* passed) {
  if (!report || index < 0 || index >= isac_verify_count(report))
    return record(ISAC_ERR_INVALID_ARGUMENT, "isac_verify_item: index out of range");
  const auto& c = report->checks[static_cast<std::size_t>(index)];
  if (name) *name = c.name.c_str();
  if (measured) *measured = c.measured;
  if (threshold) *threshold = c.threshold;
  if (passed) *passed = c.passed ? 1 : 0;
  return ISAC_OK;
}

}  // extern "C"
