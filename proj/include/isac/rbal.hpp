#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "isac/reduction.hpp"

namespace isac {

// Sign applied to Omega_2 when forming the Z prox point. `Derived` is
// Z + tau*Omega_2, which is what u - tau*D^H lambda expands to. `Flipped`
// exists for negative-control checks only.
enum class ZStepSign { Derived, Flipped };

struct SolverConfig {
  double tau = 0.0;  // <= 0 selects default_tau()
  double delta = 1e-4;
  double tol_violation = 1e-9;
  long max_iterations = 200'000;
  long log_every = 0;  // trace sampling period; 0 disables the trace
  ZStepSign z_sign = ZStepSign::Derived;
};

struct SolverState {
  std::vector<HermitianMatrix> x;
  HermitianMatrix y;
  HermitianMatrix z;
  std::vector<HermitianMatrix> x_prev;
  HermitianMatrix y_prev;
  HermitianMatrix z_prev;
  RVector mu;
  HermitianMatrix omega1;
  HermitianMatrix omega2;
  long iteration = 0;
};

/// Residuals of the split equality constraints at the current iterate.
struct Violation {
  double sinr = 0.0;      // ||r||, r_k = rho_k tr(Q~_k X_k) - tr(Q~_k Y) - noise
  double split_xy = 0.0;  // ||sum X_k - Y||_F
  double split_yz = 0.0;  // ||Y - Z||_F
  double combined = 0.0;  // sqrt of the sum of squares of the above
};

enum class SolveStatus { Converged, IterationCapReached };

struct TracePoint {
  long iteration = 0;
  double violation = 0.0;
  double objective = 0.0;
};

struct SolveReport {
  SolveStatus status = SolveStatus::IterationCapReached;
  long iterations = 0;
  Violation final_violation;
  double objective = 0.0;
  double tau = 0.0;
  double iter_seconds = 0.0;
  std::vector<TracePoint> trace;
};

/// Projection of each block onto the PSD cone with a shared water level so
/// that sum_k tr(X_k) <= power_budget.
std::vector<HermitianMatrix> prox_x(std::span<const HermitianMatrix> x_tilde,
                                    double power_budget);
/// Returns the water level gamma found by prox_x (exposed for tests).
double prox_x_water_level(std::span<const RVector> eigenvalues, double power_budget);

/// prox of tau * tr(Y^{-1}).
HermitianMatrix prox_y(const HermitianMatrix& y_tilde, double tau);

struct ProxZResult {
  HermitianMatrix z;
  double shift = 0.0;  // lambda
};

/// prox of tau * (Nt-K)^2 / (P_T - tr Z) over PSD Z.
ProxZResult prox_z_detail(const HermitianMatrix& z_tilde, double tau,
                          double power_budget, int n_tx, int n_users);
HermitianMatrix prox_z(const HermitianMatrix& z_tilde, double tau,
                       double power_budget, int n_tx, int n_users);

/// Isotropic start: X_k = p0/K^2 I with p0 = min(P_T, 2 p_low), Y = Z = sum X_k,
/// zero duals.
SolverState initial_state(const ReducedInstance& instance, double p_low);

double default_tau(const ReducedInstance& instance);

Violation constraint_violation(const SolverState& state, const ReducedInstance& instance);

/// tr(Y^{-1}) + (Nt-K)^2 / (P_T - tr Z)
double reduced_objective(const SolverState& state, const ReducedInstance& instance);

/// One R-BAL sweep. `config.tau` must be positive.
SolverState iterate(const SolverState& state, const ReducedInstance& instance,
                    const DualPrecompute& dual, const SolverConfig& config);

/**
 * Runs iterate() until the combined violation at the current iterate is at
 * most `tol_violation` or the iteration cap is hit. Without `init` the
 * isotropic start is used.
 */
std::pair<SolverState, SolveReport> solve(const ReducedInstance& instance,
                                          const DualPrecompute& dual,
                                          const SolverConfig& config,
                                          std::optional<SolverState> init = std::nullopt);

}  // namespace isac
