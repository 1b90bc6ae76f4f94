#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "isac/pipeline.hpp"

namespace isac {

/**
 * The constraint map of the reduced problem written out as a dense matrix.
 *
 * u = [vec X_1; ...; vec X_K; vec Y; vec Z] (column-major vec), and the rows are
 *   rho_k vec(Q~_k)^H vec X_k - vec(Q~_k)^H vec Y = noise   (K rows)
 *   sum_k vec X_k - vec Y = 0                               (K^2 rows)
 *   vec Y - vec Z = 0                                       (K^2 rows)
 */
struct DenseSystem {
  CMatrix d;  // (K + 2K^2) x (K^3 + 2K^2)
  CVector b;
};

DenseSystem assemble_dense_system(const ReducedInstance& instance);

/// max |M (D D^H + delta I) - I| where M is built column by column from
/// structured_dual_solve().
double dense_dual_inverse_check(const ReducedInstance& instance, const DualPrecompute& dual);

/// One step of u+ = prox(u - tau D^H lambda), lambda+ = lambda + (D D^H + delta I)^{-1}
/// (D(2u+ - u) - b) / tau with every object materialized.
SolverState reference_bal_step(const SolverState& state, const ReducedInstance& instance,
                               const DenseSystem& dense, double tau, double delta);

/// Largest ||a_i - b_i||_F / max(||a_i||_F, ||b_i||_F) over the blocks
/// X_1..X_K, Y, Z, mu, Omega_1, Omega_2 (0 when both blocks vanish).
double state_difference(const SolverState& a, const SolverState& b);

struct ScalarOptimum {
  double x_opt = 0.0;
  double objective = 0.0;
  bool degenerate = false;  // SINR constraint inactive
};

/// K = 1: minimize 1/x + (Nt-1)^2/(P_T - x) over Gamma noise/||h||^2 <= x < P_T by
/// golden-section search. Throws Infeasible when the interval is empty.
ScalarOptimum scalar_oracle_k1(const Scenario& scenario, const ChannelMatrix& channel);

struct KktReport {
  double omega = 0.0;
  RVector mu;
  double stationarity = 0.0;           // least-squares residual of Theta_k W_k = 0
  double complementary_slackness = 0.0;
  double dual_feasibility = 0.0;       // worst negative part of Theta_k and mu
  double primal_feasibility = 0.0;     // worst SINR shortfall or power excess, relative

  double worst() const;
};

/**
 * Fits KKT multipliers to a candidate covariance split and measures how far
 * it is from stationarity. omega comes from the null-space power theta as
 * 1/theta^2; mu is the least-squares solution of Theta_k w_k = 0 for k <= K
 * and Theta_{K+1} F = 0 for the sensing factor F. Residuals are relative to
 * ||R_W^{-2}||_2.
 */
KktReport kkt_residuals(const CMatrix& w, const HermitianMatrix& sensing, const Scenario& scenario,
                        const ChannelMatrix& channel);
KktReport kkt_residuals(const BeamformingSolution& sol, const Scenario& scenario,
                        const ChannelMatrix& channel);

/// Same beamformers, but the null-space sensing power is redistributed
/// unevenly (relative spread `strength`) with its trace unchanged. Stays
/// feasible, is not optimal.
HermitianMatrix unbalanced_sensing(const BeamformingSolution& sol, const ChannelMatrix& channel,
                                   double strength, std::uint64_t seed);

/**
 * Mixes the solution with `trials` random feasible points
 * (min-power beamformers, extra zero-forcing power, random null-space sensing)
 * at small weights and returns the largest relative objective decrease seen.
 * Non-positive for an optimum.
 */
double optimality_spot_check(const BeamformingSolution& sol, const Scenario& scenario,
                             const ChannelMatrix& channel, int trials, std::uint64_t seed);

enum class VerifyLevel { Quick, Full };

struct CheckResult {
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  bool passed = false;
};

/// The oracle suite behind `verify`. `z_sign` is applied to the structured
/// solver only, so Flipped makes the trajectory checks fail.
std::vector<CheckResult> run_verification_suite(VerifyLevel level,
                                                ZStepSign z_sign = ZStepSign::Derived);

}  // namespace isac
