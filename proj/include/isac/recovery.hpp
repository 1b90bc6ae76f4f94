#pragma once

#include <vector>

#include "isac/reduction.hpp"

namespace isac {

enum class SolutionOrigin {
  Extracted,          // closed-form rank-one extraction from the reduced optimum
  Realigned,          // rank-one split of the same optimal sum, sensing kept in N(H^H)
  DegenerateWitness,  // isotropic closed form
};

/**
 * Full-space beamforming solution, held in factored form.
 *
 * The sensing covariance is U S U^H + theta (I - U U^H) with U the range basis
 * of H; nothing Nt x Nt is stored. Use sensing_cov() / full_cov() to
 * materialize the dense matrices.
 */
struct BeamformingSolution {
  CMatrix w;                // Nt x K, column k = w_k
  CMatrix range_basis;      // Nt x K
  HermitianMatrix sensing_range;  // S, K x K
  double theta = 0.0;       // power per null-space direction
  double power_budget = 0.0;
  double objective = 0.0;   // tr(R_W^{-1})
  RVector sinr;
  SolutionOrigin origin = SolutionOrigin::Extracted;
};

HermitianMatrix sensing_cov(const BeamformingSolution& sol);
HermitianMatrix full_cov(const BeamformingSolution& sol);

/**
 * w_k = U X_k h~_k / sqrt(h~_k^H X_k h~_k), sensing block S = sum_k (X_k - v_k v_k^H)
 * and theta = (P_T - sum_k tr X_k) / (Nt - K).
 *
 * When the blocks X_k are not rank-one, S is nonzero and the sensing
 * covariance leaks into R(H). In that case the same sum T = sum_k X_k is split
 * again as T^{1/2} u_k u_k^H T^{1/2} with u_k the columns of a unitary matrix
 * chosen to keep every SINR constraint; the objective depends only on T and
 * theta, so the result is equally optimal but has S = 0. The realigned split is
 * used only if it satisfies every constraint.
 */
BeamformingSolution extract_rank_one(const std::vector<HermitianMatrix>& x_star,
                                     const ReducedInstance& instance,
                                     bool allow_realign = true);

/// Solution from the isotropic closed form of check_degenerate().
BeamformingSolution from_witness(const DegenerateWitness& witness, const ReducedInstance& instance);

/// Eigenvalue square root F with F F^H = cov; one column per retained eigenvalue.
CMatrix sensing_factor(const HermitianMatrix& cov);

struct SolutionDiagnostics {
  RVector sinr;
  double min_sinr_margin = 0.0;   // min_k sinr_k / Gamma_k - 1
  double power_residual = 0.0;    // |tr R_W - P_T| / P_T
  double sensing_min_eig = 0.0;   // lambda_min(W_{K+1}) / (tr W_{K+1} / Nt)
  double decomposition_gap = 0.0; // ||R_W - sum w w^H - W_{K+1}||_F / ||R_W||_F
  double null_leakage = 0.0;      // max|H^H W_{K+1}| / (||H||_F ||W_{K+1}||_F)
  double structure_gap = 0.0;     // ||W_{K+1} - theta P_C||_F / ||theta P_C||_F
  double theta = 0.0;             // (P_T - sum ||w_k||^2) / (Nt - K)
  double objective_full = 0.0;    // dense tr(R_W^{-1})
  double objective_gap = 0.0;     // relative to the solution's own objective
  double rank_one_gap = 0.0;      // max_k lambda_2 / lambda_1 of w_k w_k^H
};

/// Dense, full-space diagnostics (O(Nt^3)).
SolutionDiagnostics verify_solution(const BeamformingSolution& sol, const Scenario& scenario,
                                    const ChannelMatrix& channel);

}  // namespace isac
