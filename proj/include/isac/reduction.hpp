#pragma once

#include <optional>
#include <vector>

#include "isac/scenario.hpp"

namespace isac {

/**
 * K-dimensional form of the CRB problem.
 *
 * Beamforming covariances live in the range of H, so W_k = U X_k U^H with U an
 * orthonormal basis of R(H) and X_k a K x K Hermitian block. Everything the
 * solver touches per iteration is K x K; only `u_tilde` carries Nt.
 */
struct ReducedInstance {
  CMatrix u_tilde;                     // Nt x K
  CMatrix h_tilde;                     // K x K, U^H H
  std::vector<HermitianMatrix> q_tilde;  // (H~ e_k)(H~ e_k)^H
  RVector rho;                         // 1 + 1/Gamma_k
  RVector channel_norms_sq;            // ||h_k||^2
  RMatrix gram_abs_sq;                 // |H^H H|^2 elementwise
  double power_budget = 0.0;
  double noise_power = 0.0;
  int n_tx = 0;
  int n_users = 0;

  int null_dim() const { return n_tx - n_users; }
  // tr(Q~_k M) = h~_k^H M h~_k
  double q_form(int k, const CMatrix& m) const;
  // [h~_k^H M h~_k]_k (complex; imaginary parts are rounding noise for Hermitian M)
  CVector q_forms(const CMatrix& m) const;
};

ReducedInstance build_reduced(const Scenario& scenario, const ChannelMatrix& channel);

/// Constants of the structured inverse of D D^H + delta I. Built once per instance.
struct DualPrecompute {
  double delta = 0.0;
  double kappa = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  RVector theta1;
  RVector theta2;
  RMatrix l_matrix;
  Eigen::LLT<RMatrix> l_factor;
};

DualPrecompute precompute_dual(const ReducedInstance& instance, double delta);

/// (D D^H + delta I)^{-1} applied to the stacked vector (r; vec R1; vec R2).
/// Complex-linear, so it holds for arbitrary (not just Hermitian) inputs.
/// With `hermitian_input` the residuals are taken to be Hermitian (r real), and
/// the rounding noise in the imaginary part of the reduced right-hand side is
/// dropped so that mu stays real.
struct DualStep {
  CVector mu;
  CMatrix omega1;
  CMatrix omega2;
};
DualStep structured_dual_solve(const ReducedInstance& instance, const DualPrecompute& dual,
                               const CVector& r, const CMatrix& r1, const CMatrix& r2,
                               bool hermitian_input = false);

/// Closed-form optimum used when every summand of the degeneracy test stays
/// below the power budget.
struct DegenerateWitness {
  int anchor_user = 0;            // l
  RVector gains;                  // a_k
  CMatrix beamformers;            // Nt x K, column k = sqrt(a_k) h_l
  std::vector<HermitianMatrix> covariances;  // W_1..W_K, W_{K+1}; Nt x Nt
};

struct DegeneracyVerdict {
  bool degenerate_condition_holds = false;
  RVector lhs;  // per anchor l; +inf where some |h_k^H h_l|^2 vanishes
  std::optional<DegenerateWitness> witness;
};

DegeneracyVerdict check_degenerate(const Scenario& scenario, const ChannelMatrix& channel);

}  // namespace isac
