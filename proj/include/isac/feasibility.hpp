#pragma once

#include "isac/scenario.hpp"

namespace isac {

struct FeasibilityReport {
  double p_low = 0.0;     // sum of lambdas, mW
  RVector lambdas;        // uplink-dual powers, one per user
  bool feasible = false;  // power_budget >= (1 - 1e-9) * p_low
  bool near_boundary = false;
  int iterations = 0;
  double residual = 0.0;  // max relative fixed-point residual at exit
};

/**
 * Minimum transmit power that meets every SINR threshold.
 *
 * Iterates the K x K uplink-dual fixed point
 *   lambda_k = noise / ((1 + 1/Gamma_k) g_k^H (G + sum_i lambda_i/noise g_i g_i^H)^{-1} g_k)
 * with G = H^H H and g_i = G e_i, starting at lambda = 0, until the largest
 * relative change drops to 1e-12 (cap 10'000 iterations, FixedPointDiverged
 * beyond that).
 */
FeasibilityReport compute_p_low(const Scenario& scenario, const ChannelMatrix& channel);

/// Same fixed point driven by the Gram matrix H^H H alone (which any
/// orthonormal change of basis of R(H) preserves).
FeasibilityReport compute_p_low_from_gram(const CMatrix& gram, const RVector& sinr_thresholds,
                                          double noise_power, double power_budget);

/// Beamformers that meet every SINR threshold with equality, using the
/// uplink-dual filters and the matching downlink powers; their total power is
/// p_low. Requires a report from compute_p_low on the same inputs.
struct MinPowerPoint {
  CMatrix w;        // Nt x K
  RVector powers;   // ||w_k||^2
  double total_power = 0.0;
};
MinPowerPoint min_power_beamformers(const Scenario& scenario, const ChannelMatrix& channel,
                                    const FeasibilityReport& report);

}  // namespace isac
