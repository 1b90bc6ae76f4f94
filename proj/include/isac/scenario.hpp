#pragma once

#include <cstdint>
#include <vector>

#include "isac/numerics.hpp"

namespace isac {

/// Problem instance in linear units (powers in mW, thresholds as ratios).
struct Scenario {
  int n_tx = 0;
  int n_users = 0;
  double power_budget = 0.0;
  RVector sinr_thresholds;
  double noise_power = 0.0;

  /// Throws InvalidArgument unless n_tx > n_users > 0 and every power and
  /// threshold is strictly positive and finite.
  void validate() const;
};

/// Builds a scenario with the same threshold for every user.
Scenario make_scenario(int n_tx, int n_users, double power_budget,
                       double sinr_threshold, double noise_power);

/// Channel H = [h_1, ..., h_K], one column per user.
struct ChannelMatrix {
  CMatrix h;

  int n_tx() const { return static_cast<int>(h.rows()); }
  int n_users() const { return static_cast<int>(h.cols()); }
};

/// i.i.d. CN(0, 1) entries, filled column-major with the real part drawn
/// before the imaginary part. Bit-identical for a given (dims, seed).
ChannelMatrix generate_channel(const Scenario& scenario, std::uint64_t seed);

double dbm_to_linear(double x_dbm);
double linear_to_dbm(double x_linear);

/**
 * Per-user SINR |h_k^H w_k|^2 / (sum_{i!=k} |h_k^H w_i|^2 + h_k^H C h_k + noise)
 * for beamformers stored as the columns of `w` and sensing covariance C.
 */
RVector evaluate_sinr(const ChannelMatrix& channel, const CMatrix& w,
                      const HermitianMatrix& sensing_cov, double noise);

/// tr(cov^{-1}); throws SingularCovariance if cov is not safely positive definite.
double evaluate_crb_objective(const HermitianMatrix& cov);

}  // namespace isac
