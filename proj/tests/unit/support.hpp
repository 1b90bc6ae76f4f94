#pragma once

#include <cstdint>
#include <random>

#include "isac/scenario.hpp"

namespace testing {

inline isac::CMatrix random_complex(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, std::sqrt(0.5));
  isac::CMatrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = isac::cplx(n(rng), n(rng));
  return m;
}

inline isac::HermitianMatrix random_hermitian(Eigen::Index dim, std::uint64_t seed) {
  const isac::CMatrix a = random_complex(dim, dim, seed);
  return isac::HermitianMatrix::hermitian_part(a + a.adjoint());
}

// The single-user example used throughout: Nt = 4, h = (1, 1, 0, 0), ||h||^2 = 2,
// Gamma = 10, noise 1. x_min = 5.
inline isac::Scenario k1_scenario(double power_budget) {
  return isac::make_scenario(4, 1, power_budget, 10.0, 1.0);
}

inline isac::ChannelMatrix k1_channel() {
  isac::ChannelMatrix c;
  c.h = isac::CMatrix::Zero(4, 1);
  c.h(0, 0) = 1.0;
  c.h(1, 0) = 1.0;
  return c;
}

// Mutually orthogonal user channels with the given squared norms, randomly
// rotated so that no coordinate structure is left.
inline isac::ChannelMatrix orthogonal_channel(int n_tx, const isac::RVector& norms_sq,
                                              std::uint64_t seed) {
  const Eigen::HouseholderQR<isac::CMatrix> qr(random_complex(n_tx, n_tx, seed));
  const isac::CMatrix q = qr.householderQ();
  isac::ChannelMatrix c;
  c.h = q.leftCols(norms_sq.size()) * norms_sq.cwiseSqrt().cast<isac::cplx>().asDiagonal();
  return c;
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace testing
