#include "isac/feasibility.hpp"

#include <cmath>
#include <sstream>

namespace isac {

namespace {

constexpr double kRelativeStop = 1e-12;
constexpr int kMaxIterations = 10'000;
constexpr double kBoundaryMargin = 1e-9;

RVector fixed_point_map(const CMatrix& gram, const RVector& lambdas,
                        const RVector& rho, double noise) {
  const auto k = gram.rows();
  CMatrix m = gram;
  for (Eigen::Index i = 0; i < k; ++i)
    m += (lambdas(i) / noise) * gram.col(i) * gram.col(i).adjoint();
  Eigen::LLT<CMatrix> llt(m);
  if (llt.info() != Eigen::Success)
    fail(ErrorCode::RankDeficientChannel, "compute_p_low: H^H H is not positive definite");
  const CMatrix sol = llt.solve(gram);
  RVector out(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const double q = (gram.col(i).adjoint() * sol.col(i))(0).real();
    out(i) = noise / (rho(i) * q);
  }
  return out;
}

}  // namespace

FeasibilityReport compute_p_low(const Scenario& scenario, const ChannelMatrix& channel) {
  scenario.validate();
  if (channel.n_tx() != scenario.n_tx || channel.n_users() != scenario.n_users)
    fail(ErrorCode::DimensionMismatch, "compute_p_low: channel does not match scenario");
  compact_svd(channel.h);  // rank check only
  return compute_p_low_from_gram(channel.h.adjoint() * channel.h, scenario.sinr_thresholds,
                                 scenario.noise_power, scenario.power_budget);
}

FeasibilityReport compute_p_low_from_gram(const CMatrix& gram, const RVector& sinr_thresholds,
                                          double noise, double power_budget) {
  if (gram.rows() != gram.cols() || gram.rows() != sinr_thresholds.size())
    fail(ErrorCode::DimensionMismatch, "compute_p_low: Gram matrix and thresholds disagree");
  const RVector rho = (1.0 + sinr_thresholds.array().inverse()).matrix();

  FeasibilityReport rep;
  RVector lambdas = RVector::Zero(gram.rows());
  double change = 1.0;
  int it = 0;
  while (it < kMaxIterations) {
    const RVector next = fixed_point_map(gram, lambdas, rho, noise);
    ++it;
    change = ((next - lambdas).array().abs() / next.array()).maxCoeff();
    lambdas = next;
    if (!lambdas.allFinite())
      fail(ErrorCode::FixedPointDiverged, "compute_p_low: non-finite iterate");
    if (change <= kRelativeStop) break;
  }
  if (change > kRelativeStop) {
    std::ostringstream os;
    os << "compute_p_low: no convergence after " << kMaxIterations
       << " iterations (relative change " << change << ")";
    fail(ErrorCode::FixedPointDiverged, os.str());
  }

  const RVector again = fixed_point_map(gram, lambdas, rho, noise);
  rep.residual = ((again - lambdas).array().abs() / lambdas.array()).maxCoeff();
  rep.lambdas = lambdas;
  rep.p_low = lambdas.sum();
  rep.iterations = it;
  rep.feasible = power_budget >= (1.0 - kBoundaryMargin) * rep.p_low;
  rep.near_boundary =
      std::abs(power_budget - rep.p_low) <= 1e-6 * rep.p_low;
  return rep;
}

MinPowerPoint min_power_beamformers(const Scenario& scenario, const ChannelMatrix& channel,
                                    const FeasibilityReport& report) {
  const CMatrix& h = channel.h;
  const auto k = h.cols();
  if (report.lambdas.size() != k)
    fail(ErrorCode::DimensionMismatch, "min_power_beamformers: report does not match channel");
  const double noise = scenario.noise_power;

  // (noise I + H Lambda H^H)^{-1} H = H (noise I + Lambda G)^{-1}
  const CMatrix gram = h.adjoint() * h;
  CMatrix inner = report.lambdas.cast<cplx>().asDiagonal() * gram;
  inner.diagonal().array() += noise;
  CMatrix dirs = h * inner.partialPivLu().inverse();
  for (Eigen::Index j = 0; j < k; ++j) dirs.col(j).normalize();

  const RMatrix gains = (h.adjoint() * dirs).cwiseAbs2();  // |h_k^H d_j|^2
  RMatrix a = -gains;
  for (Eigen::Index j = 0; j < k; ++j)
    a(j, j) = gains(j, j) / scenario.sinr_thresholds(j);
  const RVector p = a.partialPivLu().solve(RVector::Constant(k, noise));
  if (!p.allFinite() || (p.array() < 0.0).any())
    fail(ErrorCode::NumericalFailure, "min_power_beamformers: downlink powers are not positive");

  MinPowerPoint out;
  out.powers = p;
  out.total_power = p.sum();
  out.w = dirs * p.cwiseSqrt().cast<cplx>().asDiagonal();
  return out;
}

}  // namespace isac
