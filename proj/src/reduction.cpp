#include "isac/reduction.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace isac {

double ReducedInstance::q_form(int k, const CMatrix& m) const {
  return (h_tilde.col(k).adjoint() * m * h_tilde.col(k))(0).real();
}

CVector ReducedInstance::q_forms(const CMatrix& m) const {
  // diag(H~^H M H~)
  return (h_tilde.adjoint() * m).cwiseProduct(h_tilde.transpose()).rowwise().sum();
}

ReducedInstance build_reduced(const Scenario& scenario, const ChannelMatrix& channel) {
  scenario.validate();
  if (channel.n_tx() != scenario.n_tx || channel.n_users() != scenario.n_users)
    fail(ErrorCode::DimensionMismatch, "build_reduced: channel does not match scenario");

  const auto svd = compact_svd(channel.h);
  ReducedInstance r;
  r.u_tilde = svd.left_basis;
  r.h_tilde = r.u_tilde.adjoint() * channel.h;
  r.n_tx = scenario.n_tx;
  r.n_users = scenario.n_users;
  r.power_budget = scenario.power_budget;
  r.noise_power = scenario.noise_power;
  r.rho = (1.0 + scenario.sinr_thresholds.array().inverse()).matrix();
  r.channel_norms_sq = channel.h.colwise().squaredNorm().transpose();
  r.gram_abs_sq = (r.h_tilde.adjoint() * r.h_tilde).cwiseAbs2();
  r.q_tilde.reserve(r.n_users);
  for (int k = 0; k < r.n_users; ++k)
    r.q_tilde.push_back(HermitianMatrix::outer(r.h_tilde.col(k)));
  return r;
}

DualPrecompute precompute_dual(const ReducedInstance& instance, double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta))
    fail(ErrorCode::InvalidArgument, "precompute_dual: delta must be > 0");
  const int k = instance.n_users;
  DualPrecompute d;
  d.delta = delta;
  d.alpha = k + 1 + delta;
  d.beta = delta + 2.0;
  d.kappa = 1.0 / (d.alpha * d.beta - 1.0);

  const RVector& rho = instance.rho;
  d.theta1 = (d.kappa * (1.0 - d.beta * rho.array() - d.beta)).matrix();
  d.theta2 = (d.kappa * (d.alpha - rho.array() - 1.0)).matrix();

  const RVector one = RVector::Ones(k);
  const RVector rp1 = rho + one;
  const RMatrix p = d.beta * rp1 * rp1.transpose() - rp1 * one.transpose() -
                    one * rp1.transpose() + d.alpha * one * one.transpose();
  RMatrix inner = one * one.transpose() - d.kappa * p;
  inner.diagonal() += rho.cwiseProduct(rho);
  d.l_matrix = instance.gram_abs_sq.cwiseProduct(inner);
  d.l_matrix.diagonal().array() += delta;
  d.l_matrix = 0.5 * (d.l_matrix + d.l_matrix.transpose());

  d.l_factor.compute(d.l_matrix);
  if (d.l_factor.info() != Eigen::Success) {
    std::ostringstream os;
    os << "precompute_dual: L is not positive definite for delta=" << delta
       << "; try a larger delta";
    fail(ErrorCode::IllConditionedDual, os.str());
  }
  const RMatrix lf = d.l_factor.matrixL();
  if ((lf.diagonal().array() <= 0.0).any())
    fail(ErrorCode::IllConditionedDual, "precompute_dual: non-positive Cholesky pivot");
  return d;
}

DegeneracyVerdict check_degenerate(const Scenario& scenario, const ChannelMatrix& channel) {
  scenario.validate();
  const int k = scenario.n_users;
  const int nt = scenario.n_tx;
  const double pt = scenario.power_budget;
  const double noise = scenario.noise_power;
  if (channel.n_tx() != nt || channel.n_users() != k)
    fail(ErrorCode::DimensionMismatch, "check_degenerate: channel does not match scenario");

  const RVector rho = (1.0 + scenario.sinr_thresholds.array().inverse()).matrix();
  const RVector norms = channel.h.colwise().squaredNorm().transpose();
  // tr(Q_k Q_l) = |h_k^H h_l|^2
  const RMatrix cross = (channel.h.adjoint() * channel.h).cwiseAbs2();
  const double inf = std::numeric_limits<double>::infinity();

  DegeneracyVerdict v;
  v.lhs.resize(k);
  for (int l = 0; l < k; ++l) {
    double sum = 0.0;
    for (int j = 0; j < k; ++j) {
      if (cross(j, l) < 1e-14 * norms(j) * norms(l)) {
        sum = inf;
        break;
      }
      sum += (pt * norms(j) + noise * nt) / (rho(j) * cross(j, l));
    }
    v.lhs(l) = norms(l) * sum;
  }
  v.degenerate_condition_holds = (v.lhs.array() < pt).all();
  if (!v.degenerate_condition_holds) return v;

  Eigen::Index anchor = 0;
  v.lhs.minCoeff(&anchor);  // largest slack pt - lhs
  const int l = static_cast<int>(anchor);

  DegenerateWitness w;
  w.anchor_user = l;
  w.gains.resize(k);
  w.beamformers.resize(nt, k);
  const HermitianMatrix ql = HermitianMatrix::outer(channel.h.col(l));
  HermitianMatrix sensing = HermitianMatrix::identity(nt) * (pt / nt);
  for (int j = 0; j < k; ++j) {
    w.gains(j) = (pt * norms(j) + noise * nt) / (rho(j) * nt * cross(j, l));
    w.beamformers.col(j) = std::sqrt(w.gains(j)) * channel.h.col(l);
    w.covariances.push_back(ql * w.gains(j));
    sensing = sensing - ql * w.gains(j);
  }
  w.covariances.push_back(sensing);

  // Self-check of the construction: power, PSD, SINR equalities.
  double total = 0.0;
  for (const auto& c : w.covariances) total += c.trace();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(sensing.matrix(), Eigen::EigenvaluesOnly);
  const double min_eig = es.eigenvalues().minCoeff();
  double worst_sinr = 0.0;
  for (int j = 0; j < k; ++j) {
    const double lhs = rho(j) * w.gains(j) * cross(j, l) - (pt / nt) * norms(j);
    worst_sinr = std::max(worst_sinr, std::abs(lhs - noise) / noise);
  }
  if (std::abs(total - pt) > 1e-8 * pt || min_eig < -1e-8 * pt / nt || worst_sinr > 1e-8) {
    std::ostringstream os;
    os << "check_degenerate: witness failed self-check (power gap "
       << std::abs(total - pt) << ", min eig " << min_eig << ", SINR gap "
       << worst_sinr << ")";
    fail(ErrorCode::InternalConsistency, os.str());
  }
  v.witness = std::move(w);
  return v;
}

DualStep structured_dual_solve(const ReducedInstance& instance, const DualPrecompute& dual,
                               const CVector& r, const CMatrix& r1, const CMatrix& r2,
                               bool hermitian_input) {
  const CMatrix& ht = instance.h_tilde;
  CVector rhs = r + dual.theta1.cast<cplx>().cwiseProduct(instance.q_forms(r1)) +
                      dual.theta2.cast<cplx>().cwiseProduct(instance.q_forms(r2));
  if (hermitian_input) rhs = rhs.real().cast<cplx>();
  // L is real, so the real and imaginary parts solve independently.
  const RVector re = dual.l_factor.solve(RVector(rhs.real()));
  const RVector im = dual.l_factor.solve(RVector(rhs.imag()));
  DualStep out;
  out.mu = re.cast<cplx>() + cplx(0.0, 1.0) * im.cast<cplx>();
  const double kap = dual.kappa;
  out.omega1 = kap * dual.beta * r1 + kap * r2 +
               ht * dual.theta1.cast<cplx>().cwiseProduct(out.mu).asDiagonal() * ht.adjoint();
  out.omega2 = kap * r1 + kap * dual.alpha * r2 +
               ht * dual.theta2.cast<cplx>().cwiseProduct(out.mu).asDiagonal() * ht.adjoint();
  return out;
}

}  // namespace isac
