#include "isac/recovery.hpp"

#include <cmath>
#include <sstream>

namespace isac {

namespace {

constexpr double kDegenerateSignal = 1e-12;
constexpr double kLeakageTrigger = 1e-10;
constexpr double kSinrAcceptance = 1e-9;
constexpr int kRealignSweeps = 500;

HermitianMatrix psd_sqrt(const HermitianMatrix& m) {
  const auto e = hermitian_eig(m);
  return HermitianMatrix::from_eigen(e.vectors, e.values.cwiseMax(0.0).cwiseSqrt());
}

// SINRs from range coordinates: h_k^H w_j = h~_k^H v_j because h_k lies in R(U).
RVector reduced_sinr(const ReducedInstance& inst, const CMatrix& v, const HermitianMatrix& s) {
  const int k = inst.n_users;
  const CMatrix cross = inst.h_tilde.adjoint() * v;  // [h~_k^H v_j]
  const CVector leak = inst.q_forms(s.matrix());
  RVector out(k);
  for (int u = 0; u < k; ++u) {
    const double signal = std::norm(cross(u, u));
    const double total = cross.row(u).squaredNorm();
    out(u) = signal / (total - signal + leak(u).real() + inst.noise_power);
  }
  return out;
}

double reduced_crb(const HermitianMatrix& t, double theta, int null_dim) {
  if (!(theta > 0.0))
    fail(ErrorCode::SingularCovariance, "recovery: no power left for the null space");
  return evaluate_crb_objective(t) + null_dim / theta;
}

// Unitary U with |g_k^H u_k|^2 >= need_k, by reweighting the polar factor of
// G Diag(d) until every column is aligned enough. Returns false on failure.
bool realign(const CMatrix& g, const RVector& need, CMatrix& u) {
  const auto k = g.cols();
  RVector d = RVector::Ones(k);
  for (int sweep = 0; sweep < kRealignSweeps; ++sweep) {
    Eigen::JacobiSVD<CMatrix> svd(g * d.cast<cplx>().asDiagonal(),
                                  Eigen::ComputeFullU | Eigen::ComputeFullV);
    u = svd.matrixU() * svd.matrixV().adjoint();
    double worst = 0.0;
    RVector shortfall(k);
    for (Eigen::Index i = 0; i < k; ++i) {
      const double got = std::norm(g.col(i).dot(u.col(i)));
      shortfall(i) = std::max(0.0, 1.0 - got / need(i));
      worst = std::max(worst, shortfall(i));
    }
    if (worst <= 0.0) return true;
    d = (d.array() * (5.0 * shortfall.array()).exp()).matrix();
    d /= d.maxCoeff();
  }
  return false;
}

}  // namespace

HermitianMatrix sensing_cov(const BeamformingSolution& sol) {
  const CMatrix& u = sol.range_basis;
  const auto nt = u.rows();
  const CMatrix proj = CMatrix::Identity(nt, nt) - u * u.adjoint();
  return HermitianMatrix(u * sol.sensing_range.matrix() * u.adjoint() + sol.theta * proj);
}

HermitianMatrix full_cov(const BeamformingSolution& sol) {
  return HermitianMatrix(sol.w * sol.w.adjoint() + sensing_cov(sol).matrix());
}

BeamformingSolution extract_rank_one(const std::vector<HermitianMatrix>& x_star,
                                     const ReducedInstance& instance, bool allow_realign) {
  const int k = instance.n_users;
  if (static_cast<int>(x_star.size()) != k)
    fail(ErrorCode::DimensionMismatch, "extract_rank_one: need one block per user");

  CMatrix v(k, k);
  HermitianMatrix total = HermitianMatrix::zero(k);
  double used = 0.0;
  for (int u = 0; u < k; ++u) {
    const CMatrix& x = x_star[u].matrix();
    if (x.rows() != k) fail(ErrorCode::DimensionMismatch, "extract_rank_one: block is not K x K");
    const double signal = instance.q_form(u, x);
    if (signal <= kDegenerateSignal * x_star[u].trace() * instance.channel_norms_sq(u)) {
      std::ostringstream os;
      os << "extract_rank_one: user " << u << " receives no signal power (tr(Q X) = " << signal
         << ")";
      fail(ErrorCode::ExtractionDegenerate, os.str());
    }
    v.col(u) = x * instance.h_tilde.col(u) / std::sqrt(signal);
    total += x_star[u];
    used += x_star[u].trace();
  }

  BeamformingSolution sol;
  sol.range_basis = instance.u_tilde;
  sol.power_budget = instance.power_budget;
  sol.theta = (instance.power_budget - used) / instance.null_dim();
  sol.sensing_range = HermitianMatrix::hermitian_part(total.matrix() - v * v.adjoint());
  sol.origin = SolutionOrigin::Extracted;

  const double leak = sol.sensing_range.matrix().norm();
  if (allow_realign && leak > kLeakageTrigger * total.trace()) {
    const HermitianMatrix root = psd_sqrt(total);
    const CMatrix g = root.matrix() * instance.h_tilde;
    RVector need(k);
    for (int u = 0; u < k; ++u)
      need(u) = (g.col(u).squaredNorm() + instance.noise_power) / instance.rho(u);
    CMatrix unitary;
    if (realign(g, need, unitary)) {
      const CMatrix v2 = root.matrix() * unitary;
      const HermitianMatrix s2 = HermitianMatrix::hermitian_part(total.matrix() - v2 * v2.adjoint());
      const RVector sinr = reduced_sinr(instance, v2, s2);
      const RVector gamma = (instance.rho.array() - 1.0).inverse().matrix();
      if ((sinr.array() >= gamma.array() * (1.0 - kSinrAcceptance)).all()) {
        v = v2;
        sol.sensing_range = s2;
        sol.origin = SolutionOrigin::Realigned;
      }
    }
  }

  sol.w = instance.u_tilde * v;
  sol.sinr = reduced_sinr(instance, v, sol.sensing_range);
  sol.objective = reduced_crb(total, sol.theta, instance.null_dim());
  return sol;
}

BeamformingSolution from_witness(const DegenerateWitness& witness,
                                 const ReducedInstance& instance) {
  const int k = instance.n_users;
  const double level = instance.power_budget / instance.n_tx;
  const CMatrix v = instance.u_tilde.adjoint() * witness.beamformers;

  BeamformingSolution sol;
  sol.w = witness.beamformers;
  sol.range_basis = instance.u_tilde;
  sol.theta = level;
  sol.power_budget = instance.power_budget;
  sol.sensing_range =
      HermitianMatrix::hermitian_part(level * CMatrix::Identity(k, k) - v * v.adjoint());
  sol.sinr = reduced_sinr(instance, v, sol.sensing_range);
  sol.objective = reduced_crb(HermitianMatrix::identity(k) * level, level, instance.null_dim());
  sol.origin = SolutionOrigin::DegenerateWitness;
  return sol;
}

CMatrix sensing_factor(const HermitianMatrix& cov) {
  const auto e = hermitian_eig(cov);
  const double tr = std::abs(cov.trace());
  const double floor = -1e-8 * tr;
  if (e.values.size() > 0 && e.values.minCoeff() < floor) {
    std::ostringstream os;
    os << "sensing_factor: eigenvalue " << e.values.minCoeff() << " below " << floor;
    fail(ErrorCode::NotPSD, os.str());
  }
  const double keep = 1e-9 * std::max(e.values.size() > 0 ? e.values(0) : 0.0, 0.0);
  Eigen::Index r = 0;
  while (r < e.values.size() && e.values(r) > keep && e.values(r) > 0.0) ++r;
  return e.vectors.leftCols(r) * e.values.head(r).cwiseSqrt().cast<cplx>().asDiagonal();
}

SolutionDiagnostics verify_solution(const BeamformingSolution& sol, const Scenario& scenario,
                                    const ChannelMatrix& channel) {
  const int nt = scenario.n_tx;
  const int k = scenario.n_users;
  const CMatrix& h = channel.h;
  SolutionDiagnostics d;

  const HermitianMatrix sense = sensing_cov(sol);
  const HermitianMatrix full = full_cov(sol);

  d.sinr = evaluate_sinr(channel, sol.w, sense, scenario.noise_power);
  d.min_sinr_margin = (d.sinr.array() / scenario.sinr_thresholds.array() - 1.0).minCoeff();
  d.power_residual = std::abs(full.trace() - scenario.power_budget) / scenario.power_budget;

  const auto se = hermitian_eig(sense);
  d.sensing_min_eig = se.values(nt - 1) / (sense.trace() / nt);

  // Rebuild R_W from its range/null blocks and compare with sum w w^H + W_{K+1}.
  const CMatrix& u = sol.range_basis;
  const CMatrix range_block = u.adjoint() * full.matrix() * u;
  const CMatrix rebuilt = u * range_block * u.adjoint() +
                          sol.theta * (CMatrix::Identity(nt, nt) - u * u.adjoint());
  d.decomposition_gap = (rebuilt - full.matrix()).norm() / full.matrix().norm();

  const double sense_norm = sense.matrix().norm();
  d.null_leakage = sense_norm > 0.0
                       ? (h.adjoint() * sense.matrix()).cwiseAbs().maxCoeff() / (h.norm() * sense_norm)
                       : 0.0;

  const CMatrix uc = null_space_basis(h);
  d.theta = (scenario.power_budget - sol.w.squaredNorm()) / (nt - k);
  const CMatrix target = d.theta * uc * uc.adjoint();
  d.structure_gap = (sense.matrix() - target).norm() / target.norm();

  d.objective_full = evaluate_crb_objective(full);
  d.objective_gap = std::abs(d.objective_full - sol.objective) / d.objective_full;

  for (int j = 0; j < k; ++j) {
    const auto e = hermitian_eig(HermitianMatrix::outer(sol.w.col(j)));
    if (e.values(0) > 0.0) d.rank_one_gap = std::max(d.rank_one_gap, std::abs(e.values(1)) / e.values(0));
  }
  return d;
}

}  // namespace isac
