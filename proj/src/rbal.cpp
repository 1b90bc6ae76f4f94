#include "isac/rbal.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "isac/feasibility.hpp"

namespace isac {

double prox_x_water_level(std::span<const RVector> eigenvalues, double power_budget) {
  std::vector<double> v;
  for (const auto& e : eigenvalues)
    for (Eigen::Index i = 0; i < e.size(); ++i) v.push_back(e(i));
  double positive = 0.0;
  for (double x : v) positive += std::max(x, 0.0);
  if (positive <= power_budget) return 0.0;

  // g(gamma) = sum max(v - gamma/2, 0) is piecewise linear and decreasing;
  // find the segment where it crosses the budget.
  std::sort(v.begin(), v.end(), std::greater<>());
  double prefix = 0.0;
  for (std::size_t n = 0; n < v.size(); ++n) {
    prefix += v[n];
    const double half = (prefix - power_budget) / static_cast<double>(n + 1);
    const double next = (n + 1 < v.size()) ? v[n + 1] : -std::numeric_limits<double>::infinity();
    if (half >= next && half < v[n]) return 2.0 * half;
  }
  // Unreachable for a finite budget > 0; fall back to the last segment.
  return 2.0 * (prefix - power_budget) / static_cast<double>(v.size());
}

std::vector<HermitianMatrix> prox_x(std::span<const HermitianMatrix> x_tilde,
                                    double power_budget) {
  std::vector<EigenDecomposition> eig;
  std::vector<RVector> values;
  eig.reserve(x_tilde.size());
  for (const auto& x : x_tilde) {
    eig.push_back(hermitian_eig(x));
    values.push_back(eig.back().values);
  }
  const double gamma = prox_x_water_level(values, power_budget);
  std::vector<HermitianMatrix> out;
  out.reserve(x_tilde.size());
  for (const auto& e : eig) {
    const RVector lam = (e.values.array() - 0.5 * gamma).max(0.0).matrix();
    out.push_back(HermitianMatrix::from_eigen(e.vectors, lam));
  }
  return out;
}

HermitianMatrix prox_y(const HermitianMatrix& y_tilde, double tau) {
  if (!(tau > 0.0)) fail(ErrorCode::InvalidArgument, "prox_y: tau must be > 0");
  const auto e = hermitian_eig(y_tilde);
  RVector lam(e.values.size());
  for (Eigen::Index i = 0; i < lam.size(); ++i)
    lam(i) = positive_cubic_root(e.values(i), tau);
  return HermitianMatrix::from_eigen(e.vectors, lam);
}

ProxZResult prox_z_detail(const HermitianMatrix& z_tilde, double tau,
                          double power_budget, int n_tx, int n_users) {
  if (!(tau > 0.0)) fail(ErrorCode::InvalidArgument, "prox_z: tau must be > 0");
  if (n_tx <= n_users) fail(ErrorCode::InvalidArgument, "prox_z: need n_tx > n_users");
  const auto e = hermitian_eig(z_tilde);
  const RVector& s = e.values;
  const double m = n_tx - n_users;
  const double c = tau * m * m;
  auto shrunk_sum = [&](double lam) { return (s.array() - lam).max(0.0).sum(); };
  auto phi = [&](double lam) {
    const double gap = power_budget - shrunk_sum(lam);
    return lam * gap * gap - c;
  };

  // Only the branch with P_T - tr Z > 0 is admissible; on it phi increases.
  // Its left end solves sum max(s - lam, 0) = P_T, the same piecewise-linear
  // equation as the prox_x water level; phi(lo) = -c < 0 there. The root also
  // satisfies P_T - tr Z = m sqrt(tau / lam) <= P_T, so lam >= c / P_T^2.
  const RVector spectrum = s;
  const double lo =
      std::max(0.5 * prox_x_water_level(std::span<const RVector>(&spectrum, 1), power_budget),
               c / (power_budget * power_budget));
  const double hi = std::max(s(0), 0.0) + c / (power_budget * power_budget);
  // When every eigenvalue is <= 0 both ends coincide at c / P_T^2, which is
  // the exact root; phi there is zero up to rounding.
  double lam = hi;
  if (phi(hi) > 0.0) lam = phi(lo) >= 0.0 ? lo : monotone_scalar_root(phi, lo, hi, 0.0);

  ProxZResult out;
  out.shift = lam;
  out.z = HermitianMatrix::from_eigen(e.vectors, (s.array() - lam).max(0.0).matrix());
  return out;
}

HermitianMatrix prox_z(const HermitianMatrix& z_tilde, double tau, double power_budget,
                       int n_tx, int n_users) {
  return prox_z_detail(z_tilde, tau, power_budget, n_tx, n_users).z;
}

SolverState initial_state(const ReducedInstance& instance, double p_low) {
  const int k = instance.n_users;
  const double p0 = std::min(instance.power_budget, 2.0 * p_low);
  SolverState s;
  const HermitianMatrix block = HermitianMatrix::identity(k) * (p0 / (k * k));
  s.x.assign(k, block);
  s.y = block * static_cast<double>(k);
  s.z = s.y;
  s.x_prev = s.x;
  s.y_prev = s.y;
  s.z_prev = s.z;
  s.mu = RVector::Zero(k);
  s.omega1 = HermitianMatrix::zero(k);
  s.omega2 = HermitianMatrix::zero(k);
  return s;
}

double default_tau(const ReducedInstance& instance) {
  // ||D||_2 <= ||D||_F, with the Frobenius norm available in closed form:
  // A1 and B1 rows contribute rho_k ||h_k||^2 and ||h_k||^2, A2 has K^3 ones,
  // the identity blocks of B and C add 3 K^2.
  const double k = instance.n_users;
  const RVector n2 = instance.channel_norms_sq.cwiseAbs2();
  const double fro2 = (instance.rho.cwiseAbs2().array() + 1.0).matrix().dot(n2) +
                      k * k * k + 3.0 * k * k;
  return 0.9 / std::sqrt(fro2);
}

Violation constraint_violation(const SolverState& state, const ReducedInstance& instance) {
  const int k = instance.n_users;
  CMatrix sum_x = CMatrix::Zero(k, k);
  for (const auto& x : state.x) sum_x += x.matrix();
  const CVector qy = instance.q_forms(state.y.matrix());
  double r2 = 0.0;
  for (int u = 0; u < k; ++u) {
    const double r = instance.rho(u) * instance.q_form(u, state.x[u].matrix()) -
                     qy(u).real() - instance.noise_power;
    r2 += r * r;
  }
  Violation v;
  v.sinr = std::sqrt(r2);
  v.split_xy = (sum_x - state.y.matrix()).norm();
  v.split_yz = (state.y.matrix() - state.z.matrix()).norm();
  v.combined = std::sqrt(r2 + v.split_xy * v.split_xy + v.split_yz * v.split_yz);
  return v;
}

double reduced_objective(const SolverState& state, const ReducedInstance& instance) {
  const auto e = hermitian_eig(state.y);
  const double m = instance.null_dim();
  return e.values.cwiseInverse().sum() + m * m / (instance.power_budget - state.z.trace());
}

SolverState iterate(const SolverState& state, const ReducedInstance& instance,
                    const DualPrecompute& dual, const SolverConfig& config) {
  const double tau = config.tau;
  if (!(tau > 0.0)) fail(ErrorCode::InvalidArgument, "iterate: tau must be > 0");
  const int k = instance.n_users;
  const CMatrix& ht = instance.h_tilde;
  const CMatrix& om1 = state.omega1.matrix();
  const CMatrix& om2 = state.omega2.matrix();

  // Primal proximal steps.
  std::vector<HermitianMatrix> x_tilde;
  x_tilde.reserve(k);
  for (int u = 0; u < k; ++u) {
    const CMatrix g = instance.rho(u) * state.mu(u) * instance.q_tilde[u].matrix() + om1;
    x_tilde.emplace_back(state.x[u].matrix() - tau * g);
  }
  SolverState next;
  next.x = prox_x(x_tilde, instance.power_budget);

  const CMatrix weighted_q = ht * state.mu.cast<cplx>().asDiagonal() * ht.adjoint();
  next.y = prox_y(HermitianMatrix::hermitian_part(state.y.matrix() + tau * (weighted_q + om1 - om2)), tau);

  const double zsign = config.z_sign == ZStepSign::Derived ? 1.0 : -1.0;
  next.z = prox_z(HermitianMatrix(state.z.matrix() + zsign * tau * om2), tau,
                  instance.power_budget, instance.n_tx, instance.n_users);

  // Extrapolated residuals p = D(2u+ - u) - b, kept in block form.
  const CMatrix ye = 2.0 * next.y.matrix() - state.y.matrix();
  const CMatrix ze = 2.0 * next.z.matrix() - state.z.matrix();
  CMatrix r1 = -ye;
  RVector r(k);
  const CVector qye = instance.q_forms(ye);
  for (int u = 0; u < k; ++u) {
    const CMatrix xe = 2.0 * next.x[u].matrix() - state.x[u].matrix();
    r1 += xe;
    r(u) = instance.rho(u) * instance.q_form(u, xe) - qye(u).real() - instance.noise_power;
  }
  const CMatrix r2 = ye - ze;

  // Structured dual update through the cached Cholesky factor of L.
  const DualStep step = structured_dual_solve(instance, dual, r.cast<cplx>(), r1, r2, true);
  next.mu = state.mu + step.mu.real() / tau;
  const CMatrix o1 = om1 + step.omega1 / tau;
  const CMatrix o2 = om2 + step.omega2 / tau;

  if (!next.mu.allFinite() || !o1.allFinite() || !o2.allFinite()) {
    std::ostringstream os;
    os << "iterate: non-finite dual at iteration " << state.iteration + 1
       << " (tau=" << tau << "); try a smaller tau";
    fail(ErrorCode::NumericalDivergence, os.str());
  }
  next.omega1 = HermitianMatrix::hermitian_part(o1);
  next.omega2 = HermitianMatrix::hermitian_part(o2);
  next.x_prev = state.x;
  next.y_prev = state.y;
  next.z_prev = state.z;
  next.iteration = state.iteration + 1;
  return next;
}

std::pair<SolverState, SolveReport> solve(const ReducedInstance& instance,
                                          const DualPrecompute& dual,
                                          const SolverConfig& config,
                                          std::optional<SolverState> init) {
  SolverConfig cfg = config;
  if (!(cfg.tau > 0.0)) cfg.tau = default_tau(instance);
  if (!(cfg.tol_violation > 0.0))
    fail(ErrorCode::InvalidArgument, "solve: tol_violation must be > 0");

  SolverState state;
  if (init) {
    state = std::move(*init);
  } else {
    const CMatrix gram = instance.h_tilde.adjoint() * instance.h_tilde;
    const RVector thresholds = (instance.rho.array() - 1.0).inverse().matrix();
    const auto feas = compute_p_low_from_gram(gram, thresholds, instance.noise_power,
                                              instance.power_budget);
    state = initial_state(instance, feas.p_low);
  }

  SolveReport rep;
  rep.tau = cfg.tau;
  const auto t0 = std::chrono::steady_clock::now();
  Violation v = constraint_violation(state, instance);
  long done = 0;
  while (v.combined > cfg.tol_violation && done < cfg.max_iterations) {
    state = iterate(state, instance, dual, cfg);
    ++done;
    v = constraint_violation(state, instance);
    if (cfg.log_every > 0 && done % cfg.log_every == 0)
      rep.trace.push_back({state.iteration, v.combined, reduced_objective(state, instance)});
  }
  rep.iter_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  rep.iterations = done;
  rep.final_violation = v;
  rep.status = v.combined <= cfg.tol_violation ? SolveStatus::Converged
                                               : SolveStatus::IterationCapReached;
  rep.objective = reduced_objective(state, instance);
  return {std::move(state), std::move(rep)};
}

}  // namespace isac
