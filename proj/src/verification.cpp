#include "isac/verification.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace isac {

namespace {

// Portable uniform [0, 1) from the raw 64-bit engine output.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double gaussian(std::mt19937_64& rng) {
  const double u1 = 1.0 - uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

CVector vec(const CMatrix& m) { return Eigen::Map<const CVector>(m.data(), m.size()); }

CMatrix unvec(const CVector& v, Eigen::Index offset, Eigen::Index k) {
  return Eigen::Map<const CMatrix>(v.data() + offset, k, k);
}

CVector pack_state(const SolverState& s) {
  const auto k = s.y.dim();
  const auto kk = k * k;
  CVector u(k * kk + 2 * kk);
  for (Eigen::Index i = 0; i < k; ++i) u.segment(i * kk, kk) = vec(s.x[i].matrix());
  u.segment(k * kk, kk) = vec(s.y.matrix());
  u.segment(k * kk + kk, kk) = vec(s.z.matrix());
  return u;
}

CVector pack_duals(const SolverState& s) {
  const auto k = s.y.dim();
  const auto kk = k * k;
  CVector l(k + 2 * kk);
  l.head(k) = s.mu.cast<cplx>();
  l.segment(k, kk) = vec(s.omega1.matrix());
  l.segment(k + kk, kk) = vec(s.omega2.matrix());
  return l;
}

double block_gap(const CMatrix& a, const CMatrix& b) {
  const double scale = std::max(a.norm(), b.norm());
  return scale > 0.0 ? (a - b).norm() / scale : 0.0;
}

double relative_gap(double a, double b) {
  return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

Scenario k1_scenario(int nt, double power_budget, double gamma, double noise) {
  return make_scenario(nt, 1, power_budget, gamma, noise);
}

}  // namespace

DenseSystem assemble_dense_system(const ReducedInstance& instance) {
  const int k = instance.n_users;
  const int kk = k * k;
  const int rows = k + 2 * kk;
  const int cols = k * kk + 2 * kk;
  const int y0 = k * kk;
  const int z0 = y0 + kk;

  DenseSystem sys;
  sys.d = CMatrix::Zero(rows, cols);
  sys.b = CVector::Zero(rows);
  for (int u = 0; u < k; ++u) {
    const CVector q = vec(instance.q_tilde[u].matrix()).conjugate();
    sys.d.block(u, u * kk, 1, kk) = instance.rho(u) * q.transpose();
    sys.d.block(u, y0, 1, kk) = -q.transpose();
    sys.b(u) = instance.noise_power;
  }
  for (int p = 0; p < kk; ++p) {
    for (int u = 0; u < k; ++u) sys.d(k + p, u * kk + p) = 1.0;
    sys.d(k + p, y0 + p) = -1.0;
    sys.d(k + kk + p, y0 + p) = 1.0;
    sys.d(k + kk + p, z0 + p) = -1.0;
  }
  return sys;
}

double dense_dual_inverse_check(const ReducedInstance& instance, const DualPrecompute& dual) {
  const int k = instance.n_users;
  const int kk = k * k;
  const int m = k + 2 * kk;
  const DenseSystem sys = assemble_dense_system(instance);
  CMatrix a = sys.d * sys.d.adjoint();
  a.diagonal().array() += dual.delta;

  CMatrix inv(m, m);
  for (int j = 0; j < m; ++j) {
    const CVector e = CVector::Unit(m, j);
    const DualStep s = structured_dual_solve(instance, dual, e.head(k), unvec(e, k, k),
                                             unvec(e, k + kk, k));
    inv.col(j).head(k) = s.mu;
    inv.col(j).segment(k, kk) = vec(s.omega1);
    inv.col(j).segment(k + kk, kk) = vec(s.omega2);
  }
  return (inv * a - CMatrix::Identity(m, m)).cwiseAbs().maxCoeff();
}

SolverState reference_bal_step(const SolverState& state, const ReducedInstance& instance,
                               const DenseSystem& dense, double tau, double delta) {
  const int k = instance.n_users;
  const int kk = k * k;
  const CVector u = pack_state(state);
  const CVector lambda = pack_duals(state);
  const CVector shifted = u - tau * dense.d.adjoint() * lambda;

  std::vector<HermitianMatrix> x_tilde;
  for (int i = 0; i < k; ++i)
    x_tilde.push_back(HermitianMatrix::hermitian_part(unvec(shifted, i * kk, k)));
  SolverState next;
  next.x = prox_x(x_tilde, instance.power_budget);
  next.y = prox_y(HermitianMatrix::hermitian_part(unvec(shifted, k * kk, k)), tau);
  next.z = prox_z(HermitianMatrix::hermitian_part(unvec(shifted, k * kk + kk, k)), tau,
                  instance.power_budget, instance.n_tx, instance.n_users);

  const CVector u_next = pack_state(next);
  CMatrix a = dense.d * dense.d.adjoint();
  a.diagonal().array() += delta;
  const CVector p = dense.d * (2.0 * u_next - u) - dense.b;
  const CVector lambda_next = lambda + a.llt().solve(p) / tau;

  next.mu = lambda_next.head(k).real();
  next.omega1 = HermitianMatrix::hermitian_part(unvec(lambda_next, k, k));
  next.omega2 = HermitianMatrix::hermitian_part(unvec(lambda_next, k + kk, k));
  next.x_prev = state.x;
  next.y_prev = state.y;
  next.z_prev = state.z;
  next.iteration = state.iteration + 1;
  return next;
}

double state_difference(const SolverState& a, const SolverState& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.x.size(); ++i)
    worst = std::max(worst, block_gap(a.x[i].matrix(), b.x[i].matrix()));
  worst = std::max(worst, block_gap(a.y.matrix(), b.y.matrix()));
  worst = std::max(worst, block_gap(a.z.matrix(), b.z.matrix()));
  worst = std::max(worst, block_gap(a.mu.cast<cplx>(), b.mu.cast<cplx>()));
  worst = std::max(worst, block_gap(a.omega1.matrix(), b.omega1.matrix()));
  worst = std::max(worst, block_gap(a.omega2.matrix(), b.omega2.matrix()));
  return worst;
}

ScalarOptimum scalar_oracle_k1(const Scenario& scenario, const ChannelMatrix& channel) {
  scenario.validate();
  if (scenario.n_users != 1 || channel.n_users() != 1 || channel.n_tx() != scenario.n_tx)
    fail(ErrorCode::InvalidArgument, "scalar_oracle_k1: needs a single-user scenario");
  const double pt = scenario.power_budget;
  const double m = scenario.n_tx - 1;
  const double x_min =
      scenario.sinr_thresholds(0) * scenario.noise_power / channel.h.col(0).squaredNorm();
  if (x_min > pt) {
    std::ostringstream os;
    os << "scalar_oracle_k1: the SINR threshold needs " << x_min << " > P_T = " << pt;
    fail(ErrorCode::Infeasible, os.str());
  }
  auto f = [&](double x) { return 1.0 / x + m * m / (pt - x); };

  ScalarOptimum out;
  if (x_min == pt) {
    out.x_opt = x_min;
    out.objective = std::numeric_limits<double>::infinity();
    return out;
  }
  // f is convex on (0, P_T); golden-section search over [x_min, P_T).
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = x_min;
  double b = pt;
  double c = b - ratio * (b - a);
  double d = a + ratio * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < 400 && b - a > 1e-13 * pt; ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = f(d);
    }
  }
  out.x_opt = (a == x_min) ? x_min : 0.5 * (a + b);
  out.objective = f(out.x_opt);
  out.degenerate = out.x_opt > x_min + 1e-9 * pt;
  return out;
}

double KktReport::worst() const {
  return std::max({stationarity, complementary_slackness, dual_feasibility, primal_feasibility});
}

KktReport kkt_residuals(const CMatrix& w, const HermitianMatrix& sensing, const Scenario& scenario,
                        const ChannelMatrix& channel) {
  const int nt = scenario.n_tx;
  const int k = scenario.n_users;
  const CMatrix& h = channel.h;
  const HermitianMatrix r = HermitianMatrix::hermitian_part(w * w.adjoint() + sensing.matrix());
  const auto re = hermitian_eig(r);
  if (!(re.values(nt - 1) > 0.0))
    fail(ErrorCode::SingularCovariance, "kkt_residuals: R_W is not positive definite");
  const CMatrix r_inv2 =
      re.vectors * re.values.cwiseAbs2().cwiseInverse().cast<cplx>().asDiagonal() *
      re.vectors.adjoint();
  const double scale = 1.0 / (re.values(nt - 1) * re.values(nt - 1));

  KktReport rep;
  const CMatrix uc = null_space_basis(h);
  const double theta = (uc.adjoint() * r.matrix() * uc).trace().real() / (nt - k);
  rep.omega = 1.0 / (theta * theta);
  CMatrix base = -r_inv2;
  base.diagonal().array() += rep.omega;

  const CMatrix f = sensing_factor(sensing);
  const RVector rho = (1.0 + scenario.sinr_thresholds.array().inverse()).matrix();

  // Theta_k x = 0 for x = w_k (user k) and for the columns of F (sensing), each
  // normalized, is linear in mu: stack it and solve in the least-squares sense.
  std::vector<CVector> targets;
  std::vector<int> owner;  // user index, or k for sensing
  for (int u = 0; u < k; ++u) {
    targets.push_back(w.col(u).normalized());
    owner.push_back(u);
  }
  for (Eigen::Index c = 0; c < f.cols(); ++c) {
    targets.push_back(f.col(c).normalized());
    owner.push_back(k);
  }
  const auto n_eq = static_cast<Eigen::Index>(targets.size()) * nt;
  CMatrix a = CMatrix::Zero(n_eq, k);
  CVector rhs(n_eq);
  for (std::size_t t = 0; t < targets.size(); ++t) {
    const CVector& x = targets[t];
    const auto row = static_cast<Eigen::Index>(t) * nt;
    for (int j = 0; j < k; ++j) {
      CVector col = h.col(j) * h.col(j).dot(x);
      if (owner[t] == j) col *= (1.0 - rho(j));
      a.block(row, j, nt, 1) = col;
    }
    rhs.segment(row, nt) = -base * x;
  }
  RMatrix a_real(2 * n_eq, k);
  a_real << a.real(), a.imag();
  RVector rhs_real(2 * n_eq);
  rhs_real << rhs.real(), rhs.imag();
  rep.mu = a_real.completeOrthogonalDecomposition().solve(rhs_real);

  // Theta_k as defined by stationarity with the fitted multipliers.
  CMatrix common = base;
  for (int j = 0; j < k; ++j) common += rep.mu(j) * h.col(j) * h.col(j).adjoint();
  auto theta_of = [&](int u) {
    if (u == k) return HermitianMatrix::hermitian_part(common);
    return HermitianMatrix::hermitian_part(common -
                                           rep.mu(u) * rho(u) * h.col(u) * h.col(u).adjoint());
  };

  for (std::size_t t = 0; t < targets.size(); ++t) {
    const CMatrix th = theta_of(owner[t]).matrix();
    rep.stationarity = std::max(rep.stationarity, (th * targets[t]).norm() / scale);
  }

  const double power = r.trace();
  for (int u = 0; u <= k; ++u) {
    const HermitianMatrix th = theta_of(u);
    const auto e = hermitian_eig(th);
    rep.dual_feasibility = std::max(rep.dual_feasibility, -e.values(nt - 1) / scale);
    const CMatrix wk = (u == k) ? sensing.matrix() : CMatrix(w.col(u) * w.col(u).adjoint());
    const double tr_w = wk.trace().real();
    if (tr_w > 0.0)
      rep.complementary_slackness =
          std::max(rep.complementary_slackness,
                   std::abs((th.matrix() * wk).trace().real()) / (scale * tr_w));
  }

  const RVector sinr = evaluate_sinr(channel, w, sensing, scenario.noise_power);
  for (int u = 0; u < k; ++u) {
    const double n2 = h.col(u).squaredNorm();
    rep.dual_feasibility = std::max(rep.dual_feasibility, -rep.mu(u) * n2 / scale);
    const double gu = rho(u) * std::norm(h.col(u).dot(w.col(u))) -
                      h.col(u).dot(r.matrix() * h.col(u)).real() - scenario.noise_power;
    rep.complementary_slackness =
        std::max(rep.complementary_slackness, std::abs(rep.mu(u) * gu) / (scale * n2 * power));
    rep.primal_feasibility =
        std::max(rep.primal_feasibility, 1.0 - sinr(u) / scenario.sinr_thresholds(u));
  }
  const double power_gap = (power - scenario.power_budget) / scenario.power_budget;
  rep.complementary_slackness =
      std::max(rep.complementary_slackness, rep.omega * std::abs(power_gap) / scale);
  rep.primal_feasibility = std::max(rep.primal_feasibility, power_gap);
  rep.dual_feasibility = std::max(rep.dual_feasibility, 0.0);
  rep.primal_feasibility = std::max(rep.primal_feasibility, 0.0);
  return rep;
}

KktReport kkt_residuals(const BeamformingSolution& sol, const Scenario& scenario,
                        const ChannelMatrix& channel) {
  return kkt_residuals(sol.w, sensing_cov(sol), scenario, channel);
}

HermitianMatrix unbalanced_sensing(const BeamformingSolution& sol, const ChannelMatrix& channel,
                                   double strength, std::uint64_t seed) {
  const CMatrix uc = null_space_basis(channel.h);
  const auto m = uc.cols();
  std::mt19937_64 rng(seed);
  RVector spread(m);
  for (Eigen::Index i = 0; i < m; ++i) spread(i) = 2.0 * uniform01(rng) - 1.0;
  spread.array() -= spread.mean();
  const double peak = spread.cwiseAbs().maxCoeff();
  if (peak > 0.0) spread *= strength / peak;
  const RVector levels = sol.theta * (1.0 + spread.array()).matrix();
  const CMatrix& u = sol.range_basis;
  return HermitianMatrix::hermitian_part(u * sol.sensing_range.matrix() * u.adjoint() +
                                         uc * levels.cast<cplx>().asDiagonal() * uc.adjoint());
}

double optimality_spot_check(const BeamformingSolution& sol, const Scenario& scenario,
                             const ChannelMatrix& channel, int trials, std::uint64_t seed) {
  const int nt = scenario.n_tx;
  const int k = scenario.n_users;
  const CMatrix& h = channel.h;
  const HermitianMatrix best = full_cov(sol);
  const double f_best = evaluate_crb_objective(best);

  const FeasibilityReport feas = compute_p_low(scenario, channel);
  const MinPowerPoint base = min_power_beamformers(scenario, channel, feas);
  const double slack = scenario.power_budget - base.total_power;
  if (!(slack > 1e-9 * scenario.power_budget))
    fail(ErrorCode::InvalidArgument, "optimality_spot_check: no power slack above p_low");

  CMatrix zf = h * (h.adjoint() * h).inverse();
  for (Eigen::Index j = 0; j < k; ++j) zf.col(j).normalize();
  const CMatrix uc = null_space_basis(h);
  const auto m = uc.cols();

  std::mt19937_64 rng(seed);
  double worst = -std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    // Extra zero-forcing power never hurts another user's SINR.
    RVector share(k);
    for (int j = 0; j < k; ++j) share(j) = uniform01(rng);
    const double extra = 0.5 * uniform01(rng) * slack;
    share *= extra / share.sum();
    CMatrix r = base.w * base.w.adjoint() + zf * share.cast<cplx>().asDiagonal() * zf.adjoint();

    CMatrix g(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < m; ++j) g(i, j) = cplx(gaussian(rng), gaussian(rng));
    CMatrix n = uc * g * g.adjoint() * uc.adjoint();
    n *= (slack - extra) / n.trace().real();
    r += n;

    const double weight = std::pow(10.0, -6.0 + 5.0 * uniform01(rng));
    const HermitianMatrix mixed =
        HermitianMatrix::hermitian_part((1.0 - weight) * best.matrix() + weight * r);
    const double f = evaluate_crb_objective(mixed);
    worst = std::max(worst, (f_best - f) / f_best);
  }
  (void)nt;
  return worst;
}

std::vector<CheckResult> run_verification_suite(VerifyLevel level, ZStepSign z_sign) {
  std::vector<CheckResult> out;
  auto record = [&](std::string name, double measured, double threshold) {
    out.push_back({std::move(name), measured, threshold, measured <= threshold});
  };
  const bool full = level == VerifyLevel::Full;
  constexpr double kFailed = std::numeric_limits<double>::infinity();
  // A check that throws counts as failed with an infinite measurement.
  auto guarded = [&](auto&& fn) {
    try {
      return fn();
    } catch (const Error&) {
      return kFailed;
    }
  };

  // Structured inverse against the dense one.
  {
    std::vector<int> sizes = full ? std::vector<int>{1, 2, 3, 6} : std::vector<int>{1, 2};
    for (int k : sizes) {
      for (double delta : {1e-4, 1e-2}) {
        const Scenario sc = make_scenario(k + 4, k, 100.0, 10.0, 1.0);
        const ChannelMatrix ch = generate_channel(sc, 100 + k);
        const ReducedInstance inst = build_reduced(sc, ch);
        const DualPrecompute dual = precompute_dual(inst, delta);
        std::ostringstream name;
        name << "dual_inverse K=" << k << " delta=" << delta;
        record(name.str(), dense_dual_inverse_check(inst, dual), 1e-8);
      }
    }
  }

  // Structured iterate against the literal recursion.
  {
    std::vector<int> sizes = full ? std::vector<int>{1, 2, 4} : std::vector<int>{1, 2};
    for (int k : sizes) {
      const Scenario sc = make_scenario(2 * k + 4, k, 100.0, 10.0, 1.0);
      const ChannelMatrix ch = generate_channel(sc, 200 + k);
      const ReducedInstance inst = build_reduced(sc, ch);
      SolverConfig cfg;
      cfg.tau = default_tau(inst);
      cfg.z_sign = z_sign;
      const DualPrecompute dual = precompute_dual(inst, cfg.delta);
      const DenseSystem dense = assemble_dense_system(inst);
      const FeasibilityReport feas = compute_p_low(sc, ch);
      SolverState a = initial_state(inst, feas.p_low);
      SolverState b = a;
      const double worst = guarded([&] {
        double gap = 0.0;
        for (int it = 0; it < 100; ++it) {
          a = iterate(a, inst, dual, cfg);
          b = reference_bal_step(b, inst, dense, cfg.tau, cfg.delta);
          gap = std::max(gap, state_difference(a, b));
        }
        return gap;
      });
      record("trajectory K=" + std::to_string(k) + " 100 iterations", worst, 1e-7);
    }
  }

  // Single-user instances against the scalar oracle.
  {
    struct Case {
      int nt;
      double pt;
    };
    std::vector<std::pair<Scenario, ChannelMatrix>> cases;
    {
      ChannelMatrix ch;
      ch.h = CMatrix::Zero(4, 1);
      ch.h(0, 0) = 1.0;
      ch.h(1, 0) = 1.0;  // ||h||^2 = 2
      cases.push_back({k1_scenario(4, 8.0, 10.0, 1.0), ch});
      cases.push_back({k1_scenario(4, 100.0, 10.0, 1.0), ch});
    }
    if (full) {
      int seed = 300;
      for (int nt : {2, 4, 8, 16}) {
        for (double g : {0.2, 0.6, 0.9, 1.5, 6.0}) {
          Scenario sc = k1_scenario(nt, 1.0, 10.0, 1.0);
          const ChannelMatrix ch = generate_channel(sc, seed++);
          const double x_min = 10.0 / ch.h.squaredNorm();
          sc.power_budget = x_min * (1.0 + (nt - 1) * g);
          cases.push_back({sc, ch});
        }
      }
    }
    double worst = 0.0;
    for (const auto& [sc, ch] : cases) {
      worst = std::max(worst, guarded([&] {
        const ScalarOptimum oracle = scalar_oracle_k1(sc, ch);
        PipelineOptions opt;
        opt.solver.z_sign = z_sign;
        const PipelineResult res = run_pipeline(sc, ch, opt);
        return res.solution ? relative_gap(res.solution->objective, oracle.objective) : kFailed;
      }));
    }
    record("scalar_oracle K=1 (" + std::to_string(cases.size()) + " instances)", worst, 1e-6);
  }

  // Closed-form degenerate optimum: KKT with mu = 0, omega = (Nt/P_T)^2.
  {
    ChannelMatrix ch;
    ch.h = CMatrix::Zero(4, 1);
    ch.h(0, 0) = 1.0;
    ch.h(1, 0) = 1.0;
    const Scenario sc = k1_scenario(4, 100.0, 10.0, 1.0);
    const double worst = guarded([&] {
      const PipelineResult res = run_pipeline(sc, ch);
      if (!res.solution || res.solution->origin != SolutionOrigin::DegenerateWitness) return kFailed;
      const KktReport kkt = kkt_residuals(*res.solution, sc, ch);
      // mu is compared on the scale of R^{-2} = (Nt/P_T)^2 I.
      const double omega = std::pow(4.0 / 100.0, 2);
      return std::max({kkt.worst(), kkt.mu.cwiseAbs().maxCoeff() * ch.h.squaredNorm() / omega,
                       relative_gap(kkt.omega, omega)});
    });
    record("degenerate witness KKT", worst, 1e-8);
  }

  if (full) {
    const Scenario sc = make_scenario(12, 2, 10.0, 10.0, 1.0);
    const ChannelMatrix ch = generate_channel(sc, 400);
    double kkt = kFailed;
    double spot = kFailed;
    try {
      PipelineOptions opt;
      opt.solver.z_sign = z_sign;
      const PipelineResult res = run_pipeline(sc, ch, opt);
      if (res.solution && res.solve && res.solve->status == SolveStatus::Converged) {
        kkt = kkt_residuals(*res.solution, sc, ch).worst();
        spot = optimality_spot_check(*res.solution, sc, ch, 100, 401);
      }
    } catch (const Error&) {
    }
    record("kkt converged K=2", kkt, 1e-5);
    record("optimality spot check (100 perturbations)", spot, 1e-7);
  }
  return out;
}

}  // namespace isac
