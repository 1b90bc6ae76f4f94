#include <doctest.h>

#include <cmath>

#include "isac/rbal.hpp"
#include "isac/reduction.hpp"
#include "support.hpp"

using namespace isac;

TEST_SUITE("reduction") {

TEST_CASE("identity columns reduce to the standard basis") {
  const Scenario s = make_scenario(6, 3, 10.0, 10.0, 1.0);
  ChannelMatrix c;
  c.h = CMatrix::Identity(6, 6).leftCols(3);
  const ReducedInstance r = build_reduced(s, c);
  // H~ is unitary; Q~_k are rank-one projectors with unit trace.
  CHECK((r.h_tilde.adjoint() * r.h_tilde - CMatrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-14);
  for (int k = 0; k < 3; ++k) {
    CHECK(r.q_tilde[k].trace() == doctest::Approx(1.0));
    const auto e = hermitian_eig(r.q_tilde[k]);
    CHECK(e.values(1) == doctest::Approx(0.0));
  }
  CHECK((r.u_tilde * r.h_tilde - c.h).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("single user with ||h||^2 = 2") {
  const ReducedInstance r = build_reduced(testing::k1_scenario(8.0), testing::k1_channel());
  CHECK(r.q_tilde[0].matrix()(0, 0).real() == doctest::Approx(2.0));
  CHECK(r.rho(0) == doctest::Approx(1.1));
  CHECK(r.null_dim() == 3);
}

TEST_CASE("trace identity and q_form on a random instance") {
  const Scenario s = make_scenario(16, 4, 100.0, 10.0, 1.0);
  const ChannelMatrix c = generate_channel(s, 123);
  const ReducedInstance r = build_reduced(s, c);
  CHECK((r.u_tilde.adjoint() * r.u_tilde - CMatrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
  const HermitianMatrix m = testing::random_hermitian(4, 5);
  const CVector forms = r.q_forms(m.matrix());
  for (int k = 0; k < 4; ++k) {
    CHECK(testing::rel(r.q_tilde[k].trace(), c.h.col(k).squaredNorm()) < 1e-10);
    const double direct = (r.q_tilde[k].matrix() * m.matrix()).trace().real();
    CHECK(std::abs(r.q_form(k, m.matrix()) - direct) < 1e-12 * m.matrix().norm() * r.q_tilde[k].trace());
    CHECK(std::abs(forms(k).real() - direct) < 1e-12 * m.matrix().norm() * r.q_tilde[k].trace());
    CHECK(std::abs(forms(k).imag()) < 1e-12 * m.matrix().norm() * r.q_tilde[k].trace());
    // Full-space form: h_k^H U M U^H h_k.
    const double full = (c.h.col(k).adjoint() * r.u_tilde * m.matrix() * r.u_tilde.adjoint() *
                         c.h.col(k))(0).real();
    CHECK(std::abs(full - direct) < 1e-10 * std::abs(direct) + 1e-12);
  }
}

TEST_CASE("rank-deficient channel is rejected") {
  const Scenario s = make_scenario(6, 2, 10.0, 10.0, 1.0);
  ChannelMatrix c = generate_channel(s, 1);
  c.h.col(1) = c.h.col(0) * cplx(0.0, 2.0);
  CHECK_THROWS_AS(build_reduced(s, c), Error);
}

TEST_CASE("precompute_dual constants") {
  const ReducedInstance r1 = build_reduced(testing::k1_scenario(8.0), testing::k1_channel());
  const DualPrecompute d1 = precompute_dual(r1, 1e-4);
  CHECK(d1.alpha == doctest::Approx(2.0001).epsilon(1e-15));
  CHECK(d1.beta == doctest::Approx(2.0001).epsilon(1e-15));
  CHECK(d1.kappa == doctest::Approx(1.0 / (2.0001 * 2.0001 - 1.0)).epsilon(1e-14));

  const Scenario s = make_scenario(20, 8, 100.0, 10.0, 1.0);
  const ReducedInstance r8 = build_reduced(s, generate_channel(s, 2));
  const DualPrecompute d8 = precompute_dual(r8, 1e-4);
  const double kappa = 1.0 / (9.0001 * 2.0001 - 1.0);
  CHECK(d8.kappa == doctest::Approx(kappa).epsilon(1e-14));
  for (int k = 0; k < 8; ++k) {
    CHECK(d8.theta1(k) == doctest::Approx(kappa * (1.0 - 2.0001 * 1.1 - 2.0001)).epsilon(1e-13));
    CHECK(d8.theta2(k) == doctest::Approx(kappa * (9.0001 - 2.1)).epsilon(1e-13));
  }
  CHECK((d8.l_matrix - d8.l_matrix.transpose()).cwiseAbs().maxCoeff() == 0.0);
  const RMatrix lf = d8.l_factor.matrixL();
  CHECK(lf.diagonal().minCoeff() > 0.0);
  CHECK_THROWS_AS(precompute_dual(r8, 0.0), Error);
}

TEST_CASE("structured_dual_solve is linear and keeps mu real for Hermitian residuals") {
  const Scenario s = make_scenario(9, 3, 100.0, 10.0, 1.0);
  const ReducedInstance r = build_reduced(s, generate_channel(s, 31));
  const DualPrecompute d = precompute_dual(r, 1e-4);
  const CVector v = testing::random_complex(3, 1, 1).real().cast<cplx>();
  const CMatrix a1 = testing::random_hermitian(3, 2).matrix();
  const CMatrix a2 = testing::random_hermitian(3, 3).matrix();
  const DualStep step = structured_dual_solve(r, d, v, a1, a2, true);
  CHECK(step.mu.imag().cwiseAbs().maxCoeff() == 0.0);
  CHECK(relative_asymmetry(step.omega1) < 1e-12);
  CHECK(relative_asymmetry(step.omega2) < 1e-12);

  const DualStep twice = structured_dual_solve(r, d, 2.0 * v, 2.0 * a1, 2.0 * a2);
  CHECK((twice.mu - 2.0 * step.mu).cwiseAbs().maxCoeff() < 1e-10 * step.mu.norm());
  CHECK((twice.omega1 - 2.0 * step.omega1).norm() < 1e-10 * step.omega1.norm());
}

TEST_CASE("degeneracy test on the single-user examples") {
  const DegeneracyVerdict hi = check_degenerate(testing::k1_scenario(100.0), testing::k1_channel());
  CHECK(hi.degenerate_condition_holds);
  CHECK(hi.lhs(0) == doctest::Approx(2.0 * 204.0 / (1.1 * 4.0)));
  REQUIRE(hi.witness.has_value());
  // a_1 ||h||^2 ... witness power: sum tr W_k = P_T.
  double total = 0.0;
  for (const auto& w : hi.witness->covariances) total += w.trace();
  CHECK(testing::rel(total, 100.0) < 1e-12);

  const DegeneracyVerdict lo = check_degenerate(testing::k1_scenario(8.0), testing::k1_channel());
  CHECK_FALSE(lo.degenerate_condition_holds);
  CHECK(lo.lhs(0) == doctest::Approx(2.0 * 20.0 / (1.1 * 4.0)));
  CHECK_FALSE(lo.witness.has_value());
}

TEST_CASE("two orthogonal users are never degenerate") {
  RVector norms(2);
  norms << 1.0, 1.0;
  const Scenario s = make_scenario(4, 2, 1e9, 10.0, 1.0);
  const DegeneracyVerdict v = check_degenerate(s, testing::orthogonal_channel(4, norms, 4));
  CHECK_FALSE(v.degenerate_condition_holds);
  CHECK(std::isinf(v.lhs(0)));
  CHECK(std::isinf(v.lhs(1)));
}

TEST_CASE("witness meets every SINR threshold with equality and is PSD") {
  // Nearly parallel users need rho_k > K, i.e. Gamma < 1 / (K - 1).
  Scenario s = make_scenario(6, 3, 1e4, 0.3, 1.0);
  ChannelMatrix c = generate_channel(s, 71);
  for (int k = 1; k < 3; ++k) c.h.col(k) = c.h.col(0) + 0.05 * c.h.col(k);
  const DegeneracyVerdict v = check_degenerate(s, c);
  REQUIRE(v.degenerate_condition_holds);
  const auto& w = *v.witness;
  const RVector sinr = evaluate_sinr(c, w.beamformers, w.covariances.back(), 1.0);
  CHECK(((sinr.array() / 0.3) - 1.0).abs().maxCoeff() < 1e-8);
  CHECK(hermitian_eig(w.covariances.back()).values.minCoeff() > -1e-8 * 1e4 / 6);
  CHECK(v.lhs(w.anchor_user) == doctest::Approx(v.lhs.minCoeff()));
}

TEST_CASE("degeneracy verdict is consistent under h -> c h, P_T -> P_T / c^2") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    Scenario s = make_scenario(5, 2, 50.0 * (seed + 1), 2.0, 1.0);
    ChannelMatrix c = generate_channel(s, 900 + seed);
    c.h.col(1) = c.h.col(0) + 0.2 * c.h.col(1);
    const DegeneracyVerdict a = check_degenerate(s, c);
    const double scale = 3.0;
    c.h *= scale;
    s.power_budget /= scale * scale;
    const DegeneracyVerdict b = check_degenerate(s, c);
    CHECK(a.degenerate_condition_holds == b.degenerate_condition_holds);
    CHECK(((a.lhs / (scale * scale) - b.lhs).cwiseAbs().array() / b.lhs.array()).maxCoeff() < 1e-12);
  }
}

TEST_CASE("reduced objective is invariant to the choice of range basis") {
  // Rotating the antenna space by a unitary changes U~ and H~ but not the
  // problem; the solved objectives must agree.
  const Scenario s = make_scenario(7, 2, 30.0, 10.0, 1.0);
  const ChannelMatrix c = generate_channel(s, 17);
  const Eigen::HouseholderQR<CMatrix> qr(testing::random_complex(7, 7, 18));
  ChannelMatrix rotated;
  rotated.h = CMatrix(qr.householderQ()) * c.h;

  const ReducedInstance a = build_reduced(s, c);
  const ReducedInstance b = build_reduced(s, rotated);
  // H~_b = V H~_a for a K x K unitary V.
  const CMatrix v = b.h_tilde * a.h_tilde.inverse();
  CHECK((v.adjoint() * v - CMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-10);
  const HermitianMatrix x = testing::random_hermitian(2, 3);
  const CMatrix xb = v * x.matrix() * v.adjoint();
  for (int k = 0; k < 2; ++k) CHECK(std::abs(a.q_form(k, x.matrix()) - b.q_form(k, xb)) < 1e-10);

  SolverConfig cfg;
  const auto ra = solve(a, precompute_dual(a, cfg.delta), cfg, std::nullopt).second;
  const auto rb = solve(b, precompute_dual(b, cfg.delta), cfg, std::nullopt).second;
  REQUIRE(ra.status == SolveStatus::Converged);
  REQUIRE(rb.status == SolveStatus::Converged);
  CHECK(testing::rel(ra.objective, rb.objective) < 1e-7);
}

}  // TEST_SUITE
