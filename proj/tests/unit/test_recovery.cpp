#include <doctest.h>

#include <cmath>

#include "isac/recovery.hpp"
#include "support.hpp"

using namespace isac;

namespace {

std::vector<HermitianMatrix> random_psd_blocks(int k, std::uint64_t seed, double scale) {
  std::vector<HermitianMatrix> out;
  for (int u = 0; u < k; ++u) {
    const CMatrix a = testing::random_complex(k, k, seed + u);
    out.push_back(HermitianMatrix::hermitian_part(scale * a * a.adjoint()));
  }
  return out;
}

}  // namespace

TEST_SUITE("recovery") {

TEST_CASE("single user at P_T = 8: w = sqrt(5) h / ||h||, theta = 1") {
  const Scenario s = testing::k1_scenario(8.0);
  const ChannelMatrix c = testing::k1_channel();
  const ReducedInstance r = build_reduced(s, c);
  const BeamformingSolution sol = extract_rank_one({HermitianMatrix::identity(1) * 5.0}, r);
  CHECK(sol.origin == SolutionOrigin::Extracted);
  CHECK(sol.w.squaredNorm() == doctest::Approx(5.0).epsilon(1e-12));
  // Parallel to h: |h^H w|^2 = ||h||^2 ||w||^2.
  CHECK(std::norm(c.h.col(0).dot(sol.w.col(0))) == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(sol.theta == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sol.sensing_range.matrix().norm() < 1e-12);
  CHECK(sol.objective == doctest::Approx(3.2).epsilon(1e-12));
  CHECK(sol.sinr(0) == doctest::Approx(10.0).epsilon(1e-12));

  const SolutionDiagnostics d = verify_solution(sol, s, c);
  CHECK(std::abs(d.min_sinr_margin) < 1e-12);
  CHECK(d.power_residual < 1e-12);
  CHECK(d.null_leakage < 1e-12);
  CHECK(d.structure_gap < 1e-12);
  CHECK(d.objective_gap < 1e-12);
  CHECK(d.rank_one_gap < 1e-12);
}

TEST_CASE("rank-one blocks come back unchanged") {
  const Scenario s = make_scenario(10, 3, 100.0, 10.0, 1.0);
  const ChannelMatrix c = generate_channel(s, 5);
  const ReducedInstance r = build_reduced(s, c);
  std::vector<HermitianMatrix> x;
  const CMatrix v = testing::random_complex(3, 3, 77);
  for (int u = 0; u < 3; ++u) x.push_back(HermitianMatrix::hermitian_part(v.col(u) * v.col(u).adjoint()));
  const BeamformingSolution sol = extract_rank_one(x, r);
  CHECK(sol.origin == SolutionOrigin::Extracted);
  CHECK(sol.sensing_range.matrix().norm() < 1e-12 * v.squaredNorm());
  for (int u = 0; u < 3; ++u) {
    const CVector back = r.u_tilde.adjoint() * sol.w.col(u);
    CHECK((back * back.adjoint() - x[u].matrix()).norm() < 1e-12 * x[u].matrix().norm());
  }
}

TEST_CASE("extraction preserves each user's received signal power") {
  const Scenario s = make_scenario(9, 3, 100.0, 10.0, 1.0);
  const ChannelMatrix c = generate_channel(s, 15);
  const ReducedInstance r = build_reduced(s, c);
  const auto x = random_psd_blocks(3, 400, 2.0);
  const BeamformingSolution sol = extract_rank_one(x, r, false);
  double used = 0.0;
  for (int u = 0; u < 3; ++u) {
    const double full = std::norm(c.h.col(u).dot(sol.w.col(u)));
    CHECK(testing::rel(full, r.q_form(u, x[u].matrix())) < 1e-12);
    used += x[u].trace();
  }
  // Power is conserved between beamformers, range sensing and null space.
  const double total = sol.w.squaredNorm() + sol.sensing_range.trace() + sol.theta * r.null_dim();
  CHECK(testing::rel(total, 100.0) < 1e-12);
  CHECK(testing::rel(sol.theta, (100.0 - used) / 6.0) < 1e-12);
  CHECK(hermitian_eig(sol.sensing_range).values.minCoeff() > -1e-12 * used);
}

TEST_CASE("a block with no signal towards its user is rejected") {
  const Scenario s = make_scenario(6, 2, 10.0, 10.0, 1.0);
  const ChannelMatrix c = generate_channel(s, 3);
  const ReducedInstance r = build_reduced(s, c);
  // X_1 = g g^H with g orthogonal to h~_1.
  const CVector h1 = r.h_tilde.col(0);
  CVector g(2);
  g << -std::conj(h1(1)), std::conj(h1(0));
  std::vector<HermitianMatrix> x{HermitianMatrix::hermitian_part(g * g.adjoint()),
                                 HermitianMatrix::identity(2)};
  try {
    extract_rank_one(x, r);
    FAIL("expected ExtractionDegenerate");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ExtractionDegenerate);
  }
  CHECK_THROWS_AS(extract_rank_one({HermitianMatrix::identity(2)}, r), Error);
}

TEST_CASE("sensing_factor examples") {
  CMatrix a = CMatrix::Zero(3, 3);
  a(0, 0) = 4.0;
  const CMatrix f = sensing_factor(HermitianMatrix(a));
  REQUIRE(f.cols() == 1);
  CHECK(std::abs(f(0, 0)) == doctest::Approx(2.0));
  CHECK(f.col(0).tail(2).norm() < 1e-15);

  const CMatrix fi = sensing_factor(HermitianMatrix::identity(4));
  CHECK(fi.cols() == 4);
  CHECK((fi * fi.adjoint() - CMatrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-14);

  // theta times a projector: F^H F = theta I on the retained columns.
  const CMatrix u = testing::random_complex(6, 6, 8).householderQr().householderQ();
  const CMatrix p = 2.5 * u.leftCols(4) * u.leftCols(4).adjoint();
  const CMatrix fp = sensing_factor(HermitianMatrix::hermitian_part(p));
  CHECK(fp.cols() == 4);
  CHECK((fp.adjoint() * fp - 2.5 * CMatrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-13);
  CHECK((fp * fp.adjoint() - p).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("sensing_factor rejects a clearly indefinite matrix") {
  CMatrix a = CMatrix::Identity(3, 3);
  a(2, 2) = -0.1;
  try {
    sensing_factor(HermitianMatrix(a));
    FAIL("expected NotPSD");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotPSD);
  }
  // Rounding-level negatives are dropped, not rejected.
  a(2, 2) = -1e-12;
  CHECK(sensing_factor(HermitianMatrix(a)).cols() == 2);
}

TEST_CASE("verify_solution flags a solution with weakened beamformers") {
  const Scenario s = testing::k1_scenario(8.0);
  const ChannelMatrix c = testing::k1_channel();
  const ReducedInstance r = build_reduced(s, c);
  BeamformingSolution sol = extract_rank_one({HermitianMatrix::identity(1) * 5.0}, r);
  sol.w *= 0.9;
  const SolutionDiagnostics d = verify_solution(sol, s, c);
  // SINR 10 * 0.81 / (1 + 0) with theta unchanged -> margin -0.19.
  CHECK(d.min_sinr_margin == doctest::Approx(-0.19).epsilon(1e-10));
  CHECK(d.power_residual > 0.1);
}

TEST_CASE("degenerate witness gives R_W = (P_T / Nt) I and objective Nt^2 / P_T") {
  const Scenario s = testing::k1_scenario(100.0);
  const ChannelMatrix c = testing::k1_channel();
  const DegeneracyVerdict v = check_degenerate(s, c);
  REQUIRE(v.witness.has_value());
  const BeamformingSolution sol = from_witness(*v.witness, build_reduced(s, c));
  CHECK(sol.origin == SolutionOrigin::DegenerateWitness);
  CHECK((full_cov(sol).matrix() - 25.0 * CMatrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(testing::rel(sol.objective, 0.16) < 1e-12);
  CHECK(sol.sinr(0) == doctest::Approx(10.0).epsilon(1e-10));
  const SolutionDiagnostics d = verify_solution(sol, s, c);
  CHECK(d.min_sinr_margin > -1e-10);
  CHECK(d.sensing_min_eig > -1e-10);
  CHECK(testing::rel(d.objective_full, 0.16) < 1e-12);
}

}  // TEST_SUITE
