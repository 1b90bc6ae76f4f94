#include "isac/scenario.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace isac {

void Scenario::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (n_users <= 0 || n_tx <= n_users) {
    std::ostringstream os;
    os << "scenario: need n_tx > n_users > 0 (got n_tx=" << n_tx
       << ", n_users=" << n_users << ")";
    fail(ErrorCode::InvalidArgument, os.str());
  }
  if (!positive(power_budget))
    fail(ErrorCode::InvalidArgument, "scenario: power_budget must be > 0");
  if (!positive(noise_power))
    fail(ErrorCode::InvalidArgument, "scenario: noise_power must be > 0");
  if (sinr_thresholds.size() != n_users)
    fail(ErrorCode::DimensionMismatch, "scenario: need one SINR threshold per user");
  for (Eigen::Index k = 0; k < sinr_thresholds.size(); ++k)
    if (!positive(sinr_thresholds(k)))
      fail(ErrorCode::InvalidArgument, "scenario: SINR thresholds must be > 0");
}

Scenario make_scenario(int n_tx, int n_users, double power_budget,
                       double sinr_threshold, double noise_power) {
  Scenario s;
  s.n_tx = n_tx;
  s.n_users = n_users;
  s.power_budget = power_budget;
  s.sinr_thresholds = RVector::Constant(std::max(n_users, 0), sinr_threshold);
  s.noise_power = noise_power;
  return s;
}

namespace {

// std::normal_distribution is implementation-defined; Box-Muller over the
// fully specified mt19937_64 stream keeps channels identical across
// standard libraries.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}

  double next() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

 private:
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace

ChannelMatrix generate_channel(const Scenario& scenario, std::uint64_t seed) {
  if (scenario.n_tx <= 0 || scenario.n_users <= 0)
    fail(ErrorCode::InvalidArgument, "generate_channel: dimensions must be positive");
  GaussianStream gauss(seed);
  const double scale = 1.0 / std::sqrt(2.0);
  ChannelMatrix c;
  c.h.resize(scenario.n_tx, scenario.n_users);
  for (Eigen::Index j = 0; j < c.h.cols(); ++j)
    for (Eigen::Index i = 0; i < c.h.rows(); ++i) {
      const double re = gauss.next();
      const double im = gauss.next();
      c.h(i, j) = cplx(re * scale, im * scale);
    }
  return c;
}

double dbm_to_linear(double x_dbm) { return std::pow(10.0, x_dbm / 10.0); }

double linear_to_dbm(double x_linear) {
  if (!(x_linear > 0.0))
    fail(ErrorCode::InvalidArgument, "linear_to_dbm: value must be > 0");
  return 10.0 * std::log10(x_linear);
}

RVector evaluate_sinr(const ChannelMatrix& channel, const CMatrix& w,
                      const HermitianMatrix& sensing_cov, double noise) {
  const auto nt = channel.h.rows();
  const auto k = channel.h.cols();
  if (w.rows() != nt || w.cols() != k || sensing_cov.dim() != nt)
    fail(ErrorCode::DimensionMismatch, "evaluate_sinr: dimension mismatch");
  // g(k, i) = h_k^H w_i
  const CMatrix g = channel.h.adjoint() * w;
  const CMatrix ch = sensing_cov.matrix() * channel.h;
  RVector out(k);
  for (Eigen::Index u = 0; u < k; ++u) {
    const double signal = std::norm(g(u, u));
    const double total = g.row(u).cwiseAbs2().sum();
    const double sensing = (channel.h.col(u).adjoint() * ch.col(u))(0).real();
    out(u) = signal / (total - signal + sensing + noise);
  }
  return out;
}

double evaluate_crb_objective(const HermitianMatrix& cov) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(cov.matrix(), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    fail(ErrorCode::NumericalFailure, "evaluate_crb_objective: eigensolver failed");
  const RVector& ev = es.eigenvalues();
  const double vmax = ev.maxCoeff();
  const double vmin = ev.minCoeff();
  if (!(vmax > 0.0) || vmin <= 1e-12 * vmax) {
    std::ostringstream os;
    os << "evaluate_crb_objective: covariance not positive definite (min eig "
       << vmin << ", max eig " << vmax << ")";
    fail(ErrorCode::SingularCovariance, os.str());
  }
  Eigen::LLT<CMatrix> llt(cov.matrix());
  if (llt.info() != Eigen::Success)
    fail(ErrorCode::SingularCovariance, "evaluate_crb_objective: Cholesky failed");
  const CMatrix inv = llt.solve(CMatrix::Identity(cov.dim(), cov.dim()));
  return inv.diagonal().real().sum();
}

}  // namespace isac
