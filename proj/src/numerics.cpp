#include "isac/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace isac {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Ok: return "Ok";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::RankDeficientChannel: return "RankDeficientChannel";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    case ErrorCode::InvalidBracket: return "InvalidBracket";
    case ErrorCode::SingularCovariance: return "SingularCovariance";
    case ErrorCode::FixedPointDiverged: return "FixedPointDiverged";
    case ErrorCode::IllConditionedDual: return "IllConditionedDual";
    case ErrorCode::NumericalDivergence: return "NumericalDivergence";
    case ErrorCode::ExtractionDegenerate: return "ExtractionDegenerate";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::InternalConsistency: return "InternalConsistency";
    case ErrorCode::Infeasible: return "Infeasible";
  }
  return "Unknown";
}

double relative_asymmetry(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  const double scale = std::max(m.norm(), 1e-300);
  return (m - m.adjoint()).cwiseAbs().maxCoeff() / scale;
}

HermitianMatrix::HermitianMatrix(const CMatrix& m) {
  if (m.rows() != m.cols())
    fail(ErrorCode::DimensionMismatch, "HermitianMatrix: matrix is not square");
  if (!m.allFinite())
    fail(ErrorCode::NumericalFailure, "HermitianMatrix: non-finite entries");
  const double asym = relative_asymmetry(m);
  if (asym > kAsymmetryTolerance) {
    std::ostringstream os;
    os << "HermitianMatrix: relative asymmetry " << asym << " exceeds "
       << kAsymmetryTolerance;
    fail(ErrorCode::InvalidArgument, os.str());
  }
  m_ = 0.5 * (m + m.adjoint());
  m_.diagonal() = m_.diagonal().real().cast<cplx>();
}

HermitianMatrix HermitianMatrix::zero(Eigen::Index dim) {
  HermitianMatrix h;
  h.m_ = CMatrix::Zero(dim, dim);
  return h;
}

HermitianMatrix HermitianMatrix::identity(Eigen::Index dim) {
  HermitianMatrix h;
  h.m_ = CMatrix::Identity(dim, dim);
  return h;
}

HermitianMatrix HermitianMatrix::from_eigen(const CMatrix& vectors,
                                            const RVector& values) {
  CMatrix m = vectors * values.cast<cplx>().asDiagonal() * vectors.adjoint();
  HermitianMatrix h;
  h.m_ = 0.5 * (m + m.adjoint());
  h.m_.diagonal() = h.m_.diagonal().real().cast<cplx>();
  return h;
}

HermitianMatrix HermitianMatrix::hermitian_part(const CMatrix& m) {
  if (m.rows() != m.cols())
    fail(ErrorCode::DimensionMismatch, "HermitianMatrix: matrix is not square");
  if (!m.allFinite())
    fail(ErrorCode::NumericalFailure, "HermitianMatrix: non-finite entries");
  HermitianMatrix h;
  h.m_ = 0.5 * (m + m.adjoint());
  h.m_.diagonal() = h.m_.diagonal().real().cast<cplx>();
  return h;
}

HermitianMatrix HermitianMatrix::outer(const CVector& x) {
  HermitianMatrix h;
  h.m_ = x * x.adjoint();
  h.m_.diagonal() = h.m_.diagonal().real().cast<cplx>();
  return h;
}

HermitianMatrix HermitianMatrix::operator+(const HermitianMatrix& o) const {
  HermitianMatrix h;
  h.m_ = m_ + o.m_;
  return h;
}

HermitianMatrix HermitianMatrix::operator-(const HermitianMatrix& o) const {
  HermitianMatrix h;
  h.m_ = m_ - o.m_;
  return h;
}

HermitianMatrix HermitianMatrix::operator*(double s) const {
  HermitianMatrix h;
  h.m_ = m_ * s;
  return h;
}

HermitianMatrix& HermitianMatrix::operator+=(const HermitianMatrix& o) {
  m_ += o.m_;
  return *this;
}

EigenDecomposition hermitian_eig(const HermitianMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(m.matrix());
  if (solver.info() != Eigen::Success)
    fail(ErrorCode::NumericalFailure, "hermitian_eig: eigensolver did not converge");
  // Eigen returns ascending order.
  EigenDecomposition out;
  out.values = solver.eigenvalues().reverse();
  out.vectors = solver.eigenvectors().rowwise().reverse();
  return out;
}

HermitianMatrix reconstruct(const EigenDecomposition& e) {
  return HermitianMatrix::from_eigen(e.vectors, e.values);
}

namespace {

void check_rank(const RVector& sv, const char* who) {
  if (sv.size() == 0) fail(ErrorCode::InvalidArgument, std::string(who) + ": empty matrix");
  const double largest = sv(0);
  const double smallest = sv(sv.size() - 1);
  if (!(largest > 0.0) || smallest < 1e-10 * largest) {
    std::ostringstream os;
    os << who << ": rank-deficient input (sigma_min=" << smallest
       << ", sigma_max=" << largest << ")";
    fail(ErrorCode::RankDeficientChannel, os.str());
  }
}

}  // namespace

CompactSvd compact_svd(const CMatrix& m) {
  if (m.rows() < m.cols())
    fail(ErrorCode::DimensionMismatch, "compact_svd: expected rows >= cols");
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  check_rank(svd.singularValues(), "compact_svd");
  return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

CMatrix null_space_basis(const CMatrix& m) {
  if (m.rows() <= m.cols())
    fail(ErrorCode::DimensionMismatch, "null_space_basis: expected rows > cols");
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullU);
  check_rank(svd.singularValues(), "null_space_basis");
  return svd.matrixU().rightCols(m.rows() - m.cols());
}

double positive_cubic_root(double sigma, double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau) || !std::isfinite(sigma))
    fail(ErrorCode::InvalidArgument, "positive_cubic_root: requires finite sigma and tau > 0");

  // h(x) = x^2 (x - sigma) - tau; written this way to avoid cancellation when
  // the root sits close to sigma.
  auto h = [&](double x) { return x * x * (x - sigma) - tau; };

  // h(lo) < 0 and h(hi) >= 0 bracket the root.
  double lo = std::max(sigma, 0.0);
  double hi = lo + std::cbrt(tau);
  double x = std::min(std::max(sigma, std::cbrt(tau)) + 1.0, hi);

  for (int it = 0; it < 200; ++it) {
    const double fx = h(x);
    if (fx == 0.0) return x;
    if (fx < 0.0) lo = std::max(lo, x);
    else hi = std::min(hi, x);
    const double dfx = x * (3.0 * x - 2.0 * sigma);
    double next = (dfx > 0.0) ? x - fx / dfx : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 2.0 * std::numeric_limits<double>::epsilon() * x) {
      x = next;
      break;
    }
    x = next;
  }
  return x;
}

double monotone_scalar_root(const std::function<double(double)>& f, double lo,
                            double hi, double tolerance) {
  if (!(lo <= hi)) std::swap(lo, hi);
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    std::ostringstream os;
    os << "monotone_scalar_root: f(" << lo << ")=" << flo << " and f(" << hi
       << ")=" << fhi << " do not bracket a root";
    fail(ErrorCode::InvalidBracket, os.str());
  }
  const bool increasing = fhi > 0.0;
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (std::abs(fm) <= tolerance) return mid;
    if ((fm > 0.0) == increasing) hi = mid;
    else lo = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace isac
