#pragma once

#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "isac/error.hpp"

namespace isac {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/**
 * Square complex matrix equal to its own conjugate transpose.
 *
 * Construction checks the asymmetry against the Frobenius norm and then
 * stores the exact Hermitian part, so downstream code can rely on
 * entries(i, j) == conj(entries(j, i)) bit for bit.
 */
class HermitianMatrix {
 public:
  static constexpr double kAsymmetryTolerance = 1e-12;

  HermitianMatrix() = default;
  explicit HermitianMatrix(const CMatrix& m);

  static HermitianMatrix zero(Eigen::Index dim);
  static HermitianMatrix identity(Eigen::Index dim);
  // U * diag(values) * U^H. Exact Hermitian by construction.
  static HermitianMatrix from_eigen(const CMatrix& vectors,
                                    const RVector& values);
  // x x^H
  static HermitianMatrix outer(const CVector& x);
  // (m + m^H)/2 without the asymmetry check. For expressions that are
  // Hermitian in exact arithmetic but formed through general products, where
  // cancellation can make the rounding large relative to the result.
  static HermitianMatrix hermitian_part(const CMatrix& m);

  Eigen::Index dim() const { return m_.rows(); }
  const CMatrix& matrix() const { return m_; }
  double trace() const { return m_.diagonal().real().sum(); }

  HermitianMatrix operator+(const HermitianMatrix& o) const;
  HermitianMatrix operator-(const HermitianMatrix& o) const;
  HermitianMatrix operator*(double s) const;
  HermitianMatrix& operator+=(const HermitianMatrix& o);

 private:
  CMatrix m_;
};

/// max |m - m^H| / max(||m||_F, 1e-300)
double relative_asymmetry(const CMatrix& m);

struct EigenDecomposition {
  CMatrix vectors;  // unitary, columns are eigenvectors
  RVector values;   // sorted descending
};

EigenDecomposition hermitian_eig(const HermitianMatrix& m);
HermitianMatrix reconstruct(const EigenDecomposition& e);

struct CompactSvd {
  CMatrix left_basis;      // rows x cols, orthonormal columns
  RVector singular_values; // descending
  CMatrix right_basis;     // cols x cols
};

// Throws RankDeficientChannel when the smallest singular value falls below
// 1e-10 times the largest.
CompactSvd compact_svd(const CMatrix& m);

// Orthonormal basis of N(m^H) for a tall full-column-rank m.
CMatrix null_space_basis(const CMatrix& m);

// Unique positive root of x^3 - sigma x^2 - tau = 0 (tau > 0).
double positive_cubic_root(double sigma, double tau);

/**
 * Root of a monotone function on a sign-changing bracket by bisection.
 *
 * Stops when |f| <= tolerance or the bracket stops shrinking in floating
 * point. Throws InvalidBracket when f(lo) and f(hi) share a strict sign.
 */
double monotone_scalar_root(const std::function<double(double)>& f, double lo,
                            double hi, double tolerance = 1e-12);

}  // namespace isac
