#pragma once

#include <complex>
#include <vector>

#include <Eigen/Core>

#include "linksynth/polynomial.hpp"

namespace linksynth {

/// All real roots of p in [lo, hi], sorted ascending, multiplicities
/// collapsed. Roots come from the eigenvalues of the companion matrix of a
/// max-normalized, variable-scaled copy of p, are Newton-polished on p, and
/// are cross-checked against a 4096-point sign-change scan of the range.
/// Every returned root r satisfies
///   |p(r)| <= tol * max|coeff| * max(1, |r|)^deg.
/// Infinite bounds are allowed; the scan then covers the Cauchy bound.
std::vector<double> real_roots(const RealPolynomial& p, double lo, double hi,
                               double tol = 1e-9);

struct ComplexRoots {
  // One representative (positive imaginary part) per conjugate pair.
  std::vector<std::complex<double>> pairs;
  std::vector<double> real;
};

ComplexRoots complex_roots(const RealPolynomial& p);

struct LeastSquaresSolution {
  Eigen::VectorXd x;
  int rank = 0;
};

// Minimum-norm least-squares solution of A x = b; singular values below
// 1e-10 times the largest are treated as zero.
LeastSquaresSolution lstsq_min_norm(const Eigen::MatrixXd& a,
                                    const Eigen::VectorXd& b,
                                    double rel_threshold = 1e-10);

}  // namespace linksynth
