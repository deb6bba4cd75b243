#include "linksynth/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "linksynth/error.hpp"

namespace linksynth {

namespace {

constexpr int kScanIntervals = 4096;
constexpr int kNewtonIters = 60;

// Parlett-Reinsch balancing; improves eigenvalue accuracy of companions.
void balance(Eigen::MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  constexpr double radix = 2.0;
  bool done = false;
  while (!done) {
    done = true;
    for (int i = 0; i < n; ++i) {
      double r = 0.0;
      double c = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix;
      double f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= radix;
        c *= radix * radix;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= radix * radix;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        a.row(i) /= f;
        a.col(i) *= f;
      }
    }
  }
}

// Eigenvalues of the companion matrix of p (degree >= 1), in the original
// variable.
Eigen::VectorXcd companion_roots(const RealPolynomial& p) {
  const int n = p.degree();
  const auto& c = p.coeffs();
  const double lead = c[0];
  // Root-magnitude scale (Fujiwara style bound) for t = sigma * tau.
  double sigma = 0.0;
  for (int k = 1; k <= n; ++k) {
    const double ratio = std::abs(c[k] / lead);
    if (ratio > 0.0) sigma = std::max(sigma, std::pow(ratio, 1.0 / k));
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) sigma = 1.0;

  // Monic scaled coefficients a_k = c_k / (lead * sigma^k).
  Eigen::VectorXd a(n);
  double sk = 1.0;
  for (int k = 1; k <= n; ++k) {
    sk *= sigma;
    a[k - 1] = c[k] / (lead * sk);
  }
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) comp(0, k) = -a[k];
  for (int k = 1; k < n; ++k) comp(k, k - 1) = 1.0;
  balance(comp);

  Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorCode::kConditioningFailure,
                "companion eigenvalue iteration did not converge");
  }
  return es.eigenvalues() * sigma;
}

double residual_bound(const RealPolynomial& p, double r, double tol) {
  return tol * p.max_abs_coeff() *
         std::pow(std::max(1.0, std::abs(r)), p.degree());
}

double newton_polish(const RealPolynomial& p, const RealPolynomial& dp,
                     double r) {
  double best = r;
  double best_val = std::abs(p(r));
  for (int it = 0; it < kNewtonIters; ++it) {
    const double d = dp(r);
    if (d == 0.0) break;
    const double step = p(r) / d;
    r -= step;
    if (!std::isfinite(r)) break;
    const double v = std::abs(p(r));
    if (v < best_val) {
      best = r;
      best_val = v;
    }
    if (std::abs(step) <= 4 * std::numeric_limits<double>::epsilon() *
                              std::max(1.0, std::abs(r))) {
      break;
    }
  }
  return best;
}

std::complex<double> newton_polish(const RealPolynomial& p,
                                   const RealPolynomial& dp,
                                   std::complex<double> z) {
  std::complex<double> best = z;
  double best_val = std::abs(p(z));
  for (int it = 0; it < kNewtonIters; ++it) {
    const std::complex<double> d = dp(z);
    if (d == 0.0) break;
    const std::complex<double> step = p(z) / d;
    z -= step;
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) break;
    const double v = std::abs(p(z));
    if (v < best_val) {
      best = z;
      best_val = v;
    }
    if (std::abs(step) <=
        4 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(z))) {
      break;
    }
  }
  return best;
}

// Bisection on a sign change followed by Newton polish.
double bracket_root(const RealPolynomial& p, const RealPolynomial& dp,
                    double a, double b) {
  double fa = p(a);
  for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(a));
       ++it) {
    const double m = 0.5 * (a + b);
    const double fm = p(m);
    if (fm == 0.0) return m;
    if ((fa < 0.0) == (fm < 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  const double r = newton_polish(p, dp, 0.5 * (a + b));
  return (r >= a && r <= b) ? r : 0.5 * (a + b);
}

double cauchy_bound(const RealPolynomial& p) {
  const auto& c = p.coeffs();
  double m = 0.0;
  for (std::size_t k = 1; k < c.size(); ++k) {
    m = std::max(m, std::abs(c[k] / c[0]));
  }
  return 1.0 + m;
}

}  // namespace

std::vector<double> real_roots(const RealPolynomial& p, double lo, double hi,
                               double tol) {
  if (p.degree() < 1) {
    throw Error(ErrorCode::kInvalidArgument, "real_roots needs degree >= 1");
  }
  const RealPolynomial dp = p.derivative();
  std::vector<double> roots;

  const Eigen::VectorXcd eig = companion_roots(p);
  for (Eigen::Index k = 0; k < eig.size(); ++k) {
    const std::complex<double> z = eig[k];
    if (std::abs(z.imag()) > 1e-6 * std::max(1.0, std::abs(z))) continue;
    const double r = newton_polish(p, dp, z.real());
    if (r < lo || r > hi) continue;
    if (std::abs(p(r)) <= residual_bound(p, r, tol)) roots.push_back(r);
  }
  std::sort(roots.begin(), roots.end());

  // Sign-change scan catches roots the eigenvalue route may have lost.
  const double bound = cauchy_bound(p);
  const double slo = std::isfinite(lo) ? lo : -bound;
  const double shi = std::isfinite(hi) ? hi : bound;
  if (shi > slo) {
    const double h = (shi - slo) / kScanIntervals;
    double a = slo;
    double fa = p(a);
    for (int i = 1; i <= kScanIntervals; ++i) {
      const double b = (i == kScanIntervals) ? shi : slo + i * h;
      const double fb = p(b);
      if ((fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0)) {
        const bool covered = std::any_of(roots.begin(), roots.end(),
                                         [&](double r) { return r >= a && r <= b; });
        if (!covered) {
          const double r = bracket_root(p, dp, a, b);
          if (std::abs(p(r)) <= residual_bound(p, r, tol)) roots.push_back(r);
        }
      }
      a = b;
      fa = fb;
    }
  }
  std::sort(roots.begin(), roots.end());

  std::vector<double> out;
  for (double r : roots) {
    if (!out.empty() && r - out.back() <= 1e-7 * std::max(1.0, std::abs(r))) {
      continue;
    }
    out.push_back(r);
  }
  return out;
}

ComplexRoots complex_roots(const RealPolynomial& p) {
  ComplexRoots out;
  if (p.degree() < 1) return out;
  const RealPolynomial dp = p.derivative();
  const Eigen::VectorXcd eig = companion_roots(p);
  for (Eigen::Index k = 0; k < eig.size(); ++k) {
    const std::complex<double> z = eig[k];
    if (z.imag() > 0.0) {
      std::complex<double> w = newton_polish(p, dp, z);
      out.pairs.emplace_back(w.real(), std::abs(w.imag()));
    } else if (z.imag() == 0.0) {
      out.real.push_back(newton_polish(p, dp, z.real()));
    }
  }
  auto by_real = [](const std::complex<double>& a, const std::complex<double>& b) {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
  };
  std::sort(out.pairs.begin(), out.pairs.end(), by_real);
  std::sort(out.real.begin(), out.real.end());
  return out;
}

LeastSquaresSolution lstsq_min_norm(const Eigen::MatrixXd& a,
                                    const Eigen::VectorXd& b,
                                    double rel_threshold) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(rel_threshold);
  return {svd.solve(b), static_cast<int>(svd.rank())};
}

}  // namespace linksynth
