#pragma once

#include <complex>
#include <initializer_list>
#include <vector>

#include "linksynth/dualquat.hpp"

namespace linksynth {

// Coefficients are stored highest degree first: c0 t^n + c1 t^(n-1) + ... + cn.
// Exact leading zeros are dropped on construction; the zero polynomial is {0}.
class RealPolynomial {
 public:
  RealPolynomial() : c_{0.0} {}
  RealPolynomial(std::initializer_list<double> coeffs);
  explicit RealPolynomial(std::vector<double> coeffs);

  static RealPolynomial constant(double v) { return RealPolynomial({v}); }
  // Monic polynomial with the given real roots.
  static RealPolynomial from_roots(const std::vector<double>& roots);

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  const std::vector<double>& coeffs() const { return c_; }
  double operator[](std::size_t idx) const { return c_[idx]; }
  double leading() const { return c_.front(); }
  bool is_zero() const { return c_.size() == 1 && c_[0] == 0.0; }
  double max_abs_coeff() const;

  double operator()(double t) const;
  std::complex<double> operator()(std::complex<double> z) const;

  RealPolynomial derivative() const;
  RealPolynomial monic() const;
  // Drops leading coefficients with |c| <= rel_tol * max|c|.
  RealPolynomial trimmed(double rel_tol) const;
  // p(t + shift)
  RealPolynomial shifted(double shift) const;

  struct Division;
  Division divide(const RealPolynomial& divisor) const;

  RealPolynomial& operator+=(const RealPolynomial& o);
  RealPolynomial& operator-=(const RealPolynomial& o);
  RealPolynomial& operator*=(double s);

  friend RealPolynomial operator+(RealPolynomial a, const RealPolynomial& b) {
    return a += b;
  }
  friend RealPolynomial operator-(RealPolynomial a, const RealPolynomial& b) {
    return a -= b;
  }
  friend RealPolynomial operator*(RealPolynomial a, double s) { return a *= s; }
  friend RealPolynomial operator*(double s, RealPolynomial a) { return a *= s; }
  friend RealPolynomial operator*(const RealPolynomial& a,
                                  const RealPolynomial& b);

 private:
  void normalize_storage();

  std::vector<double> c_;
};

struct RealPolynomial::Division {
  RealPolynomial quotient;
  RealPolynomial remainder;
};

/// Polynomial with dual quaternion coefficients, highest degree first. The
/// indeterminate t is real and commutes with every coefficient.
class DQPolynomial {
 public:
  DQPolynomial() : c_{DualQuaternion()} {}
  DQPolynomial(std::initializer_list<DualQuaternion> coeffs);
  explicit DQPolynomial(std::vector<DualQuaternion> coeffs);

  // t - h
  static DQPolynomial linear(const DualQuaternion& h);
  static DQPolynomial constant(const DualQuaternion& c) { return {c}; }

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  const std::vector<DualQuaternion>& coeffs() const { return c_; }
  const DualQuaternion& operator[](std::size_t idx) const { return c_[idx]; }
  const DualQuaternion& leading() const { return c_.front(); }
  bool is_zero() const { return c_.size() == 1 && c_[0].is_zero(); }
  double max_abs_coeff() const;

  // Real polynomial formed by one of the eight coefficient slots.
  RealPolynomial component(int slot) const;

  // Horner evaluation at a real parameter.
  DualQuaternion operator()(double t) const;
  // Right substitution: sum_l c_l * h^(n-l). Equals the remainder of right
  // division by (t - h).
  DualQuaternion eval_right(const DualQuaternion& h) const;

  DQPolynomial conj() const;
  DQPolynomial derivative() const;

  DQPolynomial& operator+=(const DQPolynomial& o);
  DQPolynomial& operator-=(const DQPolynomial& o);
  DQPolynomial& operator*=(double s);

  friend DQPolynomial operator+(DQPolynomial a, const DQPolynomial& b) {
    return a += b;
  }
  friend DQPolynomial operator-(DQPolynomial a, const DQPolynomial& b) {
    return a -= b;
  }
  friend DQPolynomial operator*(DQPolynomial a, double s) { return a *= s; }
  friend DQPolynomial operator*(double s, DQPolynomial a) { return a *= s; }
  friend DQPolynomial operator*(const DQPolynomial& a, const DQPolynomial& b);
  friend DQPolynomial operator*(const DQPolynomial& a, const RealPolynomial& b);

 private:
  void normalize_storage();

  std::vector<DualQuaternion> c_;
};

DQPolynomial dqpoly_mul(const DQPolynomial& p, const DQPolynomial& q);

/// P * conj(P). Every non-real slot must satisfy
/// |c| <= tau_real * max|real coefficient|, otherwise NotRealNorm is thrown.
RealPolynomial dqpoly_norm(const DQPolynomial& p, double tau_real = 1e-10);

// Largest non-real coefficient of P * conj(P) relative to the largest real one.
double dqpoly_norm_residual(const DQPolynomial& p);

struct DQRealDivision {
  DQPolynomial quotient;
  DQPolynomial remainder;
};

// P = quotient * M + remainder with deg remainder < deg M.
DQRealDivision dqpoly_div_real(const DQPolynomial& p, const RealPolynomial& m);

struct DQLinearDivision {
  DQPolynomial quotient;
  DualQuaternion remainder;
};

// P = quotient * (t - h) + remainder; the linear factor sits on the right.
DQLinearDivision dqpoly_div_linear(const DQPolynomial& p,
                                   const DualQuaternion& h);

DualQuaternion dqpoly_eval(const DQPolynomial& p, double t);

}  // namespace linksynth
