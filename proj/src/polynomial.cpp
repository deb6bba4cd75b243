#include "linksynth/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "linksynth/error.hpp"

namespace linksynth {

namespace {

// Adds `src` into `dst` with both aligned at the constant term.
template <typename T>
void add_aligned(std::vector<T>& dst, const std::vector<T>& src, double sign) {
  if (src.size() > dst.size()) {
    dst.insert(dst.begin(), src.size() - dst.size(), T());
  }
  const std::size_t off = dst.size() - src.size();
  for (std::size_t i = 0; i < src.size(); ++i) {
    dst[off + i] += src[i] * sign;
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// RealPolynomial

RealPolynomial::RealPolynomial(std::initializer_list<double> coeffs)
    : c_(coeffs) {
  normalize_storage();
}

RealPolynomial::RealPolynomial(std::vector<double> coeffs)
    : c_(std::move(coeffs)) {
  normalize_storage();
}

void RealPolynomial::normalize_storage() {
  auto first = std::find_if(c_.begin(), c_.end(),
                            [](double v) { return v != 0.0; });
  c_.erase(c_.begin(), first);
  if (c_.empty()) c_.push_back(0.0);
}

RealPolynomial RealPolynomial::from_roots(const std::vector<double>& roots) {
  RealPolynomial p = constant(1.0);
  for (double r : roots) p = p * RealPolynomial({1.0, -r});
  return p;
}

double RealPolynomial::max_abs_coeff() const {
  double m = 0.0;
  for (double v : c_) m = std::max(m, std::abs(v));
  return m;
}

double RealPolynomial::operator()(double t) const {
  double r = 0.0;
  for (double v : c_) r = r * t + v;
  return r;
}

std::complex<double> RealPolynomial::operator()(std::complex<double> z) const {
  std::complex<double> r = 0.0;
  for (double v : c_) r = r * z + v;
  return r;
}

RealPolynomial RealPolynomial::derivative() const {
  const int n = degree();
  if (n == 0) return {};
  std::vector<double> d(n);
  for (int i = 0; i < n; ++i) d[i] = c_[i] * (n - i);
  return RealPolynomial(std::move(d));
}

RealPolynomial RealPolynomial::monic() const {
  if (is_zero()) throw Error(ErrorCode::kInvalidArgument, "zero polynomial");
  RealPolynomial r = *this;
  r *= 1.0 / leading();
  return r;
}

RealPolynomial RealPolynomial::trimmed(double rel_tol) const {
  const double cut = rel_tol * max_abs_coeff();
  std::vector<double> c = c_;
  auto first = std::find_if(c.begin(), c.end(),
                            [cut](double v) { return std::abs(v) > cut; });
  c.erase(c.begin(), first);
  return RealPolynomial(std::move(c));
}

RealPolynomial RealPolynomial::shifted(double shift) const {
  // Horner in the polynomial ring: r = r * (t + shift) + c.
  const RealPolynomial lin({1.0, shift});
  RealPolynomial r;
  for (double v : c_) r = r * lin + constant(v);
  return r;
}

RealPolynomial::Division RealPolynomial::divide(
    const RealPolynomial& divisor) const {
  if (divisor.is_zero()) {
    throw Error(ErrorCode::kInvalidArgument, "division by zero polynomial");
  }
  const int n = degree();
  const int m = divisor.degree();
  if (n < m) return {RealPolynomial(), *this};
  std::vector<double> rem = c_;
  std::vector<double> quo(n - m + 1);
  for (int k = 0; k <= n - m; ++k) {
    const double q = rem[k] / divisor.leading();
    quo[k] = q;
    for (int j = 0; j <= m; ++j) rem[k + j] -= q * divisor[j];
  }
  std::vector<double> r(rem.begin() + (n - m + 1), rem.end());
  if (r.empty()) r.push_back(0.0);
  return {RealPolynomial(std::move(quo)), RealPolynomial(std::move(r))};
}

RealPolynomial& RealPolynomial::operator+=(const RealPolynomial& o) {
  add_aligned(c_, o.c_, 1.0);
  normalize_storage();
  return *this;
}

RealPolynomial& RealPolynomial::operator-=(const RealPolynomial& o) {
  add_aligned(c_, o.c_, -1.0);
  normalize_storage();
  return *this;
}

RealPolynomial& RealPolynomial::operator*=(double s) {
  for (double& v : c_) v *= s;
  normalize_storage();
  return *this;
}

RealPolynomial operator*(const RealPolynomial& a, const RealPolynomial& b) {
  std::vector<double> r(a.c_.size() + b.c_.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.c_.size(); ++i) {
    for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
  }
  return RealPolynomial(std::move(r));
}

// ---------------------------------------------------------------------------
// DQPolynomial

DQPolynomial::DQPolynomial(std::initializer_list<DualQuaternion> coeffs)
    : c_(coeffs) {
  normalize_storage();
}

DQPolynomial::DQPolynomial(std::vector<DualQuaternion> coeffs)
    : c_(std::move(coeffs)) {
  normalize_storage();
}

void DQPolynomial::normalize_storage() {
  auto first = std::find_if(c_.begin(), c_.end(),
                            [](const DualQuaternion& q) { return !q.is_zero(); });
  c_.erase(c_.begin(), first);
  if (c_.empty()) c_.emplace_back();
}

DQPolynomial DQPolynomial::linear(const DualQuaternion& h) {
  return {DualQuaternion::scalar(1.0), -h};
}

double DQPolynomial::max_abs_coeff() const {
  double m = 0.0;
  for (const auto& q : c_) m = std::max(m, q.max_abs());
  return m;
}

RealPolynomial DQPolynomial::component(int slot) const {
  std::vector<double> r(c_.size());
  for (std::size_t i = 0; i < c_.size(); ++i) r[i] = c_[i][slot];
  return RealPolynomial(std::move(r));
}

DualQuaternion DQPolynomial::operator()(double t) const {
  DualQuaternion r;
  for (const auto& q : c_) r = r * t + q;
  return r;
}

DualQuaternion DQPolynomial::eval_right(const DualQuaternion& h) const {
  // Horner with h multiplied from the right keeps coefficients on the left.
  DualQuaternion r;
  for (const auto& q : c_) r = r * h + q;
  return r;
}

DQPolynomial DQPolynomial::conj() const {
  std::vector<DualQuaternion> r(c_.size());
  std::transform(c_.begin(), c_.end(), r.begin(),
                 [](const DualQuaternion& q) { return dq_conj(q); });
  return DQPolynomial(std::move(r));
}

DQPolynomial DQPolynomial::derivative() const {
  const int n = degree();
  if (n == 0) return {};
  std::vector<DualQuaternion> d(n);
  for (int i = 0; i < n; ++i) d[i] = c_[i] * static_cast<double>(n - i);
  return DQPolynomial(std::move(d));
}

DQPolynomial& DQPolynomial::operator+=(const DQPolynomial& o) {
  add_aligned(c_, o.c_, 1.0);
  normalize_storage();
  return *this;
}

DQPolynomial& DQPolynomial::operator-=(const DQPolynomial& o) {
  add_aligned(c_, o.c_, -1.0);
  normalize_storage();
  return *this;
}

DQPolynomial& DQPolynomial::operator*=(double s) {
  for (auto& q : c_) q *= s;
  normalize_storage();
  return *this;
}

DQPolynomial operator*(const DQPolynomial& a, const DQPolynomial& b) {
  std::vector<DualQuaternion> r(a.c_.size() + b.c_.size() - 1);
  for (std::size_t i = 0; i < a.c_.size(); ++i) {
    for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
  }
  return DQPolynomial(std::move(r));
}

DQPolynomial operator*(const DQPolynomial& a, const RealPolynomial& b) {
  const auto& bc = b.coeffs();
  std::vector<DualQuaternion> r(a.c_.size() + bc.size() - 1);
  for (std::size_t i = 0; i < a.c_.size(); ++i) {
    for (std::size_t j = 0; j < bc.size(); ++j) r[i + j] += a.c_[i] * bc[j];
  }
  return DQPolynomial(std::move(r));
}

DQPolynomial dqpoly_mul(const DQPolynomial& p, const DQPolynomial& q) {
  return p * q;
}

namespace {

struct NormSplit {
  RealPolynomial real;
  double residual;  // max non-real magnitude / max real magnitude
};

NormSplit split_norm(const DQPolynomial& p) {
  const DQPolynomial full = p * p.conj();
  const RealPolynomial real = full.component(0);
  double nonreal = 0.0;
  for (const auto& c : full.coeffs()) {
    for (int s = 1; s < 8; ++s) nonreal = std::max(nonreal, std::abs(c[s]));
  }
  const double scale = real.max_abs_coeff();
  const double residual =
      scale > 0.0 ? nonreal / scale : (nonreal > 0.0 ? INFINITY : 0.0);
  return {real, residual};
}

}  // namespace

RealPolynomial dqpoly_norm(const DQPolynomial& p, double tau_real) {
  NormSplit s = split_norm(p);
  if (!(s.residual <= tau_real)) {
    std::ostringstream msg;
    msg << "norm polynomial has relative non-real residual " << s.residual;
    throw Error(ErrorCode::kNotRealNorm, msg.str());
  }
  return s.real;
}

double dqpoly_norm_residual(const DQPolynomial& p) {
  return split_norm(p).residual;
}

DQRealDivision dqpoly_div_real(const DQPolynomial& p, const RealPolynomial& m) {
  if (m.is_zero()) {
    throw Error(ErrorCode::kInvalidArgument, "division by zero polynomial");
  }
  const int n = p.degree();
  const int dm = m.degree();
  if (n < dm) return {DQPolynomial(), p};
  std::vector<DualQuaternion> rem = p.coeffs();
  std::vector<DualQuaternion> quo(n - dm + 1);
  const double lead = m.leading();
  for (int k = 0; k <= n - dm; ++k) {
    const DualQuaternion q = rem[k] / lead;
    quo[k] = q;
    for (int j = 0; j <= dm; ++j) rem[k + j] -= q * m[j];
  }
  std::vector<DualQuaternion> r(rem.begin() + (n - dm + 1), rem.end());
  if (r.empty()) r.emplace_back();
  return {DQPolynomial(std::move(quo)), DQPolynomial(std::move(r))};
}

DQLinearDivision dqpoly_div_linear(const DQPolynomial& p,
                                   const DualQuaternion& h) {
  const auto& c = p.coeffs();
  if (c.size() == 1) return {DQPolynomial(), c[0]};
  // Synthetic division from the right: q_k = c_k + q_{k-1} h.
  std::vector<DualQuaternion> quo(c.size() - 1);
  DualQuaternion acc = c[0];
  quo[0] = acc;
  for (std::size_t k = 1; k + 1 < c.size(); ++k) {
    acc = c[k] + acc * h;
    quo[k] = acc;
  }
  const DualQuaternion rem = c.back() + acc * h;
  return {DQPolynomial(std::move(quo)), rem};
}

DualQuaternion dqpoly_eval(const DQPolynomial& p, double t) { return p(t); }

}  // namespace linksynth
