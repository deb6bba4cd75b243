#include "linksynth/factorization.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "linksynth/error.hpp"
#include "linksynth/numerics.hpp"

namespace linksynth {

namespace {

bool joints_coincide(const DualQuaternion& a, const DualQuaternion& b) {
  return (a - b).norm() <= kDedupTolerance * std::max(1.0, a.norm());
}

bool same_joints(const OpenChain& a, const OpenChain& b) {
  if (a.joints.size() != b.joints.size()) return false;
  for (std::size_t i = 0; i < a.joints.size(); ++i) {
    if (!joints_coincide(a.joints[i], b.joints[i])) return false;
  }
  return true;
}

// -c0^-1 c1 of a degree-one polynomial c0 t + c1.
DualQuaternion linear_root(const DQPolynomial& p) {
  return -(dq_inverse(p[0]) * p[1]);
}

}  // namespace

std::vector<QuadraticFactor> quadratic_factors(const RealPolynomial& n) {
  if (n.degree() < 2 || n.degree() % 2 != 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "norm polynomial must have positive even degree");
  }
  const ComplexRoots roots = complex_roots(n);
  double scale = 1.0;
  for (const auto& z : roots.pairs) scale = std::max(scale, std::abs(z));
  for (double r : roots.real) scale = std::max(scale, std::abs(r));
  if (!roots.real.empty()) {
    throw Error(ErrorCode::kNonGeneric, "norm polynomial has a real root");
  }
  std::vector<QuadraticFactor> out;
  for (const auto& z : roots.pairs) {
    if (z.imag() < kGenericTolerance * scale) {
      std::ostringstream msg;
      msg << "norm polynomial root " << z.real() << " + " << z.imag()
          << "i is numerically real";
      throw Error(ErrorCode::kNonGeneric, msg.str());
    }
    out.push_back({-2.0 * z.real(), std::norm(z)});
  }
  for (std::size_t i = 0; i < roots.pairs.size(); ++i) {
    for (std::size_t j = i + 1; j < roots.pairs.size(); ++j) {
      if (std::abs(roots.pairs[i] - roots.pairs[j]) <
          kRepeatedTolerance * scale) {
        throw Error(ErrorCode::kNonGeneric,
                    "norm polynomial has a repeated quadratic factor");
      }
    }
  }
  std::sort(out.begin(), out.end(),
            [](const QuadraticFactor& a, const QuadraticFactor& b) {
              return a.b < b.b || (a.b == b.b && a.c < b.c);
            });
  return out;
}

Extraction extract_rightmost(const DQPolynomial& p, const QuadraticFactor& m) {
  if (p.degree() < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "extraction needs a polynomial of degree >= 2");
  }
  const DQPolynomial r = dqpoly_div_real(p, m.polynomial()).remainder;
  const DualQuaternion r1 = r.degree() == 1 ? r[0] : DualQuaternion();
  const DualQuaternion r2 = r.degree() == 1 ? r[1] : r[0];
  const double scale = std::max(1.0, r.max_abs_coeff());
  if (!(r1.primal_norm2() > 1e-12 * scale * scale)) {
    throw Error(ErrorCode::kNotInvertible,
                "linear remainder has a degenerate leading coefficient");
  }
  Extraction out;
  out.h = -(dq_inverse(r1) * r2);
  const DQLinearDivision div = dqpoly_div_linear(p, out.h);
  const double residual = div.remainder.max_abs();
  if (residual > kExtractionTolerance * std::max(1.0, p.max_abs_coeff())) {
    std::ostringstream msg;
    msg << "t - h leaves remainder " << residual;
    throw Error(ErrorCode::kResidualTooLarge, msg.str());
  }
  out.quotient = div.quotient;
  return out;
}

DualQuaternion chain_eval(const OpenChain& chain, double t) {
  DualQuaternion q = chain.leading;
  for (const auto& h : chain.joints) q = q * (DualQuaternion::scalar(t) - h);
  return q;
}

DQPolynomial chain_polynomial(const OpenChain& chain) {
  DQPolynomial p = DQPolynomial::constant(chain.leading);
  for (const auto& h : chain.joints) p = p * DQPolynomial::linear(h);
  return p;
}

OpenChain factorize(const DQPolynomial& p, const std::vector<int>& order) {
  const int n = p.degree();
  if (n < 1) {
    throw Error(ErrorCode::kInvalidArgument, "cannot factorize a constant");
  }
  OpenChain chain;
  chain.leading = p.leading();
  DQPolynomial q = DQPolynomial::constant(dq_inverse(chain.leading)) * p;

  chain.joints.resize(n);
  if (n == 1) {
    chain.joints[0] = linear_root(q);
    return chain;
  }
  const std::vector<QuadraticFactor> quads = quadratic_factors(dqpoly_norm(q));
  std::vector<int> identity(n);
  std::iota(identity.begin(), identity.end(), 0);
  if (static_cast<int>(order.size()) != n ||
      !std::is_permutation(order.begin(), order.end(), identity.begin())) {
    throw Error(ErrorCode::kInvalidArgument,
                "order must be a permutation of the quadratic factors");
  }
  chain.permutation = order;
  for (int s = 0; s + 1 < n; ++s) {
    Extraction e = extract_rightmost(q, quads[order[s]]);
    chain.joints[n - 1 - s] = e.h;
    q = std::move(e.quotient);
  }
  chain.joints[0] = linear_root(q);
  return chain;
}

std::vector<OpenChain> all_factorizations(const DQPolynomial& p, bool dedupe) {
  const int n = p.degree();
  std::vector<int> perm(std::max(n, 0));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<OpenChain> out;
  do {
    OpenChain c = factorize(p, perm);
    if (dedupe && std::any_of(out.begin(), out.end(), [&](const OpenChain& o) {
          return same_joints(o, c);
        })) {
      continue;
    }
    out.push_back(std::move(c));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

std::vector<DualQuaternion> Linkage6R::joints() const {
  std::vector<DualQuaternion> out = chain_a.joints;
  out.insert(out.end(), chain_b.joints.rbegin(), chain_b.joints.rend());
  return out;
}

Linkage6R make_linkage(const OpenChain& a, const OpenChain& b) {
  if ((!a.permutation.empty() && a.permutation == b.permutation) ||
      same_joints(a, b)) {
    throw Error(ErrorCode::kIdenticalChains,
                "a linkage needs two different chains");
  }
  return {a, b};
}

std::vector<double> sample_parameters(int samples) {
  std::vector<double> ts;
  ts.reserve(std::max(samples, 0));
  for (int k = 0; k < samples; ++k) {
    const double theta = -0.5 * std::numbers::pi +
                         std::numbers::pi * (k + 0.5) / samples;
    ts.push_back(std::tan(theta));
  }
  return ts;
}

double verify_chain(const OpenChain& chain, const DQPolynomial& p,
                    int samples) {
  double worst = 0.0;
  for (double t : sample_parameters(samples)) {
    worst = std::max(worst,
                     projective_distance(chain_eval(chain, t), dqpoly_eval(p, t)));
  }
  return worst;
}

double linkage_closure_residual(const Linkage6R& linkage, int samples) {
  double worst = 0.0;
  for (double t : sample_parameters(samples)) {
    worst = std::max(worst, projective_distance(chain_eval(linkage.chain_a, t),
                                                chain_eval(linkage.chain_b, t)));
  }
  return worst;
}

int shared_joints(const OpenChain& a, const OpenChain& b) {
  int count = 0;
  for (const auto& hb : b.joints) {
    if (std::any_of(a.joints.begin(), a.joints.end(),
                    [&](const DualQuaternion& ha) {
                      return joints_coincide(ha, hb);
                    })) {
      ++count;
    }
  }
  return count;
}

PluckerAxis joint_axis(const DualQuaternion& h) {
  const Eigen::Vector3d v = h.primal_vec();
  const double s = v.norm();
  if (!(s > 1e-12 * std::max(1.0, h.max_abs()))) {
    throw Error(ErrorCode::kDegenerateJoint,
                "joint has no rotational part");
  }
  return {-v / s, -h.dual_vec() / s};
}

std::vector<PluckerAxis> chain_axes(const OpenChain& chain) {
  std::vector<PluckerAxis> out;
  out.reserve(chain.joints.size());
  for (const auto& h : chain.joints) out.push_back(joint_axis(h));
  return out;
}

}  // namespace linksynth
