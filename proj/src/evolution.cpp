#include "linksynth/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include <Eigen/SVD>

#include "linksynth/error.hpp"
#include "linksynth/numerics.hpp"

namespace linksynth {

namespace {

using PolyQuat = std::array<RealPolynomial, 4>;

PolyQuat poly_quat_mul(const PolyQuat& a, const PolyQuat& b) {
  return {a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
          a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
          a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
          a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0]};
}

PolyQuat poly_quat_conj(const PolyQuat& q) {
  return {q[0], -1.0 * q[1], -1.0 * q[2], -1.0 * q[3]};
}

// Foot-normal data in the shifted variable tau = t - shift.
struct FootNormal {
  RealPolynomial f;
  RealPolynomial nu;
  double shift = 0.0;
};

double mean_h0(const FactorizedCurve& c) {
  double s = 0.0;
  for (const auto& f : c.factors()) s += f.h0;
  return c.degree() > 0 ? s / c.degree() : 0.0;
}

FootNormal build_footnormal(const FactorizedCurve& c, const Embedding12& target,
                            const FeatureCloud& cloud) {
  if (c.degree() < 1) {
    throw Error(ErrorCode::kDegenerateCurve, "curve has no factors");
  }
  FootNormal out;
  out.shift = mean_h0(c);
  const DQPolynomial p = expand(c);

  PolyQuat x, y;
  for (int slot = 0; slot < 4; ++slot) {
    x[slot] = p.component(slot).shifted(out.shift);
    y[slot] = p.component(4 + slot).shifted(out.shift);
  }
  out.nu = x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3];

  const RealPolynomial &w = x[0], &a = x[1], &b = x[2], &d = x[3];
  std::array<RealPolynomial, 12> n;
  n[0] = w * w + a * a - b * b - d * d;
  n[1] = 2.0 * (a * b - w * d);
  n[2] = 2.0 * (a * d + w * b);
  n[3] = 2.0 * (a * b + w * d);
  n[4] = w * w - a * a + b * b - d * d;
  n[5] = 2.0 * (b * d - w * a);
  n[6] = 2.0 * (a * d - w * b);
  n[7] = 2.0 * (b * d + w * a);
  n[8] = w * w - a * a - b * b + d * d;
  const PolyQuat tr = poly_quat_mul(y, poly_quat_conj(x));
  for (int k = 0; k < 3; ++k) n[9 + k] = 2.0 * tr[1 + k];

  const Matrix12& g = cloud.gram();
  const Embedding12 gt = g * target;
  RealPolynomial nn, tn;
  for (int i = 0; i < 12; ++i) {
    RealPolynomial gn;
    for (int j = 0; j < 12; ++j) {
      if (g(i, j) != 0.0) gn += g(i, j) * n[j];
    }
    nn += n[i] * gn;
    tn += gt[i] * n[i];
  }

  // <N, N>_G is divisible by nu on Study's quadric, so the squared distance
  // is |TP|^2 + h / nu.
  const RealPolynomial h = nn.divide(out.nu).quotient - 2.0 * tn;
  RealPolynomial f = h.derivative() * out.nu - h * out.nu.derivative();
  if (h.degree() == out.nu.degree() && f.degree() == 2 * h.degree() - 1) {
    std::vector<double> cs = f.coeffs();
    cs.erase(cs.begin());
    f = RealPolynomial(std::move(cs));
  }
  out.f = std::move(f);
  return out;
}

double stationarity(const FactorizedCurve& c, const Embedding12& target,
                    const FeatureCloud& cloud, double t) {
  const CurvePointDerivatives cpd = curve_point_derivatives(c, t, false);
  return cloud.inner(target - cpd.embedding, cpd.t_derivative);
}

// Limit pose of every factorized curve: its leading coefficient is real.
Embedding12 identity_embedding() { return pose_to_embedding(Pose()); }

FootpointResult evaluate_at(const FactorizedCurve& c, const Embedding12& target,
                            const FeatureCloud& cloud, double t) {
  FootpointResult r;
  r.t = t;
  r.embedding = curve_embedding(c, t);
  r.distance = embedding_distance(target, r.embedding, cloud);
  return r;
}

// Newton on the directly evaluated stationarity residual g = -f / (2 nu^2).
double polish_root(const FactorizedCurve& c, const Embedding12& target,
                   const FeatureCloud& cloud, const FootNormal& fn, double t,
                   double lo, double hi) {
  const RealPolynomial fp = fn.f.derivative();
  double g = stationarity(c, target, cloud, t);
  for (int it = 0; it < 4 && g != 0.0; ++it) {
    const double tau = t - fn.shift;
    const double nu = fn.nu(tau);
    const double gp = -fp(tau) / (2.0 * nu * nu);
    if (gp == 0.0 || !std::isfinite(gp)) break;
    const double next = t - g / gp;
    if (!(next >= lo && next <= hi)) break;
    const double g_next = stationarity(c, target, cloud, next);
    if (!(std::abs(g_next) < std::abs(g))) break;
    t = next;
    g = g_next;
  }
  return t;
}

constexpr int kSampleCount = 2048;
constexpr int kMaxPolynomialDegree = 30;

FootpointResult sampled_footpoint(const FactorizedCurve& c,
                                  const Embedding12& target,
                                  const FeatureCloud& cloud, double lo,
                                  double hi) {
  const double step = (hi - lo) / (kSampleCount - 1);
  std::optional<FootpointResult> best;
  int best_k = 0;
  for (int k = 0; k < kSampleCount; ++k) {
    const double t = k + 1 == kSampleCount ? hi : lo + k * step;
    try {
      FootpointResult r = evaluate_at(c, target, cloud, t);
      if (!best || r.distance < best->distance) {
        best = r;
        best_k = k;
      }
    } catch (const Error&) {
    }
  }
  if (!best) {
    throw Error(ErrorCode::kNoCandidate, "no sample point could be evaluated");
  }
  // Golden-section refinement in the bracketing cells.
  double a = std::max(lo, lo + (best_k - 1) * step);
  double b = std::min(hi, lo + (best_k + 1) * step);
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 80 && b - a > 1e-14 * std::max(1.0, std::abs(a));
       ++it) {
    const double x1 = b - phi * (b - a);
    const double x2 = a + phi * (b - a);
    try {
      const double d1 = evaluate_at(c, target, cloud, x1).distance;
      const double d2 = evaluate_at(c, target, cloud, x2).distance;
      if (d1 < d2) {
        b = x2;
      } else {
        a = x1;
      }
    } catch (const Error&) {
      break;
    }
  }
  try {
    FootpointResult r = evaluate_at(c, target, cloud, 0.5 * (a + b));
    if (r.distance < best->distance) best = r;
  } catch (const Error&) {
  }
  best->clamped = (best->t == lo || best->t == hi);
  return *best;
}

}  // namespace

TargetSet::TargetSet(const std::vector<DualQuaternion>& poses,
                     double tau_study) {
  if (poses.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "target set is empty");
  }
  targets_.reserve(poses.size());
  for (const auto& q : poses) {
    const Pose pose = dq_to_pose(q, tau_study);
    targets_.push_back({q, pose, pose_to_embedding(pose)});
  }
}

RealPolynomial footnormal_polynomial(const FactorizedCurve& c,
                                     const Embedding12& target,
                                     const FeatureCloud& cloud) {
  const FootNormal fn = build_footnormal(c, target, cloud);
  return fn.f.shifted(-fn.shift);
}

FootpointResult footpoint(const FactorizedCurve& c, const Embedding12& target,
                          const FeatureCloud& cloud,
                          std::optional<Interval> interval) {
  const Interval iv = interval.value_or(Interval{});
  if (!(iv.lo <= iv.hi)) {
    throw Error(ErrorCode::kInvalidArgument, "empty foot point interval");
  }
  const bool lo_finite = std::isfinite(iv.lo);
  const bool hi_finite = std::isfinite(iv.hi);
  if (lo_finite && hi_finite && iv.lo == iv.hi) {
    FootpointResult r = evaluate_at(c, target, cloud, iv.lo);
    r.clamped = true;
    return r;
  }

  std::vector<double> roots;
  bool polynomial_ok = false;
  FootNormal fn;
  try {
    fn = build_footnormal(c, target, cloud);
    if (!real_roots(fn.nu, iv.lo - fn.shift, iv.hi - fn.shift).empty()) {
      throw Error(ErrorCode::kDegenerateCurve,
                  "norm polynomial vanishes in the search range");
    }
    if (fn.f.degree() >= 1 && fn.f.degree() <= kMaxPolynomialDegree) {
      for (double tau : real_roots(fn.f, iv.lo - fn.shift, iv.hi - fn.shift)) {
        roots.push_back(tau + fn.shift);
      }
      polynomial_ok = true;
    } else if (fn.f.degree() < 1) {
      polynomial_ok = true;  // distance constant along the curve
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kDegenerateCurve) throw;
  }

  std::optional<FootpointResult> best;
  const auto consider = [&](const FootpointResult& r) {
    if (!best || r.distance < best->distance) best = r;
  };
  if (polynomial_ok) {
    for (double t : roots) {
      consider(evaluate_at(c, target, cloud,
                           polish_root(c, target, cloud, fn, t, iv.lo, iv.hi)));
    }
  } else {
    const SearchRange r = initial_search_range(c);
    const double lo = lo_finite ? iv.lo : std::min(r.lo, iv.hi);
    const double hi = hi_finite ? iv.hi : std::max(r.hi, iv.lo);
    FootpointResult s = sampled_footpoint(c, target, cloud, lo, hi);
    s.clamped = (s.t == iv.lo || s.t == iv.hi);
    consider(s);
  }
  if (lo_finite) {
    FootpointResult r = evaluate_at(c, target, cloud, iv.lo);
    r.clamped = true;
    consider(r);
  }
  if (hi_finite) {
    FootpointResult r = evaluate_at(c, target, cloud, iv.hi);
    r.clamped = true;
    consider(r);
  }
  if (iv.at_infinity && !(lo_finite && hi_finite)) {
    FootpointResult r;
    r.t = lo_finite ? std::numeric_limits<double>::infinity()
                    : -std::numeric_limits<double>::infinity();
    r.embedding = identity_embedding();
    r.distance = embedding_distance(target, r.embedding, cloud);
    consider(r);
  }
  if (!best) {
    throw Error(ErrorCode::kNoCandidate, "no foot point candidate");
  }
  return *best;
}

SearchRange initial_search_range(const FactorizedCurve& c) {
  if (c.degree() == 0) return {};
  double lo = c.factors().front().h0, hi = lo;
  for (const auto& f : c.factors()) {
    lo = std::min(lo, f.h0);
    hi = std::max(hi, f.h0);
  }
  return {lo - 5.0, hi + 5.0};
}

std::vector<FootpointResult> free_footpoints(const FactorizedCurve& c,
                                             const TargetSet& targets,
                                             const FeatureCloud& cloud) {
  std::vector<FootpointResult> feet;
  feet.reserve(targets.size());
  for (const auto& tp : targets) feet.push_back(footpoint(c, tp.embedding, cloud));
  return feet;
}

std::vector<FootpointResult> ordered_footpoints(const FactorizedCurve& c,
                                                const TargetSet& targets,
                                                const FeatureCloud& cloud) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const int m = static_cast<int>(targets.size());
  std::vector<FootpointResult> free = free_footpoints(c, targets, cloud);
  if (m == 1) return free;

  double lo = kInf, hi = -kInf;
  for (const auto& f : free) {
    if (f.at_infinity()) continue;
    lo = std::min(lo, f.t);
    hi = std::max(hi, f.t);
  }
  const double gap = 1e-6 * std::max(1.0, lo < hi ? hi - lo : 0.0);
  // The point at infinity may only close the sequence at either end.
  const auto key = [&](int i) {
    if (!free[i].at_infinity()) return free[i].t;
    return i == 0 ? -kInf : (i == m - 1 ? kInf : std::nan(""));
  };
  const auto fits = [&](int a, int b) {
    return a < b && key(b) - key(a) > (b - a) * gap;
  };

  // Anchors: the two best targets, else the extreme finite parameters, else
  // the single best target that may be anchored.
  std::vector<int> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int i, int j) {
    return free[i].distance < free[j].distance;
  });
  int a = std::min(idx[0], idx[1]);
  int b = std::max(idx[0], idx[1]);
  if (!fits(a, b)) {
    std::vector<int> finite;
    for (int i = 0; i < m; ++i) {
      if (!free[i].at_infinity()) finite.push_back(i);
    }
    const auto by_t = [&](int i, int j) { return free[i].t < free[j].t; };
    if (!finite.empty()) {
      a = *std::min_element(finite.begin(), finite.end(), by_t);
      b = *std::max_element(finite.begin(), finite.end(), by_t);
    }
    if (finite.empty() || !fits(a, b)) {
      const auto usable = std::find_if(idx.begin(), idx.end(), [&](int i) {
        return !std::isnan(key(i));
      });
      a = b = usable != idx.end() ? *usable : 0;
    }
  }

  std::vector<FootpointResult> feet(m);
  for (int i : {a, b}) {
    feet[i] = free[i];
    if (feet[i].at_infinity()) feet[i].t = key(i);
  }
  const auto place = [&](int i, double lo_t, double hi_t) {
    // Only the end targets may sit at infinity, and only once.
    const bool end = i == 0 || i == m - 1;
    const bool taken = (i > 0 && feet[i - 1].at_infinity()) ||
                       (i + 1 < m && feet[i + 1].at_infinity());
    const Interval iv{lo_t, std::max(lo_t, hi_t), end && !taken};
    feet[i] = footpoint(c, targets[i].embedding, cloud, iv);
  };
  for (int i = a + 1; i < b; ++i) {
    place(i, feet[i - 1].t + gap, feet[b].t - (b - i) * gap);
  }
  for (int i = b + 1; i < m; ++i) place(i, feet[i - 1].t + gap, kInf);
  for (int i = a - 1; i >= 0; --i) place(i, -kInf, feet[i + 1].t - gap);
  return feet;
}

double objective(const std::vector<FootpointResult>& feet) {
  double s = 0.0;
  for (const auto& f : feet) s += f.distance * f.distance;
  return s;
}

double objective(const FactorizedCurve& c, const TargetSet& targets,
                 const FeatureCloud& cloud) {
  return objective(free_footpoints(c, targets, cloud));
}

void EvolutionConfig::validate() const {
  const auto fail = [](const std::string& what) {
    throw Error(ErrorCode::kInvalidArgument, what);
  };
  if (max_iters < 1) fail("max_iters must be >= 1");
  if (!(stop_tol > 0.0)) fail("stop_tol must be positive");
  if (!(lambda_cap > 0.0)) fail("lambda_cap must be positive");
  if (!(polish_ratio >= 0.0)) fail("polish_ratio must be >= 0");
  if (!(svd_threshold > 0.0 && svd_threshold < 1.0)) {
    fail("svd_threshold must lie in (0, 1)");
  }
  if (provisional_iters < 0) fail("provisional_iters must be >= 0");
  if (max_halvings < 0) fail("max_halvings must be >= 0");
  if (degree < 1) fail("degree must be >= 1");
  const auto check_range = [&](const std::array<double, 2>& r,
                               const char* name) {
    if (!(r[0] < r[1])) fail(std::string("init range ") + name + " is empty");
  };
  check_range(init.h0, "h0");
  check_range(init.direction, "direction");
  check_range(init.point, "point");
}

LambdaRule parse_lambda_rule(const std::string& s) {
  if (s == "paper") return LambdaRule::kPaper;
  if (s == "clamped") return LambdaRule::kClamped;
  throw Error(ErrorCode::kInvalidArgument, "unknown lambda rule '" + s + "'");
}

Ordering parse_ordering(const std::string& s) {
  if (s == "none") return Ordering::kNone;
  if (s == "successive") return Ordering::kSuccessive;
  throw Error(ErrorCode::kInvalidArgument, "unknown ordering '" + s + "'");
}

StepModel parse_step_model(const std::string& s) {
  if (s == "fixed_feet") return StepModel::kFixedFeet;
  if (s == "foot_tracking") return StepModel::kFootTracking;
  if (s == "polish") return StepModel::kPolish;
  throw Error(ErrorCode::kInvalidArgument, "unknown step model '" + s + "'");
}

std::string to_string(LambdaRule r) {
  return r == LambdaRule::kPaper ? "paper" : "clamped";
}

std::string to_string(Ordering o) {
  return o == Ordering::kNone ? "none" : "successive";
}

std::string to_string(StepModel m) {
  switch (m) {
    case StepModel::kFixedFeet:
      return "fixed_feet";
    case StepModel::kFootTracking:
      return "foot_tracking";
    case StepModel::kPolish:
      return "polish";
  }
  return "unknown";
}

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::kConverged:
      return "converged";
    case StopReason::kMaxIters:
      return "max_iters";
    case StopReason::kLineSearchFailed:
      return "line_search_failed";
  }
  return "unknown";
}

Eigen::VectorXd random_init(std::uint64_t seed, const InitRanges& ranges,
                            int degree) {
  std::mt19937_64 rng(seed);
  // Explicit mapping keeps the stream identical across standard libraries.
  const auto uniform = [&](const std::array<double, 2>& r) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return r[0] + u * (r[1] - r[0]);
  };
  const double min_norm = 1e-3 * (ranges.direction[1] - ranges.direction[0]);
  Eigen::VectorXd sp(kParamsPerFactor * degree);
  for (int k = 0; k < degree; ++k) {
    auto seg = sp.segment<kParamsPerFactor>(kParamsPerFactor * k);
    seg[0] = uniform(ranges.h0);
    Eigen::Vector3d d;
    do {
      for (int j = 0; j < 3; ++j) d[j] = uniform(ranges.direction);
    } while (d.norm() < std::max(min_norm, kDirectionTolerance));
    seg.segment<3>(1) = d;
    for (int j = 0; j < 3; ++j) seg[4 + j] = uniform(ranges.point);
  }
  return sp;
}

Eigen::Matrix<double, 12, Eigen::Dynamic> foot_tracking_jacobian(
    const FactorizedCurve& c, const Embedding12& target,
    const FootpointResult& foot, const FeatureCloud& cloud) {
  const CurvePointDerivatives cpd = curve_point_derivatives(c, foot.t);
  Eigen::Matrix<double, 12, Eigen::Dynamic> jac = cpd.shape_jacobian;
  if (foot.clamped) return jac;

  // Foot condition g(t, Sp) = <TP - C, C'>_G = 0; t moves by -g_Sp / g_t.
  const double dt = 1e-5 * std::max(1.0, std::abs(foot.t));
  const CurvePointDerivatives hi = curve_point_derivatives(c, foot.t + dt);
  const CurvePointDerivatives lo = curve_point_derivatives(c, foot.t - dt);
  const Eigen::MatrixXd jac_t =
      (hi.shape_jacobian - lo.shape_jacobian) / (2.0 * dt);
  const Embedding12 c_tt = (hi.t_derivative - lo.t_derivative) / (2.0 * dt);

  const Matrix12& g = cloud.gram();
  const Embedding12 gr = g * (target - cpd.embedding);
  const Embedding12 gc = g * cpd.t_derivative;
  const Eigen::RowVectorXd g_sp =
      (jac_t.transpose() * gr - jac.transpose() * gc).transpose();
  const double g_t = c_tt.dot(gr) - cpd.t_derivative.dot(gc);
  if (g_t == 0.0) return jac;
  jac -= cpd.t_derivative * (g_sp / g_t);
  return jac;
}

Eigen::MatrixXd shape_symmetries(const FactorizedCurve& c) {
  const int n = c.degree();
  const Eigen::VectorXd sp = c.shape();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(c.num_params(), n + 2);
  for (int f = 0; f < n; ++f) {
    out.block<3, 1>(7 * f + 4, f) = sp.segment<3>(7 * f + 1);
    out(7 * f, n) = 1.0;
    out.block<4, 1>(7 * f, n + 1) = sp.segment<4>(7 * f);
  }
  return out;
}

namespace {

LeastSquaresSolution solve_step(const FactorizedCurve& c,
                                const TargetSet& targets,
                                const FeatureCloud& cloud,
                                const std::vector<FootpointResult>& feet,
                                double svd_threshold, bool tracking) {
  const int m = static_cast<int>(targets.size());
  const int k = c.num_params();
  const Matrix12& u = cloud.orthonormalizer();

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(12 * m, k);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(12 * m);
  for (int i = 0; i < m; ++i) {
    if (feet[i].at_infinity()) continue;
    const Embedding12& tp = targets[i].embedding;
    if (tracking) {
      a.middleRows(12 * i, 12) =
          u * foot_tracking_jacobian(c, tp, feet[i], cloud);
      rhs.segment<12>(12 * i) = u * (tp - curve_embedding(c, feet[i].t));
    } else {
      const CurvePointDerivatives cpd = curve_point_derivatives(c, feet[i].t);
      a.middleRows(12 * i, 12) = u * cpd.shape_jacobian;
      rhs.segment<12>(12 * i) = u * (tp - cpd.embedding);
    }
  }
  if (!tracking) return lstsq_min_norm(a, rhs, svd_threshold);

  // The tracking Jacobian vanishes on the symmetries only up to rounding, so
  // solve on their orthogonal complement.
  const Eigen::MatrixXd sym = shape_symmetries(c);
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(sym, Eigen::ComputeFullU);
  const Eigen::MatrixXd basis = svd.matrixU().rightCols(k - sym.cols());
  LeastSquaresSolution ls = lstsq_min_norm(a * basis, rhs, svd_threshold);
  ls.x = basis * ls.x;
  return ls;
}

}  // namespace

StepResult evolution_step(const FactorizedCurve& c, const TargetSet& targets,
                          const FeatureCloud& cloud,
                          const EvolutionConfig& config,
                          const std::vector<FootpointResult>& feet,
                          bool ordered, bool tracking) {
  const int k = c.num_params();
  const double obj_before = objective(feet);
  const Eigen::VectorXd sp = c.shape();

  StepResult out;
  IterationRecord& rec = out.record;
  const auto attempt = [&](bool with_tracking) {
    const LeastSquaresSolution ls = solve_step(
        c, targets, cloud, feet, config.svd_threshold, with_tracking);
    rec = IterationRecord{};
    rec.objective_before = obj_before;
    rec.step_inf_norm = ls.x.lpNorm<Eigen::Infinity>();
    rec.rank = ls.rank;
    // Sliding each axis point along its axis leaves the curve unchanged.
    rec.rank_deficient = with_tracking ? ls.rank < k - c.degree() - 2
                                       : ls.rank < k - c.degree();
    rec.ordered = ordered;
    rec.tracking = with_tracking;

    const double scaled = rec.step_inf_norm > 0.0
                              ? 10.0 / rec.step_inf_norm
                              : std::numeric_limits<double>::infinity();
    const double lambda_start = config.lambda_rule == LambdaRule::kPaper
                                    ? std::max(scaled, 1.0)
                                    : std::min(scaled, config.lambda_cap);
    double lambda = std::isfinite(lambda_start) ? lambda_start : 1.0;
    for (int halvings = 0; halvings <= config.max_halvings; ++halvings) {
      try {
        FactorizedCurve trial = FactorizedCurve::from_shape(sp + lambda * ls.x);
        std::vector<FootpointResult> trial_feet =
            ordered ? ordered_footpoints(trial, targets, cloud)
                    : free_footpoints(trial, targets, cloud);
        const double obj = objective(trial_feet);
        if (obj <= obj_before) {
          rec.lambda = lambda;
          rec.halvings = halvings;
          rec.objective_after = obj;
          rec.accepted = true;
          out.curve = std::move(trial);
          out.feet = std::move(trial_feet);
          return true;
        }
      } catch (const Error&) {
        // Degenerate trial shape; treat like an objective increase.
      }
      lambda *= 0.5;
    }
    return false;
  };

  bool accepted = false;
  if (tracking) {
    try {
      accepted = attempt(true);
    } catch (const Error&) {
      accepted = false;
    }
  }
  if (!accepted) accepted = attempt(false);

  if (!accepted) {
    out.line_search_failed = true;
    out.curve = c;
    out.feet = feet;
    rec.lambda = 0.0;
    rec.halvings = config.max_halvings;
    rec.objective_after = rec.objective_before;
  }
  rec.norm_residual = dqpoly_norm_residual(expand(out.curve));
  for (const auto& f : out.feet) {
    rec.params.push_back(f.t);
    rec.distances.push_back(f.distance);
  }
  return out;
}

EvolutionResult evolve(const FactorizedCurve& initial, const TargetSet& targets,
                       const FeatureCloud& cloud,
                       const EvolutionConfig& config) {
  config.validate();
  const bool use_ordering = config.ordering == Ordering::kSuccessive;

  EvolutionResult result;
  FactorizedCurve curve = initial;
  std::vector<FootpointResult> feet =
      free_footpoints(curve, targets, cloud);
  bool ordered = false;

  // Best iterate among those computed in the final (ordered or free) mode.
  std::optional<EvolutionResult> best;
  const auto remember = [&](const FactorizedCurve& cv,
                            const std::vector<FootpointResult>& ft) {
    const double obj = objective(ft);
    if (!best || obj <= best->objective) {
      best = EvolutionResult{cv, {}, StopReason::kMaxIters, obj, ft};
    }
  };
  remember(curve, feet);

  result.reason = StopReason::kMaxIters;
  bool provisional_done = false;
  bool tracking = config.step_model == StepModel::kFootTracking;
  for (int it = 0; it < config.max_iters; ++it) {
    if (use_ordering && !ordered &&
        (it >= config.provisional_iters || provisional_done)) {
      ordered = true;
      feet = ordered_footpoints(curve, targets, cloud);
      best.reset();
      remember(curve, feet);
    }
    StepResult step = evolution_step(curve, targets, cloud, config, feet,
                                     ordered, tracking);
    step.record.iteration = it;
    result.trace.records.push_back(step.record);
    curve = std::move(step.curve);
    feet = std::move(step.feet);
    remember(curve, feet);

    const bool stalled = step.line_search_failed ||
                         step.record.step_inf_norm < config.stop_tol;
    if (stalled && use_ordering && !ordered) {
      // The provisional curve has settled; continue with ordering.
      provisional_done = true;
      continue;
    }
    if (config.step_model == StepModel::kPolish && !tracking &&
        (!use_ordering || ordered)) {
      const IterationRecord& r = step.record;
      const bool slow = r.objective_before - r.objective_after <
                        config.polish_ratio * r.objective_before;
      if (stalled || slow) {
        tracking = true;
        continue;
      }
    }
    if (step.record.step_inf_norm < config.stop_tol) {
      result.reason = StopReason::kConverged;
      break;
    }
    if (step.line_search_failed) {
      result.reason = StopReason::kLineSearchFailed;
      break;
    }
  }

  result.curve = best->curve;
  result.objective = best->objective;
  result.feet = best->feet;
  return result;
}

}  // namespace linksynth
