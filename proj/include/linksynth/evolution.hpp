#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "linksynth/kinematics.hpp"
#include "linksynth/motioncurve.hpp"
#include "linksynth/polynomial.hpp"

namespace linksynth {

struct Target {
  DualQuaternion dq;
  Pose pose;
  Embedding12 embedding;
};

// Study tolerance for target poses given as rounded rationals.
inline constexpr double kTargetStudyTolerance = 1e-2;

/// Target poses in their required visiting order.
class TargetSet {
 public:
  explicit TargetSet(const std::vector<DualQuaternion>& poses,
                     double tau_study = kTargetStudyTolerance);

  std::size_t size() const { return targets_.size(); }
  const Target& operator[](std::size_t i) const { return targets_[i]; }
  auto begin() const { return targets_.begin(); }
  auto end() const { return targets_.end(); }

 private:
  std::vector<Target> targets_;
};

/// Curve point closest to a target. Every factorized curve tends to the
/// identity as t -> +-infinity; that limit point is reported with an
/// infinite t.
struct FootpointResult {
  double t = 0.0;
  Embedding12 embedding = Embedding12::Zero();
  double distance = 0.0;
  bool clamped = false;

  bool at_infinity() const { return !std::isfinite(t); }
};

/// Parameter interval; an unbounded side also admits the point at infinity
/// unless `at_infinity` is cleared.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool at_infinity = true;
};

/// Numerator of the derivative of the squared Gram distance between the
/// target and C(t). With the embedding written as N(t)/nu(t), nu the primal
/// norm polynomial, the foot-normal condition <TP nu - N, N' nu - N nu'> = 0
/// carries the common factor nu; the returned polynomial is that condition
/// with nu cancelled, of degree at most 4n - 2.
RealPolynomial footnormal_polynomial(const FactorizedCurve& c,
                                     const Embedding12& target,
                                     const FeatureCloud& cloud);

/// Closest curve point to the target. Candidates are the foot-normal roots
/// inside the interval, its finite end points and, for an unbounded
/// interval, the point at infinity; `clamped` is set when a finite end point
/// wins. Falls back to dense sampling when the polynomial route is
/// unavailable.
FootpointResult footpoint(const FactorizedCurve& c, const Embedding12& target,
                          const FeatureCloud& cloud,
                          std::optional<Interval> interval = std::nullopt);

// Parameter window used by the sampling fallback.
struct SearchRange {
  double lo = -5.0;
  double hi = 5.0;
};

// Vertex abscissas of the norm quadratics (the h0 values) padded by 5.
SearchRange initial_search_range(const FactorizedCurve& c);

/// Foot points with strictly increasing parameters. The two best
/// approximated targets are anchored at their free foot points; the others
/// are swept outward from the anchors, each restricted to the interval left
/// by its already placed neighbour.
std::vector<FootpointResult> ordered_footpoints(const FactorizedCurve& c,
                                                const TargetSet& targets,
                                                const FeatureCloud& cloud);

std::vector<FootpointResult> free_footpoints(const FactorizedCurve& c,
                                             const TargetSet& targets,
                                             const FeatureCloud& cloud);

// Sum of squared foot distances.
double objective(const std::vector<FootpointResult>& feet);
// Objective of the free foot points.
double objective(const FactorizedCurve& c, const TargetSet& targets,
                 const FeatureCloud& cloud);

// kPaper: lambda = max(10 / |dSp|_inf, 1).
// kClamped: lambda = min(10 / |dSp|_inf, lambda_cap).
enum class LambdaRule { kPaper, kClamped };
enum class Ordering { kNone, kSuccessive };
// kFixedFeet: Jacobian of the curve points at the current foot parameters.
// kFootTracking: additionally differentiates the foot parameters through the
// foot condition and removes the shape directions that leave the curve or its
// parametrization class unchanged; falls back to kFixedFeet when its line
// search fails.
// kPolish: kFixedFeet until a step lowers the objective by less than
// polish_ratio relative, falls below stop_tol or fails its line search, then
// kFootTracking.
enum class StepModel { kFixedFeet, kFootTracking, kPolish };

struct InitRanges {
  std::array<double, 2> h0{-5.0, 5.0};
  std::array<double, 2> direction{-1.0, 1.0};
  std::array<double, 2> point{-300.0, 300.0};
};

struct EvolutionConfig {
  int max_iters = 2000;
  double stop_tol = 1e-6;  // on the max-norm of the shape update
  LambdaRule lambda_rule = LambdaRule::kClamped;
  double lambda_cap = 1.0;
  Ordering ordering = Ordering::kSuccessive;
  std::uint64_t seed = 1;
  int provisional_iters = 25;
  int max_halvings = 8;
  int degree = 3;
  // Relative singular value cutoff of the least-squares solve.
  double svd_threshold = 1e-6;
  StepModel step_model = StepModel::kPolish;
  double polish_ratio = 1e-3;
  InitRanges init;

  // Throws InvalidArgument.
  void validate() const;
};

LambdaRule parse_lambda_rule(const std::string& s);
Ordering parse_ordering(const std::string& s);
StepModel parse_step_model(const std::string& s);
std::string to_string(LambdaRule r);
std::string to_string(Ordering o);
std::string to_string(StepModel m);

struct IterationRecord {
  int iteration = 0;
  double objective_before = 0.0;
  double objective_after = 0.0;
  double step_inf_norm = 0.0;
  double lambda = 0.0;
  int halvings = 0;
  int rank = 0;
  bool rank_deficient = false;
  bool ordered = false;
  bool accepted = false;
  bool tracking = false;  // the accepted step used foot tracking
  double norm_residual = 0.0;  // non-real part of C conj(C), relative
  std::vector<double> params;
  std::vector<double> distances;
};

struct EvolutionTrace {
  std::vector<IterationRecord> records;
};

/// Deterministic shape vector with every direction norm at least 1e-3 times
/// the direction range.
Eigen::VectorXd random_init(std::uint64_t seed, const InitRanges& ranges,
                            int degree = 3);

/// Derivative of the foot point embedding C(t(Sp); Sp) with respect to the
/// shape, where t(Sp) follows the foot condition. Equals the plain shape
/// Jacobian for clamped feet.
Eigen::Matrix<double, 12, Eigen::Dynamic> foot_tracking_jacobian(
    const FactorizedCurve& c, const Embedding12& target,
    const FootpointResult& foot, const FeatureCloud& cloud);

/// Columns spanning the shape directions that keep the motion: sliding each
/// axis point along its axis, shifting every h0, and scaling every h0 and
/// direction (the reparametrizations t -> a t + b).
Eigen::MatrixXd shape_symmetries(const FactorizedCurve& c);

struct StepResult {
  FactorizedCurve curve;
  IterationRecord record;
  std::vector<FootpointResult> feet;  // on the returned curve
  bool line_search_failed = false;
};

/// One Gauss-Newton update: per target the 12-row block
/// J(t_m) dSp = TP_m - FP_m in Gram-orthonormal coordinates, a minimum-norm
/// least-squares solve, and Sp += lambda dSp with lambda halved while the
/// objective would increase. Targets matched at infinity contribute no
/// rows. Trial foot points are ordered when `ordered` is set. With
/// `tracking` the step uses the foot-tracking Jacobian and falls back to the
/// fixed-feet step when its line search fails.
StepResult evolution_step(const FactorizedCurve& c, const TargetSet& targets,
                          const FeatureCloud& cloud,
                          const EvolutionConfig& config,
                          const std::vector<FootpointResult>& feet,
                          bool ordered, bool tracking = false);

enum class StopReason { kConverged, kMaxIters, kLineSearchFailed };
std::string to_string(StopReason r);

struct EvolutionResult {
  FactorizedCurve curve;
  EvolutionTrace trace;
  StopReason reason = StopReason::kMaxIters;
  double objective = 0.0;
  std::vector<FootpointResult> feet;
};

EvolutionResult evolve(const FactorizedCurve& initial, const TargetSet& targets,
                       const FeatureCloud& cloud, const EvolutionConfig& config);

}  // namespace linksynth
