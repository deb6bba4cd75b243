#pragma once

#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "linksynth/dualquat.hpp"
#include "linksynth/polynomial.hpp"

namespace linksynth {

/// Monic irreducible quadratic t^2 + b t + c.
struct QuadraticFactor {
  double b = 0.0;
  double c = 0.0;

  RealPolynomial polynomial() const { return {1.0, b, c}; }
};

// Roots whose imaginary part is below this fraction of the largest root
// magnitude (at least 1) count as real.
inline constexpr double kGenericTolerance = 1e-7;
// Conjugate root pairs closer than this fraction of the largest root
// magnitude count as a repeated quadratic factor.
inline constexpr double kRepeatedTolerance = 1e-5;
inline constexpr double kExtractionTolerance = 1e-8;
inline constexpr double kDedupTolerance = 1e-8;

/// Irreducible quadratic factors of a real polynomial of even degree,
/// sorted by b. Throws NonGeneric when the polynomial has a real root or a
/// repeated quadratic factor and InvalidArgument for odd degree.
std::vector<QuadraticFactor> quadratic_factors(const RealPolynomial& n);

struct Extraction {
  DualQuaternion h;
  DQPolynomial quotient;  // P = quotient * (t - h) up to the residual
};

/// Rightmost linear factor of P belonging to M: with P = Q M + r1 t + r2,
/// h = -r1^-1 r2. Throws InvalidArgument if deg P < 2, NotInvertible if r1
/// is degenerate and ResidualTooLarge if (t - h) does not divide P to
/// kExtractionTolerance relative.
Extraction extract_rightmost(const DQPolynomial& p, const QuadraticFactor& m);

/// P = leading * (t - h_1) ... (t - h_n); joints[0] is the fixed base joint.
struct OpenChain {
  std::vector<DualQuaternion> joints;
  std::vector<int> permutation;  // quadratic factor used for h_n, h_{n-1}, ...
  DualQuaternion leading = DualQuaternion::scalar(1.0);
};

DualQuaternion chain_eval(const OpenChain& chain, double t);
DQPolynomial chain_polynomial(const OpenChain& chain);

/// Factorization that extracts the rightmost factor with quadratic
/// order[0], then order[1] and so on. `order` indexes
/// quadratic_factors(norm of P).
OpenChain factorize(const DQPolynomial& p, const std::vector<int>& order);

/// One chain per permutation of the quadratic factors, in lexicographic
/// permutation order. With `dedupe`, chains whose joints coincide within
/// kDedupTolerance are dropped.
std::vector<OpenChain> all_factorizations(const DQPolynomial& p,
                                          bool dedupe = true);

/// Closed 6R loop: joints of chain_a base to distal, then chain_b distal to
/// base.
struct Linkage6R {
  OpenChain chain_a;
  OpenChain chain_b;

  std::vector<DualQuaternion> joints() const;
};

// Throws IdenticalChains when the chains share the permutation or all joints.
Linkage6R make_linkage(const OpenChain& a, const OpenChain& b);

// Parameters tan(theta) for theta evenly spread over (-pi/2, pi/2).
std::vector<double> sample_parameters(int samples);

/// Largest projective distance between the chain product and P over the
/// sampled parameters.
double verify_chain(const OpenChain& chain, const DQPolynomial& p,
                    int samples = 50);

// Largest projective distance between the two chain products.
double linkage_closure_residual(const Linkage6R& linkage, int samples = 50);

// Number of joints of b that coincide with a joint of a.
int shared_joints(const OpenChain& a, const OpenChain& b);

struct PluckerAxis {
  Eigen::Vector3d direction;  // unit
  Eigen::Vector3d moment;     // point x direction

  // Point on the axis closest to the origin.
  Eigen::Vector3d point() const { return direction.cross(moment); }
};

/// Axes of the joints. For t - h the direction is minus the primal vector
/// part of h and the moment is minus its dual vector part, both divided by
/// the direction length. Throws DegenerateJoint for a real h.
std::vector<PluckerAxis> chain_axes(const OpenChain& chain);
PluckerAxis joint_axis(const DualQuaternion& h);

}  // namespace linksynth
