#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "linksynth/evolution.hpp"
#include "linksynth/factorization.hpp"
#include "linksynth/kinematics.hpp"
#include "linksynth/motioncurve.hpp"

namespace linksynth::io {

using Json = nlohmann::ordered_json;

// Throws Parse on unreadable or malformed files.
Json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const Json& doc);

/// A JSON number, or a string holding a decimal or a "p/q" fraction.
double parse_number(const Json& v);

// Poses: a list of [x0, x1, x2, x3, y0, y1, y2, y3].
std::vector<DualQuaternion> poses_from_json(const Json& doc);
Json poses_to_json(const std::vector<DualQuaternion>& poses);
DualQuaternion dq_from_json(const Json& v);
Json dq_to_json(const DualQuaternion& q);

// {"points": [[x, y, z], ...]}
FeatureCloud cloud_from_json(const Json& doc);
Json cloud_to_json(const FeatureCloud& cloud);

// {"factors": [{"h0": x0, "d": [x1, x2, x3], "p": [x5, x6, x7]}, ...]}
FactorizedCurve curve_from_json(const Json& doc);
Json curve_to_json(const FactorizedCurve& curve);

// Every key is optional; "feature_points" may hold a point list.
EvolutionConfig config_from_json(const Json& doc);
Json config_to_json(const EvolutionConfig& config);

Json quadratics_to_json(const std::vector<QuadraticFactor>& quads);
Json chain_to_json(const OpenChain& chain, double residual);
OpenChain chain_from_json(const Json& doc);

// Header: iteration, objective, objective_after, step_inf_norm, lambda,
// halvings, rank, ordered, accepted, tracking, norm_residual, d1..dm,
// t1..tm.
void write_trace_csv(std::ostream& os, const EvolutionTrace& trace);

struct ErrorRow {
  int target = 0;  // 1-based index into the target list
  double t = 0.0;
  PoseError error;
  double metric_distance = 0.0;
  bool clamped = false;
};
// Per-target errors for targets 2..m; the identity target is omitted.
std::vector<ErrorRow> error_rows(const TargetSet& targets,
                                 const std::vector<FootpointResult>& feet);
// Header: label, target, t, angle, distance, metric_distance, clamped.
void write_errors_csv(std::ostream& os, const std::vector<ErrorRow>& rows);

struct TrajectoryRow {
  double t = 0.0;
  Eigen::Vector3d tcp;
  Eigen::Vector4d orientation;  // unit quaternion (w, x, y, z)
};
std::vector<TrajectoryRow> trajectory(const FactorizedCurve& curve,
                                      const FeatureCloud& cloud, double t_lo,
                                      double t_hi, int samples);
// Header: t, x, y, z, qw, qx, qy, qz.
void write_trajectory_csv(std::ostream& os,
                          const std::vector<TrajectoryRow>& rows);

}  // namespace linksynth::io
