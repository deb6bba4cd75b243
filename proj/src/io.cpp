#include "linksynth/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>

#include "linksynth/error.hpp"

namespace linksynth::io {

namespace {

[[noreturn]] void parse_error(const std::string& what) {
  throw Error(ErrorCode::kParse, what);
}

double parse_decimal(const std::string& s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) parse_error("not a number: '" + s + "'");
  return v;
}

Eigen::Vector3d vec3_from_json(const Json& v, const char* what) {
  if (!v.is_array() || v.size() != 3) {
    parse_error(std::string(what) + " must be a 3-element array");
  }
  return {parse_number(v[0]), parse_number(v[1]), parse_number(v[2])};
}

Json vec3_to_json(const Eigen::Vector3d& v) { return Json{v[0], v[1], v[2]}; }

std::array<double, 2> range_from_json(const Json& v, const char* what) {
  if (!v.is_array() || v.size() != 2) {
    parse_error(std::string(what) + " must be a [lo, hi] pair");
  }
  return {parse_number(v[0]), parse_number(v[1])};
}

void write_double(std::ostream& os, double v) {
  os << std::setprecision(17) << v;
}

}  // namespace

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) parse_error("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    parse_error(path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const Json& doc) {
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorCode::kInvalidArgument, "cannot write " + path.string());
  }
  out << doc.dump(2) << "\n";
}

double parse_number(const Json& v) {
  if (v.is_number()) return v.get<double>();
  if (!v.is_string()) parse_error("expected a number or a fraction string");
  const std::string s = v.get<std::string>();
  const auto slash = s.find('/');
  if (slash == std::string::npos) return parse_decimal(s);
  const double num = parse_decimal(s.substr(0, slash));
  const double den = parse_decimal(s.substr(slash + 1));
  if (den == 0.0) parse_error("zero denominator in '" + s + "'");
  return num / den;
}

DualQuaternion dq_from_json(const Json& v) {
  if (!v.is_array() || v.size() != 8) {
    parse_error("a pose must be an 8-element array");
  }
  DualQuaternion q;
  for (int i = 0; i < 8; ++i) q[i] = parse_number(v[i]);
  return q;
}

Json dq_to_json(const DualQuaternion& q) {
  Json out = Json::array();
  for (int i = 0; i < 8; ++i) out.push_back(q[i]);
  return out;
}

std::vector<DualQuaternion> poses_from_json(const Json& doc) {
  if (!doc.is_array()) parse_error("pose file must hold a list of poses");
  std::vector<DualQuaternion> poses;
  for (const auto& v : doc) poses.push_back(dq_from_json(v));
  return poses;
}

Json poses_to_json(const std::vector<DualQuaternion>& poses) {
  Json out = Json::array();
  for (const auto& q : poses) out.push_back(dq_to_json(q));
  return out;
}

FeatureCloud cloud_from_json(const Json& doc) {
  if (!doc.is_object() || !doc.contains("points") ||
      !doc["points"].is_array()) {
    parse_error("feature cloud must be {\"points\": [[x, y, z], ...]}");
  }
  std::vector<Eigen::Vector3d> pts;
  for (const auto& p : doc["points"]) pts.push_back(vec3_from_json(p, "point"));
  return FeatureCloud(std::move(pts));
}

Json cloud_to_json(const FeatureCloud& cloud) {
  Json pts = Json::array();
  for (const auto& p : cloud.points()) pts.push_back(vec3_to_json(p));
  return Json{{"points", pts}};
}

FactorizedCurve curve_from_json(const Json& doc) {
  if (!doc.is_object() || !doc.contains("factors") ||
      !doc["factors"].is_array() || doc["factors"].empty()) {
    parse_error("shape must be {\"factors\": [{\"h0\", \"d\", \"p\"}, ...]}");
  }
  std::vector<AxisFactor> factors;
  for (const auto& f : doc["factors"]) {
    if (!f.is_object() || !f.contains("h0") || !f.contains("d") ||
        !f.contains("p")) {
      parse_error("each factor needs h0, d and p");
    }
    factors.push_back({parse_number(f["h0"]), vec3_from_json(f["d"], "d"),
                       vec3_from_json(f["p"], "p")});
  }
  return FactorizedCurve(std::move(factors));
}

Json curve_to_json(const FactorizedCurve& curve) {
  Json fs = Json::array();
  for (const auto& f : curve.factors()) {
    fs.push_back(Json{{"h0", f.h0},
                      {"d", vec3_to_json(f.direction)},
                      {"p", vec3_to_json(f.point)}});
  }
  return Json{{"factors", fs}};
}

EvolutionConfig config_from_json(const Json& doc) {
  if (!doc.is_object()) parse_error("config must be a JSON object");
  EvolutionConfig c;
  try {
    for (const auto& [key, v] : doc.items()) {
      if (key == "max_iters") {
        c.max_iters = v.get<int>();
      } else if (key == "stop_tol") {
        c.stop_tol = parse_number(v);
      } else if (key == "lambda_rule") {
        c.lambda_rule = parse_lambda_rule(v.get<std::string>());
      } else if (key == "lambda_cap") {
        c.lambda_cap = parse_number(v);
      } else if (key == "ordering") {
        c.ordering = parse_ordering(v.get<std::string>());
      } else if (key == "seed") {
        c.seed = v.get<std::uint64_t>();
      } else if (key == "provisional_iters") {
        c.provisional_iters = v.get<int>();
      } else if (key == "max_halvings") {
        c.max_halvings = v.get<int>();
      } else if (key == "svd_threshold") {
        c.svd_threshold = parse_number(v);
      } else if (key == "step_model") {
        c.step_model = parse_step_model(v.get<std::string>());
      } else if (key == "polish_ratio") {
        c.polish_ratio = parse_number(v);
      } else if (key == "degree") {
        c.degree = v.get<int>();
      } else if (key == "init") {
        if (v.contains("h0")) c.init.h0 = range_from_json(v["h0"], "init.h0");
        if (v.contains("direction")) {
          c.init.direction = range_from_json(v["direction"], "init.direction");
        }
        if (v.contains("point")) {
          c.init.point = range_from_json(v["point"], "init.point");
        }
      } else if (key != "feature_points") {
        parse_error("unknown config key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    parse_error(std::string("config: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kParse) throw;
    parse_error(e.what());
  }
  c.validate();
  return c;
}

Json config_to_json(const EvolutionConfig& c) {
  return Json{{"max_iters", c.max_iters},
              {"stop_tol", c.stop_tol},
              {"lambda_rule", to_string(c.lambda_rule)},
              {"lambda_cap", c.lambda_cap},
              {"ordering", to_string(c.ordering)},
              {"seed", c.seed},
              {"provisional_iters", c.provisional_iters},
              {"max_halvings", c.max_halvings},
              {"degree", c.degree},
              {"svd_threshold", c.svd_threshold},
              {"step_model", to_string(c.step_model)},
              {"polish_ratio", c.polish_ratio},
              {"init",
               {{"h0", c.init.h0},
                {"direction", c.init.direction},
                {"point", c.init.point}}}};
}

Json quadratics_to_json(const std::vector<QuadraticFactor>& quads) {
  Json out = Json::array();
  for (const auto& q : quads) {
    out.push_back(Json{{"b", q.b}, {"c", q.c}, {"coefficients", {1.0, q.b, q.c}}});
  }
  return out;
}

Json chain_to_json(const OpenChain& chain, double residual) {
  Json joints = Json::array();
  Json axes = Json::array();
  for (const auto& h : chain.joints) {
    joints.push_back(dq_to_json(h));
    const PluckerAxis ax = joint_axis(h);
    axes.push_back(Json{{"direction", vec3_to_json(ax.direction)},
                        {"moment", vec3_to_json(ax.moment)}});
  }
  return Json{{"permutation", chain.permutation},
              {"leading", dq_to_json(chain.leading)},
              {"joints", joints},
              {"axes", axes},
              {"residual", residual}};
}

OpenChain chain_from_json(const Json& doc) {
  OpenChain c;
  try {
    for (const auto& j : doc.at("joints")) c.joints.push_back(dq_from_json(j));
    c.permutation = doc.at("permutation").get<std::vector<int>>();
    if (doc.contains("leading")) c.leading = dq_from_json(doc["leading"]);
  } catch (const nlohmann::json::exception& e) {
    parse_error(std::string("chain: ") + e.what());
  }
  return c;
}

void write_trace_csv(std::ostream& os, const EvolutionTrace& trace) {
  const std::size_t m =
      trace.records.empty() ? 0 : trace.records.front().distances.size();
  os << "iteration,objective,objective_after,step_inf_norm,lambda,halvings,"
        "rank,ordered,accepted,tracking,norm_residual";
  for (std::size_t i = 1; i <= m; ++i) os << ",d" << i;
  for (std::size_t i = 1; i <= m; ++i) os << ",t" << i;
  os << "\n";
  for (const auto& r : trace.records) {
    os << r.iteration << ",";
    write_double(os, r.objective_before);
    os << ",";
    write_double(os, r.objective_after);
    os << ",";
    write_double(os, r.step_inf_norm);
    os << ",";
    write_double(os, r.lambda);
    os << "," << r.halvings << "," << r.rank << "," << int(r.ordered) << ","
       << int(r.accepted) << "," << int(r.tracking) << ",";
    write_double(os, r.norm_residual);
    for (double d : r.distances) {
      os << ",";
      write_double(os, d);
    }
    for (double t : r.params) {
      os << ",";
      write_double(os, t);
    }
    os << "\n";
  }
}

std::vector<ErrorRow> error_rows(const TargetSet& targets,
                                 const std::vector<FootpointResult>& feet) {
  std::vector<ErrorRow> rows;
  for (std::size_t i = 1; i < targets.size(); ++i) {
    ErrorRow r;
    r.target = static_cast<int>(i) + 1;
    r.t = feet[i].t;
    r.error = pose_error(targets[i].pose, Pose::from_embedding(feet[i].embedding));
    r.metric_distance = feet[i].distance;
    r.clamped = feet[i].clamped;
    rows.push_back(r);
  }
  return rows;
}

void write_errors_csv(std::ostream& os, const std::vector<ErrorRow>& rows) {
  os << "label,target,t,angle,distance,metric_distance,clamped\n";
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const ErrorRow& r = rows[k];
    os << "TP" << k + 1 << "," << r.target << ",";
    write_double(os, r.t);
    os << ",";
    write_double(os, r.error.angle);
    os << ",";
    write_double(os, r.error.distance);
    os << ",";
    write_double(os, r.metric_distance);
    os << "," << int(r.clamped) << "\n";
  }
}

std::vector<TrajectoryRow> trajectory(const FactorizedCurve& curve,
                                      const FeatureCloud& cloud, double t_lo,
                                      double t_hi, int samples) {
  if (samples < 1 || !(t_lo <= t_hi)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid trajectory sampling");
  }
  std::vector<TrajectoryRow> rows;
  for (int k = 0; k < samples; ++k) {
    const double t =
        samples == 1 ? t_lo : t_lo + (t_hi - t_lo) * k / (samples - 1);
    const DualQuaternion q = normalize_by_primal(curve_eval(curve, t));
    const Pose pose = dq_to_pose(q);
    TrajectoryRow r;
    r.t = t;
    r.tcp = pose.apply(cloud.barycenter());
    r.orientation = q.primal();
    rows.push_back(r);
  }
  return rows;
}

void write_trajectory_csv(std::ostream& os,
                          const std::vector<TrajectoryRow>& rows) {
  os << "t,x,y,z,qw,qx,qy,qz\n";
  for (const auto& r : rows) {
    write_double(os, r.t);
    for (int i = 0; i < 3; ++i) {
      os << ",";
      write_double(os, r.tcp[i]);
    }
    for (int i = 0; i < 4; ++i) {
      os << ",";
      write_double(os, r.orientation[i]);
    }
    os << "\n";
  }
}

}  // namespace linksynth::io
