#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "linksynth/error.hpp"
#include "linksynth/evolution.hpp"
#include "linksynth/factorization.hpp"
#include "linksynth/io.hpp"

namespace fs = std::filesystem;

namespace linksynth::cli {
namespace {

using io::Json;

enum ExitCode {
  kOk = 0,
  kInputError = 1,
  kNotConverged = 2,
  kNonGeneric = 3,
};

constexpr double kLinkageTolerance = 1e-8;
constexpr int kVerifySamples = 50;

struct Options {
  std::string poses;
  std::string config;
  std::string shape;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  int seeds = 1;
  std::optional<std::string> lambda_rule;
  std::pair<double, double> t_range{-20.0, 20.0};
  int samples = 100;
};

std::string utc_now() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

void require_file(const std::string& path, const char* what) {
  if (path.empty()) {
    throw Error(ErrorCode::kInvalidArgument, std::string(what) + " is required");
  }
  if (!fs::is_regular_file(path)) {
    throw Error(ErrorCode::kParse, std::string(what) + " not found: " + path);
  }
}

template <typename Writer>
void write_text(const fs::path& path, Writer&& writer) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::kParse, "cannot write " + path.string());
  os << std::setprecision(17);
  writer(os);
}

class Manifest {
 public:
  Manifest(std::string command, const fs::path& out) {
    doc_ = Json{{"tool", "linksynth"},
                {"version", LINKSYNTH_VERSION},
                {"command", std::move(command)},
                {"output_directory", fs::absolute(out).string()},
                {"started", utc_now()},
                {"inputs", Json::object()},
                {"outputs", Json::array()}};
  }

  void input(const std::string& key, const std::string& path) {
    doc_["inputs"][key] = fs::absolute(path).string();
  }
  void output(const std::string& name) { doc_["outputs"].push_back(name); }
  Json& operator[](const std::string& key) { return doc_[key]; }

  void write(const fs::path& out) {
    doc_["finished"] = utc_now();
    io::write_json(out / "manifest.json", doc_);
  }

 private:
  Json doc_;
};

struct Problem {
  TargetSet targets;
  EvolutionConfig config;
  FeatureCloud cloud;
};

FeatureCloud cloud_from_config(const Json& doc) {
  if (doc.is_object() && doc.contains("feature_points")) {
    return io::cloud_from_json(Json{{"points", doc["feature_points"]}});
  }
  return FeatureCloud::octahedron();
}

Problem load_problem(const Options& opt) {
  require_file(opt.poses, "--poses");
  require_file(opt.config, "--config");
  const std::vector<DualQuaternion> poses =
      io::poses_from_json(io::read_json(opt.poses));
  if (poses.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "pose file needs at least 2 targets");
  }
  const Json cfg_doc = io::read_json(opt.config);
  EvolutionConfig config = io::config_from_json(cfg_doc);
  if (opt.seed) config.seed = *opt.seed;
  if (opt.lambda_rule) config.lambda_rule = parse_lambda_rule(*opt.lambda_rule);
  config.validate();
  return {TargetSet(poses), config, cloud_from_config(cfg_doc)};
}

struct EvolveOutcome {
  std::uint64_t seed = 0;
  fs::path dir;
  StopReason reason = StopReason::kMaxIters;
  double objective = 0.0;
  FactorizedCurve curve;
};

Json errors_summary(const std::vector<io::ErrorRow>& rows) {
  double max_angle = 0.0, max_distance = 0.0;
  for (const auto& r : rows) {
    max_angle = std::max(max_angle, r.error.angle);
    max_distance = std::max(max_distance, r.error.distance);
  }
  return Json{{"max_angle", max_angle}, {"max_distance", max_distance}};
}

// Runs one evolution and writes its shape, trace, errors and manifest.
EvolveOutcome run_evolution(const Problem& prob, const Options& opt,
                            const fs::path& dir) {
  fs::create_directories(dir);
  Manifest manifest("evolve", dir);
  manifest.input("poses", opt.poses);
  manifest.input("config", opt.config);
  manifest["seed"] = prob.config.seed;
  manifest["config"] = io::config_to_json(prob.config);
  manifest["feature_points"] = io::cloud_to_json(prob.cloud)["points"];

  const FactorizedCurve initial = FactorizedCurve::from_shape(
      random_init(prob.config.seed, prob.config.init, prob.config.degree));
  const EvolutionResult res =
      evolve(initial, prob.targets, prob.cloud, prob.config);

  io::write_json(dir / "shape_parameters.json", io::curve_to_json(res.curve));
  manifest.output("shape_parameters.json");
  write_text(dir / "trace.csv",
             [&](std::ostream& os) { io::write_trace_csv(os, res.trace); });
  manifest.output("trace.csv");
  const auto rows = io::error_rows(prob.targets, res.feet);
  write_text(dir / "errors.csv",
             [&](std::ostream& os) { io::write_errors_csv(os, rows); });
  manifest.output("errors.csv");

  manifest["result"] = Json{{"stop_reason", to_string(res.reason)},
                            {"iterations", res.trace.records.size()},
                            {"objective", res.objective},
                            {"errors", errors_summary(rows)}};
  manifest.write(dir);
  return {prob.config.seed, dir, res.reason, res.objective, res.curve};
}

int exit_for(const EvolveOutcome& o) {
  return o.reason == StopReason::kConverged ? kOk : kNotConverged;
}

int cmd_evolve(const Options& opt) {
  const Problem prob = load_problem(opt);
  const EvolveOutcome o = run_evolution(prob, opt, opt.out);
  std::cout << "seed " << o.seed << ": " << to_string(o.reason)
            << ", objective " << o.objective << "\n";
  return exit_for(o);
}

// Factorizes the curve and writes quadratics, chains and linkages.
int factor_curve(const FactorizedCurve& curve, const fs::path& out,
                 Manifest& manifest) {
  fs::create_directories(out);
  const DQPolynomial p = expand(curve);
  const RealPolynomial norm = dqpoly_norm(p);
  const std::vector<QuadraticFactor> quads = quadratic_factors(norm);
  io::write_json(out / "quadratic_factors.json",
                 Json{{"norm", norm.coeffs()},
                      {"factors", io::quadratics_to_json(quads)}});
  manifest.output("quadratic_factors.json");

  const std::vector<OpenChain> chains = all_factorizations(p);
  Json chain_docs = Json::array();
  double worst_chain = 0.0;
  for (const auto& c : chains) {
    const double r = verify_chain(c, p, kVerifySamples);
    worst_chain = std::max(worst_chain, r);
    chain_docs.push_back(io::chain_to_json(c, r));
  }
  io::write_json(out / "chains.json", Json{{"chains", chain_docs}});
  manifest.output("chains.json");

  Json linkages = Json::array();
  for (std::size_t a = 0; a < chains.size(); ++a) {
    for (std::size_t b = a + 1; b < chains.size(); ++b) {
      Linkage6R lk;
      try {
        lk = make_linkage(chains[a], chains[b]);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::kIdenticalChains) continue;
        throw;
      }
      const double r = linkage_closure_residual(lk, kVerifySamples);
      if (r > kLinkageTolerance) continue;
      Json joints = Json::array();
      for (const auto& h : lk.joints()) joints.push_back(io::dq_to_json(h));
      linkages.push_back(
          Json{{"chains", {a, b}},
               {"shared_joints", shared_joints(chains[a], chains[b])},
               {"closure_residual", r},
               {"joints", joints}});
    }
  }
  io::write_json(out / "linkages.json",
                 Json{{"tolerance", kLinkageTolerance},
                      {"samples", kVerifySamples},
                      {"linkages", linkages}});
  manifest.output("linkages.json");

  manifest["factorization"] =
      Json{{"quadratics", quads.size()},
           {"chains", chains.size()},
           {"linkages", linkages.size()},
           {"max_chain_residual", worst_chain}};
  std::cout << quads.size() << " quadratic factors, " << chains.size()
            << " chains, " << linkages.size() << " verified linkages\n";
  return kOk;
}

int cmd_factor(const Options& opt) {
  require_file(opt.shape, "--shape");
  const FactorizedCurve curve = io::curve_from_json(io::read_json(opt.shape));
  Manifest manifest("factor", opt.out);
  manifest.input("shape", opt.shape);
  const int code = factor_curve(curve, opt.out, manifest);
  manifest.write(opt.out);
  return code;
}

int cmd_trajectory(const Options& opt) {
  require_file(opt.shape, "--shape");
  const FactorizedCurve curve = io::curve_from_json(io::read_json(opt.shape));
  FeatureCloud cloud = FeatureCloud::octahedron();
  if (!opt.config.empty()) {
    require_file(opt.config, "--config");
    cloud = cloud_from_config(io::read_json(opt.config));
  }
  const auto [lo, hi] = opt.t_range;
  if (!(lo < hi) || opt.samples < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "need t_lo < t_hi and at least 2 samples");
  }
  fs::create_directories(opt.out);
  Manifest manifest("trajectory", opt.out);
  manifest.input("shape", opt.shape);
  manifest["t_range"] = {lo, hi};
  manifest["samples"] = opt.samples;
  const auto rows = io::trajectory(curve, cloud, lo, hi, opt.samples);
  write_text(fs::path(opt.out) / "trajectory.csv",
             [&](std::ostream& os) { io::write_trajectory_csv(os, rows); });
  manifest.output("trajectory.csv");
  manifest.write(opt.out);
  return kOk;
}

// Orders converged runs first, then by objective, then by seed.
bool better(const EvolveOutcome& a, const EvolveOutcome& b) {
  const bool ca = a.reason == StopReason::kConverged;
  const bool cb = b.reason == StopReason::kConverged;
  if (ca != cb) return ca;
  if (a.objective != b.objective) return a.objective < b.objective;
  return a.seed < b.seed;
}

int cmd_synthesize(const Options& opt) {
  if (opt.seeds < 1) {
    throw Error(ErrorCode::kInvalidArgument, "--seeds must be at least 1");
  }
  const Problem base = load_problem(opt);
  const fs::path out(opt.out);
  std::vector<EvolveOutcome> runs;
  if (opt.seeds == 1) {
    runs.push_back(run_evolution(base, opt, out));
  } else {
    std::vector<std::future<EvolveOutcome>> jobs;
    for (int k = 0; k < opt.seeds; ++k) {
      Problem prob = base;
      prob.config.seed = base.config.seed + k;
      const fs::path dir = out / ("seed_" + std::to_string(prob.config.seed));
      jobs.push_back(std::async(std::launch::async, [prob, &opt, dir] {
        return run_evolution(prob, opt, dir);
      }));
    }
    for (auto& j : jobs) runs.push_back(j.get());
  }

  const EvolveOutcome& best = *std::min_element(runs.begin(), runs.end(), better);
  Manifest manifest("synthesize", out);
  manifest.input("poses", opt.poses);
  manifest.input("config", opt.config);
  manifest["config"] = io::config_to_json(base.config);
  Json seeds = Json::array();
  for (const auto& r : runs) {
    std::cout << "seed " << r.seed << ": " << to_string(r.reason)
              << ", objective " << r.objective << "\n";
    seeds.push_back(Json{{"seed", r.seed},
                         {"stop_reason", to_string(r.reason)},
                         {"objective", r.objective},
                         {"directory", fs::absolute(r.dir).string()}});
  }
  manifest["runs"] = seeds;
  manifest["seed"] = best.seed;
  if (opt.seeds > 1) {
    for (const char* name : {"shape_parameters.json", "trace.csv", "errors.csv"}) {
      fs::copy_file(best.dir / name, out / name,
                    fs::copy_options::overwrite_existing);
      manifest.output(name);
    }
  } else {
    manifest.output("shape_parameters.json");
    manifest.output("trace.csv");
    manifest.output("errors.csv");
  }
  if (best.reason != StopReason::kConverged) {
    manifest.write(out);
    std::cerr << "no seed converged\n";
    return kNotConverged;
  }
  const int code = factor_curve(best.curve, out, manifest);
  manifest.write(out);
  return code;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNonGeneric:
      return kNonGeneric;
    case ErrorCode::kParse:
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kDegeneratePose:
    case ErrorCode::kOffQuadric:
    case ErrorCode::kDegenerateCloud:
    case ErrorCode::kDegenerateDirection:
      return kInputError;
    default:
      return kNotConverged;
  }
}

}  // namespace
}  // namespace linksynth::cli

int main(int argc, char** argv) {
  using namespace linksynth::cli;
  Options opt;
  CLI::App app{"Synthesis of overconstrained 6R linkages from target poses"};
  app.require_subcommand(1);

  const auto add_out = [&](CLI::App* cmd) {
    cmd->add_option("--out", opt.out, "Output directory")->capture_default_str();
  };
  const auto add_evolution = [&](CLI::App* cmd) {
    cmd->add_option("--poses", opt.poses, "Target poses (JSON)")->required();
    cmd->add_option("--config", opt.config, "Evolution config (JSON)");
    cmd->add_option("--seed", opt.seed, "Overrides the config seed");
    cmd->add_option("--lambda-rule", opt.lambda_rule, "Step size rule")
        ->check(CLI::IsMember({"paper", "clamped"}));
    add_out(cmd);
  };

  CLI::App* evolve_cmd = app.add_subcommand("evolve", "Evolve a cubic motion");
  add_evolution(evolve_cmd);
  CLI::App* factor_cmd =
      app.add_subcommand("factor", "Factorize a shape into 3R chains");
  factor_cmd->add_option("--shape", opt.shape, "Shape parameters (JSON)")
      ->required();
  add_out(factor_cmd);
  CLI::App* traj_cmd =
      app.add_subcommand("trajectory", "Sample the TCP trajectory");
  traj_cmd->add_option("--shape", opt.shape, "Shape parameters (JSON)")
      ->required();
  traj_cmd->add_option("--config", opt.config, "Config holding feature points");
  traj_cmd->add_option("--t-range", opt.t_range, "Parameter range")
      ->capture_default_str();
  traj_cmd->add_option("--samples", opt.samples, "Number of samples")
      ->capture_default_str();
  add_out(traj_cmd);
  CLI::App* synth_cmd =
      app.add_subcommand("synthesize", "Evolve, then factorize the best run");
  add_evolution(synth_cmd);
  synth_cmd->add_option("--seeds", opt.seeds, "Number of consecutive seeds")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*evolve_cmd) return cmd_evolve(opt);
    if (*factor_cmd) return cmd_factor(opt);
    if (*traj_cmd) return cmd_trajectory(opt);
    return cmd_synthesize(opt);
  } catch (const linksynth::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
}
