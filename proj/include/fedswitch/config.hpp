#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fedswitch/analysis.hpp"
#include "fedswitch/engine.hpp"

namespace fedswitch {

using json = nlohmann::json;

/// Thrown for malformed configs; the message carries the offending field
/// path.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DomainSpec {
  enum class Kind { unbounded, ball, box };
  Kind kind = Kind::ball;
  double radius = 10.0;    // ball, centered at the origin
  double halfwidth = 1.0;  // box [-halfwidth, halfwidth]^d
};

struct ProblemSpec {
  enum class Type { np_csv, np_synthetic, linear_ball };
  Type type = Type::np_synthetic;

  // np_csv
  std::string path;

  // np_synthetic
  int rows = 400;
  int d_feat = 30;
  double class_balance = 0.5;
  double margin = 3.0;

  // shared by the classification problems
  std::uint64_t seed = 0;
  DomainSpec domain;
  Partition partition = Partition::iid_split;
  int batch_size = 0;

  // linear_ball
  int d = 2;
  std::vector<double> direction;
  double radius = 1.0;
  double halfwidth = 2.0;
  double perturbation = 0.25;
};

struct SwitchSpec {
  SwitchMode::Kind kind = SwitchMode::Kind::hard;
  std::optional<double> epsilon;  // manual mode only
  std::optional<double> beta;     // soft mode; theorem mode defaults to 2/epsilon
};

struct ParamSpec {
  enum class Mode { manual, theorem };
  Mode mode = Mode::manual;

  // manual
  std::optional<double> eta;

  // theorem-mode overrides; anything absent is derived from the problem and
  // the compressor specs
  std::optional<double> D, G, q, q0, sigma, delta;
  std::optional<Regime> regime;   // default: partial iff m < n
  bool estimate_sigma = false;    // use the empirical per-client spread at w0
};

struct CompressorFileSpec {
  std::string kind = "identity";
  int k = 0;
  int bits = 0;
  std::optional<double> q;

  CompressorSpec to_spec() const;
};

/// One experiment as described by a config file.
struct RunSpec {
  ProblemSpec problem;
  int T = 1, E = 1, n = 1, m = 1;
  std::uint64_t seed = 0;
  bool comp_enabled = false;
  CompressorFileSpec uplink, downlink;
  SwitchSpec switch_spec;
  ParamSpec params;
  std::string output_dir = "out";
  int snapshot_cadence = 1;
  int threads = 1;
  std::optional<std::vector<double>> w0;
  json sweep;  // object: dotted field path -> array of values; empty if absent
};

RunSpec parse_run_spec(const json& j);
RunSpec parse_run_spec_file(const std::string& path);
json to_json(const RunSpec& spec);

/// Applies one sweep override (dotted path, e.g. "rounds.E") to a config
/// json and returns the updated document.
json apply_override(json config, const std::string& dotted_path, const json& value);

FederatedProblem build_problem(const ProblemSpec& spec, int n);

/// Everything needed to call run(): the problem, the resolved engine config
/// (eta and epsilon filled in) and the start point.
struct PreparedRun {
  FederatedProblem problem;
  RoundConfig round_config;
  ModelVector w0;
  std::optional<TheoremOutputs> theorem;  // set in theorem mode
  std::optional<double> sigma_estimate;   // set when estimated empirically
};

PreparedRun prepare_run(const RunSpec& spec);

/// Runs one experiment and writes trace.csv + summary.json into
/// spec.output_dir (created if needed). Returns the summary document.
json execute_run(const RunSpec& spec);

/// Runs the Cartesian product of the sweep axes; each cell lands in its own
/// subdirectory of output_dir with an index.csv of final metrics at the top.
/// Cells that abort are recorded and do not stop the sweep. Returns the
/// number of failed cells.
int execute_sweep(const RunSpec& spec);

}  // namespace fedswitch
