#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fedswitch/compress.hpp"
#include "fedswitch/problem.hpp"
#include "fedswitch/switching.hpp"

namespace fedswitch {

struct CompressionConfig {
  bool enabled = false;
  CompressorSpec uplink;
  CompressorSpec downlink;

  static CompressionConfig off() { return {}; }
  static CompressionConfig on(CompressorSpec uplink, CompressorSpec downlink) {
    return {true, std::move(uplink), std::move(downlink)};
  }
};

/// Every knob of one simulated run.
struct RoundConfig {
  int T = 1;  // rounds
  int E = 1;  // local steps per round
  int n = 1;  // total clients
  int m = 1;  // participants per round
  double eta = 0.0;
  SwitchMode switch_mode;
  CompressionConfig comp;
  std::uint64_t seed = 0;
  int snapshot_cadence = 1;  // store w_t every k-th round
  int threads = 1;           // client workers per round; never affects results

  void validate() const;
};

/// Per-round record: everything the trace, the averaged-iterate construction
/// and the invariant checks need.
struct RoundRecord {
  int t = 0;
  std::vector<int> sampled;  // ascending client ids
  double g_hat = 0.0;        // sampled-mean constraint value at w_t
  double g_true = 0.0;       // full-population constraint value at w_t
  double f_true = 0.0;       // full-population objective value at w_t
  double switch_weight = 0.0;
  bool in_A = false;
  std::int64_t uplink_bytes = 0;
  std::int64_t downlink_bytes = 0;

  // Diagnostics for invariant checks.
  double max_drift_sq = 0.0;    // max over sampled clients of sum_tau ||w_t - w_loc||^2
  double max_delta_norm = 0.0;  // max over sampled clients of ||delta||
  std::optional<ModelVector> w_snapshot;  // w_t (pre-round), per snapshot cadence
  std::optional<ModelVector> delta_mean;  // mean raw client delta (virtual-iterate checks)
};

/// Server/client state carried across rounds. x and the residuals exist only
/// when compression is enabled.
struct AlgoState {
  ModelVector w;                      // broadcast model w_t
  std::optional<ModelVector> x;       // server model x_t
  std::vector<EfResidual> residuals;  // one per client, frozen while unsampled
  int t = 0;
};

struct RunTrace {
  RoundConfig config;
  std::vector<RoundRecord> records;
  AlgoState final_state;
};

/// Uniform m-subset of [0,n) without replacement, ascending. m == n returns
/// all ids without consuming randomness.
std::vector<int> sample_clients(int n, int m, Rng& rng);

/// Sampled-mean constraint value at w, ascending client order.
double constraint_query(const FederatedProblem& problem, const ModelVector& w,
                        const std::vector<int>& sampled);

struct LocalUpdateResult {
  ModelVector delta;       // sum of the E subgradient steps taken
  double drift_sq_sum = 0.0;  // sum_tau ||w_start - w_loc_tau||^2
};

/// Runs E unprojected local steps from w_start with a fixed blend weight.
/// batch_rng feeds the client's mini-batch oracles when it has them; exact
/// oracles ignore it. Aborts on non-finite iterates and on subgradients that
/// exceed the client's Lipschitz certificate.
LocalUpdateResult local_update(const ClientProblem& client, const ModelVector& w_start,
                               double weight, double eta, int E,
                               Rng* batch_rng = nullptr);

/// Executes one full round in place and returns its record.
RoundRecord run_round(AlgoState& state, const RoundConfig& config,
                      const FederatedProblem& problem);

AlgoState init_state(const RoundConfig& config, const FederatedProblem& problem,
                     const ModelVector& w0);

/// Runs T rounds from w0 (projected onto the domain first). Fully
/// deterministic given (config, problem, seed), independent of
/// config.threads.
RunTrace run(const RoundConfig& config, const FederatedProblem& problem,
             const ModelVector& w0);

}  // namespace fedswitch
