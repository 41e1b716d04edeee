#include "fedswitch/engine.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>

namespace fedswitch {

void RoundConfig::validate() const {
  if (T < 0) throw std::invalid_argument("RoundConfig: T must be >= 0");
  if (E < 1) throw std::invalid_argument("RoundConfig: E must be >= 1");
  if (n < 1) throw std::invalid_argument("RoundConfig: n must be >= 1");
  if (m < 1 || m > n) throw std::invalid_argument("RoundConfig: need 1 <= m <= n");
  if (!(eta > 0.0) || !std::isfinite(eta))
    throw std::invalid_argument("RoundConfig: eta must be finite and positive");
  if (snapshot_cadence < 1)
    throw std::invalid_argument("RoundConfig: snapshot cadence must be >= 1");
  if (threads < 1) throw std::invalid_argument("RoundConfig: threads must be >= 1");
}

std::vector<int> sample_clients(int n, int m, Rng& rng) {
  if (m < 1 || m > n) throw std::invalid_argument("sample_clients: need 1 <= m <= n");
  std::vector<int> ids(static_cast<std::size_t>(n));
  std::iota(ids.begin(), ids.end(), 0);
  if (m == n) return ids;
  for (int i = 0; i < m; ++i) {
    const auto j = static_cast<std::size_t>(i) +
                   rng.below(static_cast<std::uint64_t>(n - i));
    std::swap(ids[static_cast<std::size_t>(i)], ids[j]);
  }
  ids.resize(static_cast<std::size_t>(m));
  std::sort(ids.begin(), ids.end());
  return ids;
}

double constraint_query(const FederatedProblem& problem, const ModelVector& w,
                        const std::vector<int>& sampled) {
  if (sampled.empty()) throw std::invalid_argument("constraint_query: empty sample");
  double s = 0.0;
  for (int j : sampled) s += problem.clients[static_cast<std::size_t>(j)].constraint_value(w);
  return s / static_cast<double>(sampled.size());
}

namespace {

void check_subgrad_norm(const ModelVector& g, const ClientProblem& client, int tau,
                        const char* which) {
  const double nn = norm(g);
  if (nn > client.lipschitz_G + 1e-9) {
    throw std::runtime_error("client " + std::to_string(client.client_id) +
                             ": " + which + " subgradient norm " + std::to_string(nn) +
                             " exceeds Lipschitz certificate " +
                             std::to_string(client.lipschitz_G) + " at local step " +
                             std::to_string(tau));
  }
}

}  // namespace

LocalUpdateResult local_update(const ClientProblem& client, const ModelVector& w_start,
                               double weight, double eta, int E, Rng* batch_rng) {
  if (E < 1) throw std::invalid_argument("local_update: E must be >= 1");
  const bool use_batch = batch_rng != nullptr && client.has_batch_oracles();

  ModelVector w_loc = w_start;
  ModelVector delta(w_start.dim());
  double drift_sq_sum = 0.0;

  for (int tau = 0; tau < E; ++tau) {
    if (tau > 0) {
      double d2 = 0.0;
      for (std::size_t i = 0; i < w_loc.dim(); ++i) {
        const double d = w_start[i] - w_loc[i];
        d2 += d * d;
      }
      drift_sq_sum += d2;
    }

    ModelVector step(w_start.dim());
    if (weight == 0.0) {
      step = use_batch ? client.objective_subgrad_batch(w_loc, *batch_rng)
                       : client.objective_subgrad(w_loc);
      check_subgrad_norm(step, client, tau, "objective");
    } else if (weight == 1.0) {
      step = use_batch ? client.constraint_subgrad_batch(w_loc, *batch_rng)
                       : client.constraint_subgrad(w_loc);
      check_subgrad_norm(step, client, tau, "constraint");
    } else {
      ModelVector gf = use_batch ? client.objective_subgrad_batch(w_loc, *batch_rng)
                                 : client.objective_subgrad(w_loc);
      ModelVector gg = use_batch ? client.constraint_subgrad_batch(w_loc, *batch_rng)
                                 : client.constraint_subgrad(w_loc);
      check_subgrad_norm(gf, client, tau, "objective");
      check_subgrad_norm(gg, client, tau, "constraint");
      step = blended_subgrad(weight, gf, gg);
    }

    delta += step;
    w_loc.axpy(-eta, step);
    if (!w_loc.is_finite())
      throw std::runtime_error("client " + std::to_string(client.client_id) +
                               ": local iterate diverged (non-finite) at local step " +
                               std::to_string(tau));
  }
  return {std::move(delta), drift_sq_sum};
}

namespace {

struct ClientWork {
  ModelVector delta;
  double drift_sq_sum = 0.0;
  ModelVector sent;        // compression enabled only
  EfResidual new_residual; // compression enabled only
};

// Runs fn(i) for i in [0, count) across the requested number of workers.
// Each index is processed exactly once; results must be written to
// per-index slots so the schedule cannot affect the outcome.
template <typename Fn>
void parallel_for(int count, int threads, Fn&& fn) {
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::mutex error_mu;
  for (int tid = 0; tid < threads; ++tid) {
    pool.emplace_back([&, tid] {
      try {
        for (int i = tid; i < count; i += threads) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace

AlgoState init_state(const RoundConfig& config, const FederatedProblem& problem,
                     const ModelVector& w0) {
  config.validate();
  if (problem.n() != config.n)
    throw std::invalid_argument("init_state: config.n does not match the problem");
  if (w0.dim() != problem.dim)
    throw std::invalid_argument("init_state: w0 dimension does not match the problem");

  AlgoState state;
  state.w = project(w0, problem.domain);
  if (config.comp.enabled) {
    state.x = state.w;
    state.residuals.reserve(static_cast<std::size_t>(config.n));
    for (int j = 0; j < config.n; ++j)
      state.residuals.push_back(EfResidual::zero(problem.dim, j));
  }
  return state;
}

RoundRecord run_round(AlgoState& state, const RoundConfig& config,
                      const FederatedProblem& problem) {
  if (config.comp.enabled &&
      (!state.x || state.residuals.size() != static_cast<std::size_t>(config.n)))
    throw std::invalid_argument(
        "run_round: state carries no compression bookkeeping for this config");
  const int t = state.t;
  const std::size_t d = state.w.dim();

  Rng sample_rng = substream(config.seed, "sample", static_cast<std::uint64_t>(t));
  std::vector<int> sampled = sample_clients(config.n, config.m, sample_rng);

  const double g_hat = constraint_query(problem, state.w, sampled);
  const double weight = switch_weight(config.switch_mode, g_hat);
  const GlobalEval ge = global_eval(problem, state.w);

  RoundRecord rec;
  rec.t = t;
  rec.g_hat = g_hat;
  rec.g_true = ge.g;
  rec.f_true = ge.f;
  rec.switch_weight = weight;
  rec.in_A = config.switch_mode.is_soft() ? g_hat < config.switch_mode.epsilon
                                          : g_hat <= config.switch_mode.epsilon;
  if (t % config.snapshot_cadence == 0) rec.w_snapshot = state.w;

  const int m = static_cast<int>(sampled.size());
  std::vector<ClientWork> work(static_cast<std::size_t>(m));
  parallel_for(m, config.threads, [&](int i) {
    const int j = sampled[static_cast<std::size_t>(i)];
    const auto& client = problem.clients[static_cast<std::size_t>(j)];
    Rng batch_rng = substream(config.seed, "client", static_cast<std::uint64_t>(t),
                              static_cast<std::uint64_t>(j));
    try {
      LocalUpdateResult r =
          local_update(client, state.w, weight, config.eta, config.E, &batch_rng);
      auto& slot = work[static_cast<std::size_t>(i)];
      slot.delta = std::move(r.delta);
      slot.drift_sq_sum = r.drift_sq_sum;
      if (config.comp.enabled) {
        Rng comp_rng = substream(config.seed, "compress", static_cast<std::uint64_t>(t),
                                 static_cast<std::uint64_t>(j));
        UplinkStep up = uplink_ef_step(state.residuals[static_cast<std::size_t>(j)],
                                       slot.delta, config.comp.uplink, comp_rng);
        slot.sent = std::move(up.sent);
        slot.new_residual = std::move(up.residual);
      }
    } catch (const std::exception& e) {
      throw std::runtime_error("round " + std::to_string(t) + ": " + e.what());
    }
  });

  // Sequential server phase; all reductions ascend in client order.
  ModelVector agg(d);
  ModelVector delta_mean(d);
  for (int i = 0; i < m; ++i) {
    const auto& slot = work[static_cast<std::size_t>(i)];
    rec.max_drift_sq = std::max(rec.max_drift_sq, slot.drift_sq_sum);
    rec.max_delta_norm = std::max(rec.max_delta_norm, norm(slot.delta));
    delta_mean += slot.delta;
    agg += config.comp.enabled ? slot.sent : slot.delta;
  }
  const double inv_m = 1.0 / static_cast<double>(m);
  delta_mean *= inv_m;
  agg *= inv_m;
  rec.delta_mean = std::move(delta_mean);

  const CompressorSpec identity = CompressorSpec::identity();
  const CompressorSpec& up_spec = config.comp.enabled ? config.comp.uplink : identity;
  const CompressorSpec& down_spec = config.comp.enabled ? config.comp.downlink : identity;
  rec.uplink_bytes = static_cast<std::int64_t>(m) * message_bytes(up_spec, d);
  rec.downlink_bytes = message_bytes(down_spec, d);

  if (config.comp.enabled) {
    for (int i = 0; i < m; ++i) {
      const int j = sampled[static_cast<std::size_t>(i)];
      state.residuals[static_cast<std::size_t>(j)] =
          std::move(work[static_cast<std::size_t>(i)].new_residual);
    }
    ModelVector x_next = *state.x;
    x_next.axpy(-config.eta, agg);
    x_next = project(x_next, problem.domain);
    Rng server_rng = substream(config.seed, "compress", static_cast<std::uint64_t>(t),
                               static_cast<std::uint64_t>(config.n));
    DownlinkStep down = downlink_ef_step(x_next, state.w, down_spec, server_rng);
    state.x = std::move(x_next);
    state.w = std::move(down.new_broadcast);
  } else {
    ModelVector w_next = state.w;
    w_next.axpy(-config.eta, agg);
    state.w = project(w_next, problem.domain);
  }

  rec.sampled = std::move(sampled);
  state.t = t + 1;
  return rec;
}

RunTrace run(const RoundConfig& config, const FederatedProblem& problem,
             const ModelVector& w0) {
  AlgoState state = init_state(config, problem, w0);
  RunTrace trace;
  trace.config = config;
  trace.records.reserve(static_cast<std::size_t>(config.T));
  for (int t = 0; t < config.T; ++t)
    trace.records.push_back(run_round(state, config, problem));
  trace.final_state = std::move(state);
  return trace;
}

}  // namespace fedswitch
