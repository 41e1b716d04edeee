#include "fedswitch/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "fedswitch/switching.hpp"

namespace fedswitch {

namespace {

void check_q(double q, const char* name) {
  if (!(q > 0.0 && q <= 1.0))
    throw std::invalid_argument(std::string(name) + " must lie in (0,1]");
}

}  // namespace

double gamma_full(int E, double q, double q0) {
  if (E < 1) throw std::invalid_argument("gamma_full: E must be >= 1");
  check_q(q, "gamma_full: q");
  check_q(q0, "gamma_full: q0");
  const double e = static_cast<double>(E);
  return 2.0 * e * e + 2.0 * e * std::sqrt(1.0 - q) / q +
         4.0 * e * std::sqrt(10.0 * (1.0 - q0)) / (q0 * q);
}

double gamma_partial(int E, double q, double q0, int n, int m) {
  if (E < 1) throw std::invalid_argument("gamma_partial: E must be >= 1");
  check_q(q, "gamma_partial: q");
  check_q(q0, "gamma_partial: q0");
  if (m < 1 || m > n) throw std::invalid_argument("gamma_partial: need 1 <= m <= n");
  const double e = static_cast<double>(E);
  const double ratio = static_cast<double>(n) / static_cast<double>(m);
  return 2.0 * e * e +
         16.0 * e * ratio * std::sqrt(10.0 * (1.0 - q) * (1.0 - q0)) / (q0 * q * q) +
         8.0 * e * std::sqrt(10.0 * (1.0 - q0)) / (q0 * q) +
         20.0 * e / (q * q) +
         ratio * 4.0 * e * std::sqrt(10.0 * (1.0 - q)) / (q * q);
}

TheoremOutputs theorem1_params(const TheoremInputs& in, Regime regime) {
  if (!(in.D > 0.0) || !std::isfinite(in.D))
    throw std::invalid_argument("theorem1_params: D must be finite and positive");
  if (!(in.G > 0.0) || !std::isfinite(in.G))
    throw std::invalid_argument("theorem1_params: G must be finite and positive");
  if (in.E < 1 || in.T < 1)
    throw std::invalid_argument("theorem1_params: E and T must be >= 1");
  check_q(in.q, "theorem1_params: q");
  check_q(in.q0, "theorem1_params: q0");

  const bool compressed = in.q < 1.0 || in.q0 < 1.0;
  const double e = static_cast<double>(in.E);
  const double t = static_cast<double>(in.T);

  TheoremOutputs out;
  out.regime = regime;
  if (regime == Regime::full) {
    out.gamma = compressed ? gamma_full(in.E, in.q, in.q0) : 2.0 * e * e;
    out.epsilon = std::sqrt(2.0 * in.D * in.D * in.G * in.G * out.gamma / (e * t));
  } else {
    if (in.m < 1 || in.m > in.n)
      throw std::invalid_argument("theorem1_params: need 1 <= m <= n");
    if (!(in.delta > 0.0 && in.delta < 1.0))
      throw std::invalid_argument("theorem1_params: partial regime needs delta in (0,1)");
    if (in.sigma < 0.0)
      throw std::invalid_argument("theorem1_params: sigma must be >= 0");
    out.gamma = compressed ? gamma_partial(in.E, in.q, in.q0, in.n, in.m) : 2.0 * e * e;

    const double md = static_cast<double>(in.m);
    const double ratio = static_cast<double>(in.n) / md;
    const double base = std::sqrt(2.0 * in.D * in.D * in.G * in.G * out.gamma / (e * t));
    const double comp_term = ratio * 2.0 * in.D * in.G * std::sqrt(1.0 - in.q) / (in.q * t);
    const double conc_term =
        4.0 * in.G * in.D / std::sqrt(md * t) * std::sqrt(2.0 * std::log(3.0 / in.delta));
    const double samp_term =
        2.0 * in.sigma * std::sqrt(2.0 / md * std::log(6.0 * t / in.delta));
    out.epsilon = base + comp_term + conc_term + samp_term;
  }
  out.eta = std::sqrt(in.D * in.D / (2.0 * in.G * in.G * e * t * out.gamma));
  return out;
}

namespace {

const ModelVector& snapshot_or_throw(const RoundRecord& rec) {
  if (!rec.w_snapshot)
    throw std::runtime_error("averaged iterate: snapshot for round " +
                             std::to_string(rec.t) +
                             " was thinned away; rerun with snapshot cadence 1");
  return *rec.w_snapshot;
}

}  // namespace

ModelVector averaged_iterate_hard(const RunTrace& trace) {
  ModelVector sum;
  int count = 0;
  for (const auto& rec : trace.records) {
    if (!rec.in_A) continue;
    const ModelVector& w = snapshot_or_throw(rec);
    if (count == 0)
      sum = w;
    else
      sum += w;
    ++count;
  }
  if (count == 0)
    throw std::runtime_error("averaged_iterate_hard: the feasible round set A is empty");
  sum *= 1.0 / static_cast<double>(count);
  return sum;
}

ModelVector averaged_iterate_soft(const RunTrace& trace, double beta, double epsilon) {
  if (trace.config.m != trace.config.n)
    throw std::runtime_error(
        "averaged_iterate_soft: requires a full-participation trace; the soft "
        "weights are defined on the exact constraint value");
  ModelVector sum;
  double total = 0.0;
  int count = 0;
  for (const auto& rec : trace.records) {
    if (!(rec.g_true < epsilon)) continue;
    const double weight = 1.0 - sigma_beta(rec.g_true - epsilon, beta);
    const ModelVector& w = snapshot_or_throw(rec);
    if (count == 0) {
      sum = w;
      sum *= weight;
    } else {
      sum.axpy(weight, w);
    }
    total += weight;
    ++count;
  }
  if (count == 0)
    throw std::runtime_error("averaged_iterate_soft: the feasible round set A is empty");
  if (!(total > 0.0))
    throw std::runtime_error("averaged_iterate_soft: all soft weights are zero");
  sum *= 1.0 / total;
  return sum;
}

SkewnessDiagnostics skewness_diagnostics(const FederatedProblem& problem,
                                         const ModelVector& w) {
  const int n = problem.n();
  if (n < 1) throw std::invalid_argument("skewness_diagnostics: no clients");

  std::vector<ModelVector> a(static_cast<std::size_t>(n)), b(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    a[static_cast<std::size_t>(j)] =
        problem.clients[static_cast<std::size_t>(j)].objective_subgrad(w);
    b[static_cast<std::size_t>(j)] =
        problem.clients[static_cast<std::size_t>(j)].constraint_subgrad(w);
  }
  ModelVector a_mean(w.dim()), b_mean(w.dim());
  for (int j = 0; j < n; ++j) {
    a_mean += a[static_cast<std::size_t>(j)];
    b_mean += b[static_cast<std::size_t>(j)];
  }
  a_mean *= 1.0 / n;
  b_mean *= 1.0 / n;

  // ||x y' - y x'||_F^2 = 2(||x||^2 ||y||^2 - <x,y>^2); cross terms reduce to
  // the Gram entries of the paired vectors.
  auto skew_pair_inner = [](const ModelVector& x1, const ModelVector& y1,
                            const ModelVector& x2, const ModelVector& y2) {
    return 2.0 * (dot(x1, x2) * dot(y1, y2) - dot(x1, y2) * dot(y1, x2));
  };

  SkewnessDiagnostics out;
  out.k_glob_frob =
      std::sqrt(std::max(0.0, skew_pair_inner(a_mean, b_mean, a_mean, b_mean)));

  double loc = 0.0;
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      loc += skew_pair_inner(a[static_cast<std::size_t>(j)], b[static_cast<std::size_t>(j)],
                             a[static_cast<std::size_t>(k)], b[static_cast<std::size_t>(k)]);
  out.k_loc_frob = std::sqrt(std::max(0.0, loc)) / n;

  std::vector<ModelVector> da(a), db(b);
  for (int j = 0; j < n; ++j) {
    da[static_cast<std::size_t>(j)] -= a_mean;
    db[static_cast<std::size_t>(j)] -= b_mean;
  }
  double diff = 0.0;
  for (int j = 0; j < n; ++j) {
    out.v_f += squared_norm(da[static_cast<std::size_t>(j)]);
    out.v_g += squared_norm(db[static_cast<std::size_t>(j)]);
    for (int k = 0; k < n; ++k)
      diff +=
          skew_pair_inner(da[static_cast<std::size_t>(j)], db[static_cast<std::size_t>(j)],
                          da[static_cast<std::size_t>(k)], db[static_cast<std::size_t>(k)]);
  }
  out.v_f /= n;
  out.v_g /= n;
  out.k_diff_frob = std::sqrt(std::max(0.0, diff)) / n;
  out.bound_gap = std::sqrt(2.0 * out.v_f * out.v_g) - out.k_diff_frob;
  return out;
}

GridOptimum brute_force_optimum(const FederatedProblem& problem, double grid_step) {
  if (!(grid_step > 0.0))
    throw std::invalid_argument("brute_force_optimum: grid step must be positive");
  if (!problem.domain.is_bounded())
    throw std::invalid_argument("brute_force_optimum: domain must be compact");
  const std::size_t d = problem.dim;
  if (d == 0 || d > 3)
    throw std::invalid_argument("brute_force_optimum: only d <= 3 is supported");

  std::vector<double> lo(d), hi(d);
  if (problem.domain.kind() == Domain::Kind::box) {
    for (std::size_t i = 0; i < d; ++i) {
      lo[i] = problem.domain.lower()[i];
      hi[i] = problem.domain.upper()[i];
    }
  } else {
    for (std::size_t i = 0; i < d; ++i) {
      lo[i] = problem.domain.center()[i] - problem.domain.radius();
      hi[i] = problem.domain.center()[i] + problem.domain.radius();
    }
  }
  std::vector<std::size_t> steps(d);
  for (std::size_t i = 0; i < d; ++i)
    steps[i] = static_cast<std::size_t>(std::floor((hi[i] - lo[i]) / grid_step + 1e-9)) + 1;

  const bool is_ball = problem.domain.kind() == Domain::Kind::ball;
  bool found = false;
  GridOptimum best;
  ModelVector point(d);

  // Lexicographically ascending scan; strict improvement keeps the first
  // (lowest) point among ties.
  std::vector<std::size_t> idx(d, 0);
  for (;;) {
    for (std::size_t i = 0; i < d; ++i)
      point[i] = std::min(lo[i] + static_cast<double>(idx[i]) * grid_step, hi[i]);
    if (!is_ball || problem.domain.contains(point)) {
      const GlobalEval ge = global_eval(problem, point);
      if (ge.g <= 0.0 && (!found || ge.f < best.f_star)) {
        best.w_star = point;
        best.f_star = ge.f;
        found = true;
      }
    }
    std::size_t axis = d;
    while (axis > 0) {
      --axis;
      if (++idx[axis] < steps[axis]) break;
      idx[axis] = 0;
      if (axis == 0) {
        if (!found)
          throw std::runtime_error("brute_force_optimum: no feasible grid point");
        return best;
      }
    }
  }
}

Verdict verdict(const FederatedProblem& problem, const ModelVector& w_bar,
                double epsilon) {
  const GlobalEval ge = global_eval(problem, w_bar);
  Verdict v;
  v.violation = ge.g;
  if (problem.optimum_hint) {
    v.subopt_gap = ge.f - problem.optimum_hint->f_star;
    v.is_eps_solution = *v.subopt_gap <= epsilon && v.violation <= epsilon;
  }
  return v;
}

}  // namespace fedswitch
