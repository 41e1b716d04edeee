#pragma once

#include <optional>

#include "fedswitch/engine.hpp"
#include "fedswitch/problem.hpp"

namespace fedswitch {

/// Inputs of the step-size / threshold calculators. q = q0 = 1 encodes "no
/// compression". sigma is the sub-Gaussian proxy for the sampled-mean
/// constraint gap (user-supplied, or estimated via estimate_sigma), delta the
/// confidence parameter; both matter only in the partial regime.
struct TheoremInputs {
  double D = 0.0;  // initial-distance / diameter bound
  double G = 0.0;  // Lipschitz constant
  int E = 1;
  int T = 1;
  int n = 1;
  int m = 1;
  double q = 1.0;
  double q0 = 1.0;
  double sigma = 0.0;
  double delta = 0.0;
};

enum class Regime { full, partial };

struct TheoremOutputs {
  double gamma = 0.0;
  double eta = 0.0;
  double epsilon = 0.0;
  Regime regime = Regime::full;
};

/// Full-participation drift/compression factor:
///   2E^2 + 2E*sqrt(1-q)/q + 4E*sqrt(10(1-q0))/(q0 q).
/// Collapses to 2E^2 at q = q0 = 1.
double gamma_full(int E, double q, double q0);

/// Partial-participation factor, literal substitution:
///   2E^2 + 16E(n/m)sqrt(10(1-q)(1-q0))/(q0 q^2) + 8E sqrt(10(1-q0))/(q0 q)
///       + 20E/q^2 + (n/m) 4E sqrt(10(1-q))/q^2.
/// Note the 20E/q^2 term survives substitution at q = q0 = 1; it belongs to
/// the compression analysis and is dropped entirely for uncompressed runs
/// (see theorem1_params).
double gamma_partial(int E, double q, double q0, int n, int m);

/// Step size and constraint threshold for the requested regime:
///   eta = sqrt(D^2 / (2 G^2 E T Gamma)),  epsilon = sqrt(2 D^2 G^2 Gamma / (E T)),
/// with the partial regime adding the compression, concentration and
/// sampling terms to epsilon. When q = q0 = 1 the compression factors drop
/// from Gamma in both regimes (Gamma = 2E^2). The full regime ignores sigma
/// and delta; the partial regime requires delta in (0,1).
TheoremOutputs theorem1_params(const TheoremInputs& inputs, Regime regime);

/// Uniform mean of the stored w_t over rounds with in_A set. Errors if A is
/// empty or a needed snapshot was thinned away.
ModelVector averaged_iterate_hard(const RunTrace& trace);

/// Weighted mean over A = { t : g_true(t) < epsilon } with weights
/// 1 - sigma_beta(g_true - epsilon). Only valid for full-participation
/// traces, where the recorded g_true is exactly the quantity the weights are
/// defined on; refused otherwise.
ModelVector averaged_iterate_soft(const RunTrace& trace, double beta, double epsilon);

struct SkewnessDiagnostics {
  double k_glob_frob = 0.0;  // || a b' - b a' ||_F of the global gradients
  double k_loc_frob = 0.0;   // Frobenius norm of the mean local skew matrix
  double k_diff_frob = 0.0;  // || K_loc - K_glob ||_F
  double v_f = 0.0;          // mean squared objective-gradient heterogeneity
  double v_g = 0.0;          // mean squared constraint-gradient heterogeneity
  double bound_gap = 0.0;    // sqrt(2 v_f v_g) - k_diff_frob, >= 0 up to rounding
};

/// Gradient-skewness / heterogeneity diagnostics at w. All Frobenius norms
/// are reduced to Gram computations over the 2n client gradients; no d x d
/// matrix is formed.
SkewnessDiagnostics skewness_diagnostics(const FederatedProblem& problem,
                                         const ModelVector& w);

/// Exhaustive grid search over a compact domain (d <= 3) restricted to
/// points with g <= 0. Ties resolve to the lexicographically smallest point.
struct GridOptimum {
  ModelVector w_star;
  double f_star = 0.0;
};
GridOptimum brute_force_optimum(const FederatedProblem& problem, double grid_step);

struct Verdict {
  std::optional<double> subopt_gap;  // f(w_bar) - f*, when an optimum hint exists
  double violation = 0.0;            // g(w_bar)
  std::optional<bool> is_eps_solution;
};

/// Checks whether w_bar is an epsilon-solution: f(w_bar) - f* <= eps and
/// g(w_bar) <= eps, both inclusive. The gap is "unknown" without an optimum
/// hint.
Verdict verdict(const FederatedProblem& problem, const ModelVector& w_bar,
                double epsilon);

}  // namespace fedswitch
