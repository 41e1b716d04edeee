#pragma once

#include <string>
#include <vector>

#include "fedswitch/analysis.hpp"
#include "fedswitch/engine.hpp"

namespace fedswitch {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Per-vector contraction check against a claimed accuracy: every random
/// vector must satisfy ||C(v)-v||^2 <= (1-claimed_q)||v||^2 + 1e-12. Returns
/// false (with detail) on the first violation.
bool check_contraction_per_vector(const CompressorSpec& spec, double claimed_q,
                                  std::size_t d, int trials, std::uint64_t seed,
                                  std::string* detail = nullptr);

/// Monte-Carlo contraction check for rand_k: the mean ratio over `draws`
/// fresh draws must stay below (1 - k/d)(1 + 5/sqrt(draws)) for each probe
/// vector.
bool check_rand_k_mc(int k, std::size_t d, int draws, int probe_vectors,
                     std::uint64_t seed, std::string* detail = nullptr);

/// Local drift bound over a finished trace: every round's recorded drift sum
/// must satisfy drift <= (1/3) eta^2 E^3 G^2 + 1e-9 for the claimed
/// parameters.
bool check_drift_bound(const RunTrace& trace, double claimed_eta, int E, double G,
                       std::string* detail = nullptr);

/// ||delta|| <= E*G + 1e-9 for every round of the trace.
bool check_delta_bound(const RunTrace& trace, int E, double G,
                       std::string* detail = nullptr);

/// Runs the whole reduced-scale invariant suite. Prints nothing; callers
/// render the results.
std::vector<CheckResult> run_verification(std::uint64_t seed);

}  // namespace fedswitch
