#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fedswitch/domain.hpp"
#include "fedswitch/rng.hpp"
#include "fedswitch/vector.hpp"

namespace fedswitch {

/// One client's view of the problem: objective and constraint value oracles
/// with matching subgradient oracles, plus a Lipschitz certificate valid on
/// the run's domain. The optional *_batch oracles are mini-batch variants;
/// when absent the exact oracles are used everywhere.
struct ClientProblem {
  int client_id = 0;
  double lipschitz_G = 0.0;

  std::function<double(const ModelVector&)> objective_value;
  std::function<double(const ModelVector&)> constraint_value;
  std::function<ModelVector(const ModelVector&)> objective_subgrad;
  std::function<ModelVector(const ModelVector&)> constraint_subgrad;

  std::function<ModelVector(const ModelVector&, Rng&)> objective_subgrad_batch;
  std::function<ModelVector(const ModelVector&, Rng&)> constraint_subgrad_batch;

  bool has_batch_oracles() const {
    return static_cast<bool>(objective_subgrad_batch);
  }
};

struct OptimumHint {
  ModelVector w_star;
  double f_star = 0.0;
  std::string provenance;
};

/// The full federated instance: n clients over one shared domain and
/// dimension. Global objective and constraint are the ascending-order client
/// averages.
struct FederatedProblem {
  std::vector<ClientProblem> clients;
  Domain domain = Domain::unbounded();
  std::size_t dim = 0;
  std::optional<OptimumHint> optimum_hint;

  int n() const { return static_cast<int>(clients.size()); }

  /// Largest per-client Lipschitz certificate; the G of the parameter
  /// formulas.
  double lipschitz_G() const;
};

struct GlobalEval {
  double f = 0.0;
  double g = 0.0;
};

/// Exact ascending-order client averages of objective and constraint at w.
GlobalEval global_eval(const FederatedProblem& problem, const ModelVector& w);

/// Feature matrix with binary labels.
struct LabeledDataset {
  std::vector<std::vector<double>> rows;  // m x d_feat
  std::vector<int> labels;                // 0/1 per row

  std::size_t size() const { return rows.size(); }
  std::size_t feature_dim() const { return rows.empty() ? 0 : rows.front().size(); }
  std::size_t count_label(int y) const;
};

/// Binary logistic loss -y<w,x> + log(1 + exp(<w,x>)), evaluated with the
/// overflow-safe branch for large |<w,x>|.
double logistic_loss(const ModelVector& w, const std::vector<double>& x, int y);

/// Gradient of the logistic loss: (sigmoid(<w,x>) - y) * x.
ModelVector logistic_grad(const ModelVector& w, const std::vector<double>& x, int y);

/// Loads a CSV whose last column is the 0/1 label and whose remaining
/// columns are numeric features. Features are standardized per column to
/// zero mean / unit variance; constant columns become all-zero. Parse
/// failures report row and column.
LabeledDataset load_csv(const std::string& path);

/// Standardize columns in place (zero mean, unit variance; constant columns
/// zeroed). Applied by load_csv and the synthetic generator.
void standardize_features(LabeledDataset& data);

/// Two-Gaussian synthetic dataset: class means sit at +/- margin along a
/// seed-derived unit direction, unit isotropic noise, then standardized.
LabeledDataset make_synthetic_dataset(int rows, int d_feat, double class1_fraction,
                                      std::uint64_t seed, double margin = 3.0);

enum class Partition {
  iid_split,  // each class split uniformly at random into equal shards
  replicate,  // every client holds the full dataset (homogeneous clients)
};

/// Classification benchmark with a per-class loss split: each client's
/// objective averages class-0 logistic loss and its constraint averages
/// class-1 logistic loss. The Lipschitz certificate is the maximum feature
/// row norm. batch_size > 0 installs mini-batch subgradient oracles that
/// subsample that many rows uniformly per call.
FederatedProblem build_np_classification(const LabeledDataset& data, int n,
                                         std::uint64_t partition_seed,
                                         Domain domain,
                                         Partition partition = Partition::iid_split,
                                         int batch_size = 0);

/// Analytically solvable benchmark: linear objective <c_j, w> with the c_j
/// perturbed in exactly canceling pairs (their mean is c), shared quadratic
/// constraint ||w||^2 - r^2, box domain [-halfwidth, halfwidth]^d. The
/// optimum -r c/||c|| with value -r||c|| is attached as a hint.
FederatedProblem build_synthetic_linear_ball(int d, const ModelVector& direction,
                                             double radius_constraint, int n,
                                             double halfwidth,
                                             double perturbation_scale,
                                             std::uint64_t seed);

/// Sample standard deviation of the per-client constraint values at w;
/// empirical stand-in for the sub-Gaussian proxy of the partial-participation
/// formulas. Label it as an estimate wherever it is surfaced.
double estimate_sigma(const FederatedProblem& problem, const ModelVector& w);

}  // namespace fedswitch
