#include "fedswitch/problem.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace fedswitch {

double FederatedProblem::lipschitz_G() const {
  double g = 0.0;
  for (const auto& c : clients) g = std::max(g, c.lipschitz_G);
  return g;
}

GlobalEval global_eval(const FederatedProblem& problem, const ModelVector& w) {
  if (problem.clients.empty())
    throw std::invalid_argument("global_eval: problem has no clients");
  double f = 0.0, g = 0.0;
  for (const auto& c : problem.clients) {
    f += c.objective_value(w);
    g += c.constraint_value(w);
  }
  const double n = static_cast<double>(problem.clients.size());
  return {f / n, g / n};
}

std::size_t LabeledDataset::count_label(int y) const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), y));
}

double logistic_loss(const ModelVector& w, const std::vector<double>& x, int y) {
  if (w.dim() != x.size())
    throw std::invalid_argument("logistic_loss: dimension mismatch");
  double z = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) z += w[i] * x[i];
  // log(1 + e^z) = z + log(1 + e^-z) for z > 0 avoids overflow.
  const double softplus = z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
  return -static_cast<double>(y) * z + softplus;
}

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

ModelVector logistic_grad(const ModelVector& w, const std::vector<double>& x, int y) {
  if (w.dim() != x.size())
    throw std::invalid_argument("logistic_grad: dimension mismatch");
  double z = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) z += w[i] * x[i];
  const double coeff = sigmoid(z) - static_cast<double>(y);
  ModelVector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = coeff * x[i];
  return out;
}

void standardize_features(LabeledDataset& data) {
  if (data.rows.empty()) return;
  const std::size_t d = data.feature_dim();
  const double m = static_cast<double>(data.rows.size());
  for (std::size_t col = 0; col < d; ++col) {
    double mean = 0.0;
    for (const auto& row : data.rows) mean += row[col];
    mean /= m;
    double var = 0.0;
    for (const auto& row : data.rows) {
      const double c = row[col] - mean;
      var += c * c;
    }
    var /= m;
    const double sd = std::sqrt(var);
    if (sd == 0.0) {
      for (auto& row : data.rows) row[col] = 0.0;
    } else {
      for (auto& row : data.rows) row[col] = (row[col] - mean) / sd;
    }
  }
}

LabeledDataset load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_csv: cannot open " + path);

  LabeledDataset data;
  std::string line;
  std::size_t lineno = 0;
  std::size_t expected_cols = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    std::vector<double> cells;
    std::stringstream ss(line);
    std::string cell;
    std::size_t col = 0;
    while (std::getline(ss, cell, ',')) {
      ++col;
      try {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used])))
          ++used;
        if (used != cell.size()) throw std::invalid_argument("trailing junk");
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite");
        cells.push_back(v);
      } catch (const std::exception&) {
        throw std::runtime_error("load_csv: " + path + ": row " + std::to_string(lineno) +
                                 ", column " + std::to_string(col) + ": cannot parse '" +
                                 cell + "'");
      }
    }
    if (cells.size() < 2)
      throw std::runtime_error("load_csv: " + path + ": row " + std::to_string(lineno) +
                               ": need at least one feature column plus the label");
    if (expected_cols == 0) {
      expected_cols = cells.size();
    } else if (cells.size() != expected_cols) {
      throw std::runtime_error("load_csv: " + path + ": row " + std::to_string(lineno) +
                               ": expected " + std::to_string(expected_cols) +
                               " columns, got " + std::to_string(cells.size()));
    }
    const double label = cells.back();
    cells.pop_back();
    if (label != 0.0 && label != 1.0)
      throw std::runtime_error("load_csv: " + path + ": row " + std::to_string(lineno) +
                               ": label must be 0 or 1, got " + std::to_string(label));
    data.rows.push_back(std::move(cells));
    data.labels.push_back(static_cast<int>(label));
  }
  if (data.rows.empty()) throw std::runtime_error("load_csv: " + path + ": no data rows");

  standardize_features(data);
  return data;
}

LabeledDataset make_synthetic_dataset(int rows, int d_feat, double class1_fraction,
                                      std::uint64_t seed, double margin) {
  if (rows < 2) throw std::invalid_argument("make_synthetic_dataset: need rows >= 2");
  if (d_feat < 1) throw std::invalid_argument("make_synthetic_dataset: need d_feat >= 1");
  if (!(class1_fraction > 0.0 && class1_fraction < 1.0))
    throw std::invalid_argument("make_synthetic_dataset: class fraction must be in (0,1)");

  Rng dir_rng = substream(seed, "direction");
  ModelVector u(static_cast<std::size_t>(d_feat));
  for (std::size_t i = 0; i < u.dim(); ++i) u[i] = dir_rng.normal();
  const double un = norm(u);
  for (std::size_t i = 0; i < u.dim(); ++i) u[i] /= un;

  // Deterministic class counts keep both classes nonempty for any seed.
  const int n1 = std::clamp(static_cast<int>(std::lround(rows * class1_fraction)), 1,
                            rows - 1);

  LabeledDataset data;
  data.rows.reserve(static_cast<std::size_t>(rows));
  Rng row_rng = substream(seed, "rows");
  for (int i = 0; i < rows; ++i) {
    const int y = i < n1 ? 1 : 0;
    const double sign = y == 1 ? 1.0 : -1.0;
    std::vector<double> x(static_cast<std::size_t>(d_feat));
    for (int k = 0; k < d_feat; ++k)
      x[static_cast<std::size_t>(k)] =
          sign * margin * u[static_cast<std::size_t>(k)] + row_rng.normal();
    data.rows.push_back(std::move(x));
    data.labels.push_back(y);
  }
  standardize_features(data);
  return data;
}

namespace {

// Shards one class's row indices: equal shares, remainder dealt round-robin.
std::vector<std::vector<std::size_t>> shard_indices(std::vector<std::size_t> idx, int n,
                                                    Rng& rng) {
  for (std::size_t i = idx.size(); i > 1; --i) {
    const std::size_t j = rng.below(i);
    std::swap(idx[i - 1], idx[j]);
  }
  std::vector<std::vector<std::size_t>> shards(static_cast<std::size_t>(n));
  const std::size_t base = idx.size() / static_cast<std::size_t>(n);
  std::size_t pos = 0;
  for (auto& shard : shards)
    for (std::size_t k = 0; k < base; ++k) shard.push_back(idx[pos++]);
  for (int client = 0; pos < idx.size(); ++pos, ++client)
    shards[static_cast<std::size_t>(client)].push_back(idx[pos]);
  return shards;
}

struct NpOracles {
  std::shared_ptr<const LabeledDataset> data;
  std::vector<std::size_t> rows;  // this client's rows for one class
  int label = 0;

  double value(const ModelVector& w) const {
    double s = 0.0;
    for (std::size_t r : rows) s += logistic_loss(w, data->rows[r], label);
    return s / static_cast<double>(rows.size());
  }

  ModelVector grad(const ModelVector& w) const {
    ModelVector g(w.dim());
    for (std::size_t r : rows) g += logistic_grad(w, data->rows[r], label);
    g *= 1.0 / static_cast<double>(rows.size());
    return g;
  }

  ModelVector grad_batch(const ModelVector& w, Rng& rng, int batch) const {
    ModelVector g(w.dim());
    for (int b = 0; b < batch; ++b) {
      const std::size_t r = rows[rng.below(rows.size())];
      g += logistic_grad(w, data->rows[r], label);
    }
    g *= 1.0 / static_cast<double>(batch);
    return g;
  }
};

}  // namespace

FederatedProblem build_np_classification(const LabeledDataset& data, int n,
                                         std::uint64_t partition_seed, Domain domain,
                                         Partition partition, int batch_size) {
  if (n < 1) throw std::invalid_argument("build_np_classification: need n >= 1");
  const std::size_t m0 = data.count_label(0), m1 = data.count_label(1);
  if (m0 == 0 || m1 == 0)
    throw std::invalid_argument("build_np_classification: dataset must contain both classes");
  if (partition == Partition::iid_split &&
      (m0 < static_cast<std::size_t>(n) || m1 < static_cast<std::size_t>(n)))
    throw std::invalid_argument(
        "build_np_classification: a class has fewer rows than clients");

  auto shared = std::make_shared<const LabeledDataset>(data);

  std::vector<std::size_t> class0, class1;
  for (std::size_t i = 0; i < shared->size(); ++i)
    (shared->labels[i] == 0 ? class0 : class1).push_back(i);

  std::vector<std::vector<std::size_t>> shards0, shards1;
  if (partition == Partition::iid_split) {
    Rng r0 = substream(partition_seed, "partition", 0);
    Rng r1 = substream(partition_seed, "partition", 1);
    shards0 = shard_indices(class0, n, r0);
    shards1 = shard_indices(class1, n, r1);
  } else {
    shards0.assign(static_cast<std::size_t>(n), class0);
    shards1.assign(static_cast<std::size_t>(n), class1);
  }

  double max_row_norm = 0.0;
  for (const auto& row : shared->rows) {
    double s = 0.0;
    for (double v : row) s += v * v;
    max_row_norm = std::max(max_row_norm, std::sqrt(s));
  }

  FederatedProblem problem;
  problem.domain = std::move(domain);
  problem.dim = shared->feature_dim();
  for (int j = 0; j < n; ++j) {
    NpOracles obj{shared, shards0[static_cast<std::size_t>(j)], 0};
    NpOracles con{shared, shards1[static_cast<std::size_t>(j)], 1};

    ClientProblem c;
    c.client_id = j;
    c.lipschitz_G = max_row_norm;
    c.objective_value = [obj](const ModelVector& w) { return obj.value(w); };
    c.constraint_value = [con](const ModelVector& w) { return con.value(w); };
    c.objective_subgrad = [obj](const ModelVector& w) { return obj.grad(w); };
    c.constraint_subgrad = [con](const ModelVector& w) { return con.grad(w); };
    if (batch_size > 0) {
      c.objective_subgrad_batch = [obj, batch_size](const ModelVector& w, Rng& rng) {
        return obj.grad_batch(w, rng, batch_size);
      };
      c.constraint_subgrad_batch = [con, batch_size](const ModelVector& w, Rng& rng) {
        return con.grad_batch(w, rng, batch_size);
      };
    }
    problem.clients.push_back(std::move(c));
  }
  return problem;
}

FederatedProblem build_synthetic_linear_ball(int d, const ModelVector& direction,
                                             double radius_constraint, int n,
                                             double halfwidth,
                                             double perturbation_scale,
                                             std::uint64_t seed) {
  if (d < 1 || direction.dim() != static_cast<std::size_t>(d))
    throw std::invalid_argument("build_synthetic_linear_ball: bad dimension");
  const double cn = norm(direction);
  if (!(cn > 0.0))
    throw std::invalid_argument("build_synthetic_linear_ball: degenerate direction");
  if (!(radius_constraint > 0.0 && radius_constraint < halfwidth))
    throw std::invalid_argument(
        "build_synthetic_linear_ball: need 0 < r < box half-width");
  if (n < 1) throw std::invalid_argument("build_synthetic_linear_ball: need n >= 1");

  // Perturbations come in exactly canceling pairs so the client mean of the
  // linear coefficients is the requested direction.
  std::vector<ModelVector> coeffs;
  coeffs.reserve(static_cast<std::size_t>(n));
  Rng rng = substream(seed, "perturb");
  for (int j = 0; j + 1 < n; j += 2) {
    ModelVector p(static_cast<std::size_t>(d));
    for (std::size_t i = 0; i < p.dim(); ++i) p[i] = perturbation_scale * rng.normal();
    coeffs.push_back(direction + p);
    coeffs.push_back(direction - p);
  }
  if (coeffs.size() < static_cast<std::size_t>(n)) coeffs.push_back(direction);

  const double r2 = radius_constraint * radius_constraint;
  double g_lip = 0.0;
  for (const auto& c : coeffs) g_lip = std::max(g_lip, norm(c));
  g_lip = std::max(g_lip, 2.0 * halfwidth * std::sqrt(static_cast<double>(d)));

  FederatedProblem problem;
  problem.dim = static_cast<std::size_t>(d);
  ModelVector lo(static_cast<std::size_t>(d)), hi(static_cast<std::size_t>(d));
  for (std::size_t i = 0; i < lo.dim(); ++i) {
    lo[i] = -halfwidth;
    hi[i] = halfwidth;
  }
  problem.domain = Domain::box(std::move(lo), std::move(hi));

  for (int j = 0; j < n; ++j) {
    ModelVector cj = coeffs[static_cast<std::size_t>(j)];
    ClientProblem c;
    c.client_id = j;
    c.lipschitz_G = g_lip;
    c.objective_value = [cj](const ModelVector& w) { return dot(cj, w); };
    c.objective_subgrad = [cj](const ModelVector&) { return cj; };
    c.constraint_value = [r2](const ModelVector& w) { return squared_norm(w) - r2; };
    c.constraint_subgrad = [](const ModelVector& w) {
      ModelVector g = w;
      g *= 2.0;
      return g;
    };
    problem.clients.push_back(std::move(c));
  }

  ModelVector w_star = direction;
  w_star *= -radius_constraint / cn;
  problem.optimum_hint = OptimumHint{std::move(w_star), -radius_constraint * cn,
                                     "analytic-kkt"};
  return problem;
}

double estimate_sigma(const FederatedProblem& problem, const ModelVector& w) {
  const int n = problem.n();
  if (n <= 1) return 0.0;
  std::vector<double> vals;
  vals.reserve(static_cast<std::size_t>(n));
  for (const auto& c : problem.clients) vals.push_back(c.constraint_value(w));
  const double mean = std::accumulate(vals.begin(), vals.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : vals) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / (n - 1));
}

}  // namespace fedswitch
