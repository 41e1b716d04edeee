#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace fedswitch {

/// Dense model vector: the decision variable and everything shaped like it
/// (subgradients, client deltas, error-feedback residuals, messages).
///
/// Entries must stay finite; construction from raw data validates this, and
/// the engine re-checks iterates wherever divergence could occur. All
/// reductions run in ascending index order so results are reproducible
/// regardless of how callers parallelize.
class ModelVector {
 public:
  ModelVector() = default;

  explicit ModelVector(std::size_t dim) : entries_(dim, 0.0) {}

  explicit ModelVector(std::vector<double> entries) : entries_(std::move(entries)) {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      if (!std::isfinite(entries_[i])) {
        throw std::invalid_argument("ModelVector: non-finite entry at index " +
                                    std::to_string(i));
      }
    }
  }

  static ModelVector zeros(std::size_t dim) { return ModelVector(dim); }

  std::size_t dim() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  double operator[](std::size_t i) const { return entries_[i]; }
  double& operator[](std::size_t i) { return entries_[i]; }

  const std::vector<double>& entries() const { return entries_; }

  bool is_finite() const {
    for (double v : entries_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  ModelVector& operator+=(const ModelVector& o) {
    check_dim(o);
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += o.entries_[i];
    return *this;
  }

  ModelVector& operator-=(const ModelVector& o) {
    check_dim(o);
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= o.entries_[i];
    return *this;
  }

  ModelVector& operator*=(double s) {
    for (double& v : entries_) v *= s;
    return *this;
  }

  /// this += a * x
  ModelVector& axpy(double a, const ModelVector& x) {
    check_dim(x);
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += a * x.entries_[i];
    return *this;
  }

  friend ModelVector operator+(ModelVector a, const ModelVector& b) { return a += b; }
  friend ModelVector operator-(ModelVector a, const ModelVector& b) { return a -= b; }
  friend ModelVector operator*(double s, ModelVector a) { return a *= s; }

  friend bool operator==(const ModelVector& a, const ModelVector& b) {
    return a.entries_ == b.entries_;
  }

 private:
  void check_dim(const ModelVector& o) const {
    if (entries_.size() != o.entries_.size()) {
      throw std::invalid_argument("ModelVector: dimension mismatch (" +
                                  std::to_string(entries_.size()) + " vs " +
                                  std::to_string(o.entries_.size()) + ")");
    }
  }

  std::vector<double> entries_;
};

double dot(const ModelVector& a, const ModelVector& b);
double squared_norm(const ModelVector& v);
double norm(const ModelVector& v);
double distance(const ModelVector& a, const ModelVector& b);

}  // namespace fedswitch
