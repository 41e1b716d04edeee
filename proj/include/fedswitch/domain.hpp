#pragma once

#include "fedswitch/vector.hpp"

namespace fedswitch {

/// Feasible set for the server-side projection step. Box and ball keep the
/// projection closed-form; unbounded is allowed for runs that exercise the
/// projection-free setting.
class Domain {
 public:
  enum class Kind { unbounded, box, ball };

  static Domain unbounded() { return Domain(Kind::unbounded); }
  static Domain box(ModelVector lower, ModelVector upper);
  static Domain ball(ModelVector center, double radius);

  Kind kind() const { return kind_; }
  const ModelVector& lower() const { return lower_; }
  const ModelVector& upper() const { return upper_; }
  const ModelVector& center() const { return center_; }
  double radius() const { return radius_; }

  bool is_bounded() const { return kind_ != Kind::unbounded; }

  /// Membership test. Ball membership compares squared radii exactly, so any
  /// vector returned by project() tests as contained.
  bool contains(const ModelVector& v) const;

 private:
  explicit Domain(Kind k) : kind_(k) {}

  Kind kind_;
  ModelVector lower_, upper_;   // box
  ModelVector center_;          // ball
  double radius_ = 0.0;         // ball
};

/// Euclidean projection onto the domain. Idempotent: points already inside
/// are returned unchanged bit-for-bit, and projected points land strictly
/// inside the membership test.
ModelVector project(const ModelVector& x, const Domain& dom);

/// Euclidean diameter of a bounded domain. Throws for unbounded domains.
double diameter(const Domain& dom);

}  // namespace fedswitch
