#pragma once

#include "fedswitch/vector.hpp"

namespace fedswitch {

/// Round-level rule deciding how much of the constraint subgradient enters
/// each local step. Hard mode is the binary indicator on the estimated
/// constraint value; soft mode blends continuously through a trimmed hinge.
struct SwitchMode {
  enum class Kind { hard, soft };

  Kind kind = Kind::hard;
  double epsilon = 0.0;  // constraint tolerance, >= 0
  double beta = 0.0;     // soft sharpness, > 0

  static SwitchMode hard(double epsilon);
  static SwitchMode soft(double epsilon, double beta);

  bool is_soft() const { return kind == Kind::soft; }
};

/// Trimmed hinge: clamp(1 + beta*x, 0, 1). Zero for x <= -1/beta, one for
/// x >= 0, linear in between.
double sigma_beta(double x, double beta);

/// Weight on the constraint subgradient for this round, given the estimated
/// constraint value g_hat. Hard mode returns exactly 0 or 1, with the tie
/// g_hat == epsilon resolving to the objective step.
double switch_weight(const SwitchMode& mode, double g_hat);

/// Convex combination (1-weight)*grad_f + weight*grad_g. The endpoints
/// return the corresponding input bit-for-bit.
ModelVector blended_subgrad(double weight, const ModelVector& grad_f,
                            const ModelVector& grad_g);

}  // namespace fedswitch
