// SPDX-License-Identifier: Apache-2.0
//
// Closed-form lower bound on the total antenna count required for the
// estimation pipeline to have enough pencil aperture, together with an
// exhaustive-search oracle that finds the smallest feasible panel width.
//
// The bound treats the window sizes L (horizontal) and R (vertical) as real
// numbers and asks how small the panel can be while every pencil feasibility
// inequality still admits a solution.  Two requirement functions drive it:
// one derived from the time-axis pencil (bound_f1) and one from the
// angle-axis pencil (bound_f2).  The reported bound is the larger of the two
// components, each scaled by the vertical panel size.

#pragma once

#include <optional>
#include <string>
#include <vector>

namespace mdmp {

// Inputs for the antenna lower bound: vertical panel size, number of time
// samples, time-axis window, and path count.
struct BoundInputs {
  int n_v = 0;  // vertical antenna count
  int n_s = 0;  // time sample count
  int q = 0;    // time-axis pencil window
  int p = 0;    // path count

  // Throws ConstraintViolationError when the combination cannot support any
  // pencil (needs n_v >= 2, n_s >= 2, 2 <= q <= n_s, p >= 1).
  void validate() const;
};

// One evaluated candidate window pair with its requirement value.  `note`
// records clamping or the reason a candidate was skipped; skipped candidates
// carry used == false and NaN fields.
struct BoundCandidate {
  std::string label;
  double l = 0.0;
  double r = 0.0;
  double value = 0.0;
  bool used = true;
  std::string note;
};

// Full evaluation record: the two bound components, their maximum, the
// candidate list behind the time-derived component, and free-form notes
// about clamping, skipped candidates, and which angle regimes applied.
struct BoundReport {
  double f1 = 0.0;
  double f2 = 0.0;
  double bound = 0.0;  // always max(f1, f2)
  std::vector<BoundCandidate> extreme_points;
  std::vector<std::string> notes;
};

// Smallest admissible product of the two antenna-axis windows:
// max(P/(Q-1), 4).  Any feasible configuration needs L*R at least this big.
double min_window_product(const BoundInputs &inputs);

// Time-axis oversampling load: max(Q/(N_s-Q+1), 1).  Grows as the window Q
// eats into the number of column shifts the time axis can supply.
double temporal_load(const BoundInputs &inputs);

// Requirement on the horizontal panel width implied by the time-axis pencil:
//   temporal_load/(N_v - R + 1) + L - 1
// Domain: L >= 2, 2 <= R <= N_v, L*R >= min_window_product.  Violations throw
// ConstraintViolationError naming the failed inequality.
double bound_f1(double l, double r, const BoundInputs &inputs);

// Requirement on the horizontal panel width implied by the angle-axis pencil:
//   P/((N_s-Q+1)(N_v - R + 1)) + P/((R-1)Q) - 1
// Domain: 2 <= R <= N_v.  (The companion window-product constraint binds the
// pencil configuration, not this function's argument.)  Violations throw
// ConstraintViolationError naming the failed inequality.
double bound_f2(double r, const BoundInputs &inputs);

// Largest value of bound_f2 over its stationary candidates and, when the
// time window is small enough (2Q < N_s + 1), the R = N_v endpoint.  The
// candidate radii are clamped into [2, N_v] before evaluation.
double bound_f2_max(const BoundInputs &inputs);

// Evaluates both bound components and returns the full report.
//
// The time-derived component is the maximum of bound_f1 over five candidate
// window pairs lying on the curve L*R == min_window_product (two stationary
// points of the constrained requirement plus three corners); candidates are
// clamped along that curve into the admissible R interval, and the
// difference-form stationary point is skipped when the window-product floor
// equals the temporal load (its formula degenerates).  The angle-derived
// component evaluates every R regime whose interval is non-empty and takes
// the largest value; overlapping regimes are noted, not resolved.
BoundReport lower_bound_nt(const BoundInputs &inputs);

// Exhaustive-search oracle: the smallest integer horizontal panel width n_h
// (searching 1..n_h_max) for which some integer window pair (L, R) satisfies
// every feasibility inequality:
//   L*R >= min_window_product,   L*Q >= max(P/(R-1), 4),
//   R*Q*(L-1) >= P,              (N_h-L+1)(N_v-R+1)(N_s-Q+1) >= P,
// with L >= 2 and 2 <= R <= N_v.  Returns nullopt when no width up to
// n_h_max is feasible; infeasibility is a value, not an error.
std::optional<int> smallest_feasible_n_h(const BoundInputs &inputs,
                                         int n_h_max);

}  // namespace mdmp
