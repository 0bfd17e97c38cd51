// SPDX-License-Identifier: Apache-2.0

#include "mdmp/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mdmp/errors.hpp"

namespace mdmp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// Relative slack on the window-product inequality so that candidates computed
// as l = product/r never fail their own constraint through rounding.
constexpr double kProductSlack = 1e-12;

std::string fmt(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

double clamp(double x, double lo, double hi) {
  return std::min(std::max(x, lo), hi);
}

}  // namespace

void BoundInputs::validate() const {
  if (n_v < 2) {
    throw ConstraintViolationError("N_v >= 2 violated: N_v = " +
                                   std::to_string(n_v));
  }
  if (n_s < 2) {
    throw ConstraintViolationError("N_s >= 2 violated: N_s = " +
                                   std::to_string(n_s));
  }
  if (q < 2) {
    throw ConstraintViolationError("Q >= 2 violated: Q = " +
                                   std::to_string(q));
  }
  if (q > n_s) {
    throw ConstraintViolationError("Q <= N_s violated: Q = " +
                                   std::to_string(q) +
                                   ", N_s = " + std::to_string(n_s));
  }
  if (p < 1) {
    throw ConstraintViolationError("P >= 1 violated: P = " +
                                   std::to_string(p));
  }
}

double min_window_product(const BoundInputs &inputs) {
  inputs.validate();
  return std::max(static_cast<double>(inputs.p) / (inputs.q - 1.0), 4.0);
}

double temporal_load(const BoundInputs &inputs) {
  inputs.validate();
  return std::max(
      static_cast<double>(inputs.q) / (inputs.n_s - inputs.q + 1.0), 1.0);
}

double bound_f1(double l, double r, const BoundInputs &inputs) {
  inputs.validate();
  if (!std::isfinite(l) || !std::isfinite(r)) {
    throw NonFiniteError("window sizes must be finite: L = " + fmt(l) +
                         ", R = " + fmt(r));
  }
  if (l < 2.0) {
    throw ConstraintViolationError("L >= 2 violated: L = " + fmt(l));
  }
  if (r < 2.0) {
    throw ConstraintViolationError("R >= 2 violated: R = " + fmt(r));
  }
  if (r > static_cast<double>(inputs.n_v)) {
    throw ConstraintViolationError("R <= N_v violated: R = " + fmt(r) +
                                   ", N_v = " + std::to_string(inputs.n_v));
  }
  const double product_floor = min_window_product(inputs);
  if (l * r < product_floor * (1.0 - kProductSlack)) {
    throw ConstraintViolationError(
        "L*R >= max(P/(Q-1), 4) violated: L*R = " + fmt(l * r) +
        ", required " + fmt(product_floor));
  }
  return temporal_load(inputs) / (inputs.n_v - r + 1.0) + l - 1.0;
}

double bound_f2(double r, const BoundInputs &inputs) {
  inputs.validate();
  if (!std::isfinite(r)) {
    throw NonFiniteError("window size must be finite: R = " + fmt(r));
  }
  if (r < 2.0) {
    throw ConstraintViolationError("R >= 2 violated: R = " + fmt(r));
  }
  if (r > static_cast<double>(inputs.n_v)) {
    throw ConstraintViolationError("R <= N_v violated: R = " + fmt(r) +
                                   ", N_v = " + std::to_string(inputs.n_v));
  }
  const double p = inputs.p;
  const double shifts = inputs.n_s - inputs.q + 1.0;
  return p / (shifts * (inputs.n_v - r + 1.0)) + p / ((r - 1.0) * inputs.q) -
         1.0;
}

double bound_f2_max(const BoundInputs &inputs) {
  inputs.validate();
  const double lo = 2.0;
  const double hi = inputs.n_v;
  std::vector<double> candidates;
  if (2 * inputs.q == inputs.n_s + 1) {
    // The difference-form stationary radius degenerates exactly here; the
    // midpoint of the admissible interval takes its place.
    candidates.push_back(clamp((inputs.n_v + 1.0) / 2.0, lo, hi));
  } else {
    const double root_shifts = std::sqrt(inputs.n_s - inputs.q + 1.0);
    const double root_q = std::sqrt(static_cast<double>(inputs.q));
    candidates.push_back(clamp(
        root_shifts * (inputs.n_v + 1.0) / (root_shifts + root_q), lo, hi));
    candidates.push_back(clamp(
        root_shifts * (inputs.n_v + 1.0) / (root_shifts - root_q), lo, hi));
    if (2 * inputs.q < inputs.n_s + 1) {
      candidates.push_back(hi);
    }
  }
  double best = -std::numeric_limits<double>::infinity();
  for (double r : candidates) {
    best = std::max(best, bound_f2(r, inputs));
  }
  return best;
}

BoundReport lower_bound_nt(const BoundInputs &inputs) {
  inputs.validate();
  BoundReport report;
  const double n_v = inputs.n_v;
  const double product_floor = min_window_product(inputs);
  const double load = temporal_load(inputs);

  // --- Time-derived component: maximum of bound_f1 over candidates on the
  // curve l*r == product_floor.  Clamping r along the curve keeps every
  // candidate inside the constraint set, so bound_f1 never throws here.
  const double r_lo = 2.0;
  const double r_hi = std::min(n_v, product_floor / 2.0);
  const double root_load = std::sqrt(load);
  const double root_product = std::sqrt(product_floor);

  struct RawCandidate {
    const char *label;
    double r;
    bool skip;
    const char *skip_reason;
  };
  std::vector<RawCandidate> raw;
  raw.push_back({"stationary sum",
                 root_product * (n_v + 1.0) / (root_load + root_product),
                 false, ""});
  if (std::abs(root_product - root_load) < 1e-12 * root_product) {
    raw.push_back({"stationary difference", kNaN, true,
                   "skipped: window-product floor equals the temporal load, "
                   "so the difference-form stationary point is undefined"});
  } else {
    raw.push_back({"stationary difference",
                   root_product * (n_v + 1.0) / (root_product - root_load),
                   false, ""});
  }
  raw.push_back({"corner r = product/2", product_floor / 2.0, false, ""});
  raw.push_back({"corner r = 2", 2.0, false, ""});
  raw.push_back({"corner r = n_v", n_v, false, ""});

  double best_f1 = -std::numeric_limits<double>::infinity();
  for (const RawCandidate &rc : raw) {
    BoundCandidate cand;
    cand.label = rc.label;
    if (rc.skip) {
      cand.used = false;
      cand.l = cand.r = cand.value = kNaN;
      cand.note = rc.skip_reason;
    } else {
      cand.r = clamp(rc.r, r_lo, r_hi);
      cand.l = std::max(product_floor / cand.r, 2.0);
      cand.value = bound_f1(cand.l, cand.r, inputs);
      if (cand.r != rc.r) {
        cand.note = "clamped from r = " + fmt(rc.r);
      }
      best_f1 = std::max(best_f1, cand.value);
    }
    report.extreme_points.push_back(std::move(cand));
  }
  report.f1 = n_v * best_f1;

  // --- Angle-derived component: evaluate every R regime whose interval is
  // non-empty within [2, N_v] and keep the largest value.
  const double p = inputs.p;
  const double n_s = inputs.n_s;
  const double q = inputs.q;
  const double shifts = n_s - q + 1.0;

  struct Regime {
    const char *label;
    bool applies;
    double value;
  };
  std::vector<Regime> regimes;
  {
    const double lo1 = std::max(p / 4.0 + 1.0, 2.0);
    const double hi1 = std::min(n_v - p + 1.0, n_v);
    regimes.push_back({"wide separation", lo1 <= hi1,
                       n_v * (1.0 / (n_s - 1.0) + 1.0)});
  }
  {
    const double hi2 = std::min({n_v - p + 1.0, p / 4.0 + 1.0, n_v});
    regimes.push_back({"small r", 2.0 <= hi2,
                       n_v * (1.0 / shifts + p / q - 1.0)});
  }
  {
    const double lo3 = std::max({n_v - p + 1.0, p / 4.0 + 1.0, 2.0});
    regimes.push_back({"large r", lo3 <= n_v,
                       n_v * (p / (n_s - 1.0) + 1.0)});
  }
  {
    const double lo4 = std::max(n_v - p + 1.0, 2.0);
    const bool applies = lo4 < p && lo4 <= n_v;
    regimes.push_back(
        {"interior stationary", applies,
         applies ? n_v * bound_f2_max(inputs) : kNaN});
  }

  // The published stationary radii for the interior regime solve a shifted
  // form of the angle requirement; record the literal requirement's own
  // stationary radii alongside for transparency.
  {
    const double root_shifts = std::sqrt(shifts);
    const double root_q = std::sqrt(q);
    std::string note = "angle requirement stationary radii: r = " +
                       fmt(1.0 + root_shifts * n_v / (root_shifts + root_q));
    if (root_shifts != root_q) {
      note += " and r = " +
              fmt(1.0 + root_shifts * n_v / (root_shifts - root_q));
    }
    report.notes.push_back(std::move(note));
  }

  double best_f2 = -std::numeric_limits<double>::infinity();
  int applied = 0;
  for (const Regime &regime : regimes) {
    if (!regime.applies) {
      continue;
    }
    ++applied;
    best_f2 = std::max(best_f2, regime.value);
    report.notes.push_back(std::string("angle regime applied: ") +
                           regime.label + " -> " + fmt(regime.value));
  }
  if (applied == 0) {
    throw ConstraintViolationError(
        "no admissible R interval for the angle-derived requirement");
  }
  if (applied > 1) {
    report.notes.push_back(
        "angle regimes overlap; the largest applicable value is used");
  }
  report.f2 = best_f2;

  report.bound = std::max(report.f1, report.f2);
  return report;
}

std::optional<int> smallest_feasible_n_h(const BoundInputs &inputs,
                                         int n_h_max) {
  inputs.validate();
  const double p = inputs.p;
  const double product_floor = min_window_product(inputs);
  const double time_shifts = inputs.n_s - inputs.q + 1.0;
  for (int n_h = 1; n_h <= n_h_max; ++n_h) {
    for (int l = 2; l <= n_h; ++l) {
      for (int r = 2; r <= inputs.n_v; ++r) {
        if (static_cast<double>(l) * r < product_floor) continue;
        if (static_cast<double>(l) * inputs.q <
            std::max(p / (r - 1.0), 4.0)) {
          continue;
        }
        if (static_cast<double>(r) * inputs.q * (l - 1) < p) continue;
        if (static_cast<double>(n_h - l + 1) * (inputs.n_v - r + 1) *
                time_shifts <
            p) {
          continue;
        }
        return n_h;
      }
    }
  }
  return std::nullopt;
}

}  // namespace mdmp
