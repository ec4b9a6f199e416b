#pragma once

// Design-goal search over (shift, channel) candidates: solve each gain,
// predict its eigencycles, correlate all candidates and pick the least
// correlated pair of distinct treatments.

#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gdc/controller.hpp"
#include "gdc/eigen.hpp"
#include "gdc/error.hpp"
#include "gdc/stats.hpp"

namespace gdc {

struct SweepGrid {
  std::vector<double> shifts;
  std::vector<int> channels;  // zero-based

  /// Shifts {-0.2, -0.1, 0, 0.1, 0.2} on every channel.
  static SweepGrid Default(int n) {
    SweepGrid g;
    g.shifts = {-0.2, -0.1, 0.0, 0.1, 0.2};
    for (int m = 0; m < n; ++m) g.channels.push_back(m);
    return g;
  }
};

struct SweepCandidate {
  double shift = 0.0;
  int channel = 0;  // zero-based
  bool feasible = false;
  std::string failure;
  Eigen::VectorXd gain;
  EigencycleSet cycles;  // normalized
};

struct TreatmentPair {
  std::size_t first = 0;
  std::size_t second = 0;
  double corr = 0.0;
};

struct SweepResult {
  std::vector<SweepCandidate> candidates;  // shift outer, channel inner
  Eigen::MatrixXd corr;
  std::optional<TreatmentPair> selected;

  std::optional<std::size_t> find(double shift, int channel) const {
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (candidates[i].channel == channel && std::abs(candidates[i].shift - shift) < 1e-12) {
        return i;
      }
    }
    return std::nullopt;
  }
};

inline void validate(const SweepGrid& grid, int n) {
  if (grid.shifts.empty() || grid.channels.empty()) {
    throw ValidationError("sweep grid must have at least one shift and one channel");
  }
  std::set<double> seen;
  for (double b : grid.shifts) {
    if (!std::isfinite(b)) throw ValidationError("sweep shifts must be finite");
    if (!seen.insert(b).second) throw ValidationError("sweep shifts must be distinct");
  }
  for (int m : grid.channels) {
    if (m < 0 || m >= n) throw ValidationError("sweep channel out of range");
  }
}

namespace internal {
inline bool selectable(const SweepCandidate& c) { return c.feasible && c.shift != 0.0; }
}  // namespace internal

/// Pair of selectable candidates (feasible, nonzero shift) with the smallest
/// |corr|. Ties keep the lexicographically first pair.
inline TreatmentPair select_treatments(const SweepResult& sr) {
  std::optional<TreatmentPair> best;
  const std::size_t count = sr.candidates.size();
  for (std::size_t i = 0; i < count; ++i) {
    if (!internal::selectable(sr.candidates[i])) continue;
    for (std::size_t j = i + 1; j < count; ++j) {
      if (!internal::selectable(sr.candidates[j])) continue;
      const double c = sr.corr(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (std::isnan(c)) continue;
      if (!best || std::abs(c) < std::abs(best->corr)) best = TreatmentPair{i, j, c};
    }
  }
  if (!best) {
    throw ValidationError("need at least two feasible candidates with nonzero shift");
  }
  return *best;
}

inline SweepResult run_sweep(const Eigen::MatrixXd& jac, const EigenSystem& es,
                             const SimplexPoint& x_star, const SweepGrid& grid) {
  const int n = static_cast<int>(jac.rows());
  validate(grid, n);
  SweepResult sr;
  for (double b : grid.shifts) {
    for (int m : grid.channels) {
      SweepCandidate cand;
      cand.shift = b;
      cand.channel = m;
      try {
        const ControllerSpec spec = solve_gain(jac, es, ChannelVector(m, n), b, x_star);
        cand.gain = spec.gain;
        const EigenSystem closed = eigen_decompose(spec.controlled);
        cand.cycles = eigencycles(select_oscillatory_pair(closed).eta, true);
        cand.feasible = true;
      } catch (const InfeasibleError& e) {
        cand.failure = e.what();
      } catch (const NumericalError& e) {
        cand.failure = e.what();
      }
      sr.candidates.push_back(std::move(cand));
    }
  }

  const auto count = static_cast<Eigen::Index>(sr.candidates.size());
  bool any_feasible = false;
  for (const auto& c : sr.candidates) any_feasible = any_feasible || c.feasible;
  if (!any_feasible) throw InfeasibleError("every sweep candidate is infeasible");

  sr.corr = Eigen::MatrixXd::Constant(count, count, std::numeric_limits<double>::quiet_NaN());
  for (Eigen::Index i = 0; i < count; ++i) {
    sr.corr(i, i) = 1.0;
    const auto& ci = sr.candidates[static_cast<std::size_t>(i)];
    if (!ci.feasible) continue;
    for (Eigen::Index j = i + 1; j < count; ++j) {
      const auto& cj = sr.candidates[static_cast<std::size_t>(j)];
      if (!cj.feasible) continue;
      double r = std::numeric_limits<double>::quiet_NaN();
      try {
        r = pearson(ci.cycles.values, cj.cycles.values);
      } catch (const ValidationError&) {
        // zero-variance eigencycle set; leave NaN
      }
      sr.corr(i, j) = r;
      sr.corr(j, i) = r;
    }
  }

  int selectable = 0;
  for (const auto& c : sr.candidates) selectable += internal::selectable(c) ? 1 : 0;
  if (selectable >= 2) {
    try {
      sr.selected = select_treatments(sr);
    } catch (const ValidationError&) {
      sr.selected.reset();
    }
  }
  return sr;
}

}  // namespace gdc
