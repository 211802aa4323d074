// Copyright 2026 The spikelasso Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Active-set Lasso over the convolutional dictionary.
//
// All three drivers grow J one worst KKT violator at a time and re-solve a
// small dense Lasso after each insertion. They differ in what is re-solved
// and where violators are searched:
//   naive    - all of J is re-solved; violators searched over the whole signal
//   group    - only the overlap group containing the new coordinate is
//              re-solved; violators searched over the whole signal
//   windowed - as group, but violators are searched in a sliding window of
//              width w > t, followed by one full-signal certification pass

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spikelasso/dictionary.hpp"
#include "spikelasso/lasso.hpp"
#include "spikelasso/types.hpp"

namespace spikelasso {

enum class Solver { fista_full, as_naive, as_group, as_window };

const char* solver_name(Solver solver);
Solver parse_solver(const std::string& name);

struct SolverSettings {
  Solver mode = Solver::as_window;
  /// lambda, FISTA tolerance, and the iteration cap of fista_full.
  LassoConfig lasso;
  int sub_max_iter = 1000;
  /// Slack on the stopping test |H_j^T r| < lambda + kkt_tol. Negative selects 1e-6 * lambda.
  double kkt_tol = -1.0;
  /// Sliding window width in samples. 0 selects 10 * t.
  Index window = 0;
  /// Cap on active-set insertions. 0 selects k * n.
  std::int64_t max_iterations = 0;
  Deadline deadline;

  double resolved_kkt_tol() const { return kkt_tol < 0.0 ? 1e-6 * lasso.lambda : kkt_tol; }
  Index resolved_window(int t) const { return window > 0 ? window : static_cast<Index>(10) * t; }
};

/// Coordinates of J whose onsets are chained by gaps <= t. Distinct groups
/// are separated by more than t samples, so their columns never overlap.
struct OverlapGroup {
  /// Ids into the state's active list, ordered by (sample, neuron).
  std::vector<std::size_t> members;
  Index span_min = 0;
  Index span_max = 0;
};

struct Violation {
  Coordinate at;
  double value = 0.0;  // |H_j^T r|
};

/// Largest |corr| over the map's coordinates not excluded, if it reaches
/// `threshold`. Ties resolve to the smallest sample, then the smallest neuron.
template <class Excluded>
std::optional<Violation> find_max_violation(const CorrelationMap& corr, Excluded&& excluded,
                                            double threshold) {
  std::optional<Violation> best;
  const SampleRange w = corr.window();
  for (Index j = w.begin; j < w.end; ++j) {
    for (int r = 0; r < corr.neurons(); ++r) {
      const double g = std::abs(corr.at(r, j));
      if (g < threshold || (best && g <= best->value)) continue;
      if (excluded(Coordinate{r, j})) continue;
      best = Violation{{r, j}, g};
    }
  }
  return best;
}

/// Working memory of one active-set solve: J, its coefficients, the overlap
/// groups partitioning J, and the residual y - Ha kept up to date
/// incrementally.
class ActiveSetState {
 public:
  ActiveSetState(const ShapeBank& shapes, const MultiSignal& y);

  const ShapeBank& shapes() const { return *shapes_; }
  const MultiSignal& signal() const { return *y_; }
  const MultiSignal& residual() const { return residual_; }
  const std::vector<OverlapGroup>& groups() const { return groups_; }

  std::size_t active_count() const { return active_.size(); }
  bool contains(Coordinate c) const {
    return in_active_[static_cast<std::size_t>(c.neuron) * n_ + c.sample] != 0;
  }
  Coordinate coordinate(std::size_t id) const { return active_[id].at; }
  double coefficient(std::size_t id) const { return active_[id].coeff; }

  /// Worst violator in `window` outside J; none when every value is below
  /// `threshold`. Adds the number of correlated coordinates to `work`.
  std::optional<Violation> max_violation(SampleRange window, double threshold,
                                         std::int64_t* work = nullptr) const;

  /// Adds c to J and merges every group within t samples of it. Returns the
  /// index of the resulting group. Throws on a duplicate coordinate.
  std::size_t insert_and_merge(Coordinate c);

  /// Re-solves the coordinates of one group, warm-started, and updates the
  /// residual. Returns the subproblem dimension.
  SubproblemResult solve_group(std::size_t group_index, const LassoConfig& cfg);

  /// Re-solves all of J as one subproblem (the unaccelerated algorithm).
  SubproblemResult solve_all(const LassoConfig& cfg);

  struct Scan {
    /// max |corr| over coordinates with zero coefficient (inside or outside J)
    double max_zero_correlation = 0.0;
    /// smallest sample of a coordinate outside J reaching the threshold, or -1
    Index earliest_violation = -1;
  };
  Scan full_scan(double threshold, std::int64_t* work = nullptr) const;

  /// Coefficients above the amplitude floor.
  ActivationSet solution() const;

  /// max |residual - (y - Ha)| against a fresh recomputation.
  double residual_drift() const;

  double objective(double lambda) const;

 private:
  struct ActiveCoordinate {
    Coordinate at;
    double coeff = 0.0;
    double y_corr = 0.0;  // H_j^T y
  };

  void apply_coefficients(const std::vector<std::size_t>& ids, const Eigen::VectorXd& values);

  const ShapeBank* shapes_;
  const MultiSignal* y_;
  Index n_;
  MultiSignal residual_;
  std::vector<ActiveCoordinate> active_;
  std::vector<char> in_active_;
  std::vector<OverlapGroup> groups_;  // ordered by span
  // Gram of all of J in insertion order; grown lazily by solve_all.
  Eigen::MatrixXd full_gram_;
};

inline std::optional<Violation> kkt_max_violation(const ActiveSetState& state, SampleRange window,
                                                  double lambda, double kkt_tol) {
  return state.max_violation(window, lambda + kkt_tol);
}

inline const OverlapGroup& insert_and_merge(ActiveSetState& state, Coordinate c) {
  return state.groups()[state.insert_and_merge(c)];
}

SolveResult naive_active_set(const ShapeBank& shapes, const MultiSignal& y, const SolverSettings& settings);
SolveResult group_active_set(const ShapeBank& shapes, const MultiSignal& y, const SolverSettings& settings);
SolveResult windowed_active_set(const ShapeBank& shapes, const MultiSignal& y,
                                const SolverSettings& settings);

/// Dispatches on settings.mode, including fista_full.
SolveResult solve(const ShapeBank& shapes, const MultiSignal& y, const SolverSettings& settings);

}  // namespace spikelasso
