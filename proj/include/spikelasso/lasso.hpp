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

// Lasso solvers: matrix-free FISTA over the whole signal, and FISTA on the
// small dense quadratic problems an active set produces.

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spikelasso/types.hpp"

namespace spikelasso {

/// Coefficients with |a| at or below this are treated as zero in returned
/// solutions and support comparisons.
inline constexpr double kAmplitudeFloor = 1e-10;

using Deadline = std::optional<std::chrono::steady_clock::time_point>;

struct LassoConfig {
  double lambda = 0.0;
  double fista_tol = 1e-10;  // relative objective decrease over 10 iterations
  int max_iter = 10000;

  void validate() const;
};

/// min_x 1/2 x^T G x - b^T x + lambda ||x||_1 over the coordinates `columns`.
/// Equals the Lasso restricted to those columns up to the constant 1/2 ||y||^2.
struct QuadraticSubproblem {
  Eigen::MatrixXd gram;
  Eigen::VectorXd linear;
  std::vector<Coordinate> columns;
};

/// Counters and certificate shared by every solver.
struct SolveReport {
  std::string solver;
  double lambda = 0.0;
  double kkt_tol = 0.0;
  bool certified = false;
  bool timed_out = false;
  bool iteration_cap_hit = false;
  /// max |H_j^T (y - Ha)| over coordinates with a_j = 0.
  double max_zero_correlation = 0.0;
  double objective = 0.0;
  std::int64_t iterations = 0;
  std::int64_t subproblems = 0;
  std::int64_t subproblem_iterations = 0;
  std::int64_t max_subproblem_size = 0;
  std::int64_t window_extensions = 0;
  std::int64_t window_advances = 0;
  std::int64_t certification_failures = 0;
  /// Total (sample, neuron) pairs whose correlation was evaluated.
  std::int64_t correlated_coordinates = 0;
  std::int64_t support_size = 0;
  double seconds = 0.0;
  /// FISTA only: objective at every 10-iteration checkpoint.
  std::vector<double> objective_checkpoints;
};

struct SolveResult {
  ActivationSet solution;
  SolveReport report;
};

struct SubproblemResult {
  Eigen::VectorXd x;
  int iterations = 0;
  bool converged = false;
  /// True when the final sign-pattern solve certified exact optimality.
  bool exact = false;
  double objective = 0.0;
  std::vector<double> objective_checkpoints;
};

/// sign(v) * max(|v| - tau, 0)
double soft_threshold(double v, double tau);

double subproblem_objective(const QuadraticSubproblem& sub, const Eigen::VectorXd& x, double lambda);

/// Largest-eigenvalue bound for a small symmetric PSD matrix, same recipe as
/// lipschitz_bound.
double spectral_bound(const Eigen::MatrixXd& gram);

/// Attempts the exact Lasso solution with the sign pattern of `x`:
/// solves G_SS z = b_S - lambda s, prunes sign flips, and accepts only when
/// the zero coordinates satisfy |b - Gz| <= lambda (1 + 1e-9).
std::optional<Eigen::VectorXd> polish_sign_pattern(const QuadraticSubproblem& sub, double lambda,
                                                   const Eigen::VectorXd& x);

SubproblemResult fista_sub(const QuadraticSubproblem& sub, const LassoConfig& cfg,
                           const Eigen::VectorXd& warm_start);

/// 1/2 ||y - Ha||^2 + lambda ||a||_1
double lasso_objective(const ShapeBank& shapes, const MultiSignal& y, const ActivationSet& a,
                       double lambda);

struct KktCertificate {
  double max_zero_correlation = 0.0;
  bool certified = false;
  /// Smallest sample holding a violation above lambda + kkt_tol, or -1.
  Index earliest_violation = -1;
};

/// Checks the optimality condition on every coordinate where a is zero.
KktCertificate certify(const ShapeBank& shapes, const MultiSignal& y, const ActivationSet& a,
                       double lambda, double kkt_tol);

/// Full-signal FISTA over all k*n coordinates, step 1/lipschitz_bound, with
/// function-value restart, followed by a sign-pattern polish and a KKT check.
SolveResult fista_full(const ShapeBank& shapes, const MultiSignal& y, const LassoConfig& cfg,
                       double kkt_tol, Deadline deadline = std::nullopt);

}  // namespace spikelasso
