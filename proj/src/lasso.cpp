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

#include "spikelasso/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "spikelasso/dictionary.hpp"
#include "spikelasso/simd/kernels.hpp"

namespace spikelasso {
namespace {

constexpr int kCheckpointEvery = 10;
constexpr int kPolishRetryEvery = 100;
constexpr double kStepGrowth = 1.5;
constexpr double kPolishSlack = 1e-9;

using Clock = std::chrono::steady_clock;

bool past(const Deadline& deadline) { return deadline && Clock::now() >= *deadline; }

bool converged_over_window(double previous, double current, double tol) {
  const double scale = std::max(std::abs(current), std::numeric_limits<double>::min());
  return previous - current <= tol * scale;
}

double squared_distance(const MultiSignal& a, const MultiSignal& b) {
  const auto x = a.data();
  const auto y = b.data();
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = x[i] - y[i];
    s += e * e;
  }
  return s;
}

double l1(std::span<const double> v) {
  double s = 0.0;
  for (double e : v) s += std::abs(e);
  return s;
}

QuadraticSubproblem build_subproblem(const ShapeBank& shapes, const MultiSignal& y,
                                     std::vector<Coordinate> columns) {
  std::sort(columns.begin(), columns.end());
  const auto m = static_cast<Eigen::Index>(columns.size());
  QuadraticSubproblem sub;
  sub.gram = Eigen::MatrixXd::Zero(m, m);
  sub.linear.resize(m);
  const Index n = y.length();
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& ci = columns[static_cast<std::size_t>(i)];
    sub.linear[i] = column_correlation(shapes, y, ci.neuron, ci.sample);
    for (Eigen::Index j = i; j < m; ++j) {
      const auto& cj = columns[static_cast<std::size_t>(j)];
      if (cj.sample - ci.sample >= shapes.length()) break;
      const double g = gram_entry(shapes, n, ci.neuron, ci.sample, cj.neuron, cj.sample);
      sub.gram(i, j) = g;
      sub.gram(j, i) = g;
    }
  }
  sub.columns = std::move(columns);
  return sub;
}

}  // namespace

void LassoConfig::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InvalidInput("lambda must be positive and finite");
  if (!(fista_tol > 0.0)) throw InvalidInput("fista_tol must be positive");
  if (max_iter < 1) throw InvalidInput("max_iter must be at least 1");
}

double soft_threshold(double v, double tau) {
  return std::copysign(std::max(std::abs(v) - tau, 0.0), v);
}

double subproblem_objective(const QuadraticSubproblem& sub, const Eigen::VectorXd& x, double lambda) {
  return 0.5 * x.dot(sub.gram * x) - sub.linear.dot(x) + lambda * x.lpNorm<1>();
}

double spectral_bound(const Eigen::MatrixXd& gram) {
  const Eigen::Index m = gram.rows();
  if (m == 0) return 0.0;
  std::mt19937_64 rng(0x5eed'1a55'0f00'0002ULL);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  Eigen::VectorXd v(m);
  for (Eigen::Index i = 0; i < m; ++i) v[i] = uniform(rng);
  v.normalize();
  double estimate = 0.0;
  bool converged = false;
  for (int it = 0; it < 100; ++it) {
    Eigen::VectorXd w = gram * v;
    const double next = w.norm();
    if (next == 0.0) break;
    v = w / next;
    if (it > 0 && std::abs(next - estimate) <= 1e-7 * next) {
      estimate = next;
      converged = true;
      break;
    }
    estimate = next;
  }
  const double row_sum = gram.cwiseAbs().rowwise().sum().maxCoeff();
  return std::min(estimate * (converged ? 1.02 : 1.5), row_sum);
}

std::optional<Eigen::VectorXd> polish_sign_pattern(const QuadraticSubproblem& sub, double lambda,
                                                   const Eigen::VectorXd& x) {
  const Eigen::Index m = sub.gram.rows();
  std::vector<Eigen::Index> support;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (std::abs(x[i]) > kAmplitudeFloor) support.push_back(i);
  }
  Eigen::VectorXd z = Eigen::VectorXd::Zero(m);
  while (true) {
    z.setZero();
    const auto s = static_cast<Eigen::Index>(support.size());
    if (s > 0) {
      Eigen::MatrixXd g(s, s);
      Eigen::VectorXd rhs(s);
      for (Eigen::Index a = 0; a < s; ++a) {
        const Eigen::Index ia = support[static_cast<std::size_t>(a)];
        rhs[a] = sub.linear[ia] - lambda * (x[ia] > 0 ? 1.0 : -1.0);
        for (Eigen::Index b = 0; b < s; ++b) g(a, b) = sub.gram(ia, support[static_cast<std::size_t>(b)]);
      }
      const Eigen::LDLT<Eigen::MatrixXd> ldlt(g);
      if (ldlt.info() != Eigen::Success) return std::nullopt;
      const Eigen::VectorXd zs = ldlt.solve(rhs);
      if (!zs.allFinite()) return std::nullopt;
      if ((g * zs - rhs).norm() > 1e-9 * (rhs.norm() + lambda)) return std::nullopt;

      std::vector<Eigen::Index> kept;
      for (Eigen::Index a = 0; a < s; ++a) {
        const Eigen::Index ia = support[static_cast<std::size_t>(a)];
        if (zs[a] * x[ia] > 0.0) kept.push_back(ia);
        z[ia] = zs[a];
      }
      if (kept.size() != support.size()) {
        support = std::move(kept);
        continue;
      }
    }
    break;
  }
  const Eigen::VectorXd gradient = sub.linear - sub.gram * z;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (z[i] == 0.0 && std::abs(gradient[i]) > lambda * (1.0 + kPolishSlack)) return std::nullopt;
  }
  return z;
}

SubproblemResult fista_sub(const QuadraticSubproblem& sub, const LassoConfig& cfg,
                           const Eigen::VectorXd& warm_start) {
  cfg.validate();
  const Eigen::Index m = sub.gram.rows();
  if (sub.gram.cols() != m || sub.linear.size() != m ||
      static_cast<Eigen::Index>(sub.columns.size()) != m) {
    throw InvalidInput("subproblem dimensions are inconsistent");
  }
  if (warm_start.size() != m) throw InvalidInput("warm start length differs from |J|");

  SubproblemResult out;
  if (m == 0) {
    out.x = Eigen::VectorXd();
    out.converged = out.exact = true;
    return out;
  }
  const auto& kernels = simd::active();
  Eigen::VectorXd x = warm_start;
  double f_x = subproblem_objective(sub, x, cfg.lambda);

  // Sign pattern guessed from the warm start plus every violator entering
  // with the sign of its gradient. A verified exact solve skips the
  // iterations, which is the common case when J grew by one coordinate.
  {
    const Eigen::VectorXd gradient = sub.linear - sub.gram * x;
    Eigen::VectorXd pattern = Eigen::VectorXd::Zero(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      if (std::abs(x[i]) > kAmplitudeFloor) {
        pattern[i] = x[i] > 0.0 ? 1.0 : -1.0;
      } else if (std::abs(gradient[i]) > cfg.lambda) {
        pattern[i] = gradient[i] > 0.0 ? 1.0 : -1.0;
      }
    }
    if (auto exact = polish_sign_pattern(sub, cfg.lambda, pattern)) {
      const double f_exact = subproblem_objective(sub, *exact, cfg.lambda);
      if (f_exact <= f_x + 1e-12 * std::max(1.0, std::abs(f_x))) {
        for (Eigen::Index i = 0; i < m; ++i) {
          if (std::abs((*exact)[i]) <= kAmplitudeFloor) (*exact)[i] = 0.0;
        }
        out.objective_checkpoints.push_back(f_x);
        out.x = std::move(*exact);
        out.objective = subproblem_objective(sub, out.x, cfg.lambda);
        out.objective_checkpoints.push_back(out.objective);
        out.converged = out.exact = true;
        return out;
      }
    }
  }

  double lipschitz = spectral_bound(sub.gram);
  if (lipschitz <= 0.0) {
    // G == 0: the optimum is sign(b) * infinity unless |b| <= lambda; only the
    // latter is a well-posed Lasso.
    out.x = Eigen::VectorXd::Zero(m);
    out.objective = 0.0;
    out.converged = true;
    return out;
  }

  Eigen::VectorXd z = x;
  Eigen::VectorXd x_new(m);
  Eigen::VectorXd v(m);
  double f_checkpoint = f_x;
  out.objective_checkpoints.push_back(f_x);
  double momentum = 1.0;
  int consecutive_restarts = 0;

  int it = 0;
  while (it < cfg.max_iter) {
    ++it;
    v = z - (sub.gram * z - sub.linear) / lipschitz;
    kernels.soft_threshold(x_new.data(), v.data(), cfg.lambda / lipschitz, static_cast<std::size_t>(m));
    const double f_new = subproblem_objective(sub, x_new, cfg.lambda);
    if (f_new > f_x) {
      momentum = 1.0;
      z = x;
      if (++consecutive_restarts > 1) lipschitz *= kStepGrowth;
    } else {
      consecutive_restarts = 0;
      const double next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
      z = x_new + ((momentum - 1.0) / next) * (x_new - x);
      x.swap(x_new);
      f_x = f_new;
      momentum = next;
    }
    if (it % kCheckpointEvery == 0) {
      out.objective_checkpoints.push_back(f_x);
      if (converged_over_window(f_checkpoint, f_x, cfg.fista_tol)) {
        out.converged = true;
        break;
      }
      f_checkpoint = f_x;
    }
  }
  out.iterations = it;

  if (auto exact = polish_sign_pattern(sub, cfg.lambda, x)) {
    const double f_exact = subproblem_objective(sub, *exact, cfg.lambda);
    if (f_exact <= f_x + 1e-12 * std::max(1.0, std::abs(f_x))) {
      x = std::move(*exact);
      f_x = f_exact;
      out.exact = true;
    }
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    if (std::abs(x[i]) <= kAmplitudeFloor) x[i] = 0.0;
  }
  out.x = std::move(x);
  out.objective = subproblem_objective(sub, out.x, cfg.lambda);
  return out;
}

double lasso_objective(const ShapeBank& shapes, const MultiSignal& y, const ActivationSet& a,
                       double lambda) {
  const MultiSignal ha = apply_dictionary(shapes, a, y.length());
  return 0.5 * squared_distance(y, ha) + lambda * a.l1_norm();
}

KktCertificate certify(const ShapeBank& shapes, const MultiSignal& y, const ActivationSet& a,
                       double lambda, double kkt_tol) {
  const Index n = y.length();
  const int k = shapes.neurons();
  MultiSignal residual = y;
  for (const auto& e : a.entries()) add_column(residual, shapes, e.neuron, e.sample, -e.amplitude);
  const auto corr = correlate(shapes, residual, {0, n});

  std::vector<char> in_support(static_cast<std::size_t>(k) * static_cast<std::size_t>(n), 0);
  for (const auto& e : a.entries()) in_support[static_cast<std::size_t>(e.neuron) * n + e.sample] = 1;

  KktCertificate cert;
  const double limit = lambda + kkt_tol;
  for (Index j = 0; j < n; ++j) {
    for (int r = 0; r < k; ++r) {
      if (in_support[static_cast<std::size_t>(r) * n + j]) continue;
      const double g = std::abs(corr.at(r, j));
      cert.max_zero_correlation = std::max(cert.max_zero_correlation, g);
      if (g > limit && cert.earliest_violation < 0) cert.earliest_violation = j;
    }
  }
  cert.certified = cert.max_zero_correlation <= limit;
  return cert;
}

SolveResult fista_full(const ShapeBank& shapes, const MultiSignal& y, const LassoConfig& cfg,
                       double kkt_tol, Deadline deadline) {
  cfg.validate();
  if (shapes.electrodes() != y.electrodes()) throw InvalidInput("electrode count mismatch");
  const auto started = Clock::now();
  const auto& kernels = simd::active();
  const int k = shapes.neurons();
  const int d = shapes.electrodes();
  const Index n = y.length();
  const auto dim = static_cast<std::size_t>(k) * static_cast<std::size_t>(n);

  SolveResult result;
  auto& report = result.report;
  report.solver = "fista-full";
  report.lambda = cfg.lambda;
  report.kkt_tol = kkt_tol;

  double lipschitz = lipschitz_bound(shapes, n);
  std::vector<double> x(dim, 0.0);
  std::vector<double> z(dim, 0.0);
  std::vector<double> x_new(dim, 0.0);
  std::vector<double> v(dim, 0.0);
  std::vector<double> corr(dim, 0.0);
  MultiSignal hx(d, n);
  MultiSignal hz(d, n);
  MultiSignal hx_new(d, n);
  MultiSignal residual(d, n);

  auto apply_sparse_or_dense = [&](const std::vector<double>& coeffs, MultiSignal& out) {
    std::size_t nnz = 0;
    for (double e : coeffs) nnz += e != 0.0;
    if (nnz * 4 < dim) {
      std::fill(out.data().begin(), out.data().end(), 0.0);
      for (std::size_t i = 0; i < dim; ++i) {
        if (coeffs[i] != 0.0) {
          add_column(out, shapes, static_cast<int>(i / n), static_cast<Index>(i % n), coeffs[i]);
        }
      }
    } else {
      forward_dense(shapes, coeffs, out);
    }
  };

  // Builds the sparse solution from a dense iterate, tries an exact polish on
  // its support, and certifies the optimality condition over the whole signal.
  auto finalize = [&](const std::vector<double>& iterate) {
    std::vector<Coordinate> columns;
    for (std::size_t i = 0; i < dim; ++i) {
      if (std::abs(iterate[i]) > kAmplitudeFloor) {
        columns.push_back({static_cast<int>(i / n), static_cast<Index>(i % n)});
      }
    }
    QuadraticSubproblem sub = build_subproblem(shapes, y, std::move(columns));
    Eigen::VectorXd values(static_cast<Eigen::Index>(sub.columns.size()));
    for (std::size_t i = 0; i < sub.columns.size(); ++i) {
      const auto& c = sub.columns[i];
      values[static_cast<Eigen::Index>(i)] = iterate[static_cast<std::size_t>(c.neuron) * n + c.sample];
    }
    if (auto exact = polish_sign_pattern(sub, cfg.lambda, values)) values = std::move(*exact);
    std::vector<Activation> entries;
    for (std::size_t i = 0; i < sub.columns.size(); ++i) {
      const double a = values[static_cast<Eigen::Index>(i)];
      if (std::abs(a) > kAmplitudeFloor) entries.push_back({sub.columns[i].neuron, sub.columns[i].sample, a});
    }
    ActivationSet solution = ActivationSet::from_entries(k, n, std::move(entries));
    const KktCertificate cert = certify(shapes, y, solution, cfg.lambda, kkt_tol);
    return std::pair{std::move(solution), cert};
  };

  double f_x = 0.5 * y.squared_norm();
  double f_checkpoint = f_x;
  report.objective_checkpoints.push_back(f_x);
  double momentum = 1.0;
  int consecutive_restarts = 0;
  bool stalled = false;
  int last_attempt = -kPolishRetryEvery;
  std::optional<std::pair<ActivationSet, KktCertificate>> accepted;

  int it = 0;
  while (it < cfg.max_iter) {
    if (it % kCheckpointEvery == 0 && past(deadline)) {
      report.timed_out = true;
      break;
    }
    ++it;
    {
      auto r = residual.data();
      const auto yv = y.data();
      const auto hv = hz.data();
      for (std::size_t i = 0; i < r.size(); ++i) r[i] = yv[i] - hv[i];
    }
    correlate_dense(shapes, residual, corr);
    const double step = 1.0 / lipschitz;
    for (std::size_t i = 0; i < dim; ++i) v[i] = z[i] + step * corr[i];
    kernels.soft_threshold(x_new.data(), v.data(), cfg.lambda * step, dim);
    apply_sparse_or_dense(x_new, hx_new);
    const double f_new = 0.5 * squared_distance(y, hx_new) + cfg.lambda * l1(x_new);

    if (f_new > f_x) {
      momentum = 1.0;
      z = x;
      hz = hx;
      if (++consecutive_restarts > 1) lipschitz *= kStepGrowth;
    } else {
      consecutive_restarts = 0;
      const double next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
      const double beta = (momentum - 1.0) / next;
      for (std::size_t i = 0; i < dim; ++i) z[i] = x_new[i] + beta * (x_new[i] - x[i]);
      {
        auto zv = hz.data();
        const auto a = hx_new.data();
        const auto b = hx.data();
        for (std::size_t i = 0; i < zv.size(); ++i) zv[i] = a[i] + beta * (a[i] - b[i]);
      }
      x.swap(x_new);
      std::swap(hx, hx_new);
      f_x = f_new;
      momentum = next;
    }

    if (it % kCheckpointEvery == 0) {
      report.objective_checkpoints.push_back(f_x);
      stalled = stalled || converged_over_window(f_checkpoint, f_x, cfg.fista_tol);
      f_checkpoint = f_x;
      if (stalled && it - last_attempt >= kPolishRetryEvery) {
        last_attempt = it;
        auto candidate = finalize(x);
        if (candidate.second.certified) {
          accepted = std::move(candidate);
          break;
        }
      }
    }
  }
  report.iterations = it;
  if (!accepted) {
    accepted = finalize(x);
    report.iteration_cap_hit = !report.timed_out && it >= cfg.max_iter;
  }

  result.solution = std::move(accepted->first);
  const KktCertificate& cert = accepted->second;
  report.certified = cert.certified && !report.timed_out;
  report.max_zero_correlation = cert.max_zero_correlation;
  report.objective = lasso_objective(shapes, y, result.solution, cfg.lambda);
  report.support_size = static_cast<std::int64_t>(result.solution.size());
  report.correlated_coordinates = static_cast<std::int64_t>(dim) * (it + 1);
  report.seconds = std::chrono::duration<double>(Clock::now() - started).count();
  return result;
}

}  // namespace spikelasso
