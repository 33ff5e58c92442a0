#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "levymc/payoff.hpp"
#include "levymc/scheme.hpp"

namespace levymc {

// One fully instantiated multilevel plan: levels k = 1..m with decreasing
// eps_k, h_k, sample counts n_k, and the shared correction factor matching
// the finest level's small-jump covariance (zero when the Gaussian
// correction is switched off, which reproduces the plain-truncation
// baseline with the same code path).
struct LevelSchedule {
  enum class Provenance { manual, case1, case2 };

  Provenance provenance = Provenance::manual;
  int m = 0;
  std::vector<double> eps;
  std::vector<double> h;
  std::vector<std::int64_t> n;
  std::vector<double> tail_masses;  // tail_mass(h_k), cached at build
  Eigen::MatrixXd correction_factor;
  bool correction = true;

  double tau = 0.0, c1 = 1.0, c2 = 1.0;  // scheduled builds only
  double gstar = 0.0;                    // case2 only
};

LevelSchedule make_manual(const LevyModel& model, std::vector<double> eps,
                          std::vector<double> h, std::vector<std::int64_t> n,
                          bool correction = true);

// eps_k = 2^-k, h_k = g^{-1}(2^k),
// m = floor(log2(C1 (tau ln tau)^{2/3})),
// n_k = floor(C2 tau^{1/3} (ln tau)^{-2/3} g^{-1}(2^k)/g^{-1}(2^m)).
LevelSchedule schedule_case1(const LevyModel& model, double tau, double c1 = 1.0,
                             double c2 = 1.0, bool correction = true);

// m = floor(log2(C1 g*(tau))), n_k = floor(C2 g*(tau)^2 / ln g*(tau) * ratio).
LevelSchedule schedule_case2(const LevyModel& model, double tau, double c1 = 1.0,
                             double c2 = 1.0, bool correction = true);

// g*(tau) = inf{x > 1 : x^3 g^{-1}(x)^2 / ln x >= tau}, solved by bisection
// on [e, 2^60]. The returned x satisfies the defining inequality while
// x (1 - rel_tol) does not (unless the bracket edge already satisfies it).
double gstar_solve(const LevyModel& model, double tau, double rel_tol = 1e-9);

// cost = sum_k n_k [ tail_mass(h_k) + 1/eps_k + 1 ]
double cost(const LevelSchedule& schedule);

// 3 sum_k n_k / eps_k, valid when eps_1 <= 1 and tail_mass(h_k) <= 1/eps_k.
std::optional<double> cost_bound(const LevelSchedule& schedule);

// Theoretical per-level variance envelope:
// eps_{k-1} ln(e/eps_{k-1}) + F(h_{k-1}), with (eps_0, h_0) = (1, g^{-1}(1))
// for scheduled builds and (1, infinity) for manual ones.
double level_envelope(const LevyModel& model, const LevelSchedule& schedule, int k);

struct LevelStats {
  int k = 0;
  std::int64_t n = 0;
  double mean = 0.0;
  double var = 0.0;
  double eps = 0.0;
  double h = 0.0;
  double envelope = 0.0;
  double breakpoints = 0.0;  // mean fine-grid breakpoint count
};

struct MlmcResult {
  double estimate = 0.0;
  double stderr_value = 0.0;  // sqrt(sum_k var_k / n_k)
  double model_cost = 0.0;
  std::vector<LevelStats> levels;
};

// The telescoping estimator: level 1 averages f(Y^(1)); level k >= 2
// averages f(Y^(k)) - f(Y^(k-1)) over coupled pairs. Every (level, sample)
// pair owns a disjoint stream address derived from the seed, samples are
// reduced in index order with compensated summation, so the result is a
// pure function of (inputs, seed) regardless of the worker count.
MlmcResult estimate(const LevyModel& model, const CoefficientField& coeff,
                    const Eigen::VectorXd& y0, const Payoff& payoff,
                    const LevelSchedule& schedule, std::uint64_t seed, int workers = 0);

// Per-level statistics at a fixed probe size; data for rate checks, no
// pass/fail of its own.
std::vector<LevelStats> level_profile(const LevyModel& model, const CoefficientField& coeff,
                                      const Eigen::VectorXd& y0, const Payoff& payoff,
                                      const LevelSchedule& schedule, std::uint64_t seed,
                                      std::int64_t n_probe, int workers = 0);

}  // namespace levymc
