#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "levymc/mlmc.hpp"

namespace levymc {

// Reference computations used by tests and the verify command: brute-force
// single-level Monte Carlo at fine parameters, closed forms for constant
// coefficients, generic adaptive quadrature, and a two-sample KS test.

struct ReferenceEstimate {
  double value = 0.0;
  double stderr_value = 0.0;
  std::int64_t n = 0;
  double eps_ref = 0.0;
  double h_ref = 0.0;
};

// Plain Monte Carlo mean of f over single-level simulations at (eps_ref,
// h_ref), with the correction factor matched to h_ref.
ReferenceEstimate reference_estimate(const LevyModel& model, const CoefficientField& coeff,
                                     const Eigen::VectorXd& y0, const Payoff& payoff,
                                     double eps_ref, double h_ref, std::int64_t n,
                                     std::uint64_t seed, int workers = 0);

// Two-sample Kolmogorov-Smirnov statistic and asymptotic p-value.
std::pair<double, double> ks_two_sample(std::vector<double> xs, std::vector<double> ys);

// Exact S(f) for a constant coefficient and terminal payoff:
// <weights, y0 + A b>. Throws NotConstantCoefficientError otherwise.
double closed_form_sf(const LevyModel& model, const CoefficientField& coeff,
                      const Eigen::VectorXd& y0, const Payoff& payoff);

// Adaptive Simpson quadrature with relative tolerance and absolute floor.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol = 1e-8, double abs_floor = 1e-14);

// integral of (r^2/h^2 min 1) dnu/dr over the radial support, computed by
// quadrature in log-radius; the independent left-hand side of the
// g-domination check for density families.
double clipped_quadratic_mass(const LevyModel& model, double h, double rel_tol = 1e-9);

}  // namespace levymc
