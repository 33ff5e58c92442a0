#pragma once

#include <Eigen/Dense>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "levymc/errors.hpp"
#include "levymc/rng.hpp"

namespace levymc {

// Jump measure families. All three have finite second moments and every
// integral the algorithm needs in closed form (the tabulated family is
// closed-form per interpolation cell).

// nu(dx) = intensity * |x|^{-alpha-d} dx on 0 < |x| <= radius, isotropic.
// With one_sided (d = 1 only) the support is (0, radius] instead.
struct TruncatedStable {
  double alpha = 1.5;      // in (0, 2)
  double intensity = 1.0;  // c > 0
  double radius = 1.0;     // support ball
  bool one_sided = false;
};

struct FiniteAtom {
  Eigen::VectorXd x;
  double mass = 0.0;
};

// Finitely many weighted atoms; total mass is the jump rate.
struct FiniteActivity {
  std::vector<FiniteAtom> atoms;
};

// Radial line density q(r) = dnu/dr tabulated on an increasing (log) grid,
// isotropic in direction. Interpolation is log-log linear, so every cell is
// a power law and all integrals are exact for the interpolant.
struct TabulatedRadial {
  std::vector<double> radii;
  std::vector<double> density;
};

using JumpMeasureSpec = std::variant<TruncatedStable, FiniteActivity, TabulatedRadial>;

// Dominating function g(h) = coefficient * h^{-exponent}. A power law keeps
// g inverse and the budget solver exact.
struct PowerLawG {
  double coefficient = 1.0;
  double exponent = 1.0;  // in (0, 2]
};

struct UEReport {
  double h_max = 0.0;     // largest probed h with a usable estimate
  double theta = 1.0;     // ellipticity ratio estimate
  int subspace_dim = 0;   // dim of the small-jump support subspace (0 = vacuous)
  bool pass = false;
};

struct DoublingReport {
  bool pass = false;
  double gamma = 0.0;
  double threshold = 0.0;   // exact admissible gamma for power-law g, NaN otherwise
  double min_margin = 0.0;  // min over grid of g(gamma h / 2) - 2 g(h)
};

struct BgIndex {
  double value = 0.0;
  bool approximate = false;
};

// Symmetric PSD square root via eigendecomposition; negative eigenvalues
// within tolerance are clamped to zero. Works for rank-deficient inputs.
Eigen::MatrixXd cov_factor(const Eigen::MatrixXd& cov);

// A (nu, Sigma Sigma^*, b) model together with every analytic quantity the
// scheduler and the scheme need. Immutable after construction and safe to
// share across threads.
class LevyModel {
 public:
  LevyModel(int dim_x, Eigen::MatrixXd sigma, Eigen::VectorXd drift,
            JumpMeasureSpec measure,
            std::optional<double> lipschitz_budget = std::nullopt,
            std::optional<PowerLawG> g_override = std::nullopt);

  int dim_x() const { return dim_x_; }
  const Eigen::MatrixXd& sigma() const { return sigma_; }
  const Eigen::VectorXd& drift() const { return drift_; }
  const JumpMeasureSpec& measure() const { return measure_; }
  double lipschitz_budget() const { return lipschitz_budget_; }
  const std::optional<PowerLawG>& g_override() const { return g_override_; }

  // nu(B(0,h)^c), the rate of jumps of norm >= h.
  double tail_mass(double h) const;

  // F(h) = integral of |x|^2 over the open ball B(0,h).
  double f_small(double h) const;

  // F0(h) = integral of x over the tail; the large-jump compensator drift.
  Eigen::VectorXd f_zero(double h) const;

  // C(h)_{ij} = integral of x_i x_j over B(0,h); trace(C(h)) == f_small(h).
  Eigen::MatrixXd small_jump_cov(double h) const;

  // F(inf), the full second moment of nu.
  double second_moment() const;

  // integral of |x|^2 over the tail {|x| >= h}.
  double tail_second_moment(double h) const;

  // Canonical dominating power law (or the registered override).
  // Finite-activity measures have no canonical g; callers must supply one.
  std::optional<PowerLawG> power_law_g() const;
  double g_bound(double h) const;
  double g_inverse(double x) const;

  DoublingReport validate_doubling(double gamma, const std::vector<double>& h_grid) const;

  // Magnitude quantile of the normalized tail law nu|_{B(0,h)^c}/tail_mass(h).
  double tail_radius_from_uniform(double h, double u) const;

  // One draw from the normalized tail law.
  Eigen::VectorXd sample_tail_jump(double h, RngSequence& seq) const;

  BgIndex bg_index() const;

  UEReport check_ue(const std::vector<double>& h_grid, int direction_samples,
                    double theta_bound = 1e6) const;

  // Radial line density dnu/dr and its support; defined for the stable and
  // tabulated families (atoms have no density).
  double radial_density(double r) const;
  std::pair<double, double> radial_support() const;

  // ln of the radial density at r = exp(log_r); -inf outside the support.
  // Overflow-safe at radii far outside the double range of the density
  // itself, which quadrature near the origin needs for alpha close to 2.
  double log_radial_density(double log_r) const;

 private:
  void validate_and_cache();

  int dim_x_;
  Eigen::MatrixXd sigma_;
  Eigen::VectorXd drift_;
  JumpMeasureSpec measure_;
  double lipschitz_budget_ = 0.0;
  std::optional<PowerLawG> g_override_;

  // tabulated-family caches
  struct TabCell {
    double a = 0, b = 0;   // cell radii
    double qa = 0;         // density at a
    double p = 0;          // local log-log slope
    double mass = 0;       // integral of q over the cell
    double sq = 0;         // integral of r^2 q over the cell
  };
  std::vector<TabCell> cells_;
  std::vector<double> tail_cum_;  // tail mass from cell i to the end
  double total_mass_ = 0.0;
  double total_sq_ = 0.0;
  PowerLawG tab_g_{};
  double tab_bg_ = 0.0;

  double stable_cg_ = 0.0;  // cached c_g for the stable family
};

}  // namespace levymc
