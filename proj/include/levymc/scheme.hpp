#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "levymc/coefficient.hpp"
#include "levymc/driving.hpp"
#include "levymc/model.hpp"

namespace levymc {

// Cadlag piecewise-constant path: value(i) holds on [t[i], t[i+1]), the last
// breakpoint is the horizon 1 and carries the terminal value. This skeleton
// is exactly the object payoffs are evaluated on; nothing ever interpolates
// between breakpoints.
struct PathSkeleton {
  int dim = 0;
  std::vector<double> t;
  std::vector<double> y;  // row-major, t.size() * dim entries

  std::size_t size() const { return t.size(); }
  Eigen::Map<const Eigen::VectorXd> value(std::size_t i) const {
    return {y.data() + i * static_cast<std::size_t>(dim), dim};
  }
  Eigen::VectorXd terminal() const { return value(size() - 1); }
};

// Per-level scheme parameters. The correction factor is owned by the
// schedule (it matches the finest level's small-jump covariance) and is the
// same matrix for every level of one estimator.
struct LevelParams {
  double eps = 0.0;
  double h = 0.0;
  Eigen::MatrixXd correction_factor;
};

enum class PathRole { fine, coarse };

// Euler update across the role's grid: per step (s, t],
//   dX = Sigma dW + correction dB + (jumps in (s,t] of norm >= h)
//        + (b - F0(h)) (t - s),
//   y_t = y_s + a(y_s) dX.
// Throws NonFiniteStateError with the offending time if the state leaves
// the finite range.
PathSkeleton advance(const LevyModel& model, const CoefficientField& coeff,
                     const Eigen::VectorXd& y0, const LevelParams& params,
                     const DrivingRealization& realization, PathRole role);

PathSkeleton simulate_level(const LevyModel& model, const CoefficientField& coeff,
                            const Eigen::VectorXd& y0, const LevelParams& params,
                            const RngStream& stream);

// One coupled pair driven by a single realization: identical Wiener and
// correction paths, the coarse member sees only jumps of norm >= h_coarse.
std::pair<PathSkeleton, PathSkeleton> simulate_pair(const LevyModel& model,
                                                    const CoefficientField& coeff,
                                                    const Eigen::VectorXd& y0,
                                                    const LevelParams& fine,
                                                    const LevelParams& coarse,
                                                    const RngStream& stream);

}  // namespace levymc
