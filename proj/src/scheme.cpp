#include "levymc/scheme.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace levymc {

PathSkeleton advance(const LevyModel& model, const CoefficientField& coeff,
                     const Eigen::VectorXd& y0, const LevelParams& params,
                     const DrivingRealization& real, PathRole role) {
  const bool fine = (role == PathRole::fine);
  const TimeGrid& grid = fine ? real.grid_fine : real.grid_coarse;
  const double role_h = fine ? real.h_fine : real.h_coarse;
  const double role_eps = fine ? real.eps_fine : real.eps_coarse;
  if (role_h != params.h || role_eps != params.eps)
    throw std::invalid_argument("advance: level params do not match the realization role");

  const int d = model.dim_x();
  const int dy = coeff.dim_y();
  if (coeff.dim_x() != d)
    throw DimensionMismatchError("advance: coefficient dim_x mismatch");
  if (y0.size() != dy)
    throw DimensionMismatchError("advance: y0 dimension mismatch");
  if (params.correction_factor.rows() != d || params.correction_factor.cols() != d)
    throw DimensionMismatchError("advance: correction factor must be dim_x by dim_x");

  const Eigen::VectorXd drift_eff = model.drift() - model.f_zero(params.h);
  const bool use_sigma = model.sigma().squaredNorm() > 0.0;
  const bool use_corr = params.correction_factor.squaredNorm() > 0.0;
  // fine-role jumps all qualify by construction; the coarse role filters
  const bool filter_jumps = !fine;

  PathSkeleton path;
  path.dim = dy;
  path.t = grid.points;
  path.y.resize(grid.points.size() * static_cast<std::size_t>(dy));

  Eigen::VectorXd y = y0;
  Eigen::VectorXd dx(d), wsum(d), bsum(d), ay(dy);
  Eigen::MatrixXd a(dy, d);
  for (int c = 0; c < dy; ++c) path.y[c] = y(c);

  std::size_t u = 0;  // union interval cursor
  std::size_t j = 0;  // jump cursor
  const std::size_t nsteps = grid.points.size() - 1;
  for (std::size_t i = 0; i < nsteps; ++i) {
    const double s = grid.points[i];
    const double t = grid.points[i + 1];
    const double dt = t - s;

    dx = drift_eff * dt;

    wsum.setZero();
    bsum.setZero();
    while (u + 1 < real.union_points.size() && real.union_points[u + 1] <= t) {
      for (int c = 0; c < d; ++c) {
        wsum(c) += real.wiener_increments[u * d + c];
        bsum(c) += real.correction_increments[u * d + c];
      }
      ++u;
    }
    if (use_sigma) dx.noalias() += model.sigma() * wsum;
    if (use_corr) dx.noalias() += params.correction_factor * bsum;

    while (j < real.jumps.size() && real.jumps[j].time <= t) {
      if (!filter_jumps || real.jump_norms[j] >= role_h) dx += real.jumps[j].size;
      ++j;
    }

    coeff.eval(y, a);
    ay.noalias() = a * dx;
    y += ay;
    if (!y.allFinite())
      throw NonFiniteStateError("advance: non-finite state at t = " + std::to_string(t), t);
    for (int c = 0; c < dy; ++c) path.y[(i + 1) * dy + c] = y(c);
  }
  return path;
}

PathSkeleton simulate_level(const LevyModel& model, const CoefficientField& coeff,
                            const Eigen::VectorXd& y0, const LevelParams& params,
                            const RngStream& stream) {
  const DrivingRealization real = realize_single(model, params.h, params.eps, stream);
  return advance(model, coeff, y0, params, real, PathRole::fine);
}

std::pair<PathSkeleton, PathSkeleton> simulate_pair(const LevyModel& model,
                                                    const CoefficientField& coeff,
                                                    const Eigen::VectorXd& y0,
                                                    const LevelParams& fine,
                                                    const LevelParams& coarse,
                                                    const RngStream& stream) {
  if (!(fine.h <= coarse.h) || !(fine.eps <= coarse.eps))
    throw std::invalid_argument("simulate_pair: fine level must refine the coarse level");
  if ((fine.correction_factor - coarse.correction_factor).norm() != 0.0)
    throw std::invalid_argument("simulate_pair: both levels must share one correction factor");

  const DrivingRealization real =
      realize_pair(model, fine.h, fine.eps, coarse.h, coarse.eps, stream);
  PathSkeleton pf = advance(model, coeff, y0, fine, real, PathRole::fine);
  PathSkeleton pc = advance(model, coeff, y0, coarse, real, PathRole::coarse);
  return {std::move(pf), std::move(pc)};
}

}  // namespace levymc
