#pragma once

#include <Eigen/Dense>
#include <vector>

#include "levymc/model.hpp"
#include "levymc/rng.hpp"

namespace levymc {

struct JumpRecord {
  double time = 0.0;       // in (0, 1]
  Eigen::VectorXd size;    // |size| >= h of the generating level
};

// Jump-adapted grid: 0 = t_0 < t_1 < ... < t_n = 1, consecutive gaps <= eps,
// every qualifying jump time is a grid point.
struct TimeGrid {
  std::vector<double> points;
  std::size_t size() const { return points.size(); }
};

// Grid times follow the inductive rule: the next point is the earlier of the
// next qualifying jump and the forced step t + eps, truncated at the horizon
// (1 is always the final point). A jump landing exactly on a forced step
// yields a single breakpoint.
TimeGrid build_grid(const std::vector<double>& jump_times, double eps);

// Shared randomness of one coupled level pair: every jump of norm >= h_fine,
// the two jump-adapted grids, and raw Gaussian increments (covariance
// delta * I per interval of length delta) on the union grid. Sigma and the
// correction factor are applied later, in the scheme, so one realization can
// drive both members of the pair.
struct DrivingRealization {
  int dim = 0;
  double h_fine = 0.0, eps_fine = 0.0;
  double h_coarse = 0.0, eps_coarse = 0.0;
  std::vector<JumpRecord> jumps;   // sorted by time
  std::vector<double> jump_norms;  // cached Euclidean norms
  TimeGrid grid_fine, grid_coarse;
  std::vector<double> union_points;
  // row-major [interval * dim + coord]
  std::vector<double> wiener_increments;
  std::vector<double> correction_increments;
};

// Poisson(tail_mass(h)) many jumps, times iid uniform on (0,1] sorted, sizes
// iid from the normalized tail law. Pure function of (model, h, stream).
std::vector<JumpRecord> sample_jumps(const LevyModel& model, double h,
                                     const RngStream& stream);

DrivingRealization realize_single(const LevyModel& model, double h, double eps,
                                  const RngStream& stream);

// Jumps are sampled once at the fine threshold; the coarse grid only sees
// those of norm >= h_coarse. Both levels share the same Wiener and correction
// paths through the union grid.
DrivingRealization realize_pair(const LevyModel& model, double h_fine, double eps_fine,
                                double h_coarse, double eps_coarse,
                                const RngStream& stream);

}  // namespace levymc
