#include "levymc/driving.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace levymc {

TimeGrid build_grid(const std::vector<double>& jump_times, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("build_grid: eps must be positive");
  TimeGrid grid;
  grid.points.push_back(0.0);
  std::size_t j = 0;
  double t = 0.0;
  while (t < 1.0) {
    while (j < jump_times.size() && jump_times[j] <= t) ++j;
    const double forced = t + eps;
    double next;
    if (j < jump_times.size() && jump_times[j] <= forced) {
      next = jump_times[j];
      ++j;
    } else {
      next = forced;
    }
    if (next >= 1.0) {
      grid.points.push_back(1.0);
      return grid;
    }
    grid.points.push_back(next);
    t = next;
  }
  grid.points.push_back(1.0);
  return grid;
}

std::vector<JumpRecord> sample_jumps(const LevyModel& model, double h,
                                     const RngStream& stream) {
  std::vector<JumpRecord> out;
  const double lam = model.tail_mass(h);
  if (!(lam > 0.0)) return out;

  RngSequence seq = stream.sequence();
  const std::int64_t n = seq.poisson(lam);
  std::vector<double> times(static_cast<std::size_t>(n));
  for (auto& t : times) t = seq.uniform_open01();
  std::sort(times.begin(), times.end());
  out.reserve(times.size());
  for (double t : times) out.push_back({t, model.sample_tail_jump(h, seq)});
  return out;
}

namespace {

std::vector<double> merge_union(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> u;
  u.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(u));
  u.erase(std::unique(u.begin(), u.end()), u.end());
  return u;
}

}  // namespace

DrivingRealization realize_pair(const LevyModel& model, double h_fine, double eps_fine,
                                double h_coarse, double eps_coarse,
                                const RngStream& stream) {
  if (!(h_fine <= h_coarse) || !(eps_fine <= eps_coarse))
    throw std::invalid_argument("realize_pair: fine level must refine the coarse level");

  DrivingRealization real;
  real.dim = model.dim_x();
  real.h_fine = h_fine;
  real.eps_fine = eps_fine;
  real.h_coarse = h_coarse;
  real.eps_coarse = eps_coarse;

  real.jumps = sample_jumps(model, h_fine, stream.child(0));
  real.jump_norms.reserve(real.jumps.size());
  std::vector<double> times_fine, times_coarse;
  times_fine.reserve(real.jumps.size());
  for (const auto& jr : real.jumps) {
    const double norm = jr.size.norm();
    real.jump_norms.push_back(norm);
    times_fine.push_back(jr.time);
    if (norm >= h_coarse) times_coarse.push_back(jr.time);
  }

  real.grid_fine = build_grid(times_fine, eps_fine);
  real.grid_coarse = build_grid(times_coarse, eps_coarse);
  real.union_points = merge_union(real.grid_fine.points, real.grid_coarse.points);

  const std::size_t nint = real.union_points.size() - 1;
  const int d = real.dim;
  real.wiener_increments.resize(nint * d);
  real.correction_increments.resize(nint * d);

  RngSequence wseq = stream.child(1).sequence();
  for (std::size_t u = 0; u < nint; ++u) {
    const double sd = std::sqrt(real.union_points[u + 1] - real.union_points[u]);
    for (int c = 0; c < d; ++c) real.wiener_increments[u * d + c] = sd * wseq.normal();
  }
  RngSequence bseq = stream.child(2).sequence();
  for (std::size_t u = 0; u < nint; ++u) {
    const double sd = std::sqrt(real.union_points[u + 1] - real.union_points[u]);
    for (int c = 0; c < d; ++c) real.correction_increments[u * d + c] = sd * bseq.normal();
  }
  return real;
}

DrivingRealization realize_single(const LevyModel& model, double h, double eps,
                                  const RngStream& stream) {
  return realize_pair(model, h, eps, h, eps, stream);
}

}  // namespace levymc
