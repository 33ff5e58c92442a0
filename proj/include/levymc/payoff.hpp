#pragma once

#include <Eigen/Dense>
#include <functional>

#include "levymc/scheme.hpp"

namespace levymc {

// Lipschitz path functionals evaluated exactly on piecewise-constant
// skeletons. The supremum over a cadlag step function is the max over piece
// values and the time average is an exact Riemann sum, so nothing here
// discretizes f itself.
class Payoff {
 public:
  enum class Kind { terminal, lookback, asian, custom };

  static Payoff terminal(Eigen::VectorXd weights);
  static Payoff lookback(int coordinate);
  static Payoff asian(Eigen::VectorXd weights);
  static Payoff custom(std::function<double(const PathSkeleton&)> fn,
                       double declared_lip_const);

  double evaluate(const PathSkeleton& path) const;

  Kind kind() const { return kind_; }
  double lip_const() const { return lip_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  int coordinate() const { return coordinate_; }

  // Throws DimensionMismatchError if the payoff cannot act on dim_y paths.
  void check_dim(int dim_y) const;

 private:
  Payoff() = default;

  Kind kind_ = Kind::terminal;
  Eigen::VectorXd weights_;
  int coordinate_ = 0;
  double lip_ = 1.0;
  std::function<double(const PathSkeleton&)> fn_;
};

}  // namespace levymc
