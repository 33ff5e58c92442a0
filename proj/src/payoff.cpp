#include "levymc/payoff.hpp"

#include <stdexcept>

namespace levymc {

Payoff Payoff::terminal(Eigen::VectorXd weights) {
  Payoff p;
  p.kind_ = Kind::terminal;
  p.lip_ = weights.norm();
  p.weights_ = std::move(weights);
  return p;
}

Payoff Payoff::lookback(int coordinate) {
  if (coordinate < 0) throw std::invalid_argument("lookback: coordinate must be >= 0");
  Payoff p;
  p.kind_ = Kind::lookback;
  p.coordinate_ = coordinate;
  p.lip_ = 1.0;
  return p;
}

Payoff Payoff::asian(Eigen::VectorXd weights) {
  Payoff p;
  p.kind_ = Kind::asian;
  p.lip_ = weights.norm();
  p.weights_ = std::move(weights);
  return p;
}

Payoff Payoff::custom(std::function<double(const PathSkeleton&)> fn,
                      double declared_lip_const) {
  Payoff p;
  p.kind_ = Kind::custom;
  p.fn_ = std::move(fn);
  p.lip_ = declared_lip_const;
  return p;
}

void Payoff::check_dim(int dim_y) const {
  switch (kind_) {
    case Kind::terminal:
    case Kind::asian:
      if (weights_.size() != dim_y)
        throw DimensionMismatchError("payoff: weights dimension does not match the path");
      return;
    case Kind::lookback:
      if (coordinate_ >= dim_y)
        throw DimensionMismatchError("payoff: lookback coordinate out of range");
      return;
    case Kind::custom:
      return;
  }
}

double Payoff::evaluate(const PathSkeleton& path) const {
  check_dim(path.dim);
  const std::size_t n = path.size();
  const int d = path.dim;
  switch (kind_) {
    case Kind::terminal: {
      double v = 0.0;
      const double* row = path.y.data() + (n - 1) * d;
      for (int c = 0; c < d; ++c) v += weights_(c) * row[c];
      return v;
    }
    case Kind::lookback: {
      double best = path.y[static_cast<std::size_t>(coordinate_)];
      for (std::size_t i = 1; i < n; ++i)
        best = std::max(best, path.y[i * d + coordinate_]);
      return best;
    }
    case Kind::asian: {
      // last piece has zero width: the horizon is the final breakpoint
      double acc = 0.0;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        double v = 0.0;
        const double* row = path.y.data() + i * d;
        for (int c = 0; c < d; ++c) v += weights_(c) * row[c];
        acc += v * (path.t[i + 1] - path.t[i]);
      }
      return acc;
    }
    case Kind::custom:
      return fn_(path);
  }
  return 0.0;
}

}  // namespace levymc
