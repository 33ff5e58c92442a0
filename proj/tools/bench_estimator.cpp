// Times the estimator's sample loop serially and with the OpenMP worker pool
// on the same schedule, and checks that both produce the identical result.

#include <chrono>
#include <cstdio>

#include "levymc/json_io.hpp"
#include "levymc/oracle.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace levymc;

namespace {

double run_timed(const LevyModel& model, const CoefficientField& coeff,
                 const Eigen::VectorXd& y0, const Payoff& payoff, const LevelSchedule& sched,
                 int workers, MlmcResult& out) {
  const auto t0 = std::chrono::steady_clock::now();
  out = estimate(model, coeff, y0, payoff, sched, 2024, workers);
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count();
}

}  // namespace

int main() {
  const LevyModel model(1, Eigen::MatrixXd::Zero(1, 1), Eigen::VectorXd::Constant(1, 0.3),
                        TruncatedStable{1.5, 1.0, 1.0, false});
  const CoefficientField coeff = CoefficientField::sinusoidal(
      Eigen::MatrixXd::Constant(1, 1, 1.0), Eigen::MatrixXd::Constant(1, 1, 0.25),
      Eigen::VectorXd::Constant(1, 1.0));
  const Eigen::VectorXd y0 = Eigen::VectorXd::Constant(1, 1.0);
  const Payoff payoff = Payoff::asian(Eigen::VectorXd::Constant(1, 1.0));
  const LevelSchedule sched = schedule_case1(model, std::exp2(16));

  std::int64_t samples = 0;
  for (auto n : sched.n) samples += n;
  std::printf("schedule: m = %d, total samples = %lld, cost = %.3g\n", sched.m,
              static_cast<long long>(samples), cost(sched));

  MlmcResult serial, parallel;
  const double ts = run_timed(model, coeff, y0, payoff, sched, 1, serial);
#ifdef _OPENMP
  const int hw = omp_get_max_threads();
#else
  const int hw = 1;
#endif
  const double tp = run_timed(model, coeff, y0, payoff, sched, hw, parallel);

  const bool identical =
      result_to_json(serial).dump() == result_to_json(parallel).dump();
  std::printf("serial   (1 worker) : %8.3f s  %10.0f samples/s\n", ts, samples / ts);
  std::printf("parallel (%d workers): %8.3f s  %10.0f samples/s\n", hw, tp, samples / tp);
  std::printf("speedup: %.2fx, outputs identical: %s\n", ts / tp, identical ? "yes" : "NO");
  std::printf("estimate = %.10g, stderr = %.3g\n", serial.estimate, serial.stderr_value);
  return identical ? 0 : 1;
}
