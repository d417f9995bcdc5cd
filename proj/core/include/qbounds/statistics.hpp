#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <utility>

#include <Eigen/Dense>

#include "qbounds/model.hpp"
#include "qbounds/trajectory.hpp"

namespace qbounds {

// Point value plus bootstrap replicates. Replicate r of every Estimate built
// from the same Bootstrap uses the same resampled trajectories, so quantities
// derived replicate-by-replicate carry joint errors.
struct Estimate {
  double value = std::numeric_limits<double>::quiet_NaN();
  double se = std::numeric_limits<double>::quiet_NaN();
  Eigen::VectorXd replicates;
};

Estimate make_estimate(double value, Eigen::VectorXd replicates);
Estimate exact_estimate(double value, Eigen::Index resamples);

// f applied to the point values and to each replicate.
template <class F, class... E>
Estimate derive(F&& f, const E&... in) {
  const Eigen::Index n = std::min({in.replicates.size()...});
  Eigen::VectorXd reps(n);
  for (Eigen::Index r = 0; r < n; ++r) reps(r) = f(in.replicates(r)...);
  return make_estimate(f(in.value...), std::move(reps));
}

class Bootstrap {
 public:
  explicit Bootstrap(std::size_t resamples = 200, std::uint64_t seed = 0);

  // R x C matrix; row r holds the column means over the r-th resample of rows.
  Eigen::MatrixXd replicate_means(const Eigen::MatrixXd& rows) const;
  std::size_t resamples() const { return resamples_; }
  std::uint64_t seed() const { return seed_; }

 private:
  std::size_t resamples_;
  std::uint64_t seed_;
};

struct ObservableSample {
  std::array<double, 2> phi{0.0, 0.0};
  std::array<long, 2> counts{0, 0};
};

// Phi_a = sum_j w^a_{k_j}; N_a counts jumps in group a.
ObservableSample evaluate_observables(const TrajectoryRecord& record, const LindbladModel& model,
                                      const std::array<ObservableDef, 2>& defs);

struct CovarianceEstimate {
  std::size_t count = 0;
  std::array<Estimate, 2> mean;
  std::array<Estimate, 2> var;  // M - 1 denominator
  Estimate cov;
  Estimate corr;
  std::array<Estimate, 2> rel_var;  // Var / mean^2
  Estimate rel_cov;                 // Cov / (mean_1 mean_2)
  Estimate lhs_det;                 // det(Xi) / (mean_1 mean_2)^2
  Estimate lhs_half;                // rel_var_1 rel_var_2 - rel_cov^2 / 2

  Eigen::Matrix2d matrix() const;
};

// Throws RelativeFluctuationUndefined unless both means are non-zero at 3 SE.
CovarianceEstimate estimate_statistics(std::span<const ObservableSample> samples, const Bootstrap& bootstrap);

// Moments of a column set: means and M-1 covariance from centred products.
struct SampleMoments {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};
SampleMoments sample_moments(const Eigen::MatrixXd& rows);

}  // namespace qbounds
