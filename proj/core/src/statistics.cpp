#include "qbounds/statistics.hpp"

#include <cmath>
#include <string>

#include "qbounds/errors.hpp"
#include "qbounds/rng.hpp"

namespace qbounds {

namespace {

double stddev(const Eigen::VectorXd& v) {
  if (v.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double m = v.mean();
  return std::sqrt((v.array() - m).square().sum() / static_cast<double>(v.size() - 1));
}

// Columns: phi_1, phi_2, then centred products d1^2, d2^2, d1 d2.
Eigen::MatrixXd moment_columns(std::span<const ObservableSample> samples, const Eigen::Vector2d& shift) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(samples.size()), 5);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double d1 = samples[i].phi[0] - shift(0);
    const double d2 = samples[i].phi[1] - shift(1);
    const auto r = static_cast<Eigen::Index>(i);
    x(r, 0) = samples[i].phi[0];
    x(r, 1) = samples[i].phi[1];
    x(r, 2) = d1 * d1;
    x(r, 3) = d2 * d2;
    x(r, 4) = d1 * d2;
  }
  return x;
}

struct PairMoments {
  double m1, m2, v1, v2, c;
};

PairMoments pair_moments(const Eigen::RowVectorXd& means, const Eigen::Vector2d& shift, double bessel) {
  const double e1 = means(0) - shift(0);
  const double e2 = means(1) - shift(1);
  return {means(0), means(1), bessel * (means(2) - e1 * e1), bessel * (means(3) - e2 * e2),
          bessel * (means(4) - e1 * e2)};
}

}  // namespace

Estimate make_estimate(double value, Eigen::VectorXd replicates) {
  Estimate e;
  e.value = value;
  e.se = stddev(replicates);
  e.replicates = std::move(replicates);
  return e;
}

Estimate exact_estimate(double value, Eigen::Index resamples) {
  return make_estimate(value, Eigen::VectorXd::Constant(resamples, value));
}

Bootstrap::Bootstrap(std::size_t resamples, std::uint64_t seed) : resamples_(resamples), seed_(seed) {
  if (resamples < 2) throw Error("invalid_bootstrap", "bootstrap needs at least 2 resamples");
}

Eigen::MatrixXd Bootstrap::replicate_means(const Eigen::MatrixXd& rows) const {
  const auto m = static_cast<std::uint64_t>(rows.rows());
  if (m == 0) throw Error("invalid_bootstrap", "bootstrap of an empty sample");
  Eigen::MatrixXd out(static_cast<Eigen::Index>(resamples_), rows.cols());
  Eigen::RowVectorXd acc(rows.cols());
  for (std::size_t r = 0; r < resamples_; ++r) {
    Rng rng(counter_hash(seed_, r));
    acc.setZero();
    for (std::uint64_t i = 0; i < m; ++i) acc += rows.row(static_cast<Eigen::Index>(rng.below(m)));
    out.row(static_cast<Eigen::Index>(r)) = acc / static_cast<double>(m);
  }
  return out;
}

ObservableSample evaluate_observables(const TrajectoryRecord& record, const LindbladModel& model,
                                      const std::array<ObservableDef, 2>& defs) {
  for (const auto& d : defs) {
    if (d.weights.size() != model.channels.size()) {
      throw DimensionError("observable '" + d.name + "' needs one weight per channel");
    }
  }
  ObservableSample s;
  const auto counts = group_jump_counts(record, model);
  for (int a = 0; a < 2 && a < static_cast<int>(counts.size()); ++a) s.counts[a] = counts[a];
  for (const auto& e : record.events) {
    for (int a = 0; a < 2; ++a) s.phi[a] += defs[a].weights[e.channel];
  }
  return s;
}

Eigen::Matrix2d CovarianceEstimate::matrix() const {
  Eigen::Matrix2d m;
  m << var[0].value, cov.value, cov.value, var[1].value;
  return m;
}

CovarianceEstimate estimate_statistics(std::span<const ObservableSample> samples, const Bootstrap& bootstrap) {
  if (samples.size() < 2) throw Error("too_few_samples", "statistics need at least 2 trajectories");
  const double m = static_cast<double>(samples.size());
  Eigen::Vector2d shift = Eigen::Vector2d::Zero();
  for (const auto& s : samples) shift += Eigen::Vector2d(s.phi[0], s.phi[1]);
  shift /= m;

  const Eigen::MatrixXd cols = moment_columns(samples, shift);
  const double bessel = m / (m - 1.0);
  const PairMoments full = pair_moments(cols.colwise().mean(), shift, bessel);
  const Eigen::MatrixXd reps = bootstrap.replicate_means(cols);
  std::vector<PairMoments> rep(static_cast<std::size_t>(reps.rows()));
  for (Eigen::Index r = 0; r < reps.rows(); ++r) rep[r] = pair_moments(reps.row(r), shift, bessel);

  auto field = [&](auto get) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(rep.size()));
    for (std::size_t r = 0; r < rep.size(); ++r) v(static_cast<Eigen::Index>(r)) = get(rep[r]);
    return make_estimate(get(full), std::move(v));
  };

  CovarianceEstimate out;
  out.count = samples.size();
  out.mean[0] = field([](const PairMoments& p) { return p.m1; });
  out.mean[1] = field([](const PairMoments& p) { return p.m2; });
  out.var[0] = field([](const PairMoments& p) { return p.v1; });
  out.var[1] = field([](const PairMoments& p) { return p.v2; });
  out.cov = field([](const PairMoments& p) { return p.c; });
  out.corr = field([](const PairMoments& p) { return p.c / std::sqrt(p.v1 * p.v2); });

  for (int a = 0; a < 2; ++a) {
    const Estimate& mu = out.mean[a];
    if (!(std::abs(mu.value) > 3.0 * mu.se) || mu.value == 0.0) {
      throw RelativeFluctuationUndefined("mean of observable " + std::to_string(a + 1) + " is " +
                                         std::to_string(mu.value) + " +- " + std::to_string(mu.se) +
                                         "; relative fluctuations are undefined");
    }
  }
  out.rel_var[0] = field([](const PairMoments& p) { return p.v1 / (p.m1 * p.m1); });
  out.rel_var[1] = field([](const PairMoments& p) { return p.v2 / (p.m2 * p.m2); });
  out.rel_cov = field([](const PairMoments& p) { return p.c / (p.m1 * p.m2); });
  out.lhs_det = field([](const PairMoments& p) { return (p.v1 * p.v2 - p.c * p.c) / (p.m1 * p.m1 * p.m2 * p.m2); });
  out.lhs_half = field([](const PairMoments& p) {
    return (p.v1 * p.v2 - 0.5 * p.c * p.c) / (p.m1 * p.m1 * p.m2 * p.m2);
  });
  return out;
}

SampleMoments sample_moments(const Eigen::MatrixXd& rows) {
  SampleMoments out;
  const double m = static_cast<double>(rows.rows());
  out.mean = rows.colwise().mean().transpose();
  const Eigen::MatrixXd centred = rows.rowwise() - out.mean.transpose();
  out.cov = centred.transpose() * centred / std::max(1.0, m - 1.0);
  return out;
}

}  // namespace qbounds
