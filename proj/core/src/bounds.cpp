#include "qbounds/bounds.hpp"

#include <cmath>
#include <limits>

#include "qbounds/errors.hpp"

namespace qbounds {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double correction_factor(const Correction& c) { return c.defined ? 1.0 + c.ratio : kNaN; }

double positive_or_nan(double x) { return x > 0.0 ? x : kNaN; }

}  // namespace

BoundReport assemble_bounds(BoundKind kind, const ThermoReport& thermo, const FisherMatrixEstimate& fisher,
                            const CovarianceEstimate& stats, double tau) {
  if (fisher.entries.size() != 3) throw Error("invalid_fisher", "bound assembly needs the three-parameter Fisher matrix");
  if (thermo.kind != kind) throw Error("kind_mismatch", "thermo report was computed for a different bound kind");
  if (std::abs(thermo.tau - tau) > 1e-12 * tau) throw Error("tau_mismatch", "thermo report was computed for a different tau");

  BoundReport r;
  r.kind = kind;
  r.tau = tau;
  r.trajectories = stats.count;
  r.activity = thermo.activity;
  if (thermo.entropy) {
    r.has_sigma = true;
    r.sigma = thermo.entropy->sigma;
  }
  bool undefined = false;
  for (int a = 0; a < 2; ++a) {
    r.fisher_diag[a] = fisher(a, a);
    r.score_mean[a] = fisher.score_means[a];
    r.phi[a] = thermo.correction[a].ratio;
    r.phi_single[a] = thermo.single_correction[a].ratio;
    undefined = undefined || !thermo.correction[a].defined || !thermo.single_correction[a].defined;
  }
  if (undefined) r.flags.push_back("correction_undefined");
  r.fisher_offdiag = fisher(0, 1);
  r.fisher_single = fisher(ImprintingScheme::kGlobal, ImprintingScheme::kGlobal);
  r.score_mean_single = fisher.score_means[ImprintingScheme::kGlobal];

  const double c1 = correction_factor(thermo.correction[0]);
  const double c2 = correction_factor(thermo.correction[1]);
  const double s1 = correction_factor(thermo.single_correction[0]);
  const double s2 = correction_factor(thermo.single_correction[1]);

  if (kind == BoundKind::kur) {
    for (int a = 0; a < 2; ++a) {
      const double act = thermo.activity[a];
      r.q[a] = derive([act](double f) { return f - act; }, r.fisher_diag[a]);
    }
    const double act = thermo.activity_total;
    r.q_single = derive([act](double f) { return f - act; }, r.fisher_single);

    const Estimate det = derive([](double f11, double f22, double f12) { return f11 * f22 - f12 * f12; },
                                r.fisher_diag[0], r.fisher_diag[1], r.fisher_offdiag);
    r.k12_applicable = det.value > 0.0;
    const double num = c1 * c1 * c2 * c2;
    r.k12 = derive([num](double d) { return num / positive_or_nan(d); }, det);
    r.single_bound[0] = derive([s1](double f) { return s1 * s1 / positive_or_nan(f); }, r.fisher_single);
    r.single_bound[1] = derive([s2](double f) { return s2 * s2 / positive_or_nan(f); }, r.fisher_single);
  } else {
    if (r.has_sigma) {
      for (int a = 0; a < 2; ++a) {
        const double half = 0.5 * r.sigma[a];
        r.q[a] = derive([half](double f) { return f - half; }, r.fisher_diag[a]);
      }
      const double half = 0.5 * thermo.entropy->total();
      r.q_single = derive([half](double f) { return f - half; }, r.fisher_single);
    } else {
      r.flags.push_back("sigma_unavailable");
      for (auto& q : r.q) q = exact_estimate(kNaN, stats.lhs_det.replicates.size());
      r.q_single = exact_estimate(kNaN, stats.lhs_det.replicates.size());
    }
    // S_a + 2 Q'_a = 2 F_aa by the definition of Q'.
    const Estimate den = derive([](double f11, double f22, double f12) { return 4.0 * f11 * f22 - 2.0 * f12 * f12; },
                                r.fisher_diag[0], r.fisher_diag[1], r.fisher_offdiag);
    r.k12_applicable = den.value > 0.0;
    const double num = 2.0 * c1 * c1 * c2 * c2;
    r.k12 = derive([num](double d) { return num / positive_or_nan(d); }, den);
    r.single_bound[0] = derive([s1](double f) { return 2.0 * s1 * s1 / positive_or_nan(2.0 * f); }, r.fisher_single);
    r.single_bound[1] = derive([s2](double f) { return 2.0 * s2 * s2 / positive_or_nan(2.0 * f); }, r.fisher_single);
  }
  r.product_applicable = r.fisher_single.value > 0.0;
  if (!r.k12_applicable) r.flags.push_back("k12_inapplicable");
  if (!r.product_applicable) r.flags.push_back("product_inapplicable");
  if (!thermo.stationary_start) r.flags.push_back("nonstationary_start");

  r.half_product = derive([](double k1, double k2) { return 0.5 * k1 * k2; }, r.single_bound[0], r.single_bound[1]);
  r.lhs_det = stats.lhs_det;
  r.lhs_half = stats.lhs_half;
  r.corr = stats.corr;
  r.ratio = derive([](double lhs, double k) { return lhs / k; }, r.lhs_det, r.k12);
  r.margin = derive([](double lhs, double k) { return lhs - k; }, r.lhs_det, r.k12);
  r.product_margin = derive([](double lhs, double k) { return lhs - k; }, r.lhs_half, r.half_product);
  r.gap_difference = derive([](double a, double b) { return a - b; }, r.margin, r.product_margin);
  return r;
}

}  // namespace qbounds
