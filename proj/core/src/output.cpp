#include "qbounds/output.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include <json.hpp>
#include <openssl/sha.h>

#include "qbounds/runner.hpp"

#ifndef QBOUNDS_VERSION
#define QBOUNDS_VERSION "unknown"
#endif

namespace qbounds {

namespace {

using nlohmann::json;

json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

void put(json& j, const std::string& key, const Estimate& e) {
  j[key] = number(e.value);
  j[key + "_se"] = number(e.se);
}

std::string join_flags(const std::vector<std::string>& flags) {
  std::string s;
  for (const auto& f : flags) {
    if (!s.empty()) s += ';';
    s += f;
  }
  return s;
}

json operator_json(const Operator& op) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < op.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < op.cols(); ++j) row.push_back({op(i, j).real(), op(i, j).imag()});
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

std::string format_number(double x) {
  if (!std::isfinite(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

const std::vector<std::string>& sweep_csv_columns() {
  static const std::vector<std::string> cols = {"sweep_value", "lhs_det", "lhs_se", "k12", "k12_se",
                                                "half_k1k2",   "corr_coeff", "A1",  "A2",  "Q1",
                                                "Q2",          "F12",     "phi1",   "phi2", "flags"};
  return cols;
}

std::string sweep_csv_header() {
  std::string s;
  for (const auto& c : sweep_csv_columns()) {
    if (!s.empty()) s += ',';
    s += c;
  }
  return s;
}

std::string sweep_csv_row(double sweep_value, const BoundReport& r) {
  const double values[] = {sweep_value, r.lhs_det.value, r.lhs_det.se, r.k12.value, r.k12.se,
                           r.half_product.value, r.corr.value, r.activity[0], r.activity[1],
                           r.q[0].value, r.q[1].value, r.fisher_offdiag.value, r.phi[0], r.phi[1]};
  std::string s;
  for (double v : values) s += format_number(v) + ',';
  return s + join_flags(r.flags);
}

std::string sweep_failure_row(double sweep_value, const std::string& error_code) {
  std::string s = format_number(sweep_value);
  for (std::size_t i = 1; i + 1 < sweep_csv_columns().size(); ++i) s += ",nan";
  return s + ",error:" + error_code;
}

void write_samples_csv(std::ostream& out, const PointResult& result) {
  out << "trajectory,seed,s1,s2,s_single,N1,N2,Phi1,Phi2\n";
  for (std::size_t i = 0; i < result.samples.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    const ObservableSample& s = result.samples[i];
    out << i << ',' << result.records[i].seed << ',' << format_number(result.scores(row, 0)) << ','
        << format_number(result.scores(row, 1)) << ',' << format_number(result.scores(row, 2)) << ','
        << s.counts[0] << ',' << s.counts[1] << ',' << format_number(s.phi[0]) << ',' << format_number(s.phi[1])
        << '\n';
  }
}

std::string summary_json(const RunConfig& config, const PointResult& result, int indent) {
  const BoundReport& r = result.report;
  json j;
  j["model"] = config.model.type;
  j["bound"] = to_string(r.kind);
  j["tau"] = r.tau;
  j["trajectories"] = r.trajectories;
  j["master_seed"] = config.master_seed;
  j["observable1"] = config.observables[0].name;
  j["observable2"] = config.observables[1].name;
  put(j, "lhs_det", r.lhs_det);
  put(j, "lhs_half", r.lhs_half);
  put(j, "k12", r.k12);
  put(j, "half_k1k2", r.half_product);
  put(j, "k1", r.single_bound[0]);
  put(j, "k2", r.single_bound[1]);
  put(j, "ratio", r.ratio);
  put(j, "margin", r.margin);
  put(j, "product_margin", r.product_margin);
  put(j, "gap_difference", r.gap_difference);
  put(j, "corr_coeff", r.corr);
  put(j, "mean1", result.stats.mean[0]);
  put(j, "mean2", result.stats.mean[1]);
  put(j, "var1", result.stats.var[0]);
  put(j, "var2", result.stats.var[1]);
  put(j, "cov", result.stats.cov);
  j["A1"] = r.activity[0];
  j["A2"] = r.activity[1];
  j["sigma1"] = r.has_sigma ? number(r.sigma[0]) : json(nullptr);
  j["sigma2"] = r.has_sigma ? number(r.sigma[1]) : json(nullptr);
  put(j, "F11", r.fisher_diag[0]);
  put(j, "F22", r.fisher_diag[1]);
  put(j, "F12", r.fisher_offdiag);
  put(j, "F_single", r.fisher_single);
  put(j, "Q1", r.q[0]);
  put(j, "Q2", r.q[1]);
  put(j, "Q_single", r.q_single);
  put(j, "score_mean1", r.score_mean[0]);
  put(j, "score_mean2", r.score_mean[1]);
  put(j, "score_mean_single", r.score_mean_single);
  j["phi1"] = number(r.phi[0]);
  j["phi2"] = number(r.phi[1]);
  j["phi_single1"] = number(r.phi_single[0]);
  j["phi_single2"] = number(r.phi_single[1]);
  j["correction_star1"] = result.thermo.correction[0].star;
  j["correction_star2"] = result.thermo.correction[1].star;
  j["k12_applicable"] = r.k12_applicable;
  j["product_applicable"] = r.product_applicable;
  j["flags"] = join_flags(r.flags);
  j["notes"] = result.thermo.notes;
  j["seconds"] = result.seconds;
  return j.dump(indent);
}

std::string config_json(const RunConfig& c) {
  json j;
  json m;
  m["type"] = c.model.type;
  m["initial"] = c.model.initial;
  if (c.model.type == "qubit") {
    m["detuning"] = c.model.qubit.detuning;
    m["drive"] = c.model.qubit.drive;
    m["gamma"] = c.model.qubit.gamma;
    m["occupation"] = c.model.qubit.occupation;
  } else if (c.model.type == "maser") {
    m["detuning"] = c.model.maser.detuning;
    m["drive"] = c.model.maser.drive;
    m["gamma_hot"] = c.model.maser.gamma_hot;
    m["gamma_cold"] = c.model.maser.gamma_cold;
    m["occupation_hot"] = c.model.maser.occupation_hot;
    m["occupation_cold"] = c.model.maser.occupation_cold;
  } else {
    json rates = json::array();
    json groups = json::array();
    for (Eigen::Index i = 0; i < c.model.rates.rows(); ++i) {
      json rr = json::array();
      json gr = json::array();
      for (Eigen::Index k = 0; k < c.model.rates.cols(); ++k) {
        rr.push_back(c.model.rates(i, k));
        gr.push_back(c.model.rates(i, k) != 0.0 ? c.model.groups(i, k) + 1 : 0);
      }
      rates.push_back(rr);
      groups.push_back(gr);
    }
    m["rates"] = rates;
    m["groups"] = groups;
  }
  j["model"] = m;
  j["observables"] = json::array();
  for (const auto& o : c.observables) j["observables"].push_back({{"name", o.name}, {"weights", o.weights}});
  j["bound"] = to_string(c.bound_kind);
  j["tau"] = c.tau;
  j["trajectories"] = c.trajectories;
  j["seed"] = c.master_seed;
  j["bootstrap"] = c.bootstrap_resamples;
  j["sampler"] = {{"method", c.sampler.method == SamplerMethod::gillespie ? "gillespie" : "fixed_dt"},
                  {"dt", c.sampler.dt},
                  {"root_tol", c.sampler.root_tol},
                  {"max_jumps", c.sampler.max_jumps}};
  if (c.sweep) {
    j["sweep"] = {{"parameter", c.sweep->parameter}, {"values", c.sweep->values}};
  }
  return j.dump(2);
}

std::string provenance_json(const RunConfig& config, const std::string& config_text) {
  json j;
  j["library_version"] = QBOUNDS_VERSION;
  j["config"] = json::parse(config_json(config));
  j["config_hash"] = git_blob_hash(config_text);
  j["master_seed"] = config.master_seed;
  j["bootstrap_seed"] = bootstrap_seed(config.master_seed);
  j["trajectory_seeds"] = "counter_hash(master_seed, index)";
  if (config.sweep) {
    j["sweep_grid"] = config.sweep->default_grid ? "default: 12 log-spaced points in [0.25, 8] (not stated by the source figures)"
                                                 : "from config";
  }
  return j.dump(2);
}

std::string error_json(const std::string& code, const std::string& message) {
  return json{{"error", code}, {"message", message}}.dump();
}

std::string steady_state_json(const LindbladModel& model, const Operator& rho_ss) {
  json j;
  j["model"] = model.name;
  j["rho_ss"] = operator_json(rho_ss);
  j["channel_rates"] = json::array();
  for (const auto& c : model.channels) j["channel_rates"].push_back((c.op * rho_ss * c.op.adjoint()).trace().real());
  if (model.all_channels_paired()) {
    std::vector<double> l(model.channels.size(), 0.0);
    for (const auto& c : model.channels) {
      const double rk = j["channel_rates"][c.id].get<double>();
      const double rr = j["channel_rates"][*c.reverse_id].get<double>();
      if (rk + rr > 0.0) l[c.id] = (rk - rr) / (rk + rr);
    }
    j["l_ss"] = l;
  } else {
    j["l_ss"] = nullptr;
  }
  j["labels"] = json::array();
  for (const auto& c : model.channels) j["labels"].push_back(c.label);
  return j.dump(2);
}

std::string validation_json(const ValidationReport& report) {
  auto issues = [](const std::vector<ValidationIssue>& v) {
    json a = json::array();
    for (const auto& i : v) a.push_back({{"code", i.code}, {"message", i.message}});
    return a;
  };
  json j;
  j["ok"] = report.ok();
  j["violations"] = issues(report.violations);
  j["warnings"] = issues(report.warnings);
  j["inert_channels"] = report.inert_channels;
  j["max_detailed_balance_residual"] = report.max_detailed_balance_residual;
  return j.dump(2);
}

std::string git_blob_hash(const std::string& content) {
  const std::string blob = "blob " + std::to_string(content.size()) + '\0' + content;
  unsigned char digest[SHA_DIGEST_LENGTH];
  SHA1(reinterpret_cast<const unsigned char*>(blob.data()), blob.size(), digest);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned char b : digest) {
    out += hex[b >> 4];
    out += hex[b & 15];
  }
  return out;
}

}  // namespace qbounds
