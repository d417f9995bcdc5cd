#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qbounds/config.hpp"
#include "qbounds/model.hpp"

namespace qbounds {

struct PointResult;
struct BoundReport;

// Decimal text with 12 significant digits; "nan" for non-finite values.
std::string format_number(double x);

const std::vector<std::string>& sweep_csv_columns();
std::string sweep_csv_header();
std::string sweep_csv_row(double sweep_value, const BoundReport& report);
std::string sweep_failure_row(double sweep_value, const std::string& error_code);

// trajectory, seed, s1, s2, s_single, N1, N2, Phi1, Phi2
void write_samples_csv(std::ostream& out, const PointResult& result);

// indent < 0 gives a single line.
std::string summary_json(const RunConfig& config, const PointResult& result, int indent = 2);
std::string provenance_json(const RunConfig& config, const std::string& config_text);
std::string config_json(const RunConfig& config);
std::string error_json(const std::string& code, const std::string& message);
std::string steady_state_json(const LindbladModel& model, const Operator& rho_ss);
std::string validation_json(const ValidationReport& report);

// SHA-1 of "blob <size>\0<content>", as git computes object ids.
std::string git_blob_hash(const std::string& content);

}  // namespace qbounds
