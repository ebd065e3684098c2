#pragma once

// Result records and their serialized forms.
//
// JSON: one object per run with the fixed top-level layout
//   artifact, version, command, timestamp, seed, config, <command sections>
// CSV: `#` comment lines carrying the version and resolved config, then a
// header row and data rows. Single-record commands flatten the JSON object
// into dotted column names; sweeps use kSweepCsvHeader.

#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"

#include "collapsim/analytics.hpp"
#include "collapsim/config.hpp"
#include "collapsim/counts.hpp"
#include "collapsim/montecarlo.hpp"
#include "collapsim/stats.hpp"

namespace collapsim::records {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kArtifactName = "collapsim";
inline constexpr std::string_view kVersion = COLLAPSIM_VERSION;

inline constexpr std::string_view kSweepCsvHeader =
    "axis_value,p_less,lambda,lambda_cond,p_plus_minus,delta_n,required_n,z,seed,status";

/// Fully resolved configuration; times in femtoseconds.
Json config_json(const RunConfig& cfg);
Json counts_json(const CountTable& table);
Json estimates_json(const ProbabilityEstimates& est);
Json analytics_json(const analytics::AnalyticsReport& report);
Json required_json(const stats::RequiredTrials& req);
Json significance_json(const stats::SignificanceReport& report);
Json kinematics_json(const RouteKinematics& kin);

/// Record skeleton with header fields and the config echo.
Json make_record(std::string_view command, const RunConfig& cfg, std::optional<std::string> timestamp = {});

/// Current UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string utc_timestamp();

/// Two-line CSV (header, values) of a record flattened with dotted names.
std::string record_csv(const Json& record);

/// `# key = value` comment lines with the version and resolved config.
std::string csv_preamble(std::string_view command, const RunConfig& cfg);

/// One sweep row in kSweepCsvHeader order.
std::string sweep_csv_row(const stats::SweepRow& row);

Json sweep_json(const stats::SweepResult& result, const RunConfig& cfg);

/// Serialized record in the configured format, newline terminated.
std::string render(const Json& record, const RunConfig& cfg);

} // namespace collapsim::records
