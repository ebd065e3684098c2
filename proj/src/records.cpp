#include "collapsim/records.hpp"

#include <chrono>
#include <ctime>
#include <sstream>
#include <variant>

namespace collapsim::records {

namespace {

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::string csv_field(std::string text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string scalar_text(const Json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_float()) return format_double(v.get<double>());
  return v.dump();
}

void flatten(const Json& node, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& out) {
  if (node.is_object()) {
    for (const auto& [key, value] : node.items()) flatten(value, prefix.empty() ? key : prefix + "." + key, out);
  } else {
    out.emplace_back(prefix, scalar_text(node));
  }
}

} // namespace

Json config_json(const RunConfig& cfg) {
  const ModelConfig& m = cfg.model;
  const ExperimentGeometry g = m.geometry();
  Json j;
  j["alpha2"] = m.alpha2;
  j["profile"] = to_string(m.profile);
  j["sigma_t_fs"] = m.sigma_t;
  j["delay_T_fs"] = m.delay_T;
  j["window_dt_fs"] = m.window_dt;
  j["window_origin_fs"] = g.window_origin;
  j["delta_t_fs"] = m.delta_t;
  j["scenario"] = to_string(m.scenario);
  j["family"] = to_string(m.family);
  j["lambda1"] = m.lambda1;
  j["lambda2"] = m.lambda2;
  j["exponent1"] = m.exponent1;
  j["exponent2"] = m.exponent2;
  j["n_trials"] = m.n_trials;
  j["seed"] = m.seed;
  j["partitions"] = cfg.partitions;
  j["lambda_source"] = to_string(m.lambda_source);
  j["confidence_level"] = cfg.confidence_level;
  j["kernel"] = to_string(m.kernel);
  j["output_format"] = to_string(cfg.output_format);
  return j;
}

Json counts_json(const CountTable& t) {
  Json j;
  j["n_pm"] = t.n_pm;
  j["n_mp"] = t.n_mp;
  j["n_nontrivial"] = t.n_nontrivial;
  j["n_route1"] = t.n_route1;
  j["n_route2"] = t.n_route2;
  j["n_left_first"] = t.n_left_first;
  j["n_total"] = t.n_total;
  return j;
}

Json estimates_json(const ProbabilityEstimates& est) {
  const auto interval = [](const ProportionEstimate& p) {
    Json j;
    j["estimate"] = p.estimate;
    j["lower"] = p.lower;
    j["upper"] = p.upper;
    return j;
  };
  Json j;
  j["confidence"] = est.confidence;
  j["plus_minus"] = interval(est.plus_minus);
  j["nontrivial"] = interval(est.nontrivial);
  return j;
}

Json analytics_json(const analytics::AnalyticsReport& r) {
  Json j;
  j["p_less"] = r.p_less;
  j["p_less_closed"] = optional_number(r.p_less_closed);
  j["p_less_approx"] = r.p_less_approx;
  j["lambda_uncond"] = r.lambda_uncond;
  j["gamma_uncond"] = r.gamma_uncond;
  j["lambda_cond"] = r.lambda_cond;
  j["gamma_cond"] = r.gamma_cond;
  j["p_plus_minus_exact"] = r.p_plus_minus_exact;
  j["p_minus_plus_exact"] = r.p_minus_plus_exact;
  j["p_plus_minus_symmetric"] = r.p_plus_minus_symmetric;
  j["symmetry_residual"] = r.symmetry_residual;
  j["delta_n_per_trial"] = r.delta_n_per_trial;
  j["p_density_at_zero"] = r.p_density_at_zero;
  j["p_density_at_zero_approx"] = r.p_density_at_zero_approx;
  j["lambda_bound"] = r.lambda_bound;
  j["lambda_paper_literal"] = r.lambda_paper_literal;
  j["lambda_for_paper_6sigma"] = r.lambda_for_paper_6sigma;
  j["lambda_normalization_discrepancy"] = r.lambda_normalization_discrepancy;
  return j;
}

Json required_json(const stats::RequiredTrials& req) {
  Json j;
  j["feasible"] = req.feasible;
  j["n"] = req.feasible ? Json(req.n) : Json(nullptr);
  j["exact"] = std::isfinite(req.exact) ? Json(req.exact) : Json(nullptr);
  j["reason"] = req.reason;
  return j;
}

Json significance_json(const stats::SignificanceReport& r) {
  Json j;
  j["n_total"] = r.n_total;
  j["lambda_eff"] = r.lambda_eff;
  j["delta_n_expected"] = r.delta_n_expected;
  j["fluctuation_scale"] = r.fluctuation_scale;
  j["single_fluctuation"] = r.single_fluctuation;
  j["paper_ratio"] = r.paper_ratio;
  j["observed_delta_n"] = r.observed_delta_n;
  j["z_paper"] = r.z_paper;
  j["z_score"] = r.z_score;
  j["p_value"] = r.p_value;
  j["exact_binomial"] = r.exact_binomial;
  j["required"] = required_json(r.required);
  return j;
}

Json kinematics_json(const RouteKinematics& kin) {
  const auto shape = [](const DecayShape& s) {
    Json j;
    j["kind"] = s.kind == DecayShape::Kind::Exponential ? "exponential" : "power";
    j["parameter"] = s.parameter;
    return j;
  };
  Json j;
  j["family"] = family_name(kin.family());
  j["delta_t_fs"] = kin.delta_t();
  j["route1_doomed"] = shape(kin.doomed_shape(Route::One));
  j["route2_doomed"] = shape(kin.doomed_shape(Route::Two));
  return j;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Json make_record(std::string_view command, const RunConfig& cfg, std::optional<std::string> timestamp) {
  Json j;
  j["artifact"] = kArtifactName;
  j["version"] = kVersion;
  j["command"] = command;
  j["timestamp"] = timestamp ? *timestamp : utc_timestamp();
  j["seed"] = cfg.model.seed;
  j["config"] = config_json(cfg);
  return j;
}

std::string record_csv(const Json& record) {
  std::vector<std::pair<std::string, std::string>> cells;
  flatten(record, "", cells);
  std::string header;
  std::string values;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) {
      header += ',';
      values += ',';
    }
    header += csv_field(cells[i].first);
    values += csv_field(cells[i].second);
  }
  return header + "\n" + values + "\n";
}

std::string csv_preamble(std::string_view command, const RunConfig& cfg) {
  std::ostringstream out;
  out << "# " << kArtifactName << ' ' << kVersion << ' ' << command << '\n';
  std::istringstream lines(emit_config(cfg));
  for (std::string line; std::getline(lines, line);) out << "# " << line << '\n';
  return out.str();
}

std::string sweep_csv_row(const stats::SweepRow& row) {
  std::string status = "ok";
  if (!row.ok) status = "error: " + row.error;
  else if (!row.required.feasible) status = "infeasible: " + row.required.reason;
  const auto num = [&](double v) { return row.ok ? format_double(v) : std::string(); };
  std::string line;
  line += format_double(row.axis_value) + ',';
  line += num(row.p_less) + ',';
  line += num(row.lambda) + ',';
  line += num(row.lambda_cond) + ',';
  line += num(row.p_plus_minus) + ',';
  line += num(row.delta_n) + ',';
  line += (row.ok && row.required.feasible ? std::to_string(row.required.n) : std::string()) + ',';
  line += (row.z ? format_double(*row.z) : std::string()) + ',';
  line += std::to_string(row.seed) + ',';
  line += csv_field(status);
  return line;
}

Json sweep_json(const stats::SweepResult& result, const RunConfig& cfg) {
  Json j = make_record("sweep", cfg);
  j["axis"] = stats::to_string(result.axis);
  Json rows = Json::array();
  for (const stats::SweepRow& row : result.rows) {
    Json r;
    r["axis_value"] = row.axis_value;
    r["ok"] = row.ok;
    r["error"] = row.error;
    r["p_less"] = row.p_less;
    r["lambda"] = row.lambda;
    r["lambda_cond"] = row.lambda_cond;
    r["p_plus_minus"] = row.p_plus_minus;
    r["delta_n"] = row.delta_n;
    r["required"] = required_json(row.required);
    r["z"] = optional_number(row.z);
    r["seed"] = row.seed;
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  Json d;
  d["failures"] = result.diagnostics.failures;
  d["delta_n_nonincreasing"] = result.diagnostics.delta_n_nonincreasing;
  d["delta_n_nondecreasing"] = result.diagnostics.delta_n_nondecreasing;
  d["required_n_nonincreasing"] = result.diagnostics.required_n_nonincreasing;
  d["required_n_nondecreasing"] = result.diagnostics.required_n_nondecreasing;
  j["diagnostics"] = std::move(d);
  return j;
}

std::string render(const Json& record, const RunConfig& cfg) {
  if (cfg.output_format == OutputFormat::Json) return record.dump(2) + "\n";
  return csv_preamble(record.value("command", ""), cfg) + record_csv(record);
}

} // namespace collapsim::records
