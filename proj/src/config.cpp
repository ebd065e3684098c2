#include "collapsim/config.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "collapsim/errors.hpp"

namespace collapsim {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_number(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw ConfigError("cannot parse number '" + std::string(text) + "'");
  }
  if (!std::isfinite(value)) throw ConfigError("number must be finite");
  return value;
}

std::uint64_t parse_count(std::string_view text) {
  text = trim(text);
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec == std::errc{} && ptr == text.data() + text.size() && !text.empty()) return value;
  // Allow scientific notation for integral values, e.g. 1e7.
  const double d = parse_number(text);
  if (d < 0.0 || d != std::floor(d) || d >= 1.8446744073709552e19) {
    throw ConfigError("expected a non-negative integer, got '" + std::string(text) + "'");
  }
  return static_cast<std::uint64_t>(d);
}

} // namespace

std::string_view to_string(OutputFormat f) noexcept { return f == OutputFormat::Json ? "json" : "csv"; }

double parse_time_fs(std::string_view text) {
  text = trim(text);
  struct Unit {
    std::string_view suffix;
    double scale;
  };
  static constexpr Unit kUnits[] = {{"fs", 1.0}, {"ps", 1e3}, {"ns", 1e6}, {"us", 1e9}};
  for (const Unit& u : kUnits) {
    if (text.size() > u.suffix.size() && text.ends_with(u.suffix)) {
      return parse_number(text.substr(0, text.size() - u.suffix.size())) * u.scale;
    }
  }
  return parse_number(text);
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return ec == std::errc{} ? std::string(buf, ptr) : std::to_string(value);
}

void RunConfig::validate() const {
  model.validate();
  if (!(confidence_level > 0.0 && confidence_level < 1.0)) {
    throw ConfigError("confidence_level: must lie in (0, 1)");
  }
}

RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  ModelConfig& m = cfg.model;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    try {
      if (key == "alpha2") m.alpha2 = parse_number(value);
      else if (key == "profile") m.profile = profile_shape_from_string(value);
      else if (key == "sigma_t") m.sigma_t = parse_time_fs(value);
      else if (key == "delay_T") m.delay_T = parse_time_fs(value);
      else if (key == "window_dt") m.window_dt = parse_time_fs(value);
      else if (key == "window_origin") m.window_origin = parse_time_fs(value);
      else if (key == "delta_t") m.delta_t = parse_time_fs(value);
      else if (key == "scenario") m.scenario = scenario_from_string(value);
      else if (key == "family") m.family = family_kind_from_string(value);
      else if (key == "lambda1") m.lambda1 = parse_number(value);
      else if (key == "lambda2") m.lambda2 = parse_number(value);
      else if (key == "exponent1") m.exponent1 = parse_number(value);
      else if (key == "exponent2") m.exponent2 = parse_number(value);
      else if (key == "n_trials") m.n_trials = parse_count(value);
      else if (key == "seed") m.seed = parse_count(value);
      else if (key == "kernel") m.kernel = kernel_kind_from_string(value);
      else if (key == "lambda_source") m.lambda_source = lambda_source_from_string(value);
      else if (key == "partitions") {
        const std::uint64_t p = parse_count(value);
        if (p > 65536) throw ConfigError("must be <= 65536");
        cfg.partitions = static_cast<unsigned>(p);
      } else if (key == "confidence_level") cfg.confidence_level = parse_number(value);
      else if (key == "output_path") cfg.output_path = std::string(value);
      else if (key == "output_format") {
        if (value == "json") cfg.output_format = OutputFormat::Json;
        else if (value == "csv") cfg.output_format = OutputFormat::Csv;
        else throw ConfigError("expected json or csv");
      } else {
        throw ConfigError("unknown key");
      }
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": key '" + key + "': " + e.what());
    }
    if (end == text.size()) break;
  }
  cfg.validate();
  return cfg;
}

std::string emit_config(const RunConfig& cfg) {
  const ModelConfig& m = cfg.model;
  std::ostringstream out;
  out << "alpha2 = " << format_double(m.alpha2) << '\n'
      << "profile = " << to_string(m.profile) << '\n'
      << "sigma_t = " << format_double(m.sigma_t) << " fs\n"
      << "delay_T = " << format_double(m.delay_T) << " fs\n"
      << "window_dt = " << format_double(m.window_dt) << " fs\n";
  if (m.window_origin) out << "window_origin = " << format_double(*m.window_origin) << " fs\n";
  out << "delta_t = " << format_double(m.delta_t) << " fs\n"
      << "scenario = " << to_string(m.scenario) << '\n'
      << "family = " << to_string(m.family) << '\n'
      << "lambda1 = " << format_double(m.lambda1) << '\n'
      << "lambda2 = " << format_double(m.lambda2) << '\n'
      << "exponent1 = " << format_double(m.exponent1) << '\n'
      << "exponent2 = " << format_double(m.exponent2) << '\n'
      << "n_trials = " << m.n_trials << '\n'
      << "seed = " << m.seed << '\n'
      << "partitions = " << cfg.partitions << '\n'
      << "lambda_source = " << to_string(m.lambda_source) << '\n'
      << "confidence_level = " << format_double(cfg.confidence_level) << '\n'
      << "kernel = " << to_string(m.kernel) << '\n'
      << "output_format = " << to_string(cfg.output_format) << '\n';
  if (!cfg.output_path.empty()) out << "output_path = " << cfg.output_path << '\n';
  return out.str();
}

} // namespace collapsim
