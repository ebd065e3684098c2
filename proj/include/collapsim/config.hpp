#pragma once

// Run configuration as a flat `key = value` document.
//
//   # comment
//   alpha2   = 0.75
//   sigma_t  = 1 ps        # times accept fs (default), ps, ns, us
//   delta_t  = 0.1 fs
//
// Keys: alpha2, profile, sigma_t, delay_T, window_dt, window_origin, delta_t,
// scenario, family, lambda1, lambda2, exponent1, exponent2, n_trials, seed,
// partitions, lambda_source, confidence_level, output_path, output_format,
// kernel. Every key is optional; missing keys take the worked-example
// defaults.

#include <string>
#include <string_view>

#include "collapsim/model.hpp"

namespace collapsim {

enum class OutputFormat { Json, Csv };

std::string_view to_string(OutputFormat f) noexcept;

struct RunConfig {
  ModelConfig model;
  std::string output_path; ///< empty: stdout, or $COLLAPSIM_OUTPUT_DIR/<command>.<ext> when set
  OutputFormat output_format = OutputFormat::Json;
  double confidence_level = 0.95;
  unsigned partitions = 0; ///< 0: one per hardware thread

  bool operator==(const RunConfig&) const = default;

  /// Throws ConfigError naming the offending key.
  void validate() const;
};

/// Environment variable naming the default output directory.
inline constexpr const char* kOutputDirEnv = "COLLAPSIM_OUTPUT_DIR";

/// Parses and validates a document. Errors name the key and line number.
RunConfig parse_config(std::string_view text);

/// Canonical document for a configuration; parse_config(emit_config(c)) == c.
std::string emit_config(const RunConfig& config);

/// Time value with optional unit suffix (fs, ps, ns, us), in femtoseconds.
double parse_time_fs(std::string_view text);

/// Shortest round-trip decimal form of a double.
std::string format_double(double value);

} // namespace collapsim
