#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dam/scenario.hpp"

namespace dam {

enum class ExperimentKind { Convergence, Antennas, Elements, Power, Papr };

ExperimentKind parse_kind(const std::string& name);
std::string kind_name(ExperimentKind kind);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Antennas;
  Scenario scenario;
  // Swept quantity: N_t, total IRS elements M (M_h fixed, M_v = M / M_h),
  // transmit power in dBm, or PAPR thresholds in dB. Unused for convergence.
  std::vector<double> sweep_values;
  std::vector<std::string> schemes;  // subset of zf, mrt, mmse, ofdm, asymptotic
  std::vector<int> qam_orders;       // BER experiment
  int monte_carlo_runs = 20;
  std::uint64_t seed = 1;
  std::string output_path;
  long papr_windows = 10000;  // antenna windows per scheme
  double zf_tolerance = 1e-3;
  double mmse_tolerance = 1e-3;
  int max_outer_iterations = 30;
  int threads = 0;  // 0: hardware concurrency

  void validate() const;
};

/// Section-VII scenario: L = 4 IRSs at (5,5,0), (5,-10,0), (50,75,0), (90,-15,0),
/// BS at the origin, user at (100,0,0), 128 MHz, -174 dBm/Hz, 1 ms coherence,
/// Rician factor 5 dB, K = 512, CP 77, N_t = 128, M = 16 x 16, P = 40 dBm.
ExperimentConfig default_reference_config();

/// default_reference_config with the sweep, schemes and sizes each experiment uses by default.
ExperimentConfig default_config(ExperimentKind kind);

/// Applies `key = value` lines ('#' starts a comment) on top of base.
/// Throws ConfigError naming the line on any unknown key or malformed value.
ExperimentConfig parse_config(std::istream& in, ExperimentConfig base);
ExperimentConfig load_config(const std::string& path, ExperimentConfig base);

/// Rows of preformatted cells; numbers use 6 significant digits.
struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row);
};

std::string format_number(double x);  // "%.6g", empty for NaN
std::string to_csv(const ResultTable& table);
/// Header plus one line per row, LF endings. Throws Error if unwritable.
void emit_csv(const ResultTable& table, const std::string& path);

/// Runs the configured experiment. Realizations use seeds derived from
/// (config.seed, run index), so the table depends only on the config.
/// Per-iteration progress goes to log when given.
ResultTable run_experiment(const ExperimentConfig& config, std::ostream* log = nullptr);

}  // namespace dam
