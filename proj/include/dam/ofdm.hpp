#pragma once

#include <vector>

#include "dam/dam_core.hpp"

namespace dam {

struct OfdmConfig {
  int subcarriers = 512;  // K
  int cp_length = 77;     // N_CP
  long coherence_samples = 128000;

  /// n_OFDM = floor(n_c / (K + N_CP)).
  long symbols_per_block() const { return coherence_samples / (subcarriers + cp_length); }
  /// Fraction of the coherence block spent on cyclic prefixes.
  double cp_overhead() const {
    return static_cast<double>(symbols_per_block()) * cp_length / coherence_samples;
  }
  /// Throws ConfigError unless N_CP >= n_max and at least one symbol fits.
  void validate(int n_max) const;
};

/// Per-subcarrier channels, k = 0..K-1, in the column convention
/// h[k]^H = K^-1/2 sum_l h~_l^H exp(-j 2 pi k n_l / K). Throws ConfigError when
/// n_max >= K.
std::vector<CVec> freq_response(const ChannelRealization& chan, const PhaseConfig& phases, int K);

/// Maximizes ||h0||^2 + sum_l ||G_l^H diag(h_l) v_l||^2, i.e. the total
/// frequency-domain channel energy; same coordinate descent as path-based MRT.
PhaseConfig ofdm_phase_optimize(const ChannelRealization& chan, const PhaseConfig& init,
                                double tol = 1e-4);

/// g_k = K ||h[k]||^2 / sigma^2.
std::vector<double> subcarrier_gains(const std::vector<CVec>& hk, double noise_power);

/// p_k = max(0, nu - 1/g_k) with sum p_k = total. Throws DegenerateChannel when
/// every gain is zero.
std::vector<double> water_filling(const std::vector<double>& gains, double total);

/// Water level of the allocation above (exposed for KKT checks).
double water_level(const std::vector<double>& gains, double total);

/// (1 / (K + N_CP)) sum_k log2(1 + K p_k ||h[k]||^2 / sigma^2).
double ofdm_spectral_efficiency(const std::vector<CVec>& hk, const std::vector<double>& powers,
                                double noise_power, int cp_length);

/// Mean over k of ber_awgn(K p_k ||h[k]||^2 / sigma^2 * K / (K + N_CP)).
double ofdm_ber(const std::vector<CVec>& hk, const std::vector<double>& powers,
                double noise_power, int cp_length, int qam_order);

/// u_k = sqrt(p_k) h[k] / ||h[k]|| (zero for a null subcarrier).
std::vector<CVec> ofdm_beams(const std::vector<CVec>& hk, const std::vector<double>& powers);

/// symbols is K x S (one column per OFDM symbol). Each antenna stream is the
/// unitary inverse DFT of u_k s_k with an N_CP-sample cyclic prefix in front.
/// Output N_t x S (K + N_CP).
CMat ofdm_waveform(const CMat& symbols, const std::vector<CVec>& beams, int cp_length);

struct OfdmDesign {
  PhaseConfig phases;
  std::vector<CVec> hk;
  std::vector<double> powers;
  double spectral_efficiency = 0;
};

/// Phase optimization, water-filling over total budget K P, and the resulting
/// effective spectral efficiency.
OfdmDesign ofdm_design(const ChannelRealization& chan, const PhaseConfig& init, double power,
                       const OfdmConfig& cfg);

}  // namespace dam
