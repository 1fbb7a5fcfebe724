#pragma once

#include <vector>

#include "dam/dam_core.hpp"

namespace dam {

// Large-array analysis. Every function here needs the LoS metadata produced by
// sample_channel (G_l = alpha_l a_R a_T^H, h0 LoS part alpha_0 a_T) and throws
// Unsupported otherwise.

/// v_l = exp(j(arg(alpha_l conj(h_l) .* a_R) + arg(alpha_0))): every cascaded
/// element arrives in phase with the direct LoS component.
PhaseConfig asymptotic_phases(const ChannelRealization& chan);

/// Per-path amplitude a_0 = |alpha_0|, a_l = |alpha_l| ||h_l||_1.
std::vector<double> asymptotic_path_amplitudes(const ChannelRealization& chan);

/// p_l = P a_l^2 / sum_i a_i^2.
std::vector<double> asymptotic_power_allocation(const ChannelRealization& chan, double power);

/// P / sigma^2 * N_t * sum_l a_l^2.
double asymptotic_snr(const ChannelRealization& chan, double power);

struct DeploymentGains {
  double direct = 0;                 // |alpha_0|
  std::vector<double> cascade;       // |alpha_l beta_l|, l = 1..L
  int elements = 1;                  // M per IRS
  int antennas = 1;                  // N_t
};

struct DeploymentComparison {
  double distributed = 0;
  double centralized = 0;
  int centralized_index = 1;  // 1-based IRS that hosts all L*M elements
};

/// Distributed: P/sigma^2 N_t (|alpha_0|^2 + M^2 sum |alpha_l beta_l|^2).
/// Centralized: all L*M elements at one IRS (default: the strongest,
/// centralized_index = 0 picks it), P/sigma^2 N_t (|alpha_0|^2 + L^2 M^2 |alpha_c beta_c|^2).
DeploymentComparison deployment_compare(const DeploymentGains& g, double power,
                                        double noise_power, int centralized_index = 0);

/// Gains read from a realization; |beta_l| is taken as ||h_l||_1 / M, exact for
/// planar-array LoS IRS-user links.
DeploymentComparison deployment_compare(const ChannelRealization& chan, double power,
                                        int centralized_index = 0);

/// max over path pairs of |a_T(phi_l)^H a_T(phi_l')| / N_t.
double orthogonality_residual(const std::vector<double>& angles, int antennas);
double orthogonality_residual(const ChannelRealization& chan);

struct AsymptoticReport {
  double snr = 0;
  std::vector<double> p;
  PhaseConfig phases;
  double gamma_distributed = 0;
  double gamma_centralized = 0;
  double orthogonality_residual = 0;
};

AsymptoticReport asymptotic_report(const ChannelRealization& chan, double power);

}  // namespace dam
