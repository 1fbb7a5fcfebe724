#pragma once

#include <cstdint>
#include <vector>

#include "dam/dam_core.hpp"

namespace dam {

struct ZfSolution;

/// Guard fraction 2 n_max / n_c of one coherence block.
double dam_guard_overhead(int n_max, long n_c);

/// (n_c - 2 n_max) / n_c * log2(1 + gamma). Throws ConfigError if n_c <= 2 n_max.
double dam_spectral_efficiency(double gamma, int n_max, long n_c);

/// Bit error rate of Gray-labelled QAM over AWGN at symbol SNR gamma (exact for
/// the per-axis slicing detector of QamConstellation).
double ber_awgn(double gamma, int qam_order);

/// ber_awgn at the ISI-free ZF SNR.
double ber_dam_zf(const ZfSolution& zf, int qam_order);

/// Simulated bit error rate of DAM with arbitrary beams. Random Gray-labelled
/// symbols pass through the per-delay ISI taps sum h~_l^H f_l' (delay
/// n_l - n_l') sampled at lag n_max, plus CN(0, sigma^2) noise; detection
/// divides by the desired gain and slices. Throws DegenerateChannel when the
/// desired gain is zero.
double ber_dam_monte_carlo(const ChannelRealization& chan, const PhaseConfig& phases,
                           const BeamformerSet& beams, int qam_order, long n_symbols,
                           std::uint64_t seed);

/// PAPR (linear) of every window of `window` consecutive samples on every
/// antenna row. Trailing samples that do not fill a window are ignored. Throws
/// DomainError for an all-zero window.
std::vector<double> papr_windows(const CMat& waveform, int window);

/// Fraction of PAPR values strictly above each threshold (dB).
std::vector<double> ccdf(const std::vector<double>& papr_linear,
                         const std::vector<double>& thresholds_db);

std::vector<double> papr_ccdf(const CMat& waveform, const std::vector<double>& thresholds_db,
                              int window);

}  // namespace dam
