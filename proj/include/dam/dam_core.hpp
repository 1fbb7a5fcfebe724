#pragma once

#include <cstdint>
#include <vector>

#include "dam/scenario.hpp"

namespace dam {

/// Per-IRS reflection vectors. Entry m of v[l] is exp(-j theta_{l,m}), so the
/// row cascade v^H diag(h^H) G equals h^H diag(exp(j theta)) G.
struct PhaseConfig {
  std::vector<CVec> v;

  static PhaseConfig zeros(int num_irs, int elements);  // all theta = 0
  static PhaseConfig from_thetas(const std::vector<RVec>& thetas);
  /// First L*M entries of a stacked vector [v_1; ...; v_L; 1], projected to unit
  /// modulus (see extract_phases).
  static PhaseConfig from_stacked(const CVec& stacked, int num_irs, int elements);

  int num_irs() const { return static_cast<int>(v.size()); }
  int elements() const { return v.empty() ? 0 : static_cast<int>(v.front().size()); }
  std::vector<RVec> thetas() const;
  /// [v_1; ...; v_L; 1], length L*M + 1.
  CVec stacked() const;
  bool unit_modulus(double tol = 1e-9) const;
};

struct BeamformerSet {
  std::vector<CVec> f;     // L + 1 beams
  std::vector<int> kappa;  // n_max - n_l

  double total_power() const;
};

/// kappa[l] = max(delays) - delays[l].
std::vector<int> delay_precompensation(const std::vector<int>& delays);

/// G^H diag(h), the N_t x M matrix whose column m is the cascade through element m.
CMat cascade_matrix(const CMat& G, const CVec& h);

/// h~_0 = h0, h~_l = G_l^H diag(h_l) v_l.
std::vector<CVec> cascaded_channels(const ChannelRealization& chan, const PhaseConfig& phases);

/// Stacked per-element gains [diag(h_1^H) G_1 x_1; ...; diag(h_L^H) G_L x_L; h0^H x_0]
/// for one N_t vector per path, so that stacked_phases^H * result equals
/// sum_l h~_l^H x_l.
CVec stacked_path_gain(const ChannelRealization& chan, const std::vector<CVec>& per_path);

/// Interference grouped by delay difference i = n_l' - n_l, i in [-span, span].
/// Slot i = 0 is never populated.
struct EffectiveChannelTable {
  int span = 0;
  // g[l'][slot]: cascaded channel of the unique path l with n_l = n_l' - i.
  std::vector<std::vector<CVec>> g;
  // e[l][slot]: beam of the unique path l' with n_l' = n_l + i.
  std::vector<std::vector<CVec>> e;
  std::vector<std::vector<char>> g_active;
  std::vector<std::vector<char>> e_active;

  int slot(int i) const { return i + span; }
  int num_slots() const { return 2 * span + 1; }
  const CVec& g_at(int lp, int i) const { return g[lp][slot(i)]; }
  const CVec& e_at(int l, int i) const { return e[l][slot(i)]; }
};

EffectiveChannelTable build_effective_tables(const ChannelRealization& chan,
                                             const PhaseConfig& phases,
                                             const BeamformerSet& beams);
/// Same, with the cascaded channels already formed.
EffectiveChannelTable build_effective_tables(const std::vector<CVec>& cascaded,
                                             const std::vector<int>& delays,
                                             const BeamformerSet& beams);

struct SinrTerms {
  double desired = 0;
  double isi = 0;
  double noise = 0;
  double sinr() const { return desired / (isi + noise); }
};

SinrTerms sinr_terms(const ChannelRealization& chan, const PhaseConfig& phases,
                     const BeamformerSet& beams);
double sinr_closed_form(const ChannelRealization& chan, const PhaseConfig& phases,
                        const BeamformerSet& beams);

/// x[n] = sum_l f_l s[n - kappa_l], n = 0 .. len(symbols) + max(kappa) - 1.
CMat synthesize_transmit(const CVec& symbols, const BeamformerSet& beams);

/// Noiseless tapped-delay-line output y[n] = sum_l h~_l^H x[n - n_l] for a
/// waveform starting at n = 0. Output length cols(x) + max(delays).
CVec propagate(const std::vector<CVec>& cascaded, const std::vector<int>& delays,
               const CMat& x);

struct MonteCarloSinr {
  double desired = 0;
  double isi = 0;
  double noise = 0;
  double sinr = 0;
};

/// Time-domain estimate: unit-power QPSK symbols through synthesize_transmit and
/// the tapped channel, sampled at lag n_max over the steady-state window.
/// The desired gain is the least-squares fit of the output to the symbol; ISI
/// is the residual of the noiseless output; noise power is measured on an
/// independent CN(0, sigma^2) stream drawn from noise_seed.
MonteCarloSinr monte_carlo_sinr(const ChannelRealization& chan, const PhaseConfig& phases,
                                const BeamformerSet& beams, long n_symbols,
                                std::uint64_t noise_seed);

}  // namespace dam
