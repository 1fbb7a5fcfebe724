#include "dam/metrics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "dam/beam_zf.hpp"
#include "dam/modulation.hpp"
#include "dam/random.hpp"

namespace dam {

double dam_guard_overhead(int n_max, long n_c) {
  if (n_c <= 0) throw ConfigError("coherence block must be positive");
  return 2.0 * n_max / static_cast<double>(n_c);
}

double dam_spectral_efficiency(double gamma, int n_max, long n_c) {
  if (n_c <= 2L * n_max) throw ConfigError("coherence block shorter than the DAM guard interval");
  return (1.0 - dam_guard_overhead(n_max, n_c)) * std::log2(1.0 + gamma);
}

double ber_awgn(double gamma, int qam_order) { return qam(qam_order).ber(gamma); }

double ber_dam_zf(const ZfSolution& zf, int qam_order) { return ber_awgn(zf.snr, qam_order); }

double ber_dam_monte_carlo(const ChannelRealization& chan, const PhaseConfig& phases,
                           const BeamformerSet& beams, int qam_order, long n_symbols,
                           std::uint64_t seed) {
  if (n_symbols < 1) throw DomainError("need at least one symbol");
  const auto& c = qam(qam_order);
  const auto hc = cascaded_channels(chan, phases);
  const int span = chan.n_span();
  // taps[d + span] multiplies s[m - d].
  CVec taps = CVec::Zero(2 * span + 1);
  for (size_t l = 0; l < hc.size(); ++l)
    for (size_t lp = 0; lp < hc.size(); ++lp)
      taps[chan.delays[l] - chan.delays[lp] + span] += hc[l].dot(beams.f[lp]);
  const cplx gain = taps[span];
  if (std::abs(gain) == 0) throw DegenerateChannel("zero desired gain");

  Rng rng(seed);
  std::uniform_int_distribution<unsigned> pick(0, static_cast<unsigned>(qam_order - 1));
  const long block = 1 << 16;
  std::vector<unsigned> labels;
  CVec s;
  long errors = 0;
  for (long done = 0; done < n_symbols; done += block) {
    const long len = std::min(block, n_symbols - done);
    labels.resize(len + 2 * span);
    s.resize(len + 2 * span);
    for (long i = 0; i < s.size(); ++i) s[i] = c.modulate(labels[i] = pick(rng));
    for (long m = span; m < span + len; ++m) {
      cplx y = complex_gaussian(rng, chan.noise_power);
      for (int d = -span; d <= span; ++d) y += taps[d + span] * s[m - d];
      errors += std::popcount(labels[m] ^ c.demodulate(y / gain));
    }
  }
  return static_cast<double>(errors) / (static_cast<double>(n_symbols) * c.bits());
}

std::vector<double> papr_windows(const CMat& waveform, int window) {
  if (window < 1) throw DomainError("PAPR window must be positive");
  const Eigen::Index n = waveform.cols() / window;
  std::vector<double> out;
  out.reserve(static_cast<size_t>(n * waveform.rows()));
  for (Eigen::Index a = 0; a < waveform.rows(); ++a)
    for (Eigen::Index w = 0; w < n; ++w) {
      const auto seg = waveform.row(a).segment(w * window, window);
      const double mean = seg.squaredNorm() / window;
      if (!(mean > 0)) throw DomainError("zero-power waveform window");
      out.push_back(seg.cwiseAbs2().maxCoeff() / mean);
    }
  return out;
}

std::vector<double> ccdf(const std::vector<double>& papr_linear,
                         const std::vector<double>& thresholds_db) {
  if (papr_linear.empty()) throw DomainError("no PAPR samples");
  std::vector<double> out;
  for (double t : thresholds_db) {
    const double lin = db_to_linear(t);
    long above = 0;
    for (double p : papr_linear)
      if (p > lin * (1.0 + 1e-12)) ++above;
    out.push_back(static_cast<double>(above) / static_cast<double>(papr_linear.size()));
  }
  return out;
}

std::vector<double> papr_ccdf(const CMat& waveform, const std::vector<double>& thresholds_db,
                              int window) {
  return ccdf(papr_windows(waveform, window), thresholds_db);
}

}  // namespace dam
