#include "dam/ofdm.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/FFT>

#include "dam/beam_mrt.hpp"
#include "dam/metrics.hpp"

namespace dam {

namespace {
const cplx kJ{0.0, 1.0};
}

void OfdmConfig::validate(int n_max) const {
  if (subcarriers < 1) throw ConfigError("need at least one subcarrier");
  if (cp_length < n_max) throw ConfigError("cyclic prefix shorter than the channel delay spread");
  if (symbols_per_block() < 1) throw ConfigError("coherence block shorter than one OFDM symbol");
}

std::vector<CVec> freq_response(const ChannelRealization& chan, const PhaseConfig& phases, int K) {
  if (K < 1) throw ConfigError("need at least one subcarrier");
  if (chan.n_max() >= K) throw ConfigError("maximum delay must be below the subcarrier count");
  const auto hc = cascaded_channels(chan, phases);
  const double norm = 1.0 / std::sqrt(static_cast<double>(K));
  std::vector<CVec> out;
  out.reserve(K);
  for (int k = 0; k < K; ++k) {
    CVec h = CVec::Zero(chan.num_antennas());
    for (size_t l = 0; l < hc.size(); ++l) {
      // Conjugated phase because h[k] is the column form of the row response.
      const double w = 2.0 * kPi * static_cast<double>((static_cast<long>(k) * chan.delays[l]) % K) / K;
      h += std::exp(kJ * w) * hc[l];
    }
    out.push_back(norm * h);
  }
  return out;
}

PhaseConfig ofdm_phase_optimize(const ChannelRealization& chan, const PhaseConfig& init,
                                double tol) {
  return coordinate_descent_phases(chan, init, tol);
}

std::vector<double> subcarrier_gains(const std::vector<CVec>& hk, double noise_power) {
  const double K = static_cast<double>(hk.size());
  std::vector<double> g;
  g.reserve(hk.size());
  for (const auto& h : hk) g.push_back(K * h.squaredNorm() / noise_power);
  return g;
}

double water_level(const std::vector<double>& gains, double total) {
  double gmax = 0;
  for (double g : gains) {
    if (g < 0) throw DomainError("negative subcarrier gain");
    gmax = std::max(gmax, g);
  }
  if (!(gmax > 0)) throw DegenerateChannel("all subcarrier gains are zero");
  if (!(total > 0)) return 0.0;
  auto filled = [&](double nu) {
    double s = 0;
    for (double g : gains)
      if (g > 0) s += std::max(0.0, nu - 1.0 / g);
    return s;
  };
  // The level lies between 1/gmax and 1/gmax + total.
  double lo = 1.0 / gmax;
  double hi = lo + total;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (filled(mid) < total) lo = mid;
    else hi = mid;
    if (hi - lo <= 1e-15 * hi) break;
  }
  return 0.5 * (lo + hi);
}

std::vector<double> water_filling(const std::vector<double>& gains, double total) {
  const double nu = water_level(gains, total);
  std::vector<double> p;
  p.reserve(gains.size());
  double s = 0;
  for (double g : gains) {
    p.push_back(g > 0 ? std::max(0.0, nu - 1.0 / g) : 0.0);
    s += p.back();
  }
  // Remove the bisection residue so the budget is met to rounding.
  if (s > 0)
    for (double& x : p) x *= total / s;
  return p;
}

double ofdm_spectral_efficiency(const std::vector<CVec>& hk, const std::vector<double>& powers,
                                double noise_power, int cp_length) {
  if (powers.size() != hk.size()) throw DomainError("need one power per subcarrier");
  const double K = static_cast<double>(hk.size());
  double r = 0;
  for (size_t k = 0; k < hk.size(); ++k)
    r += std::log2(1.0 + K * powers[k] * hk[k].squaredNorm() / noise_power);
  return r / (K + cp_length);
}

double ofdm_ber(const std::vector<CVec>& hk, const std::vector<double>& powers,
                double noise_power, int cp_length, int qam_order) {
  if (powers.size() != hk.size()) throw DomainError("need one power per subcarrier");
  const double K = static_cast<double>(hk.size());
  double sum = 0;
  for (size_t k = 0; k < hk.size(); ++k) {
    const double snr = K * powers[k] * hk[k].squaredNorm() / noise_power * K / (K + cp_length);
    sum += ber_awgn(snr, qam_order);
  }
  return sum / K;
}

std::vector<CVec> ofdm_beams(const std::vector<CVec>& hk, const std::vector<double>& powers) {
  if (powers.size() != hk.size()) throw DomainError("need one power per subcarrier");
  std::vector<CVec> u;
  u.reserve(hk.size());
  for (size_t k = 0; k < hk.size(); ++k) {
    const double n = hk[k].norm();
    u.push_back(n > 0 ? CVec(std::sqrt(powers[k]) / n * hk[k]) : CVec::Zero(hk[k].size()));
  }
  return u;
}

CMat ofdm_waveform(const CMat& symbols, const std::vector<CVec>& beams, int cp_length) {
  const Eigen::Index K = symbols.rows();
  if (static_cast<Eigen::Index>(beams.size()) != K) throw DomainError("need one beam per subcarrier");
  if (cp_length < 0 || cp_length > K) throw DomainError("cyclic prefix length out of range");
  const Eigen::Index nt = beams.front().size();
  const Eigen::Index S = symbols.cols();
  const Eigen::Index len = K + cp_length;
  CMat beam_mat(nt, K);
  for (Eigen::Index k = 0; k < K; ++k) beam_mat.col(k) = beams[k];

  Eigen::FFT<double> fft;
  const double unitary = std::sqrt(static_cast<double>(K));
  CMat out(nt, S * len);
  std::vector<cplx> freq(K), time(K);
  for (Eigen::Index s = 0; s < S; ++s) {
    const CMat X = beam_mat * symbols.col(s).asDiagonal();  // N_t x K
    for (Eigen::Index a = 0; a < nt; ++a) {
      for (Eigen::Index k = 0; k < K; ++k) freq[k] = X(a, k);
      fft.inv(time, freq);  // includes the 1/K factor
      const Eigen::Index base = s * len;
      for (Eigen::Index n = 0; n < K; ++n) out(a, base + cp_length + n) = unitary * time[n];
      for (Eigen::Index n = 0; n < cp_length; ++n)
        out(a, base + n) = out(a, base + K + n);
    }
  }
  return out;
}

OfdmDesign ofdm_design(const ChannelRealization& chan, const PhaseConfig& init, double power,
                       const OfdmConfig& cfg) {
  OfdmDesign d;
  d.phases = ofdm_phase_optimize(chan, init);
  d.hk = freq_response(chan, d.phases, cfg.subcarriers);
  d.powers = water_filling(subcarrier_gains(d.hk, chan.noise_power), cfg.subcarriers * power);
  d.spectral_efficiency =
      ofdm_spectral_efficiency(d.hk, d.powers, chan.noise_power, cfg.cp_length);
  return d;
}

}  // namespace dam
