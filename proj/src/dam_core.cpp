#include "dam/dam_core.hpp"

#include <algorithm>
#include <cmath>

#include "dam/random.hpp"

namespace dam {

namespace {

const cplx kJ{0.0, 1.0};

void check_paths(const ChannelRealization& chan, const BeamformerSet& beams) {
  if (static_cast<int>(beams.f.size()) != chan.num_paths())
    throw DomainError("beam count must equal number of paths");
  for (const auto& f : beams.f)
    if (f.size() != chan.h0.size()) throw DomainError("beam length must equal N_t");
}

}  // namespace

PhaseConfig PhaseConfig::zeros(int num_irs, int elements) {
  PhaseConfig p;
  p.v.assign(num_irs, CVec::Ones(elements));
  return p;
}

PhaseConfig PhaseConfig::from_thetas(const std::vector<RVec>& thetas) {
  PhaseConfig p;
  for (const auto& t : thetas) {
    CVec v(t.size());
    for (Eigen::Index m = 0; m < t.size(); ++m) v[m] = std::exp(-kJ * t[m]);
    p.v.push_back(v);
  }
  return p;
}

PhaseConfig PhaseConfig::from_stacked(const CVec& stacked, int num_irs, int elements) {
  if (stacked.size() < static_cast<Eigen::Index>(num_irs) * elements)
    throw DomainError("stacked phase vector too short");
  PhaseConfig p;
  for (int l = 0; l < num_irs; ++l) {
    CVec v(elements);
    for (int m = 0; m < elements; ++m) {
      const cplx z = stacked[static_cast<Eigen::Index>(l) * elements + m];
      v[m] = std::abs(z) >= 1e-12 ? z / std::abs(z) : cplx{1.0, 0.0};
    }
    p.v.push_back(v);
  }
  return p;
}

std::vector<RVec> PhaseConfig::thetas() const {
  std::vector<RVec> out;
  for (const auto& x : v) {
    RVec t(x.size());
    for (Eigen::Index m = 0; m < x.size(); ++m) t[m] = -std::arg(x[m]);
    out.push_back(t);
  }
  return out;
}

CVec PhaseConfig::stacked() const {
  const int L = num_irs();
  const int M = elements();
  CVec s(static_cast<Eigen::Index>(L) * M + 1);
  for (int l = 0; l < L; ++l) s.segment(static_cast<Eigen::Index>(l) * M, M) = v[l];
  s[s.size() - 1] = 1.0;
  return s;
}

bool PhaseConfig::unit_modulus(double tol) const {
  for (const auto& x : v)
    for (Eigen::Index m = 0; m < x.size(); ++m)
      if (std::abs(std::abs(x[m]) - 1.0) > tol) return false;
  return true;
}

double BeamformerSet::total_power() const {
  double p = 0;
  for (const auto& x : f) p += x.squaredNorm();
  return p;
}

std::vector<int> delay_precompensation(const std::vector<int>& delays) {
  if (delays.empty()) throw DomainError("delay list is empty");
  const int nmax = *std::max_element(delays.begin(), delays.end());
  std::vector<int> k;
  for (int n : delays) k.push_back(nmax - n);
  return k;
}

CMat cascade_matrix(const CMat& G, const CVec& h) {
  return G.adjoint() * h.asDiagonal();
}

std::vector<CVec> cascaded_channels(const ChannelRealization& chan, const PhaseConfig& phases) {
  const int L = chan.num_irs();
  if (phases.num_irs() != L) throw DomainError("phase config does not match IRS count");
  std::vector<CVec> out;
  out.push_back(chan.h0);
  for (int l = 0; l < L; ++l) {
    if (phases.v[l].size() != chan.h[l].size())
      throw DomainError("phase vector length does not match IRS size");
    out.push_back(chan.G[l].adjoint() * chan.h[l].cwiseProduct(phases.v[l]));
  }
  return out;
}

CVec stacked_path_gain(const ChannelRealization& chan, const std::vector<CVec>& per_path) {
  const int L = chan.num_irs();
  const int M = chan.elements();
  if (static_cast<int>(per_path.size()) != L + 1) throw DomainError("need one vector per path");
  CVec out(static_cast<Eigen::Index>(L) * M + 1);
  for (int l = 0; l < L; ++l)
    out.segment(static_cast<Eigen::Index>(l) * M, M) =
        chan.h[l].conjugate().cwiseProduct(chan.G[l] * per_path[l + 1]);
  out[out.size() - 1] = chan.h0.dot(per_path[0]);
  return out;
}

EffectiveChannelTable build_effective_tables(const std::vector<CVec>& cascaded,
                                             const std::vector<int>& delays,
                                             const BeamformerSet& beams) {
  const int P = static_cast<int>(delays.size());
  if (static_cast<int>(cascaded.size()) != P || static_cast<int>(beams.f.size()) != P)
    throw DomainError("path counts disagree");
  const int nt = static_cast<int>(cascaded.front().size());
  const auto [lo, hi] = std::minmax_element(delays.begin(), delays.end());

  EffectiveChannelTable t;
  t.span = *hi - *lo;
  const int S = t.num_slots();
  t.g.assign(P, std::vector<CVec>(S, CVec::Zero(nt)));
  t.e.assign(P, std::vector<CVec>(S, CVec::Zero(nt)));
  t.g_active.assign(P, std::vector<char>(S, 0));
  t.e_active.assign(P, std::vector<char>(S, 0));

  for (int a = 0; a < P; ++a) {
    for (int b = 0; b < P; ++b) {
      if (a == b) continue;
      const int i = delays[a] - delays[b];
      if (i == 0) throw DelayCollision("two paths share a tap");
      // Beam of path a reaches the receiver through path b, i = n_a - n_b.
      t.g[a][t.slot(i)] = cascaded[b];
      t.g_active[a][t.slot(i)] = 1;
      t.e[b][t.slot(i)] = beams.f[a];
      t.e_active[b][t.slot(i)] = 1;
    }
  }
  return t;
}

EffectiveChannelTable build_effective_tables(const ChannelRealization& chan,
                                             const PhaseConfig& phases,
                                             const BeamformerSet& beams) {
  check_paths(chan, beams);
  return build_effective_tables(cascaded_channels(chan, phases), chan.delays, beams);
}

SinrTerms sinr_terms(const ChannelRealization& chan, const PhaseConfig& phases,
                     const BeamformerSet& beams) {
  check_paths(chan, beams);
  const auto hc = cascaded_channels(chan, phases);
  const auto t = build_effective_tables(hc, chan.delays, beams);
  const int P = chan.num_paths();

  SinrTerms r;
  cplx d{0.0, 0.0};
  for (int l = 0; l < P; ++l) d += hc[l].dot(beams.f[l]);
  r.desired = std::norm(d);
  for (int i = -t.span; i <= t.span; ++i) {
    if (i == 0) continue;
    cplx s{0.0, 0.0};
    for (int lp = 0; lp < P; ++lp)
      if (t.g_active[lp][t.slot(i)]) s += t.g_at(lp, i).dot(beams.f[lp]);
    r.isi += std::norm(s);
  }
  r.noise = chan.noise_power;
  return r;
}

double sinr_closed_form(const ChannelRealization& chan, const PhaseConfig& phases,
                        const BeamformerSet& beams) {
  return sinr_terms(chan, phases, beams).sinr();
}

CMat synthesize_transmit(const CVec& symbols, const BeamformerSet& beams) {
  if (beams.f.empty() || beams.f.size() != beams.kappa.size())
    throw DomainError("beam set needs one delay per beam");
  const int kmax = *std::max_element(beams.kappa.begin(), beams.kappa.end());
  const Eigen::Index T = symbols.size();
  CMat x = CMat::Zero(beams.f.front().size(), T + kmax);
  for (size_t l = 0; l < beams.f.size(); ++l)
    x.middleCols(beams.kappa[l], T) += beams.f[l] * symbols.transpose();
  return x;
}

CVec propagate(const std::vector<CVec>& cascaded, const std::vector<int>& delays,
               const CMat& x) {
  const int nmax = *std::max_element(delays.begin(), delays.end());
  CVec y = CVec::Zero(x.cols() + nmax);
  for (size_t l = 0; l < cascaded.size(); ++l)
    y.segment(delays[l], x.cols()) += (cascaded[l].adjoint() * x).transpose();
  return y;
}

MonteCarloSinr monte_carlo_sinr(const ChannelRealization& chan, const PhaseConfig& phases,
                                const BeamformerSet& beams, long n_symbols,
                                std::uint64_t noise_seed) {
  check_paths(chan, beams);
  if (n_symbols < 1000) throw DomainError("Monte Carlo SINR needs at least 1000 symbols");
  const auto hc = cascaded_channels(chan, phases);
  const int nmax = chan.n_max();
  const int span = chan.n_span();
  const long T = n_symbols + 2L * span;

  Rng sym_rng(derive_seed(noise_seed, 1));
  std::bernoulli_distribution bit(0.5);
  const double a = 1.0 / std::sqrt(2.0);
  CVec s(T);
  for (long n = 0; n < T; ++n)
    s[n] = cplx{bit(sym_rng) ? a : -a, bit(sym_rng) ? a : -a};

  // Noiseless received samples for symbol indices m, r[m] = y[m + n_max],
  // evaluated block by block so the N_t x T waveform is never held in full.
  const int kmax = *std::max_element(beams.kappa.begin(), beams.kappa.end());
  CVec y = CVec::Zero(T + kmax + nmax);
  const long block = 4096;
  for (long b0 = 0; b0 < T; b0 += block) {
    const long len = std::min(block, T - b0);
    const CMat x = synthesize_transmit(s.segment(b0, len), beams);
    y.segment(b0, len + kmax + nmax) += propagate(hc, chan.delays, x);
  }

  // Steady state: every symbol reaching sample m + n_max exists.
  const long m0 = span;
  const long m1 = T - span;
  const long N = m1 - m0;
  cplx num{0.0, 0.0};
  double den = 0;
  for (long m = m0; m < m1; ++m) {
    num += std::conj(s[m]) * y[m + nmax];
    den += std::norm(s[m]);
  }
  const cplx gain = num / den;
  double resid = 0;
  for (long m = m0; m < m1; ++m) resid += std::norm(y[m + nmax] - gain * s[m]);

  Rng noise_rng(derive_seed(noise_seed, 2));
  double noise = 0;
  for (long m = 0; m < N; ++m) noise += std::norm(complex_gaussian(noise_rng, chan.noise_power));

  MonteCarloSinr r;
  r.desired = std::norm(gain) * den / static_cast<double>(N);
  r.isi = resid / static_cast<double>(N);
  r.noise = noise / static_cast<double>(N);
  r.sinr = r.desired / (r.isi + r.noise);
  return r;
}

}  // namespace dam
