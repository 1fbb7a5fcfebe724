#include "dam/beam_mmse.hpp"

#include <cmath>

#include <Eigen/Cholesky>

namespace dam {

namespace {

// Solves (c I + A A^H) x = b through the r x r system c I + A^H A, which is
// cheap because A has at most L(L+1) columns (one per populated delay slot).
CVec solve_low_rank(const CMat& A, double c, const CVec& b) {
  if (A.cols() == 0) return b / c;
  CMat S = A.adjoint() * A;
  S.diagonal().array() += c;
  Eigen::LLT<CMat> llt(S);
  if (llt.info() != Eigen::Success) throw DomainError("interference covariance not positive definite");
  return (b - A * llt.solve(A.adjoint() * b)) / c;
}

// Columns g-bar[i] = [g_0[i]; ...; g_L[i]] for every populated slot.
CMat stacked_interference(const EffectiveChannelTable& t, int nt) {
  const int P = static_cast<int>(t.g.size());
  std::vector<int> slots;
  for (int s = 0; s < t.num_slots(); ++s)
    for (int lp = 0; lp < P; ++lp)
      if (t.g_active[lp][s]) {
        slots.push_back(s);
        break;
      }
  CMat A = CMat::Zero(static_cast<Eigen::Index>(P) * nt, static_cast<Eigen::Index>(slots.size()));
  for (size_t k = 0; k < slots.size(); ++k)
    for (int lp = 0; lp < P; ++lp)
      A.col(k).segment(static_cast<Eigen::Index>(lp) * nt, nt) = t.g[lp][slots[k]];
  return A;
}

// Columns e~[i] of the phase-domain interference for every populated slot.
CMat phase_interference(const ChannelRealization& chan, const BeamformerSet& beams) {
  const auto t = build_effective_tables(cascaded_channels(chan, PhaseConfig::zeros(
                                            chan.num_irs(), chan.elements())),
                                        chan.delays, beams);
  const int P = chan.num_paths();
  const int nt = chan.num_antennas();
  std::vector<CVec> cols;
  for (int s = 0; s < t.num_slots(); ++s) {
    bool any = false;
    std::vector<CVec> per_path(P, CVec::Zero(nt));
    for (int l = 0; l < P; ++l)
      if (t.e_active[l][s]) {
        per_path[l] = t.e[l][s];
        any = true;
      }
    if (any) cols.push_back(stacked_path_gain(chan, per_path));
  }
  const Eigen::Index n = static_cast<Eigen::Index>(chan.num_irs()) * chan.elements() + 1;
  CMat E(n, static_cast<Eigen::Index>(cols.size()));
  for (size_t k = 0; k < cols.size(); ++k) E.col(k) = cols[k];
  return E;
}

}  // namespace

MmseBeams mmse_beams(const ChannelRealization& chan, const PhaseConfig& phases, double power) {
  const int P = chan.num_paths();
  const int nt = chan.num_antennas();
  const auto hc = cascaded_channels(chan, phases);
  BeamformerSet dummy;
  dummy.f.assign(P, CVec::Zero(nt));
  const auto t = build_effective_tables(hc, chan.delays, dummy);

  CVec hbar(static_cast<Eigen::Index>(P) * nt);
  for (int l = 0; l < P; ++l) hbar.segment(static_cast<Eigen::Index>(l) * nt, nt) = hc[l];
  if (!(hbar.squaredNorm() > 0)) throw DegenerateChannel("all path channels are zero");

  const CVec x = solve_low_rank(stacked_interference(t, nt), chan.noise_power / power, hbar);
  const CVec f = std::sqrt(power) * x / x.norm();

  MmseBeams out;
  for (int l = 0; l < P; ++l) out.beams.f.push_back(f.segment(static_cast<Eigen::Index>(l) * nt, nt));
  out.beams.kappa = delay_precompensation(chan.delays);
  out.sinr = hbar.dot(x).real();
  return out;
}

double phase_rayleigh_quotient(const ChannelRealization& chan, const BeamformerSet& beams,
                               const CVec& v) {
  const CVec ft = stacked_path_gain(chan, beams.f);
  const CMat E = phase_interference(chan, beams);
  const double den = chan.noise_power * v.squaredNorm() + (E.adjoint() * v).squaredNorm();
  return std::norm(v.dot(ft)) / den;
}

MmsePhaseStep mmse_phase_step(const ChannelRealization& chan, const BeamformerSet& beams) {
  const int L = chan.num_irs();
  const int M = chan.elements();
  const CVec ft = stacked_path_gain(chan, beams.f);
  const CMat E = phase_interference(chan, beams);
  CVec v = solve_low_rank(E, chan.noise_power, ft);
  if (!(v.norm() > 0)) throw DegenerateChannel("phase-domain gain is zero");
  v /= v.norm();
  // The quotient is blind to a common rotation; anchor it on the direct-link
  // entry, which is fixed to 1 in the physical system.
  const cplx last = v[v.size() - 1];
  if (std::abs(last) > 0) v *= std::conj(last) / std::abs(last);

  MmsePhaseStep out;
  out.relaxed = v;
  const double den = chan.noise_power * v.squaredNorm() + (E.adjoint() * v).squaredNorm();
  out.quotient = std::norm(v.dot(ft)) / den;
  out.phases = PhaseConfig::from_stacked(v, L, M);
  return out;
}

PhaseConfig mmse_phases(const ChannelRealization& chan, const BeamformerSet& beams) {
  return mmse_phase_step(chan, beams).phases;
}

MmseSolution mmse_alternating(const ChannelRealization& chan, const PhaseConfig& init,
                              double power, double tol, int max_iters) {
  MmseSolution sol;
  PhaseConfig phases = init;
  double before = 0;
  double prev = 0;
  for (int it = 1; it <= max_iters; ++it) {
    const MmseBeams mb = mmse_beams(chan, phases, power);
    MmseIteration rec;
    rec.before_beam = before;
    rec.after_beam = sinr_closed_form(chan, phases, mb.beams);
    if (it == 1 || rec.after_beam > sol.sinr) {
      sol.sinr = rec.after_beam;
      sol.beams = mb.beams;
      sol.phases = phases;
    }
    sol.iterations = it;
    const bool done = chan.num_irs() == 0 || it == max_iters ||
                      (it > 1 && std::abs(rec.after_beam - prev) / prev < tol);
    if (done) {
      rec.after_phase = rec.after_beam;
      sol.trace.push_back(rec);
      break;
    }
    prev = rec.after_beam;
    phases = mmse_phases(chan, mb.beams);
    rec.after_phase = sinr_closed_form(chan, phases, mb.beams);
    before = rec.after_phase;
    sol.trace.push_back(rec);
  }
  return sol;
}

}  // namespace dam
