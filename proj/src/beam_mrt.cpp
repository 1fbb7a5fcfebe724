#include "dam/beam_mrt.hpp"

#include <cmath>

namespace dam {

namespace {
const cplx kJ{0.0, 1.0};
}

BeamformerSet mrt_beams(const ChannelRealization& chan, const PhaseConfig& phases, double power) {
  const auto hc = cascaded_channels(chan, phases);
  double total = 0;
  for (const auto& x : hc) total += x.squaredNorm();
  if (!(total > 0)) throw DegenerateChannel("all path channels are zero");
  BeamformerSet b;
  const double scale = std::sqrt(power / total);
  for (const auto& x : hc) b.f.push_back(scale * x);
  b.kappa = delay_precompensation(chan.delays);
  return b;
}

CVec cophase_elements(const CMat& R, CVec v, double tol, int max_sweeps,
                      std::vector<double>* trace, int* sweeps) {
  const Eigen::Index M = R.cols();
  CVec s = R * v;
  double obj = s.squaredNorm();
  if (trace) trace->push_back(obj);
  int used = 0;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    ++used;
    const double before = obj;
    for (Eigen::Index m = 0; m < M; ++m) {
      const CVec q = s - R.col(m) * v[m];
      const cplx c = q.dot(R.col(m));  // q^H r_m
      const double theta = std::abs(c) > 0 ? std::arg(c) : 0.0;
      v[m] = std::exp(-kJ * theta);
      s = q + R.col(m) * v[m];
      obj = s.squaredNorm();
      if (trace) trace->push_back(obj);
    }
    if (!(before > 0) || (obj - before) / before < tol) break;
  }
  if (sweeps) *sweeps = used;
  return v;
}

CoordinateDescentTrace coordinate_descent(const ChannelRealization& chan,
                                          const PhaseConfig& init, double tol, int max_sweeps) {
  const int L = chan.num_irs();
  if (init.num_irs() != L) throw DomainError("phase config does not match IRS count");
  CoordinateDescentTrace out;
  out.trace.resize(L);
  out.sweeps.resize(L);
  out.phases.v.resize(L);
  // The L subproblems share no variables.
  for (int l = 0; l < L; ++l) {
    const CMat R = cascade_matrix(chan.G[l], chan.h[l]);
    out.phases.v[l] =
        cophase_elements(R, init.v[l], tol, max_sweeps, &out.trace[l], &out.sweeps[l]);
  }
  return out;
}

PhaseConfig coordinate_descent_phases(const ChannelRealization& chan, const PhaseConfig& init,
                                      double tol) {
  return coordinate_descent(chan, init, tol).phases;
}

PhaseConfig mrt_phases(const ChannelRealization& chan, double tol) {
  return coordinate_descent_phases(chan, PhaseConfig::zeros(chan.num_irs(), chan.elements()), tol);
}

BeamformerSet asymptotic_mrt_beams(const ChannelRealization& chan, const std::vector<double>& p) {
  if (!chan.los_bs_irs())
    throw Unsupported("asymptotic beams need LoS BS-IRS channels with known angles");
  if (static_cast<int>(p.size()) != chan.num_paths())
    throw DomainError("need one power per path");
  const int nt = chan.num_antennas();
  BeamformerSet b;
  for (int l = 0; l < chan.num_paths(); ++l) {
    if (p[l] < 0) throw DomainError("negative path power");
    b.f.push_back(std::sqrt(p[l] / nt) * ula_response(chan.aod[l], nt));
  }
  b.kappa = delay_precompensation(chan.delays);
  return b;
}

}  // namespace dam
