#pragma once

#include <vector>

#include "dam/dam_core.hpp"

namespace dam {

struct MmseBeams {
  BeamformerSet beams;
  double sinr = 0;  // h^H C^-1 h
};

/// SINR-optimal beams for fixed phases: f = sqrt(P) C^-1 h / ||C^-1 h|| with
/// C = sum_i g[i] g[i]^H + sigma^2 / P I on the stacked (L+1) N_t space.
MmseBeams mmse_beams(const ChannelRealization& chan, const PhaseConfig& phases, double power);

struct MmsePhaseStep {
  PhaseConfig phases;
  CVec relaxed;            // unit-norm maximizer of the Rayleigh quotient
  double quotient = 0;     // its Rayleigh-quotient value
};

/// |v^H f~|^2 / (v^H C~ v) with C~ = sum_i e~[i] e~[i]^H + sigma^2 I.
double phase_rayleigh_quotient(const ChannelRealization& chan, const BeamformerSet& beams,
                               const CVec& v);

/// Phases maximizing the relaxed SINR for fixed beams: v = C~^-1 f~, rotated so
/// the direct-link entry is real positive, then projected to unit modulus.
MmsePhaseStep mmse_phase_step(const ChannelRealization& chan, const BeamformerSet& beams);
PhaseConfig mmse_phases(const ChannelRealization& chan, const BeamformerSet& beams);

struct MmseIteration {
  double before_beam = 0;  // SINR with the new phases and the previous beams
  double after_beam = 0;
  double after_phase = 0;
};

struct MmseSolution {
  BeamformerSet beams;
  PhaseConfig phases;
  double sinr = 0;  // best unit-modulus iterate
  std::vector<MmseIteration> trace;
  int iterations = 0;
};

MmseSolution mmse_alternating(const ChannelRealization& chan, const PhaseConfig& init,
                              double power, double tol = 1e-3, int max_iters = 30);

}  // namespace dam
