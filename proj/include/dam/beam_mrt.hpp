#pragma once

#include <vector>

#include "dam/dam_core.hpp"

namespace dam {

/// f_l = sqrt(P) h~_l / sqrt(sum_i ||h~_i||^2). Throws DegenerateChannel when
/// every cascaded channel is zero.
BeamformerSet mrt_beams(const ChannelRealization& chan, const PhaseConfig& phases, double power);

struct CoordinateDescentTrace {
  PhaseConfig phases;
  // trace[l]: ||G_l^H diag(h_l) v_l||^2, starting value then one entry per
  // single-element update.
  std::vector<std::vector<double>> trace;
  std::vector<int> sweeps;  // sweeps used per IRS
};

/// Element-wise maximization of ||R v||^2 over unit-modulus v (entries
/// exp(-j theta)), sweeping m = 0..M-1 until the per-sweep fractional increase
/// drops below tol. Appends the objective after every update to trace if given.
CVec cophase_elements(const CMat& R, CVec v, double tol, int max_sweeps,
                      std::vector<double>* trace = nullptr, int* sweeps = nullptr);

CoordinateDescentTrace coordinate_descent(const ChannelRealization& chan,
                                          const PhaseConfig& init, double tol = 1e-4,
                                          int max_sweeps = 50);

PhaseConfig coordinate_descent_phases(const ChannelRealization& chan, const PhaseConfig& init,
                                      double tol = 1e-4);

/// Coordinate descent from theta = 0: the co-phasing phases shared by MRT, OFDM
/// and the default starting point of the ZF and MMSE alternations.
PhaseConfig mrt_phases(const ChannelRealization& chan, double tol = 1e-4);

/// f_l = sqrt(p_l) a_T(phi_l) / sqrt(N_t). Requires the LoS metadata of
/// sample_channel; throws Unsupported otherwise.
BeamformerSet asymptotic_mrt_beams(const ChannelRealization& chan, const std::vector<double>& p);

}  // namespace dam
