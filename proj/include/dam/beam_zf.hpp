#pragma once

#include <vector>

#include "dam/dam_core.hpp"

namespace dam {

/// W = (H^H)^+ for H = [h~_0, ..., h~_L], so H^H W = I. Throws Infeasible when
/// N_t < L + 1 or H is numerically rank deficient.
CMat zf_nullspace_beams(const std::vector<CVec>& cascaded);

struct ZfAllocation {
  std::vector<double> mu;   // per-path power coefficients
  std::vector<CVec> f;      // f_l = sqrt(mu_l) w_l
  double gain_sum = 0;      // sum_l 1 / ||w_l||^2

  /// Received SNR P / sigma^2 * gain_sum.
  double snr(double power, double noise_power) const { return power / noise_power * gain_sum; }
};

/// Optimal per-path power split for ZF beams: mu_l proportional to ||w_l||^-4,
/// sum_l mu_l ||w_l||^2 = P.
ZfAllocation zf_power_allocation(const CMat& W, double power);

struct ScaOptions {
  double rel_tol = 1e-6;   // inner relative objective change
  int max_inner = 500;
  int max_projection = 200;
  double projection_tol = 1e-12;
};

struct ScaStep {
  CVec v;                  // new stacked vector, last entry 1
  double surrogate_start = 0;
  double surrogate_end = 0;
  int inner_iterations = 0;
  bool converged = true;
};

/// One successive-convex-approximation update of the stacked reflection vector
/// for fixed beams. The objective |v^H f~|^2 is replaced by its tangent lower
/// bound at v_r and maximized over |v_m| <= 1, v_last = 1, v^H b = 0 for every
/// nulling vector b. Throws Infeasible if v_r violates the constraints.
ScaStep sca_phase_step(const CVec& v_r, const CVec& f_tilde, const std::vector<CVec>& nulling,
                       const ScaOptions& opt = {});

/// Value of the tangent lower bound |v_r^H f|^2 + 2 Re{(v - v_r)^H f f^H v_r}.
double sca_surrogate(const CVec& v, const CVec& v_r, const CVec& f_tilde);

/// theta_{l,m} = -arg of the stacked entry; entries below 1e-12 in modulus map
/// to theta = 0.
PhaseConfig extract_phases(const CVec& v_tilde, int num_irs, int elements);

/// Vectors b with v~^H b = h~_l^H f_l' for every IRS path l and every other
/// path l' != l. The direct-link products do not depend on the phases and are
/// omitted.
std::vector<CVec> zf_nulling_vectors(const ChannelRealization& chan, const BeamformerSet& beams);

struct ZfSolution {
  CMat W;
  std::vector<double> mu;
  BeamformerSet beams;
  PhaseConfig phases;
  double snr = 0;
  // Relaxed objective (SNR with the relaxed stacked vector) after every beam step.
  std::vector<double> trace;
  double relaxed_snr = 0;
  int iterations = 0;
  bool phase_step_skipped = false;
  bool inner_converged = true;
};

/// ZF beams and Theorem-style power split for fixed unit-modulus phases.
ZfSolution zf_solve(const ChannelRealization& chan, const PhaseConfig& phases, double power);

/// Alternates ZF beamforming and SCA phase updates from init until the
/// fractional objective increase drops below tol, then projects to unit modulus
/// and re-solves the beams.
ZfSolution zf_alternating(const ChannelRealization& chan, const PhaseConfig& init, double power,
                          double tol = 1e-3, int max_iters = 30, const ScaOptions& opt = {});

}  // namespace dam
