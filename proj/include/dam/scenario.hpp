#pragma once

#include <cstdint>
#include <vector>

#include "dam/types.hpp"

namespace dam {

using Point3 = Eigen::Vector3d;

/// Free-space loss at 1 m for a 28 GHz carrier, (c / (4 pi f d))^2.
double free_space_reference_loss(double carrier_hz, double distance_m = 1.0);

/// Static link parameters. Geometry is in meters.
///
/// Array orientation convention: the BS uniform linear array lies along the
/// y axis, so the angle of departure towards a point p is acos(u_y) with u the
/// unit vector from the BS to p. Each IRS is a planar array whose horizontal
/// axis is x and vertical axis is z; for a unit direction u leaving the IRS the
/// elevation is acos(u_z) and the azimuth atan2(u_y, u_x).
struct Scenario {
  Point3 bs_position{0.0, 0.0, 0.0};
  Point3 user_position{100.0, 0.0, 0.0};
  std::vector<Point3> irs_positions;

  int num_antennas = 64;
  int irs_horizontal = 8;  // M_h
  int irs_vertical = 8;    // M_v
  double element_spacing = 0.5;  // wavelengths

  double bandwidth_hz = 128e6;
  double power_w = 1.0;
  double noise_psd_w_per_hz = 1e-3 * db_to_linear(-174.0);
  double coherence_time_s = 1e-3;
  double rician_factor = db_to_linear(5.0);  // +inf gives a pure LoS direct link

  double ref_path_loss = free_space_reference_loss(28e9);  // C0
  double ref_distance_m = 1.0;                             // D0
  double exponent_direct = 3.5;                            // BS-user
  double exponent_bs_irs = 2.0;
  double exponent_irs_user = 2.0;

  int subcarriers = 512;
  // Upper bound on the maximum delay used for guard intervals (OFDM CP and the
  // DAM block guard). Zero means "use the realization's own n_max".
  int max_delay_bound = 0;
  int qam_order = 128;
  std::uint64_t rng_seed = 1;

  int num_irs() const { return static_cast<int>(irs_positions.size()); }
  int elements_per_irs() const { return irs_horizontal * irs_vertical; }
  /// n_c = B * T_c rounded to the nearest integer.
  long coherence_samples() const;
  /// sigma^2 = N0 * B.
  double noise_power() const { return noise_psd_w_per_hz * bandwidth_hz; }

  /// Throws ConfigError when an invariant is violated.
  void validate() const;
};

/// One draw of the multipath channel. Path index p runs over 0..L with p = 0 the
/// direct link and p = l the reflection off IRS l; per-IRS containers are
/// indexed l - 1.
struct ChannelRealization {
  CVec h0;                  // N_t, direct channel
  std::vector<CMat> G;      // M x N_t, BS -> IRS l
  std::vector<CVec> h;      // M, IRS l -> user (h_l^H is the row channel)
  std::vector<int> delays;  // L + 1 integer taps
  double noise_power = 1.0; // sigma^2

  // LoS parameters, filled by sample_channel. Left empty for hand-built
  // channels, in which case the asymptotic analysis refuses them.
  std::vector<cplx> alpha;         // L + 1; alpha[0] is the LoS coefficient of h0
  std::vector<cplx> beta;          // L + 1; beta[0] unused
  std::vector<double> aod;         // L + 1, BS angle of departure per path
  std::vector<CVec> irs_arrival;   // a_R per IRS
  std::vector<double> irs_user_elevation;
  std::vector<double> irs_user_azimuth;

  int num_irs() const { return static_cast<int>(G.size()); }
  int num_paths() const { return static_cast<int>(delays.size()); }
  int num_antennas() const { return static_cast<int>(h0.size()); }
  int elements() const { return G.empty() ? 0 : static_cast<int>(G.front().rows()); }
  int n_max() const;
  int n_min() const;
  int n_span() const { return n_max() - n_min(); }
  /// True when every G_l is known to be alpha_l a_R a_T^H.
  bool los_bs_irs() const;

  /// Checks dimensions and delay distinctness; throws on violation.
  void validate() const;
};

/// Builds a realization from raw matrices (no LoS metadata).
ChannelRealization make_channel(CVec h0, std::vector<CMat> G, std::vector<CVec> h,
                                std::vector<int> delays, double noise_power);

/// a_T(angle): element k is exp(-j pi k cos(angle)).
CVec ula_response(double angle, int n);

/// Planar steering vector: horizontal ramp (2 pi d sin(elev) cos(azim)) kron
/// vertical ramp (2 pi d cos(elev)), both with negative exponent. Element index
/// is h * M_v + v.
CVec upa_response(double elevation, double azimuth, int m_h, int m_v, double spacing);

/// C0 (d / D0)^-upsilon. Throws DomainError for d <= 0.
double path_loss(double d, double c0, double d0, double exponent);

/// Nearest integer tap (ties round up) of path_length / c * B.
int discretize_delay(double path_length_m, double bandwidth_hz);

/// Geometry-consistent random channel. Deterministic in (scenario, seed).
/// Throws DelayCollision when two paths share a tap.
ChannelRealization sample_channel(const Scenario& scenario, std::uint64_t seed);

/// Integer taps of all L + 1 paths from geometry alone.
std::vector<int> geometric_delays(const Scenario& scenario);

}  // namespace dam
