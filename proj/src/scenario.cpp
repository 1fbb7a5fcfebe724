#include "dam/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

#include "dam/random.hpp"

namespace dam {

namespace {

const cplx kJ{0.0, 1.0};

// Elevation/azimuth of a unit direction leaving an IRS (horizontal axis x,
// vertical axis z).
void irs_angles(const Point3& dir, double& elev, double& azim) {
  elev = std::acos(std::clamp(dir.z(), -1.0, 1.0));
  azim = std::atan2(dir.y(), dir.x());
}

double bs_departure(const Point3& bs, const Point3& target) {
  const Point3 u = (target - bs).normalized();
  return std::acos(std::clamp(u.y(), -1.0, 1.0));
}

}  // namespace

double free_space_reference_loss(double carrier_hz, double distance_m) {
  const double r = kSpeedOfLight / (4.0 * kPi * carrier_hz * distance_m);
  return r * r;
}

long Scenario::coherence_samples() const {
  return std::lround(bandwidth_hz * coherence_time_s);
}

void Scenario::validate() const {
  if (num_antennas < 1) throw ConfigError("num_antennas must be >= 1");
  if (irs_horizontal < 1 || irs_vertical < 1)
    throw ConfigError("IRS grid dimensions must be >= 1");
  if (!(bandwidth_hz > 0)) throw ConfigError("bandwidth must be positive");
  if (!(power_w > 0)) throw ConfigError("transmit power must be positive");
  if (!(noise_psd_w_per_hz > 0)) throw ConfigError("noise PSD must be positive");
  if (coherence_samples() < 1)
    throw ConfigError("bandwidth * coherence time must round to a positive integer");
  if (!(rician_factor >= 0)) throw ConfigError("Rician factor must be >= 0");
  if (!(ref_path_loss > 0) || !(ref_distance_m > 0))
    throw ConfigError("path-loss reference must be positive");
  if (subcarriers < 1) throw ConfigError("subcarrier count must be >= 1");
  if (max_delay_bound < 0) throw ConfigError("max delay bound must be >= 0");
}

int ChannelRealization::n_max() const {
  return *std::max_element(delays.begin(), delays.end());
}

int ChannelRealization::n_min() const {
  return *std::min_element(delays.begin(), delays.end());
}

bool ChannelRealization::los_bs_irs() const {
  const auto L = static_cast<size_t>(num_irs());
  return alpha.size() == L + 1 && beta.size() == L + 1 && aod.size() == L + 1 &&
         irs_arrival.size() == L;
}

void ChannelRealization::validate() const {
  const int L = num_irs();
  if (h0.size() < 1) throw DomainError("direct channel is empty");
  if (static_cast<int>(h.size()) != L)
    throw DomainError("IRS-user channel count does not match BS-IRS channels");
  if (num_paths() != L + 1) throw DomainError("need one delay per path");
  for (int l = 0; l < L; ++l) {
    if (G[l].cols() != h0.size()) throw DomainError("G column count != N_t");
    if (G[l].rows() != h[l].size()) throw DomainError("G row count != IRS size");
  }
  std::set<int> seen;
  for (int n : delays) {
    if (n < 0) throw DomainError("negative tap delay");
    if (!seen.insert(n).second)
      throw DelayCollision("two paths share tap " + std::to_string(n));
  }
}

ChannelRealization make_channel(CVec h0, std::vector<CMat> G, std::vector<CVec> h,
                                std::vector<int> delays, double noise_power) {
  ChannelRealization c;
  c.h0 = std::move(h0);
  c.G = std::move(G);
  c.h = std::move(h);
  c.delays = std::move(delays);
  c.noise_power = noise_power;
  c.validate();
  return c;
}

CVec ula_response(double angle, int n) {
  if (n < 1) throw DomainError("array size must be >= 1");
  const double c = std::cos(angle);
  CVec a(n);
  for (int k = 0; k < n; ++k) a[k] = std::exp(-kJ * (kPi * k * c));
  return a;
}

CVec upa_response(double elevation, double azimuth, int m_h, int m_v, double spacing) {
  if (m_h < 1 || m_v < 1) throw DomainError("array size must be >= 1");
  const double wh = 2.0 * kPi * spacing * std::sin(elevation) * std::cos(azimuth);
  const double wv = 2.0 * kPi * spacing * std::cos(elevation);
  CVec a(m_h * m_v);
  for (int i = 0; i < m_h; ++i)
    for (int v = 0; v < m_v; ++v)
      a[i * m_v + v] = std::exp(-kJ * (wh * i + wv * v));
  return a;
}

double path_loss(double d, double c0, double d0, double exponent) {
  if (!(d > 0)) throw DomainError("path-loss distance must be positive");
  return c0 * std::pow(d / d0, -exponent);
}

int discretize_delay(double path_length_m, double bandwidth_hz) {
  if (path_length_m < 0) throw DomainError("negative path length");
  return static_cast<int>(std::floor(path_length_m / kSpeedOfLight * bandwidth_hz + 0.5));
}

std::vector<int> geometric_delays(const Scenario& s) {
  std::vector<int> n;
  n.push_back(discretize_delay((s.user_position - s.bs_position).norm(), s.bandwidth_hz));
  for (const auto& q : s.irs_positions) {
    const double len = (q - s.bs_position).norm() + (s.user_position - q).norm();
    n.push_back(discretize_delay(len, s.bandwidth_hz));
  }
  return n;
}

ChannelRealization sample_channel(const Scenario& s, std::uint64_t seed) {
  s.validate();
  const int L = s.num_irs();
  const int Nt = s.num_antennas;

  ChannelRealization c;
  c.delays = geometric_delays(s);
  c.noise_power = s.noise_power();

  Rng rng(seed);
  auto gain = [&](double power) { return std::sqrt(power) * std::exp(kJ * uniform_phase(rng)); };

  c.alpha.resize(L + 1);
  c.beta.resize(L + 1, cplx{0.0, 0.0});
  c.aod.resize(L + 1);

  // Direct link.
  const double d0 = (s.user_position - s.bs_position).norm();
  const cplx a0 = gain(path_loss(d0, s.ref_path_loss, s.ref_distance_m, s.exponent_direct));
  c.aod[0] = bs_departure(s.bs_position, s.user_position);
  const CVec los = a0 * ula_response(c.aod[0], Nt);
  if (std::isinf(s.rician_factor)) {
    c.h0 = los;
    c.alpha[0] = a0;
  } else {
    const double k = s.rician_factor;
    const double w_los = std::sqrt(k / (1.0 + k));
    const double w_nlos = std::sqrt(1.0 / (1.0 + k));
    CVec nlos(Nt);
    const double var = std::norm(a0);  // per entry: E||nlos||^2 = ||los||^2
    for (int i = 0; i < Nt; ++i) nlos[i] = complex_gaussian(rng, var);
    c.h0 = w_los * los + w_nlos * nlos;
    c.alpha[0] = w_los * a0;
  }

  for (int l = 0; l < L; ++l) {
    const Point3& q = s.irs_positions[l];
    const double d_ti = (q - s.bs_position).norm();
    const double d_iu = (s.user_position - q).norm();
    const cplx al = gain(path_loss(d_ti, s.ref_path_loss, s.ref_distance_m, s.exponent_bs_irs));
    const cplx be = gain(path_loss(d_iu, s.ref_path_loss, s.ref_distance_m, s.exponent_irs_user));
    c.alpha[l + 1] = al;
    c.beta[l + 1] = be;
    c.aod[l + 1] = bs_departure(s.bs_position, q);

    double el = 0, az = 0;
    irs_angles((s.bs_position - q).normalized(), el, az);
    const CVec a_r = upa_response(el, az, s.irs_horizontal, s.irs_vertical, s.element_spacing);
    c.irs_arrival.push_back(a_r);
    c.G.push_back(al * a_r * ula_response(c.aod[l + 1], Nt).adjoint());

    irs_angles((s.user_position - q).normalized(), el, az);
    c.irs_user_elevation.push_back(el);
    c.irs_user_azimuth.push_back(az);
    c.h.push_back(be * upa_response(el, az, s.irs_horizontal, s.irs_vertical, s.element_spacing));
  }
  c.validate();
  return c;
}

}  // namespace dam
