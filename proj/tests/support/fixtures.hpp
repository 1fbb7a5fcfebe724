#pragma once

#include <cstdint>
#include <vector>

#include "dam/random.hpp"
#include "dam/dam_core.hpp"

namespace fixture {

using namespace dam;

inline CVec gaussian_vec(Rng& rng, Eigen::Index n, double var = 1.0) {
  CVec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = complex_gaussian(rng, var);
  return v;
}

inline CMat gaussian_mat(Rng& rng, Eigen::Index rows, Eigen::Index cols, double var = 1.0) {
  CMat m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = complex_gaussian(rng, var);
  return m;
}

inline PhaseConfig random_phases(Rng& rng, int L, int M) {
  std::vector<RVec> t;
  for (int l = 0; l < L; ++l) {
    RVec x(M);
    for (int m = 0; m < M; ++m) x[m] = uniform_phase(rng);
    t.push_back(x);
  }
  return PhaseConfig::from_thetas(t);
}

// Unstructured channel: full-rank Gaussian G_l, no LoS metadata.
inline ChannelRealization random_channel(std::uint64_t seed, int nt, int M,
                                         std::vector<int> delays, double noise = 1e-2) {
  Rng rng(seed);
  const int L = static_cast<int>(delays.size()) - 1;
  std::vector<CMat> G;
  std::vector<CVec> h;
  for (int l = 0; l < L; ++l) {
    G.push_back(gaussian_mat(rng, M, nt, 1.0 / M));
    h.push_back(gaussian_vec(rng, M));
  }
  return make_channel(gaussian_vec(rng, nt), G, h, delays, noise);
}

// BS at the origin, user at (100, 0, 0), IRSs at (5, 5, 0) and (50, 75, 0):
// taps {43, 44, 77}.
inline Scenario small_scenario(int nt = 16, int mh = 4, int mv = 4) {
  Scenario s;
  s.irs_positions = {{5, 5, 0}, {50, 75, 0}};
  s.num_antennas = nt;
  s.irs_horizontal = mh;
  s.irs_vertical = mv;
  s.power_w = dbm_to_watts(30.0);
  return s;
}

inline Scenario four_irs_scenario(int nt, int mh, int mv) {
  Scenario s = small_scenario(nt, mh, mv);
  s.irs_positions = {{5, 5, 0}, {5, -10, 0}, {50, 75, 0}, {90, -15, 0}};
  return s;
}

}  // namespace fixture
