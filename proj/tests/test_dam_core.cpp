#include <doctest.h>

#include <cmath>

#include "dam/beam_mrt.hpp"
#include "dam/beam_zf.hpp"
#include "dam/dam_core.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace dam;

namespace {

const cplx kJ{0.0, 1.0};

BeamformerSet random_beams(Rng& rng, const ChannelRealization& ch, double power) {
  BeamformerSet b;
  double total = 0;
  for (int l = 0; l < ch.num_paths(); ++l) {
    b.f.push_back(fixture::gaussian_vec(rng, ch.num_antennas()));
    total += b.f.back().squaredNorm();
  }
  for (auto& f : b.f) f *= std::sqrt(power / total);
  b.kappa = delay_precompensation(ch.delays);
  return b;
}

}  // namespace

TEST_CASE("delay precompensation") {
  CHECK(delay_precompensation({43, 44, 46, 77, 47}) == std::vector<int>{34, 33, 31, 0, 30});
  CHECK(delay_precompensation({12}) == std::vector<int>{0});
  const auto k = delay_precompensation({5, 9, 2});
  CHECK(k == std::vector<int>{4, 0, 7});
}

TEST_CASE("phase config conversions") {
  Rng rng(1);
  const PhaseConfig p = fixture::random_phases(rng, 3, 5);
  CHECK(p.unit_modulus());
  const auto t = p.thetas();
  const PhaseConfig q = PhaseConfig::from_thetas(t);
  for (int l = 0; l < 3; ++l) {
    CHECK((q.v[l] - p.v[l]).norm() < 1e-12);
    for (int m = 0; m < 5; ++m) CHECK(std::abs(p.v[l][m] - std::exp(-kJ * t[l][m])) < 1e-12);
  }

  const CVec s = p.stacked();
  CHECK(s.size() == 16);
  CHECK(s[15] == cplx(1.0, 0.0));
  CHECK((s.segment(5, 5) - p.v[1]).norm() == 0.0);

  CVec raw = 0.3 * s;
  raw[2] = 0.0;
  const PhaseConfig r = PhaseConfig::from_stacked(raw, 3, 5);
  CHECK(r.unit_modulus());
  CHECK(std::abs(r.v[0][2] - 1.0) < 1e-12);
  CHECK(std::abs(r.v[1][3] - p.v[1][3]) < 1e-12);

  const PhaseConfig z = PhaseConfig::zeros(2, 4);
  CHECK(z.stacked().isApprox(CVec::Ones(9)));
}

TEST_CASE("cascaded channels") {
  Rng rng(2);
  const auto ch = fixture::random_channel(3, 4, 4, {0, 1, 3});
  const PhaseConfig p = fixture::random_phases(rng, 2, 4);
  const auto hc = cascaded_channels(ch, p);
  REQUIRE(hc.size() == 3);
  CHECK(hc[0] == ch.h0);
  const auto t = p.thetas();
  for (int l = 0; l < 2; ++l) {
    // Row form h^H Theta G with Theta = diag(exp(j theta)).
    CVec e(4);
    for (int m = 0; m < 4; ++m) e[m] = std::exp(kJ * t[l][m]);
    const Eigen::RowVectorXcd row = ch.h[l].adjoint() * e.asDiagonal() * ch.G[l];
    CHECK((hc[l + 1].adjoint() - row).norm() < 1e-12 * row.norm());
    CHECK((cascade_matrix(ch.G[l], ch.h[l]) * p.v[l] - hc[l + 1]).norm() < 1e-12);
  }

  // M = 1 with v = 1: G^H h.
  const auto one = fixture::random_channel(4, 3, 1, {0, 2});
  const auto hc1 = cascaded_channels(one, PhaseConfig::zeros(1, 1));
  CHECK((hc1[1] - one.G[0].adjoint() * one.h[0]).norm() < 1e-12);

  // Stacked gains reproduce sum_l h~_l^H x_l.
  std::vector<CVec> x;
  for (int l = 0; l < 3; ++l) x.push_back(fixture::gaussian_vec(rng, 4));
  cplx direct{0.0, 0.0};
  for (int l = 0; l < 3; ++l) direct += hc[l].dot(x[l]);
  CHECK(std::abs(p.stacked().dot(stacked_path_gain(ch, x)) - direct) < 1e-12 * std::abs(direct));
}

TEST_CASE("effective tables on the four-path example") {
  // Taps {1, 2, 3, 5}: path 1 sees h0 one symbol early and h~_3 three late.
  const auto ch = fixture::random_channel(5, 4, 2, {1, 2, 3, 5});
  Rng rng(6);
  const PhaseConfig p = fixture::random_phases(rng, 3, 2);
  const auto hc = cascaded_channels(ch, p);
  const BeamformerSet b = random_beams(rng, ch, 1.0);
  const auto t = build_effective_tables(ch, p, b);
  CHECK(t.span == 4);
  CHECK(t.num_slots() == 9);
  CHECK(t.g_active[1][t.slot(1)]);
  CHECK(t.g_at(1, 1) == ch.h0);
  CHECK(t.g_active[1][t.slot(-3)]);
  CHECK((t.g_at(1, -3) - hc[3]).norm() == 0.0);
  CHECK(t.e_active[0][t.slot(1)]);
  CHECK(t.e_at(0, 1) == b.f[1]);
  CHECK(t.e_at(3, -3) == b.f[1]);

  // Entry (l', i) is populated exactly when some other path sits i taps earlier.
  for (int lp = 0; lp < 4; ++lp)
    for (int i = -4; i <= 4; ++i) {
      int match = -1;
      for (int l = 0; l < 4; ++l)
        if (l != lp && ch.delays[lp] - ch.delays[l] == i) match = l;
      CHECK(bool(t.g_active[lp][t.slot(i)]) == (match >= 0));
      if (match >= 0) {
        CHECK(t.g_at(lp, i) == hc[match]);
      } else {
        CHECK(t.g_at(lp, i).norm() == 0.0);
      }
      int beam = -1;
      for (int l = 0; l < 4; ++l)
        if (l != lp && ch.delays[l] - ch.delays[lp] == i) beam = l;
      CHECK(bool(t.e_active[lp][t.slot(i)]) == (beam >= 0));
      if (beam >= 0) CHECK(t.e_at(lp, i) == b.f[beam]);
    }
  for (int lp = 0; lp < 4; ++lp) {
    CHECK_FALSE(t.g_active[lp][t.slot(0)]);
    CHECK_FALSE(t.e_active[lp][t.slot(0)]);
  }
}

TEST_CASE("grouped ISI equals the pairwise double sum") {
  Rng rng(7);
  const std::vector<std::vector<int>> patterns = {
      {0, 1, 2, 3}, {43, 44, 46, 77, 47}, {5, 0}, {0, 2, 4, 6, 8}, {3, 1, 7}};
  for (size_t k = 0; k < patterns.size(); ++k) {
    const int L = static_cast<int>(patterns[k].size()) - 1;
    const auto ch = fixture::random_channel(100 + k, 6, 3, patterns[k]);
    const PhaseConfig p = fixture::random_phases(rng, L, 3);
    const BeamformerSet b = random_beams(rng, ch, 2.0);
    const SinrTerms s = sinr_terms(ch, p, b);
    const auto o = oracle::isi_double_sum(cascaded_channels(ch, p), ch.delays, b.f);
    CHECK(s.isi == doctest::Approx(o.isi).epsilon(1e-12));
    CHECK(s.desired == doctest::Approx(o.desired).epsilon(1e-12));
    CHECK(s.noise == ch.noise_power);
    CHECK(s.sinr() == doctest::Approx(o.desired / (o.isi + ch.noise_power)).epsilon(1e-12));
  }
}

TEST_CASE("single-path SINR has no ISI") {
  const auto ch = fixture::random_channel(8, 5, 1, {4});
  BeamformerSet b{{CVec::Ones(5)}, {0}};
  const double expect = std::norm(ch.h0.dot(b.f[0])) / ch.noise_power;
  CHECK(sinr_closed_form(ch, PhaseConfig{}, b) == doctest::Approx(expect));
  CHECK(sinr_terms(ch, PhaseConfig{}, b).isi == 0.0);
}

TEST_CASE("SINR ignores a common beam rotation") {
  Rng rng(9);
  const auto ch = fixture::random_channel(10, 6, 4, {0, 3, 1});
  const PhaseConfig p = fixture::random_phases(rng, 2, 4);
  BeamformerSet b = random_beams(rng, ch, 1.0);
  const double before = sinr_closed_form(ch, p, b);
  for (auto& f : b.f) f *= std::exp(kJ * 1.234);
  CHECK(sinr_closed_form(ch, p, b) == doctest::Approx(before).epsilon(1e-12));
}

TEST_CASE("transmit synthesis") {
  Rng rng(11);
  const CVec s = fixture::gaussian_vec(rng, 20);
  const CVec f0 = fixture::gaussian_vec(rng, 3);
  const CVec f1 = fixture::gaussian_vec(rng, 3);

  const CMat x1 = synthesize_transmit(s, BeamformerSet{{f0}, {0}});
  CHECK(x1.cols() == 20);
  CHECK((x1 - f0 * s.transpose()).norm() < 1e-12);

  const CMat x2 = synthesize_transmit(s, BeamformerSet{{f0, f1}, {0, 3}});
  CHECK(x2.cols() == 23);
  for (int n = 0; n < 23; ++n) {
    CVec expect = CVec::Zero(3);
    if (n < 20) expect += f0 * s[n];
    if (n >= 3) expect += f1 * s[n - 3];
    CHECK((x2.col(n) - expect).norm() < 1e-12);
  }
  CHECK_THROWS_AS(synthesize_transmit(s, BeamformerSet{{f0, f1}, {0}}), DomainError);
}

TEST_CASE("transmit power matches the beam energy") {
  Rng rng(12);
  const auto ch = fixture::random_channel(13, 8, 4, {43, 44, 46, 77, 47});
  const BeamformerSet b = random_beams(rng, ch, 3.0);
  CHECK(b.total_power() == doctest::Approx(3.0));
  const long n = 100000;
  CVec s(n);
  const double a = 1 / std::sqrt(2.0);
  for (long i = 0; i < n; ++i) s[i] = cplx(rng() & 1 ? a : -a, rng() & 1 ? a : -a);
  const CMat x = synthesize_transmit(s, b);
  const int kmax = 34;
  const double power = x.middleCols(kmax, n - kmax).squaredNorm() / double(n - kmax);
  CHECK(power == doctest::Approx(3.0).epsilon(0.02));
}

TEST_CASE("propagation through the tapped channel") {
  Rng rng(14);
  const std::vector<CVec> hc = {fixture::gaussian_vec(rng, 2), fixture::gaussian_vec(rng, 2)};
  const CMat x = fixture::gaussian_mat(rng, 2, 6);
  const CVec y = propagate(hc, {1, 4}, x);
  CHECK(y.size() == 10);
  for (int n = 0; n < 10; ++n) {
    cplx e{0.0, 0.0};
    if (n - 1 >= 0 && n - 1 < 6) e += hc[0].dot(x.col(n - 1));
    if (n - 4 >= 0 && n - 4 < 6) e += hc[1].dot(x.col(n - 4));
    CHECK(std::abs(y[n] - e) < 1e-12);
  }
}

TEST_CASE("time-domain SINR estimate agrees with the closed form") {
  Rng rng(15);
  for (int t = 0; t < 3; ++t) {
    const auto ch = fixture::random_channel(200 + t, 6, 4, {2, 0, 5, 3}, 0.05);
    const PhaseConfig p = fixture::random_phases(rng, 3, 4);
    const BeamformerSet b = mrt_beams(ch, p, 1.0);
    const double cf = sinr_closed_form(ch, p, b);
    const auto mc = monte_carlo_sinr(ch, p, b, 100000, 77 + t);
    CHECK(mc.sinr == doctest::Approx(cf).epsilon(0.01));
    const SinrTerms terms = sinr_terms(ch, p, b);
    CHECK(mc.isi == doctest::Approx(terms.isi).epsilon(0.03));
    CHECK(mc.desired == doctest::Approx(terms.desired).epsilon(0.01));
  }
}

TEST_CASE("time-domain estimate edge cases") {
  const auto ch = fixture::random_channel(16, 4, 2, {0, 3});
  const PhaseConfig p = PhaseConfig::zeros(1, 2);
  BeamformerSet zero{{CVec::Zero(4), CVec::Zero(4)}, delay_precompensation(ch.delays)};
  CHECK(monte_carlo_sinr(ch, p, zero, 2000, 1).sinr == 0.0);
  CHECK_THROWS_AS(monte_carlo_sinr(ch, p, zero, 999, 1), DomainError);

  // ZF beams leave no ISI in the noiseless output.
  const ZfSolution z = zf_solve(ch, p, 1.0);
  const auto mc = monte_carlo_sinr(ch, p, z.beams, 5000, 2);
  CHECK(mc.isi <= 1e-10 * mc.desired);
}
