#include <doctest.h>

#include <cmath>

#include "dam/beam_zf.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace dam;

namespace {

CMat stack_columns(const std::vector<CVec>& v) {
  CMat H(v.front().size(), static_cast<Eigen::Index>(v.size()));
  for (size_t i = 0; i < v.size(); ++i) H.col(i) = v[i];
  return H;
}

double objective(const CVec& v, const CVec& f) { return std::norm(v.dot(f)); }

void check_zf_invariants(const ChannelRealization& ch, const ZfSolution& z, double P) {
  const auto hc = cascaded_channels(ch, z.phases);
  const CMat H = stack_columns(hc);
  const int n = ch.num_paths();
  CHECK((H.adjoint() * z.W - CMat::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-8);
  double used = 0;
  for (int l = 0; l < n; ++l) used += z.mu[l] * z.W.col(l).squaredNorm();
  CHECK(used == doctest::Approx(P).epsilon(1e-9));
  CHECK(z.beams.total_power() == doctest::Approx(P).epsilon(1e-9));
  for (int l = 0; l < n; ++l)
    for (int lp = 0; lp < n; ++lp)
      if (l != lp) CHECK(std::abs(hc[l].dot(z.beams.f[lp])) <= 1e-8 * std::sqrt(P) * hc[l].norm());
  double inv = 0;
  for (int l = 0; l < n; ++l) inv += 1.0 / z.W.col(l).squaredNorm();
  CHECK(z.snr == doctest::Approx(P / ch.noise_power * inv).epsilon(1e-9));
  CHECK(sinr_closed_form(ch, z.phases, z.beams) == doctest::Approx(z.snr).epsilon(1e-6));
  CHECK(z.phases.unit_modulus());
}

}  // namespace

TEST_CASE("pseudo-inverse beams") {
  Rng rng(1);
  // Single path: w = h / ||h||^2.
  const CVec h = fixture::gaussian_vec(rng, 5);
  const CMat w = zf_nullspace_beams({h});
  CHECK((w.col(0) - h / h.squaredNorm()).norm() < 1e-12);

  // Orthonormal columns are their own pseudo-inverse.
  const CMat Q = fixture::gaussian_mat(rng, 6, 3).householderQr().householderQ() * CMat::Identity(6, 3);
  const CMat Wq = zf_nullspace_beams({Q.col(0), Q.col(1), Q.col(2)});
  CHECK((Wq - Q).norm() < 1e-12);

  // Random 8 x 3.
  const CMat H = fixture::gaussian_mat(rng, 8, 3);
  const CMat W = zf_nullspace_beams({H.col(0), H.col(1), H.col(2)});
  const CMat I = H.adjoint() * W;
  double off = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (i != j) off = std::max(off, std::abs(I(i, j)));
  CHECK(off <= 1e-10);
  for (int i = 0; i < 3; ++i) CHECK(std::abs(I(i, i) - 1.0) < 1e-10);

  CHECK_THROWS_AS(zf_nullspace_beams({H.col(0).head(2), H.col(1).head(2), H.col(2).head(2)}),
                  Infeasible);
  CHECK_THROWS_AS(zf_nullspace_beams({H.col(0), 2.0 * H.col(0)}), Infeasible);
}

TEST_CASE("power split across zero-forcing beams") {
  // Two unit-norm beams: even split and twice the single-path SNR.
  CMat W = CMat::Zero(3, 2);
  W(0, 0) = 1;
  W(1, 1) = 1;
  const ZfAllocation a = zf_power_allocation(W, 4.0);
  CHECK(a.mu[0] == doctest::Approx(2.0));
  CHECK(a.mu[1] == doctest::Approx(2.0));
  CHECK(a.snr(4.0, 0.5) == doctest::Approx(2 * 4.0 / 0.5));

  Rng rng(2);
  const CVec w0 = fixture::gaussian_vec(rng, 4);
  const ZfAllocation s = zf_power_allocation(w0, 3.0);
  CHECK((s.f[0] - std::sqrt(3.0) * w0 / w0.norm()).norm() < 1e-12);
  CHECK(s.snr(3.0, 0.1) == doctest::Approx(3.0 / 0.1 / w0.squaredNorm()));
}

TEST_CASE("power split beats every allocation on a simplex grid") {
  Rng rng(3);
  for (int t = 0; t < 3; ++t) {
    const CMat H = fixture::gaussian_mat(rng, 6, 3);
    const CMat W = zf_nullspace_beams({H.col(0), H.col(1), H.col(2)});
    const double P = 2.0, noise = 0.3;
    const ZfAllocation a = zf_power_allocation(W, P);
    // With p_l = mu_l ||w_l||^2 spent on path l the received amplitude is
    // sum_l sqrt(p_l) / ||w_l||.
    auto snr = [&](const std::vector<double>& p) {
      double amp = 0;
      for (int l = 0; l < 3; ++l) amp += std::sqrt(p[l]) / W.col(l).norm();
      return amp * amp / noise;
    };
    // 141 divisions per axis give 10011 grid points.
    const double best = oracle::simplex_grid_max(3, 141, P, snr);
    CHECK(best <= a.snr(P, noise) * (1 + 1e-12));
    CHECK(best >= 0.99 * a.snr(P, noise));
    std::vector<double> p;
    for (int l = 0; l < 3; ++l) p.push_back(a.mu[l] * W.col(l).squaredNorm());
    CHECK(snr(p) == doctest::Approx(a.snr(P, noise)).epsilon(1e-12));
  }
}

TEST_CASE("surrogate is tight at the expansion point and below the objective") {
  Rng rng(4);
  const CVec f = fixture::gaussian_vec(rng, 7);
  const CVec vr = fixture::gaussian_vec(rng, 7);
  CHECK(sca_surrogate(vr, vr, f) == doctest::Approx(objective(vr, f)).epsilon(1e-12));
  for (int t = 0; t < 100; ++t) {
    const CVec v = fixture::gaussian_vec(rng, 7);
    CHECK(sca_surrogate(v, vr, f) <= objective(v, f) + 1e-9);
  }
}

TEST_CASE("unconstrained phase step co-phases with the gradient") {
  Rng rng(5);
  const int K = 9;
  const CVec f = fixture::gaussian_vec(rng, K + 1);
  CVec vr = PhaseConfig::from_thetas({RVec::Random(K) * 3}).stacked();
  const ScaStep s = sca_phase_step(vr, f, {});
  const CVec c = f * f.dot(vr);
  for (int m = 0; m < K; ++m) CHECK(std::abs(s.v[m] - c[m] / std::abs(c[m])) < 1e-9);
  CHECK(s.v[K] == cplx(1.0, 0.0));
  CHECK(s.surrogate_start == doctest::Approx(objective(vr, f)));
  CHECK(objective(s.v, f) >= objective(vr, f));
}

TEST_CASE("constrained phase step stays feasible and ascends") {
  Rng rng(6);
  for (int t = 0; t < 5; ++t) {
    const int K = 24;
    const CVec f = fixture::gaussian_vec(rng, K + 1);
    CVec vr = 0.4 * PhaseConfig::from_thetas({RVec::Random(K) * 3}).stacked();
    vr[K] = 1.0;
    std::vector<CVec> b;
    for (int k = 0; k < 4; ++k) {
      CVec x = fixture::gaussian_vec(rng, K + 1);
      x -= vr * (vr.dot(x) / vr.squaredNorm());
      b.push_back(x);
    }
    const ScaStep s = sca_phase_step(vr, f, b);
    CHECK(std::abs(s.v[K] - 1.0) < 1e-12);
    for (int m = 0; m < K; ++m) CHECK(std::abs(s.v[m]) <= 1 + 1e-9);
    for (const auto& x : b) CHECK(std::abs(s.v.dot(x)) <= 1e-6 * x.norm());
    CHECK(s.surrogate_end >= s.surrogate_start - 1e-12 * s.surrogate_start);
    CHECK(objective(s.v, f) >= objective(vr, f) * (1 - 1e-12));
  }
}

TEST_CASE("phase step rejects infeasible starting points") {
  Rng rng(7);
  const CVec f = fixture::gaussian_vec(rng, 5);
  CVec vr = CVec::Ones(5);
  CVec bad = vr;
  bad[4] = 2.0;
  CHECK_THROWS_AS(sca_phase_step(bad, f, {}), Infeasible);
  bad = vr;
  bad[1] = 1.5;
  CHECK_THROWS_AS(sca_phase_step(bad, f, {}), Infeasible);
  CHECK_THROWS_AS(sca_phase_step(vr, f, {fixture::gaussian_vec(rng, 5)}), Infeasible);
  CHECK_THROWS_AS(sca_phase_step(vr, f.head(4), {}), DomainError);
}

TEST_CASE("rounding-level nulling vectors do not constrain the step") {
  Rng rng(8);
  const CVec f = fixture::gaussian_vec(rng, 6);
  const CVec vr = CVec::Ones(6);
  const CVec tiny = 1e-20 * fixture::gaussian_vec(rng, 6);
  const ScaStep a = sca_phase_step(vr, f, {tiny});
  const ScaStep b = sca_phase_step(vr, f, {});
  CHECK((a.v - b.v).norm() < 1e-12);
}

TEST_CASE("phase extraction") {
  const double third = kPi / 3;
  CVec v(3);
  v << 0.5 * std::polar(1.0, third), 0.0, 2.0;
  const PhaseConfig p = extract_phases(v, 1, 2);
  CHECK(p.thetas()[0][0] == doctest::Approx(-third));
  CHECK(p.thetas()[0][1] == doctest::Approx(0.0));
  CHECK(p.unit_modulus());

  Rng rng(9);
  const PhaseConfig q = fixture::random_phases(rng, 2, 3);
  const PhaseConfig r = extract_phases(q.stacked(), 2, 3);
  for (int l = 0; l < 2; ++l) CHECK((r.v[l] - q.v[l]).norm() < 1e-12);

  CVec pos = CVec::Constant(5, 0.7);
  for (const auto& t : extract_phases(pos, 2, 2).thetas()) CHECK(t.cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("nulling vectors express cross-path leakage") {
  Rng rng(10);
  const auto ch = fixture::random_channel(11, 6, 3, {0, 2, 5});
  const PhaseConfig p = fixture::random_phases(rng, 2, 3);
  BeamformerSet b;
  for (int l = 0; l < 3; ++l) b.f.push_back(fixture::gaussian_vec(rng, 6));
  b.kappa = delay_precompensation(ch.delays);
  const auto hc = cascaded_channels(ch, p);
  const auto nv = zf_nulling_vectors(ch, b);
  REQUIRE(nv.size() == 4);
  const CVec v = p.stacked();
  int k = 0;
  for (int l = 1; l <= 2; ++l)
    for (int lp = 0; lp <= 2; ++lp) {
      if (lp == l) continue;
      CHECK(std::abs(v.dot(nv[k]) - hc[l].dot(b.f[lp])) < 1e-12);
      ++k;
    }
}

TEST_CASE("alternation on an unstructured channel") {
  Rng rng(12);
  for (int t = 0; t < 3; ++t) {
    const auto ch = fixture::random_channel(300 + t, 8, 6, {0, 3, 1}, 0.1);
    const PhaseConfig init = fixture::random_phases(rng, 2, 6);
    const ZfSolution z = zf_alternating(ch, init, 1.0);
    CHECK_FALSE(z.phase_step_skipped);
    for (size_t i = 1; i < z.trace.size(); ++i) CHECK(z.trace[i] >= z.trace[i - 1] * (1 - 1e-9));
    CHECK(z.trace.back() >= zf_solve(ch, init, 1.0).snr * (1 - 1e-9));
    check_zf_invariants(ch, z, 1.0);
  }
}

TEST_CASE("alternation on a sampled channel removes ISI") {
  const Scenario s = fixture::four_irs_scenario(16, 4, 4);
  const auto ch = sample_channel(s, 5);
  const ZfSolution z = zf_alternating(ch, PhaseConfig::zeros(4, 16), s.power_w);
  check_zf_invariants(ch, z, s.power_w);
  CHECK(z.snr <= z.relaxed_snr * (1 + 1e-9));
  for (size_t i = 1; i < z.trace.size(); ++i) CHECK(z.trace[i] >= z.trace[i - 1] * (1 - 1e-12));
  const auto mc = monte_carlo_sinr(ch, z.phases, z.beams, 20000, 3);
  CHECK(mc.isi <= 1e-10 * mc.desired);
}

TEST_CASE("single path reduces to matched filtering") {
  const auto ch = fixture::random_channel(13, 5, 1, {7});
  const ZfSolution z = zf_alternating(ch, PhaseConfig{}, 2.0);
  CHECK(z.iterations == 1);
  CHECK((z.beams.f[0] - std::sqrt(2.0) * ch.h0 / ch.h0.norm()).norm() < 1e-12);
  CHECK(z.snr == doctest::Approx(2.0 * ch.h0.squaredNorm() / ch.noise_power));
}

TEST_CASE("too many equalities skip the phase step") {
  // L = 3, M = 2: 7 unknowns against 9 equalities.
  Rng rng(14);
  const auto ch = fixture::random_channel(15, 6, 2, {0, 1, 2, 3});
  const PhaseConfig init = fixture::random_phases(rng, 3, 2);
  const ZfSolution z = zf_alternating(ch, init, 1.0);
  CHECK(z.phase_step_skipped);
  CHECK(z.snr == doctest::Approx(zf_solve(ch, init, 1.0).snr));
}

TEST_CASE("too few antennas") {
  const auto ch = fixture::random_channel(16, 2, 3, {0, 1, 2});
  CHECK_THROWS_AS(zf_alternating(ch, PhaseConfig::zeros(2, 3), 1.0), Infeasible);
}
