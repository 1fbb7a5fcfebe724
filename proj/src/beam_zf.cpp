#include "dam/beam_zf.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

namespace dam {

namespace {

// Raw (not unit-modulus) per-IRS blocks of a stacked vector.
PhaseConfig split_stacked(const CVec& v, int L, int M) {
  PhaseConfig p;
  for (int l = 0; l < L; ++l) p.v.push_back(v.segment(static_cast<Eigen::Index>(l) * M, M));
  return p;
}

// Affine set {u : B^H u = d} described by an orthonormal basis of range(B) and
// the minimum-norm member.
struct AffineSet {
  CMat U;
  CVec anchor;

  CVec project(const CVec& u) const {
    if (U.cols() == 0) return u;
    return u - U * (U.adjoint() * u) + anchor;
  }
};

AffineSet make_affine(const CMat& B, const CVec& d) {
  AffineSet a;
  const Eigen::Index K = B.rows();
  a.anchor = CVec::Zero(K);
  if (B.cols() == 0) {
    a.U.resize(K, 0);
    return a;
  }
  Eigen::JacobiSVD<CMat> svd(B, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVec& s = svd.singularValues();
  const double smax = s.size() ? s[0] : 0.0;
  Eigen::Index r = 0;
  while (r < s.size() && s[r] > 1e-12 * smax) ++r;
  a.U = svd.matrixU().leftCols(r);
  // B = U S V^H, so B^H u = V S U^H u = d is solved by u = U S^-1 V^H d.
  const CVec coeff = svd.matrixV().leftCols(r).adjoint() * d;
  a.anchor = a.U * (coeff.array() / s.head(r).array().cast<cplx>()).matrix();
  if ((B.adjoint() * a.anchor - d).norm() > 1e-8 * std::max(1.0, d.norm()))
    throw Infeasible("phase nulling constraints are inconsistent");
  return a;
}

CVec clamp_disks(CVec u) {
  for (Eigen::Index m = 0; m < u.size(); ++m) {
    const double a = std::abs(u[m]);
    if (a > 1.0) u[m] /= a;
  }
  return u;
}

// Largest s in [0, 1] with |a + s (x - a)| <= 1 elementwise, for a inside the disks.
CVec pull_into_disks(const CVec& x, const CVec& a) {
  double s = 1.0;
  for (Eigen::Index m = 0; m < x.size(); ++m) {
    if (std::abs(x[m]) <= 1.0) continue;
    const cplx am = std::abs(a[m]) > 1.0 ? a[m] / std::abs(a[m]) : a[m];
    const cplx dm = x[m] - am;
    const double dd = std::norm(dm);
    if (dd == 0) continue;
    const double b = std::real(std::conj(am) * dm);
    const double c = std::norm(am) - 1.0;
    const double root = (-b + std::sqrt(std::max(0.0, b * b - dd * c))) / dd;
    s = std::min(s, std::max(0.0, root));
  }
  return a + s * (x - a);
}

// Dykstra's alternating projections onto affine set intersected with unit disks.
CVec project_intersection(const CVec& y, const AffineSet& A, int max_iter, double tol) {
  if (A.U.cols() == 0) return clamp_disks(y);
  CVec x = y;
  CVec p = CVec::Zero(y.size());
  CVec q = CVec::Zero(y.size());
  for (int k = 0; k < max_iter; ++k) {
    const CVec a = A.project(x + p);
    p = x + p - a;
    const CVec xn = clamp_disks(a + q);
    q = a + q - xn;
    const double change = (xn - x).norm();
    x = xn;
    if (change <= tol * (1.0 + x.norm())) break;
  }
  return x;
}

void finish_beams(const ChannelRealization& chan, double power, const std::vector<CVec>& hc,
                  ZfSolution& sol) {
  sol.W = zf_nullspace_beams(hc);
  const ZfAllocation a = zf_power_allocation(sol.W, power);
  sol.mu = a.mu;
  sol.beams.f = a.f;
  sol.beams.kappa = delay_precompensation(chan.delays);
  sol.snr = a.snr(power, chan.noise_power);
}

}  // namespace

CMat zf_nullspace_beams(const std::vector<CVec>& cascaded) {
  if (cascaded.empty()) throw DomainError("no paths");
  const Eigen::Index nt = cascaded.front().size();
  const Eigen::Index P = static_cast<Eigen::Index>(cascaded.size());
  if (nt < P) throw Infeasible("zero-forcing needs at least L + 1 transmit antennas");
  CMat H(nt, P);
  for (Eigen::Index l = 0; l < P; ++l) H.col(l) = cascaded[l];
  Eigen::JacobiSVD<CMat> svd(H, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVec& s = svd.singularValues();
  if (!(s[0] > 0) || s[P - 1] <= 1e-12 * s[0])
    throw Infeasible("path channels are linearly dependent; zero-forcing impossible");
  // H = U S V^H, so (H^H)^+ = U S^-1 V^H.
  return svd.matrixU() * s.cwiseInverse().cast<cplx>().asDiagonal() * svd.matrixV().adjoint();
}

ZfAllocation zf_power_allocation(const CMat& W, double power) {
  ZfAllocation a;
  const Eigen::Index P = W.cols();
  RVec inv(P);
  for (Eigen::Index l = 0; l < P; ++l) inv[l] = 1.0 / W.col(l).squaredNorm();
  a.gain_sum = inv.sum();
  for (Eigen::Index l = 0; l < P; ++l) {
    const double mu = power / a.gain_sum * inv[l] * inv[l];
    a.mu.push_back(mu);
    a.f.push_back(std::sqrt(mu) * W.col(l));
  }
  return a;
}

double sca_surrogate(const CVec& v, const CVec& v_r, const CVec& f_tilde) {
  const cplx g = f_tilde.dot(v_r);  // f^H v_r
  const cplx lin = (v - v_r).dot(f_tilde * g);
  return std::norm(v_r.dot(f_tilde)) + 2.0 * lin.real();
}

ScaStep sca_phase_step(const CVec& v_r, const CVec& f_tilde, const std::vector<CVec>& nulling,
                       const ScaOptions& opt) {
  const Eigen::Index n = v_r.size();
  if (f_tilde.size() != n || n < 1) throw DomainError("stacked vectors disagree in length");
  const Eigen::Index K = n - 1;

  if (std::abs(v_r[K] - 1.0) > 1e-9) throw Infeasible("last stacked entry must be 1");
  for (Eigen::Index m = 0; m < K; ++m)
    if (std::abs(v_r[m]) > 1.0 + 1e-9) throw Infeasible("stacked entry outside unit disk");
  // A constraint vector at rounding level carries no information. This is the
  // normal case for rank-one G_l: ZF beams then satisfy G_l f_l' = 0 and the
  // constraint holds for every phase vector.
  std::vector<const CVec*> active;
  const double floor = 1e-9 * f_tilde.norm();
  for (const auto& b : nulling) {
    if (b.size() != n) throw DomainError("nulling vector length mismatch");
    if (b.norm() <= floor) continue;
    if (std::abs(v_r.dot(b)) > 1e-6 * b.norm() * std::max(1.0, v_r.norm()))
      throw Infeasible("starting point violates a nulling constraint");
    active.push_back(&b);
  }

  // b^H v = 0 with v_last = 1 reads B_u^H u = -conj(b_last).
  CMat B(K, static_cast<Eigen::Index>(active.size()));
  CVec d(static_cast<Eigen::Index>(active.size()));
  bool homogeneous = true;
  for (size_t k = 0; k < active.size(); ++k) {
    const CVec& b = *active[k];
    B.col(k) = b.head(K);
    d[k] = -std::conj(b[K]);
    if (b[K] != cplx{0.0, 0.0}) homogeneous = false;
  }
  const AffineSet A = make_affine(B, d);

  const CVec u_r = v_r.head(K);
  const CVec c = (f_tilde * f_tilde.dot(v_r)).head(K);
  const double fn2 = f_tilde.squaredNorm();
  const double step = fn2 > 0 ? 1.0 / fn2 : 1.0;
  const CVec anchor = homogeneous ? CVec::Zero(K) : u_r;

  auto value = [&](const CVec& u) { return u.dot(c).real(); };

  ScaStep out;
  out.surrogate_start = sca_surrogate(v_r, v_r, f_tilde);
  if (A.U.cols() == 0) {
    // Only the disks remain: each entry aligns with its gradient component.
    out.v = v_r;
    for (Eigen::Index m = 0; m < K; ++m)
      if (std::abs(c[m]) > 0) out.v[m] = c[m] / std::abs(c[m]);
    out.surrogate_end = sca_surrogate(out.v, v_r, f_tilde);
    return out;
  }
  CVec best = u_r;
  double best_val = value(u_r);
  CVec u = u_r;
  double prev = best_val;
  out.converged = false;
  for (int it = 0; it < opt.max_inner; ++it) {
    out.inner_iterations = it + 1;
    u = project_intersection(u + step * c, A, opt.max_projection, opt.projection_tol);
    // Exact feasibility: land on the affine set, then pull back into the disks
    // along the segment to a feasible anchor.
    const CVec feas = pull_into_disks(A.project(u), anchor);
    const double val = value(feas);
    if (val > best_val) {
      best_val = val;
      best = feas;
    }
    const double cur = value(u);
    if (std::abs(cur - prev) <= opt.rel_tol * std::max(std::abs(cur), 1e-300)) {
      out.converged = true;
      break;
    }
    prev = cur;
  }

  out.v.resize(n);
  out.v.head(K) = best;
  out.v[K] = 1.0;
  out.surrogate_end = sca_surrogate(out.v, v_r, f_tilde);
  return out;
}

PhaseConfig extract_phases(const CVec& v_tilde, int num_irs, int elements) {
  return PhaseConfig::from_stacked(v_tilde, num_irs, elements);
}

std::vector<CVec> zf_nulling_vectors(const ChannelRealization& chan, const BeamformerSet& beams) {
  const int L = chan.num_irs();
  const int M = chan.elements();
  const Eigen::Index n = static_cast<Eigen::Index>(L) * M + 1;
  std::vector<CVec> out;
  for (int l = 1; l <= L; ++l) {
    for (int lp = 0; lp <= L; ++lp) {
      if (lp == l) continue;
      CVec b = CVec::Zero(n);
      b.segment(static_cast<Eigen::Index>(l - 1) * M, M) =
          chan.h[l - 1].conjugate().cwiseProduct(chan.G[l - 1] * beams.f[lp]);
      out.push_back(b);
    }
  }
  return out;
}

ZfSolution zf_solve(const ChannelRealization& chan, const PhaseConfig& phases, double power) {
  ZfSolution sol;
  sol.phases = phases;
  finish_beams(chan, power, cascaded_channels(chan, phases), sol);
  sol.relaxed_snr = sol.snr;
  sol.trace.push_back(sol.snr);
  sol.iterations = 1;
  return sol;
}

ZfSolution zf_alternating(const ChannelRealization& chan, const PhaseConfig& init, double power,
                          double tol, int max_iters, const ScaOptions& opt) {
  const int L = chan.num_irs();
  const int M = chan.elements();
  if (chan.num_antennas() < L + 1)
    throw Infeasible("zero-forcing needs at least L + 1 transmit antennas");
  if (L == 0) return zf_solve(chan, init, power);
  // Each SCA subproblem carries L^2 complex equalities on L*M + 1 unknowns.
  if (static_cast<long>(L) * M + 1 <= static_cast<long>(L) * L) {
    ZfSolution sol = zf_solve(chan, init, power);
    sol.phase_step_skipped = true;
    return sol;
  }

  ZfSolution sol;
  CVec v = init.stacked();
  double prev = 0;
  for (int it = 1; it <= max_iters; ++it) {
    ZfSolution step_sol;
    finish_beams(chan, power, cascaded_channels(chan, split_stacked(v, L, M)), step_sol);
    sol.trace.push_back(step_sol.snr);
    sol.iterations = it;
    sol.relaxed_snr = step_sol.snr;
    if (it > 1 && (step_sol.snr - prev) / prev < tol) break;
    prev = step_sol.snr;
    if (it == max_iters) break;

    const CVec f_tilde = stacked_path_gain(chan, step_sol.beams.f);
    const ScaStep s = sca_phase_step(v, f_tilde, zf_nulling_vectors(chan, step_sol.beams), opt);
    sol.inner_converged = sol.inner_converged && s.converged;
    v = s.v;
  }

  sol.phases = extract_phases(v, L, M);
  finish_beams(chan, power, cascaded_channels(chan, sol.phases), sol);
  return sol;
}

}  // namespace dam
