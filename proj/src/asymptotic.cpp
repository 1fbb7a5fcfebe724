#include "dam/asymptotic.hpp"

#include <algorithm>
#include <cmath>

namespace dam {

namespace {

const cplx kJ{0.0, 1.0};

void require_los(const ChannelRealization& chan) {
  if (!chan.los_bs_irs())
    throw Unsupported("asymptotic analysis needs LoS BS-IRS channels with known angles");
}

}  // namespace

PhaseConfig asymptotic_phases(const ChannelRealization& chan) {
  require_los(chan);
  const double ref = std::arg(chan.alpha[0]);
  PhaseConfig p;
  for (int l = 0; l < chan.num_irs(); ++l) {
    const CVec x = chan.alpha[l + 1] * chan.h[l].conjugate().cwiseProduct(chan.irs_arrival[l]);
    CVec v(x.size());
    for (Eigen::Index m = 0; m < x.size(); ++m) v[m] = std::exp(kJ * (std::arg(x[m]) + ref));
    p.v.push_back(v);
  }
  return p;
}

std::vector<double> asymptotic_path_amplitudes(const ChannelRealization& chan) {
  require_los(chan);
  std::vector<double> a{std::abs(chan.alpha[0])};
  for (int l = 0; l < chan.num_irs(); ++l)
    a.push_back(std::abs(chan.alpha[l + 1]) * chan.h[l].cwiseAbs().sum());
  return a;
}

std::vector<double> asymptotic_power_allocation(const ChannelRealization& chan, double power) {
  const auto a = asymptotic_path_amplitudes(chan);
  double total = 0;
  for (double x : a) total += x * x;
  if (!(total > 0)) throw DegenerateChannel("all path amplitudes are zero");
  std::vector<double> p;
  for (double x : a) p.push_back(power * x * x / total);
  return p;
}

double asymptotic_snr(const ChannelRealization& chan, double power) {
  const auto a = asymptotic_path_amplitudes(chan);
  double total = 0;
  for (double x : a) total += x * x;
  return power / chan.noise_power * chan.num_antennas() * total;
}

DeploymentComparison deployment_compare(const DeploymentGains& g, double power,
                                        double noise_power, int centralized_index) {
  const int L = static_cast<int>(g.cascade.size());
  if (L == 0) throw DomainError("deployment comparison needs at least one IRS");
  DeploymentComparison out;
  out.centralized_index =
      centralized_index > 0
          ? centralized_index
          : 1 + static_cast<int>(std::max_element(g.cascade.begin(), g.cascade.end()) -
                                 g.cascade.begin());
  if (out.centralized_index > L) throw DomainError("centralized IRS index out of range");
  const double scale = power / noise_power * g.antennas;
  const double m2 = static_cast<double>(g.elements) * g.elements;
  double sum = 0;
  for (double c : g.cascade) sum += c * c;
  const double cc = g.cascade[out.centralized_index - 1];
  out.distributed = scale * (g.direct * g.direct + m2 * sum);
  out.centralized = scale * (g.direct * g.direct + static_cast<double>(L) * L * m2 * cc * cc);
  return out;
}

DeploymentComparison deployment_compare(const ChannelRealization& chan, double power,
                                        int centralized_index) {
  require_los(chan);
  DeploymentGains g;
  g.direct = std::abs(chan.alpha[0]);
  g.elements = chan.elements();
  g.antennas = chan.num_antennas();
  for (int l = 0; l < chan.num_irs(); ++l)
    g.cascade.push_back(std::abs(chan.alpha[l + 1]) * chan.h[l].cwiseAbs().sum() / g.elements);
  return deployment_compare(g, power, chan.noise_power, centralized_index);
}

double orthogonality_residual(const std::vector<double>& angles, int antennas) {
  double worst = 0;
  for (size_t a = 0; a < angles.size(); ++a) {
    const CVec ua = ula_response(angles[a], antennas);
    for (size_t b = a + 1; b < angles.size(); ++b)
      worst = std::max(worst, std::abs(ua.dot(ula_response(angles[b], antennas))) / antennas);
  }
  return worst;
}

double orthogonality_residual(const ChannelRealization& chan) {
  require_los(chan);
  return orthogonality_residual(chan.aod, chan.num_antennas());
}

AsymptoticReport asymptotic_report(const ChannelRealization& chan, double power) {
  AsymptoticReport r;
  r.phases = asymptotic_phases(chan);
  r.p = asymptotic_power_allocation(chan, power);
  r.snr = asymptotic_snr(chan, power);
  if (chan.num_irs() > 0) {
    const auto d = deployment_compare(chan, power);
    r.gamma_distributed = d.distributed;
    r.gamma_centralized = d.centralized;
  } else {
    r.gamma_distributed = r.gamma_centralized = r.snr;
  }
  r.orthogonality_residual = orthogonality_residual(chan);
  return r;
}

}  // namespace dam
