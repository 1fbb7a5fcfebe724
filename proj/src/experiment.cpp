#include "dam/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "dam/asymptotic.hpp"
#include "dam/beam_mmse.hpp"
#include "dam/beam_mrt.hpp"
#include "dam/beam_zf.hpp"
#include "dam/metrics.hpp"
#include "dam/modulation.hpp"
#include "dam/ofdm.hpp"
#include "dam/random.hpp"

namespace dam {

namespace {

const std::vector<std::string> kSchemes = {"zf", "mrt", "mmse", "ofdm", "asymptotic"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& s) {
  if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
  size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::invalid_argument(s);
  return v;
}

long to_long(const std::string& s) {
  size_t pos = 0;
  const long v = std::stol(s, &pos);
  if (pos != s.size()) throw std::invalid_argument(s);
  return v;
}

std::vector<double> to_doubles(const std::string& s) {
  std::vector<double> out;
  for (const auto& x : split(s, ',')) out.push_back(to_double(x));
  return out;
}

Point3 to_point(const std::string& s) {
  const auto v = to_doubles(s);
  if (v.size() != 3) throw std::invalid_argument("expected x, y, z");
  return {v[0], v[1], v[2]};
}

int guard_delay(const Scenario& s, const ChannelRealization& chan) {
  return s.max_delay_bound > 0 ? s.max_delay_bound : chan.n_max();
}

// Calls body(run) for run = 0..runs-1 on a small worker pool. Results must be
// written to per-run slots so aggregation order stays fixed.
template <class F>
void for_each_run(int runs, int threads, F body) {
  int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, std::max(1, runs));
  std::vector<std::exception_ptr> errors(runs);
  std::atomic<int> next{0};
  auto work = [&] {
    for (int r = next++; r < runs; r = next++) {
      try {
        body(r);
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

class Logger {
 public:
  explicit Logger(std::ostream* out) : out_(out) {}
  void line(const std::string& s) {
    if (!out_) return;
    std::lock_guard<std::mutex> lock(mu_);
    *out_ << s << '\n';
  }
  bool enabled() const { return out_ != nullptr; }

 private:
  std::ostream* out_;
  std::mutex mu_;
};

std::uint64_t run_seed(const ExperimentConfig& cfg, int run) {
  return derive_seed(cfg.seed, static_cast<std::uint64_t>(run));
}

CVec random_symbols(Rng& rng, long n, int order) {
  const auto& c = qam(order);
  std::uniform_int_distribution<unsigned> pick(0, static_cast<unsigned>(order - 1));
  CVec s(n);
  for (long i = 0; i < n; ++i) s[i] = c.modulate(pick(rng));
  return s;
}

// ---------------------------------------------------------------- sweeps

struct SchemeValue {
  bool ok = false;
  double se = 0;
  double snr = std::nan("");
  std::string note;
};

std::map<std::string, SchemeValue> evaluate_schemes(const ExperimentConfig& cfg,
                                                    const Scenario& s,
                                                    const ChannelRealization& chan,
                                                    Logger& log, int run) {
  std::map<std::string, SchemeValue> out;
  const double P = s.power_w;
  const long nc = s.coherence_samples();
  const int guard = guard_delay(s, chan);
  const PhaseConfig co = mrt_phases(chan);
  auto want = [&](const char* n) {
    return std::find(cfg.schemes.begin(), cfg.schemes.end(), n) != cfg.schemes.end();
  };
  auto dam_value = [&](double snr) {
    SchemeValue v;
    v.ok = true;
    v.snr = snr;
    v.se = dam_spectral_efficiency(snr, guard, nc);
    return v;
  };

  if (want("zf")) {
    if (chan.num_antennas() < chan.num_paths()) {
      out["zf"].note = "infeasible: N_t < L+1";
    } else {
      try {
        const ZfSolution z =
            zf_alternating(chan, co, P, cfg.zf_tolerance, cfg.max_outer_iterations);
        out["zf"] = dam_value(z.snr);
        if (log.enabled())
          log.line("run " + std::to_string(run) + " zf: " + std::to_string(z.iterations) +
                   " outer iterations, relaxed " + format_number(linear_to_db(z.relaxed_snr)) +
                   " dB, projected " + format_number(linear_to_db(z.snr)) + " dB");
      } catch (const Infeasible& e) {
        out["zf"].note = std::string("infeasible: ") + e.what();
      }
    }
  }
  if (want("mrt")) out["mrt"] = dam_value(sinr_closed_form(chan, co, mrt_beams(chan, co, P)));
  if (want("mmse")) {
    const MmseSolution m = mmse_alternating(chan, co, P, cfg.mmse_tolerance,
                                            cfg.max_outer_iterations);
    out["mmse"] = dam_value(m.sinr);
    if (log.enabled())
      log.line("run " + std::to_string(run) + " mmse: " + std::to_string(m.iterations) +
               " iterations, SINR " + format_number(linear_to_db(m.sinr)) + " dB");
  }
  if (want("ofdm")) {
    OfdmConfig oc{s.subcarriers, guard, nc};
    oc.validate(chan.n_max());
    const OfdmDesign d = ofdm_design(chan, co, P, oc);
    SchemeValue v;
    v.ok = true;
    v.se = d.spectral_efficiency;
    out["ofdm"] = v;
  }
  if (want("asymptotic")) {
    if (chan.los_bs_irs()) {
      out["asymptotic"] = dam_value(asymptotic_snr(chan, P));
    } else {
      out["asymptotic"].note = "unsupported: no LoS metadata";
    }
  }
  return out;
}

ResultTable run_sweep(const ExperimentConfig& cfg, Logger& log) {
  const bool antennas = cfg.kind == ExperimentKind::Antennas;
  ResultTable t;
  t.columns = {antennas ? "num_antennas" : "num_elements", "scheme", "se_bps_hz", "snr_db",
               "runs", "note"};
  for (double x : cfg.sweep_values) {
    Scenario s = cfg.scenario;
    if (antennas) {
      s.num_antennas = static_cast<int>(std::lround(x));
    } else {
      const long m = std::lround(x);
      if (m % s.irs_horizontal != 0)
        throw ConfigError("element count " + std::to_string(m) +
                          " is not a multiple of irs_horizontal");
      s.irs_vertical = static_cast<int>(m / s.irs_horizontal);
    }
    s.validate();

    std::vector<std::map<std::string, SchemeValue>> res(cfg.monte_carlo_runs);
    for_each_run(cfg.monte_carlo_runs, cfg.threads, [&](int r) {
      const ChannelRealization chan = sample_channel(s, run_seed(cfg, r));
      res[r] = evaluate_schemes(cfg, s, chan, log, r);
    });

    for (const auto& name : cfg.schemes) {
      double se = 0, snr = 0;
      int ok = 0;
      std::string note;
      for (const auto& run : res) {
        const auto& v = run.at(name);
        if (v.ok) {
          ++ok;
          se += v.se;
          if (!std::isnan(v.snr)) snr += v.snr;
        } else if (note.empty()) {
          note = v.note;
        }
      }
      const bool has_snr = name != "ofdm";
      t.add({format_number(x), name, ok ? format_number(se / ok) : "",
             ok && has_snr ? format_number(linear_to_db(snr / ok)) : "", std::to_string(ok),
             note});
    }
  }
  return t;
}

// ----------------------------------------------------------- convergence

ResultTable run_convergence(const ExperimentConfig& cfg, Logger& log) {
  const Scenario& s = cfg.scenario;
  s.validate();
  const int runs = cfg.monte_carlo_runs;
  const int L = s.num_irs();
  // series name -> per-run trace
  std::vector<std::map<std::string, std::vector<double>>> traces(runs);
  for_each_run(runs, cfg.threads, [&](int r) {
    const ChannelRealization chan = sample_channel(s, run_seed(cfg, r));
    auto& tr = traces[r];
    const auto cd = coordinate_descent(chan, PhaseConfig::zeros(L, chan.elements()));
    const int M = chan.elements();
    for (int l = 0; l < L; ++l) {
      // One point per sweep (the value after its last element update).
      std::vector<double> per_sweep{cd.trace[l].front()};
      for (size_t k = M; k < cd.trace[l].size(); k += M) per_sweep.push_back(cd.trace[l][k]);
      tr["mrt_irs" + std::to_string(l + 1)] = per_sweep;
    }
    if (std::find(cfg.schemes.begin(), cfg.schemes.end(), "zf") != cfg.schemes.end() &&
        chan.num_antennas() >= chan.num_paths()) {
      const auto z = zf_alternating(chan, cd.phases, s.power_w, cfg.zf_tolerance,
                                    cfg.max_outer_iterations);
      tr["zf"] = z.trace;
      log.line("run " + std::to_string(r) + " zf converged in " + std::to_string(z.iterations) +
               " iterations");
    }
    if (std::find(cfg.schemes.begin(), cfg.schemes.end(), "mmse") != cfg.schemes.end()) {
      const auto m = mmse_alternating(chan, cd.phases, s.power_w, cfg.mmse_tolerance,
                                      cfg.max_outer_iterations);
      std::vector<double> v;
      for (const auto& it : m.trace) v.push_back(it.after_beam);
      tr["mmse"] = v;
      log.line("run " + std::to_string(r) + " mmse converged in " +
               std::to_string(m.iterations) + " iterations");
    }
  });

  ResultTable t;
  t.columns = {"iteration", "series", "value", "value_db", "runs"};
  std::vector<std::string> names;
  for (const auto& [k, v] : traces.front()) names.push_back(k);
  for (const auto& name : names) {
    size_t len = 0;
    for (const auto& tr : traces) len = std::max(len, tr.at(name).size());
    for (size_t i = 0; i < len; ++i) {
      double sum = 0;
      for (const auto& tr : traces) {
        const auto& v = tr.at(name);
        sum += i < v.size() ? v[i] : v.back();  // converged runs hold their value
      }
      const double mean = sum / runs;
      t.add({std::to_string(i), name, format_number(mean), format_number(linear_to_db(mean)),
             std::to_string(runs)});
    }
  }
  return t;
}

// ------------------------------------------------------------------ BER

ResultTable run_ber(const ExperimentConfig& cfg, Logger& log) {
  const Scenario base = cfg.scenario;
  base.validate();
  const int runs = cfg.monte_carlo_runs;
  const size_t np = cfg.sweep_values.size();
  const size_t nq = cfg.qam_orders.size();
  for (int q : cfg.qam_orders) qam(q);  // reject unsupported orders early

  // [run][power][qam] -> (dam, ofdm)
  std::vector<std::vector<std::vector<std::pair<double, double>>>> res(
      runs, std::vector<std::vector<std::pair<double, double>>>(np, std::vector<std::pair<double, double>>(nq)));
  for_each_run(runs, cfg.threads, [&](int r) {
    const ChannelRealization chan = sample_channel(base, run_seed(cfg, r));
    if (chan.num_antennas() < chan.num_paths())
      throw Infeasible("BER experiment needs N_t >= L + 1 for ZF");
    const PhaseConfig co = mrt_phases(chan);
    const int guard = guard_delay(base, chan);
    OfdmConfig oc{base.subcarriers, guard, base.coherence_samples()};
    oc.validate(chan.n_max());
    for (size_t i = 0; i < np; ++i) {
      const double P = dbm_to_watts(cfg.sweep_values[i]);
      const ZfSolution z = zf_alternating(chan, co, P, cfg.zf_tolerance, cfg.max_outer_iterations);
      const OfdmDesign d = ofdm_design(chan, co, P, oc);
      for (size_t j = 0; j < nq; ++j)
        res[r][i][j] = {ber_dam_zf(z, cfg.qam_orders[j]),
                        ofdm_ber(d.hk, d.powers, chan.noise_power, guard, cfg.qam_orders[j])};
      log.line("run " + std::to_string(r) + " P=" + format_number(cfg.sweep_values[i]) +
               " dBm: ZF SNR " + format_number(linear_to_db(z.snr)) + " dB");
    }
  });

  ResultTable t;
  t.columns = {"power_dbm", "scheme", "qam_order", "ber", "runs"};
  for (size_t i = 0; i < np; ++i)
    for (size_t j = 0; j < nq; ++j) {
      double dam = 0, ofdm = 0;
      for (int r = 0; r < runs; ++r) {
        dam += res[r][i][j].first;
        ofdm += res[r][i][j].second;
      }
      const std::string p = format_number(cfg.sweep_values[i]);
      const std::string q = std::to_string(cfg.qam_orders[j]);
      t.add({p, "dam_zf", q, format_number(dam / runs), std::to_string(runs)});
      t.add({p, "ofdm", q, format_number(ofdm / runs), std::to_string(runs)});
    }
  return t;
}

// ----------------------------------------------------------------- PAPR

ResultTable run_papr(const ExperimentConfig& cfg, Logger& log) {
  const Scenario s = cfg.scenario;
  s.validate();
  const int runs = cfg.monte_carlo_runs;
  const long per_run = (cfg.papr_windows + static_cast<long>(s.num_antennas) * runs - 1) /
                       (static_cast<long>(s.num_antennas) * runs);
  std::vector<std::vector<double>> dam_papr(runs), ofdm_papr(runs);
  for_each_run(runs, cfg.threads, [&](int r) {
    const ChannelRealization chan = sample_channel(s, run_seed(cfg, r));
    if (chan.num_antennas() < chan.num_paths())
      throw Infeasible("PAPR experiment needs N_t >= L + 1 for ZF");
    const PhaseConfig co = mrt_phases(chan);
    const int guard = guard_delay(s, chan);
    const int K = s.subcarriers;
    const int window = K + guard;
    Rng rng(derive_seed(run_seed(cfg, r), 7));

    const ZfSolution z =
        zf_alternating(chan, co, s.power_w, cfg.zf_tolerance, cfg.max_outer_iterations);
    const int kmax = *std::max_element(z.beams.kappa.begin(), z.beams.kappa.end());
    const CVec sym = random_symbols(rng, per_run * window + kmax, s.qam_order);
    const CMat x = synthesize_transmit(sym, z.beams);
    // Skip the ramp-up where not every path is active yet.
    dam_papr[r] = papr_windows(x.middleCols(kmax, per_run * window), window);

    OfdmConfig oc{K, guard, s.coherence_samples()};
    oc.validate(chan.n_max());
    const OfdmDesign d = ofdm_design(chan, co, s.power_w, oc);
    CMat S(K, per_run);
    for (long c = 0; c < per_run; ++c) S.col(c) = random_symbols(rng, K, s.qam_order);
    ofdm_papr[r] = papr_windows(ofdm_waveform(S, ofdm_beams(d.hk, d.powers), guard), window);
    log.line("run " + std::to_string(r) + ": " + std::to_string(dam_papr[r].size()) +
             " windows per scheme");
  });

  std::vector<double> dam_all, ofdm_all;
  for (int r = 0; r < runs; ++r) {
    dam_all.insert(dam_all.end(), dam_papr[r].begin(), dam_papr[r].end());
    ofdm_all.insert(ofdm_all.end(), ofdm_papr[r].begin(), ofdm_papr[r].end());
  }
  const auto cd = ccdf(dam_all, cfg.sweep_values);
  const auto co = ccdf(ofdm_all, cfg.sweep_values);
  ResultTable t;
  t.columns = {"threshold_db", "scheme", "ccdf", "windows"};
  for (size_t i = 0; i < cfg.sweep_values.size(); ++i) {
    t.add({format_number(cfg.sweep_values[i]), "dam", format_number(cd[i]),
           std::to_string(dam_all.size())});
    t.add({format_number(cfg.sweep_values[i]), "ofdm", format_number(co[i]),
           std::to_string(ofdm_all.size())});
  }
  return t;
}

std::vector<double> range(double a, double b, double step) {
  std::vector<double> v;
  for (int i = 0; a + i * step <= b + 1e-9; ++i) v.push_back(a + i * step);
  return v;
}

}  // namespace

ExperimentKind parse_kind(const std::string& name) {
  if (name == "convergence") return ExperimentKind::Convergence;
  if (name == "antennas" || name == "sweep-antennas") return ExperimentKind::Antennas;
  if (name == "elements" || name == "sweep-elements") return ExperimentKind::Elements;
  if (name == "power" || name == "ber") return ExperimentKind::Power;
  if (name == "papr") return ExperimentKind::Papr;
  throw ConfigError("unknown experiment '" + name + "'");
}

std::string kind_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Convergence: return "convergence";
    case ExperimentKind::Antennas: return "antennas";
    case ExperimentKind::Elements: return "elements";
    case ExperimentKind::Power: return "power";
    case ExperimentKind::Papr: return "papr";
  }
  return "?";
}

void ExperimentConfig::validate() const {
  scenario.validate();
  if (monte_carlo_runs < 1) throw ConfigError("monte_carlo_runs must be >= 1");
  if (kind != ExperimentKind::Convergence) {
    if (sweep_values.empty()) throw ConfigError("sweep_values is empty");
    for (size_t i = 1; i < sweep_values.size(); ++i)
      if (!(sweep_values[i] > sweep_values[i - 1]))
        throw ConfigError("sweep_values must be strictly increasing");
  }
  for (const auto& s : schemes)
    if (std::find(kSchemes.begin(), kSchemes.end(), s) == kSchemes.end())
      throw ConfigError("unknown scheme '" + s + "'");
  if (kind == ExperimentKind::Power && qam_orders.empty())
    throw ConfigError("qam_orders is empty");
  if (papr_windows < 1) throw ConfigError("papr_windows must be >= 1");
  if (max_outer_iterations < 1) throw ConfigError("max_outer_iterations must be >= 1");
  // Every realization shares the geometry, so a tap collision is a config error.
  std::vector<int> d = geometric_delays(scenario);
  std::sort(d.begin(), d.end());
  if (std::adjacent_find(d.begin(), d.end()) != d.end())
    throw ConfigError("geometry puts two paths on the same integer tap");
}

ExperimentConfig default_reference_config() {
  ExperimentConfig c;
  Scenario& s = c.scenario;
  s.bs_position = {0, 0, 0};
  s.user_position = {100, 0, 0};
  s.irs_positions = {{5, 5, 0}, {5, -10, 0}, {50, 75, 0}, {90, -15, 0}};
  s.num_antennas = 128;
  s.irs_horizontal = 16;
  s.irs_vertical = 16;
  s.bandwidth_hz = 128e6;
  s.noise_psd_w_per_hz = dbm_to_watts(-174.0);
  s.coherence_time_s = 1e-3;
  s.rician_factor = db_to_linear(5.0);
  s.exponent_direct = 3.5;
  s.exponent_bs_irs = 2.0;
  s.exponent_irs_user = 2.0;
  s.subcarriers = 512;
  s.max_delay_bound = 77;
  s.power_w = dbm_to_watts(40.0);
  s.qam_order = 128;
  c.kind = ExperimentKind::Antennas;
  c.sweep_values = {8, 16, 32, 64, 128};
  c.schemes = {"zf", "mrt", "mmse", "ofdm"};
  c.qam_orders = {128, 256};
  c.monte_carlo_runs = 20;
  return c;
}

ExperimentConfig default_config(ExperimentKind kind) {
  ExperimentConfig c = default_reference_config();
  c.kind = kind;
  switch (kind) {
    case ExperimentKind::Convergence:
      c.scenario.num_antennas = 64;
      c.scenario.irs_horizontal = c.scenario.irs_vertical = 8;
      c.scenario.power_w = dbm_to_watts(30.0);
      c.schemes = {"zf", "mmse"};
      c.sweep_values.clear();
      c.monte_carlo_runs = 1;
      break;
    case ExperimentKind::Antennas:
      break;
    case ExperimentKind::Elements:
      c.scenario.num_antennas = 64;
      c.scenario.irs_horizontal = 10;
      c.sweep_values = {40, 80, 120, 160, 200, 240};
      break;
    case ExperimentKind::Power:
      c.sweep_values = range(30, 45, 2.5);
      c.schemes = {"zf", "ofdm"};
      break;
    case ExperimentKind::Papr:
      c.sweep_values = range(0, 12, 0.5);
      c.schemes = {"zf", "ofdm"};
      c.monte_carlo_runs = 4;
      break;
  }
  return c;
}

ExperimentConfig parse_config(std::istream& in, ExperimentConfig c) {
  Scenario& s = c.scenario;
  bool explicit_c0 = false;
  double carrier = 0;
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    try {
      if (key == "experiment") c.kind = parse_kind(val);
      else if (key == "bs_position_m") s.bs_position = to_point(val);
      else if (key == "user_position_m") s.user_position = to_point(val);
      else if (key == "irs_positions_m") {
        s.irs_positions.clear();
        for (const auto& p : split(val, ';')) s.irs_positions.push_back(to_point(p));
      } else if (key == "num_antennas") s.num_antennas = static_cast<int>(to_long(val));
      else if (key == "irs_horizontal") s.irs_horizontal = static_cast<int>(to_long(val));
      else if (key == "irs_vertical") s.irs_vertical = static_cast<int>(to_long(val));
      else if (key == "element_spacing_wavelengths") s.element_spacing = to_double(val);
      else if (key == "bandwidth_hz") s.bandwidth_hz = to_double(val);
      else if (key == "power_dbm") s.power_w = dbm_to_watts(to_double(val));
      else if (key == "noise_psd_dbm_per_hz") s.noise_psd_w_per_hz = dbm_to_watts(to_double(val));
      else if (key == "coherence_time_s") s.coherence_time_s = to_double(val);
      else if (key == "rician_factor_db") s.rician_factor = db_to_linear(to_double(val));
      else if (key == "carrier_hz") carrier = to_double(val);
      else if (key == "ref_path_loss_db") {
        s.ref_path_loss = db_to_linear(to_double(val));
        explicit_c0 = true;
      } else if (key == "ref_distance_m") s.ref_distance_m = to_double(val);
      else if (key == "exponent_direct") s.exponent_direct = to_double(val);
      else if (key == "exponent_bs_irs") s.exponent_bs_irs = to_double(val);
      else if (key == "exponent_irs_user") s.exponent_irs_user = to_double(val);
      else if (key == "subcarriers") s.subcarriers = static_cast<int>(to_long(val));
      else if (key == "cp_length") s.max_delay_bound = static_cast<int>(to_long(val));
      else if (key == "qam_order") s.qam_order = static_cast<int>(to_long(val));
      else if (key == "qam_orders") {
        c.qam_orders.clear();
        for (double q : to_doubles(val)) c.qam_orders.push_back(static_cast<int>(q));
      } else if (key == "sweep_values") c.sweep_values = to_doubles(val);
      else if (key == "schemes") c.schemes = split(val, ',');
      else if (key == "monte_carlo_runs") c.monte_carlo_runs = static_cast<int>(to_long(val));
      else if (key == "seed") c.seed = static_cast<std::uint64_t>(to_long(val));
      else if (key == "papr_windows") c.papr_windows = to_long(val);
      else if (key == "zf_tolerance") c.zf_tolerance = to_double(val);
      else if (key == "mmse_tolerance") c.mmse_tolerance = to_double(val);
      else if (key == "max_outer_iterations") c.max_outer_iterations = static_cast<int>(to_long(val));
      else if (key == "threads") c.threads = static_cast<int>(to_long(val));
      else if (key == "output") c.output_path = val;
      else throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      throw ConfigError("line " + std::to_string(lineno) + ": bad value for '" + key + "': " + val);
    }
  }
  if (carrier > 0 && !explicit_c0) s.ref_path_loss = free_space_reference_loss(carrier);
  return c;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  return parse_config(in, std::move(base));
}

void ResultTable::add(std::vector<std::string> row) {
  if (row.size() != columns.size()) throw DomainError("row width does not match header");
  rows.push_back(std::move(row));
}

std::string format_number(double x) {
  if (std::isnan(x)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string to_csv(const ResultTable& t) {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      const std::string& c = cells[i];
      if (c.find_first_of(",\"\n") == std::string::npos) {
        out += c;
        continue;
      }
      out += '"';
      for (char ch : c) {
        if (ch == '"') out += '"';
        out += ch;
      }
      out += '"';
    }
    out += '\n';
  };
  line(t.columns);
  for (const auto& r : t.rows) line(r);
  return out;
}

void emit_csv(const ResultTable& t, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path);
  f << to_csv(t);
  if (!f) throw Error("write failed for " + path);
}

ResultTable run_experiment(const ExperimentConfig& cfg, std::ostream* log) {
  cfg.validate();
  Logger logger(log);
  switch (cfg.kind) {
    case ExperimentKind::Convergence: return run_convergence(cfg, logger);
    case ExperimentKind::Antennas:
    case ExperimentKind::Elements: return run_sweep(cfg, logger);
    case ExperimentKind::Power: return run_ber(cfg, logger);
    case ExperimentKind::Papr: return run_papr(cfg, logger);
  }
  throw ConfigError("unknown experiment");
}

}  // namespace dam
