#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "d2d/channel.hpp"
#include "d2d/mode_selection.hpp"
#include "d2d/ortho_alloc.hpp"
#include "d2d/reuse_power.hpp"
#include "d2d/rng.hpp"
#include "d2d/sim/config.hpp"
#include "d2d/sim/csv.hpp"

namespace d2d::sim {

struct RunOptions {
  int jobs = 1;
  bool emit_plot = false;
};

struct ExperimentResult {
  std::string csv;
  std::string csv_path;
  std::string plot_script;  // empty unless requested
  std::string summary;      // human-readable notes (timings etc.), stdout only
};

namespace detail {

// The D2D pair lives on the x = y diagonal: DRx at diagonal distance d_mr
// from the origin, DTx between the MBS and the DRx at separation d. The DTx
// keeps a 1 m standoff from the MBS so no link degenerates to zero length.
inline Topology pair_topology(const SimConfig& cfg, double d_mr, double d) {
  Topology topo = cfg.topology;
  double dtx_diag = d_mr - d;
  if (std::fabs(dtx_diag) < 1.0) dtx_diag = 1.0;
  topo.at(NodeId::Drx) = Topology::diag_point(d_mr);
  topo.at(NodeId::Dtx) = Topology::diag_point(dtx_diag);
  return topo;
}

template <typename Fn>
void parallel_for(std::size_t count, int jobs, Fn&& fn) {
  jobs = std::max(1, jobs);
  if (jobs == 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  const int workers = std::min<int>(jobs, static_cast<int>(count));
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

inline double mean_of(const std::vector<double>& values, std::size_t lo, std::size_t hi,
                      std::size_t stride, std::size_t offset) {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = lo; i < hi; ++i) {
    sum += values[i * stride + offset];
    ++n;
  }
  return n > 0 ? sum / static_cast<double>(n) : 0.0;
}

inline std::string plot_header(const std::string& xlabel, const std::string& ylabel) {
  std::string s;
  s += "# gnuplot script\n";
  s += "set datafile separator ','\n";
  s += "set key autotitle columnhead\n";
  s += "set grid\n";
  s += "set xlabel '" + xlabel + "'\n";
  s += "set ylabel '" + ylabel + "'\n";
  return s;
}

inline std::string csv_basename(const std::string& path) {
  const auto slash = path.find_last_of('/');
  return slash == std::string::npos ? path : path.substr(slash + 1);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// fig5: share of potential pairs admitted to dedicated mode under the
// constant, adaptive and max-of-both distance policies.
// ---------------------------------------------------------------------------

struct Fig5Trial {
  double d = 0.0;
  bool orthogonal = false;
  bool admit_constant = false;
  bool admit_adaptive = false;
  bool admit_max = false;
};

inline Fig5Trial fig5_trial(const SimConfig& cfg, std::size_t sweep_idx, std::size_t trial_idx) {
  const auto& e = cfg.experiment;
  Rng rng(e.master_seed, sweep_idx, trial_idx);
  Fig5Trial t;
  t.d = rng.uniform() * e.pair_distance_max_m;
  if (t.d <= 0.0) t.d = 1e-3;
  const Topology topo = detail::pair_topology(cfg, e.drx_diag_sweep_m[sweep_idx], t.d);
  const LinkGains gains = sample_gains(topo, cfg.system, rng);
  t.orthogonal = rng.bernoulli(e.orthogonal_probability);
  const double d_adaptive = adaptive_distance_threshold(gains, cfg.system);
  t.admit_constant = t.orthogonal && t.d <= cfg.system.d_constant_m;
  t.admit_adaptive = t.orthogonal && t.d <= d_adaptive;
  t.admit_max = t.orthogonal && t.d <= std::max(cfg.system.d_constant_m, d_adaptive);
  return t;
}

// ---------------------------------------------------------------------------
// fig6a: direct-link rate gain over the relayed path versus pair separation.
// The relayed rate at a sweep point is min(mean uplink rate, mean downlink
// rate), the throughput of a buffered two-hop relay over block fading.
// ---------------------------------------------------------------------------

struct Fig6aTrial {
  double rate_d2d = 0.0;
  double rate_ul = 0.0;
  double rate_dl = 0.0;
};

inline std::size_t fig6a_sweep_size(const ExperimentConfig& e) {
  return e.drx_diag_sweep_m.size() * e.pair_distance_sweep_m.size();
}

inline Fig6aTrial fig6a_trial(const SimConfig& cfg, std::size_t sweep_idx, std::size_t trial_idx) {
  const auto& e = cfg.experiment;
  const std::size_t n_d = e.pair_distance_sweep_m.size();
  const double d_mr = e.drx_diag_sweep_m[sweep_idx / n_d];
  const double d = e.pair_distance_sweep_m[sweep_idx % n_d];
  Rng rng(e.master_seed, sweep_idx, trial_idx);
  const LinkGains gains = sample_gains(detail::pair_topology(cfg, d_mr, d), cfg.system, rng);
  const TwoHopSinr hops = two_hop_sinr_branches(gains, cfg.system);
  Fig6aTrial t;
  t.rate_d2d = std::log2(1.0 + d2d_sinr_at_max(gains, cfg.system));
  t.rate_ul = std::log2(1.0 + hops.ul);
  t.rate_dl = std::log2(1.0 + hops.dl);
  return t;
}

// ---------------------------------------------------------------------------
// fig6b: DRx rate when D2D mode is granted on distance alone versus the
// two-stage rule that also requires the direct link to beat the relay.
// ---------------------------------------------------------------------------

struct Fig6bTrial {
  double rate_distance_only = 0.0;
  double rate_two_stage = 0.0;
};

inline Fig6bTrial fig6b_trial(const SimConfig& cfg, std::size_t sweep_idx, std::size_t trial_idx) {
  const auto& e = cfg.experiment;
  Rng rng(e.master_seed, sweep_idx, trial_idx);
  const LinkGains gains = sample_gains(
      detail::pair_topology(cfg, e.drx_diag_sweep_m[sweep_idx], e.pair_distance_m), cfg.system, rng);
  const double s_d2d = d2d_sinr_at_max(gains, cfg.system);
  const double s_cell = cellular_two_hop_sinr(gains, cfg.system);
  Fig6bTrial t;
  t.rate_distance_only = std::log2(1.0 + s_d2d);
  t.rate_two_stage = std::log2(1.0 + std::max(s_d2d, s_cell));
  return t;
}

// ---------------------------------------------------------------------------
// fig7: reuse-mode sum rate from the vertex search against the exhaustive
// grid oracle, with evaluation counts and (summary-only) wall times.
// ---------------------------------------------------------------------------

struct Fig7Trial {
  bool feasible = false;      // vertex search found an admissible point
  bool oracle_missed = false; // vertex feasible but the grid found nothing
  double vertex_rate = 0.0;
  double oracle_rate = 0.0;
  double vertex_candidates = 0.0;
  double oracle_evaluations = 0.0;
  std::int64_t vertex_ns = 0;
  std::int64_t oracle_ns = 0;
};

inline LinkGains fig7_gains(const SimConfig& cfg, std::size_t sweep_idx, std::size_t trial_idx) {
  const auto& e = cfg.experiment;
  Rng rng(e.master_seed, sweep_idx, trial_idx);
  return sample_gains(
      detail::pair_topology(cfg, e.drx_diag_sweep_m[sweep_idx], e.pair_distance_m), cfg.system, rng);
}

inline Fig7Trial fig7_trial(const SimConfig& cfg, std::size_t sweep_idx, std::size_t trial_idx) {
  using clock = std::chrono::steady_clock;
  const LinkGains gains = fig7_gains(cfg, sweep_idx, trial_idx);
  Fig7Trial t;
  const auto t0 = clock::now();
  const ReuseSolution vertex = vertex_search(gains, cfg.system);
  const auto t1 = clock::now();
  const ReuseSolution oracle = exhaustive_search(gains, cfg.system, cfg.experiment.oracle_grid);
  const auto t2 = clock::now();
  t.vertex_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count();
  t.oracle_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(t2 - t1).count();
  t.feasible = vertex.feasible;
  t.oracle_missed = vertex.feasible && !oracle.feasible;
  t.vertex_rate = vertex.sum_rate_bps_hz;
  t.oracle_rate = oracle.sum_rate_bps_hz;
  t.vertex_candidates = static_cast<double>(vertex.candidates_tested);
  t.oracle_evaluations = static_cast<double>(oracle.candidates_tested);
  return t;
}

// ---------------------------------------------------------------------------
// fig8: rate-constrained dedicated over cellular sum-rate gain across the
// (pair separation, DRx position) grid.
// ---------------------------------------------------------------------------

struct Fig8Trial {
  bool dedicated_ok = false;
  bool cellular_ok = false;
  double dedicated_rate = 0.0;
  double cellular_rate = 0.0;
};

inline std::size_t fig8_sweep_size(const ExperimentConfig& e) {
  return e.pair_distance_sweep_m.size() * e.drx_diag_sweep_m.size();
}

inline Fig8Trial fig8_trial(const SimConfig& cfg, std::size_t sweep_idx, std::size_t trial_idx) {
  const auto& e = cfg.experiment;
  const std::size_t n_mr = e.drx_diag_sweep_m.size();
  const double d = e.pair_distance_sweep_m[sweep_idx / n_mr];
  const double d_mr = e.drx_diag_sweep_m[sweep_idx % n_mr];
  Rng rng(e.master_seed, sweep_idx, trial_idx);
  const LinkGains gains = sample_gains(detail::pair_topology(cfg, d_mr, d), cfg.system, rng);
  const double noise = gains.noise_mw;
  const auto& s = cfg.system;

  Fig8Trial t;
  const std::array<double, 3> ded_snrs{
      s.p_max_mbs_mw * gains.gain(TxId::Mbs, RxId::Cue) / noise,
      s.p_max_dtx_mw * gains.gain(TxId::Dtx, RxId::Drx) / noise,
      s.p_max_fap_mw * gains.gain(TxId::Fap, RxId::Fue) / noise};
  const std::array<double, 3> ded_mins{e.r_mins.cue, e.r_mins.d2d, e.r_mins.fue};
  try {
    const DedicatedAllocation ded = dedicated_constrained(ded_snrs, ded_mins);
    t.dedicated_ok = true;
    t.dedicated_rate = ded.sum_rate;
  } catch (const InfeasibleError&) {
  }

  CellularSnrs cell_snrs;
  cell_snrs.cue_ul = s.p_max_cue_mw * gains.gain(TxId::Cue, RxId::Mbs) / noise;
  cell_snrs.d2d_ul = s.p_max_dtx_mw * gains.gain(TxId::Dtx, RxId::Mbs) / noise;
  cell_snrs.d2d_dl = s.p_max_mbs_mw * gains.gain(TxId::Mbs, RxId::Drx) / noise;
  cell_snrs.fue = s.p_max_fap_mw * gains.gain(TxId::Fap, RxId::Fue) / noise;
  const CellularAllocation cell = cellular_constrained(cell_snrs, e.r_mins, e.lattice_step);
  t.cellular_ok = cell.feasible;
  t.cellular_rate = cell.sum_rate;
  return t;
}

// ---------------------------------------------------------------------------
// single-shot: the full decision pipeline on one explicit instance.
// ---------------------------------------------------------------------------

struct TrialRecord {
  Mode mode_selected = Mode::Cellular;
  Mode mode_final = Mode::Cellular;
  double d_m = 0.0;
  bool orthogonal_available = false;
  ModeDecision decision;
  bool reuse_fallback = false;        // reuse chosen but power problem infeasible
  bool allocation_infeasible = false; // rate targets unreachable in the final mode
  PowerVector powers;                 // reuse mode
  std::vector<double> fractions;      // dedicated mode
  CellularAllocation cellular;        // cellular mode
  std::vector<double> per_user_rate;
  double sum_rate = 0.0;
};

namespace detail {

inline const char* tx_name(TxId t) {
  switch (t) {
    case TxId::Dtx: return "DTX";
    case TxId::Mbs: return "MBS";
    case TxId::Fap: return "FAP";
    default: return "CUE";
  }
}

inline const char* rx_name(RxId r) {
  switch (r) {
    case RxId::Drx: return "DRX";
    case RxId::Cue: return "CUE";
    case RxId::Fue: return "FUE";
    default: return "MBS";
  }
}

inline LinkGains single_shot_gains(const SimConfig& cfg) {
  const auto& e = cfg.experiment;
  if (e.fading_all || !e.fading_links.empty()) {
    return d2d::detail::make_gains(cfg.topology, cfg.system, [&](TxId t, RxId r) {
      const std::string key = std::string(tx_name(t)) + "->" + rx_name(r);
      const auto it = e.fading_links.find(key);
      if (it != e.fading_links.end()) return it->second;
      return e.fading_all.value_or(1.0);
    });
  }
  Rng rng(e.master_seed, 0, 0);
  return sample_gains(cfg.topology, cfg.system, rng);
}

}  // namespace detail

inline TrialRecord single_shot(const SimConfig& cfg) {
  const auto& e = cfg.experiment;
  const auto& s = cfg.system;
  const LinkGains gains = detail::single_shot_gains(cfg);
  TrialRecord rec;
  rec.d_m = cfg.topology.dist(NodeId::Dtx, NodeId::Drx);
  if (e.orthogonal_override) {
    rec.orthogonal_available = *e.orthogonal_override;
  } else {
    Rng rng(e.master_seed, 1, 0);
    rec.orthogonal_available = rng.bernoulli(e.orthogonal_probability);
  }
  rec.decision = select_mode(gains, s, rec.d_m, rec.orthogonal_available);
  rec.mode_selected = rec.decision.mode;
  rec.mode_final = rec.mode_selected;

  if (rec.mode_final == Mode::Reuse) {
    const ReuseSolution sol = vertex_search(gains, s);
    if (sol.feasible) {
      rec.powers = sol.powers;
      rec.sum_rate = sol.sum_rate_bps_hz;
      rec.per_user_rate = {std::log2(1.0 + sinr(sol.powers, gains, RxId::Drx)),
                           std::log2(1.0 + sinr(sol.powers, gains, RxId::Cue)),
                           std::log2(1.0 + sinr(sol.powers, gains, RxId::Fue))};
      return rec;
    }
    rec.reuse_fallback = true;
    rec.mode_final = Mode::Cellular;
  }

  const double noise = gains.noise_mw;
  if (rec.mode_final == Mode::Dedicated) {
    const std::array<double, 3> snrs{s.p_max_mbs_mw * gains.gain(TxId::Mbs, RxId::Cue) / noise,
                                     s.p_max_dtx_mw * gains.gain(TxId::Dtx, RxId::Drx) / noise,
                                     s.p_max_fap_mw * gains.gain(TxId::Fap, RxId::Fue) / noise};
    try {
      const std::array<double, 3> mins{e.r_mins.cue, e.r_mins.d2d, e.r_mins.fue};
      const DedicatedAllocation alloc =
          e.use_r_mins ? dedicated_constrained(snrs, mins) : dedicated_unconstrained(snrs);
      rec.fractions = alloc.fractions;
      rec.per_user_rate = alloc.per_user_rate;
      rec.sum_rate = alloc.sum_rate;
    } catch (const InfeasibleError&) {
      rec.allocation_infeasible = true;
    }
    return rec;
  }

  CellularSnrs snrs;
  snrs.cue_ul = s.p_max_cue_mw * gains.gain(TxId::Cue, RxId::Mbs) / noise;
  snrs.d2d_ul = s.p_max_dtx_mw * gains.gain(TxId::Dtx, RxId::Mbs) / noise;
  snrs.d2d_dl = s.p_max_mbs_mw * gains.gain(TxId::Mbs, RxId::Drx) / noise;
  snrs.fue = s.p_max_fap_mw * gains.gain(TxId::Fap, RxId::Fue) / noise;
  rec.cellular = e.use_r_mins ? cellular_constrained(snrs, e.r_mins, e.lattice_step)
                              : cellular_unconstrained(snrs, e.lattice_step);
  if (!rec.cellular.feasible) {
    rec.allocation_infeasible = true;
    return rec;
  }
  rec.per_user_rate = {rec.cellular.rate_cue, rec.cellular.rate_d2d, rec.cellular.rate_fue};
  rec.sum_rate = rec.cellular.sum_rate;
  return rec;
}

inline nlohmann::json to_json(const TrialRecord& rec) {
  nlohmann::json j;
  j["mode_selected"] = mode_name(rec.mode_selected);
  j["mode_final"] = mode_name(rec.mode_final);
  j["d_m"] = rec.d_m;
  j["orthogonal_available"] = rec.orthogonal_available;
  j["diagnostics"] = {{"d_threshold_m", rec.decision.d_threshold_m},
                      {"d_adaptive_m", rec.decision.d_adaptive_m},
                      {"cellular_two_hop_sinr", rec.decision.cellular_two_hop_sinr},
                      {"d2d_sinr_at_max", rec.decision.d2d_sinr_at_max},
                      {"distance_gate_passed", rec.decision.distance_gate_passed},
                      {"interference_gate_passed", rec.decision.interference_gate_passed}};
  j["reuse_fallback"] = rec.reuse_fallback;
  j["allocation_infeasible"] = rec.allocation_infeasible;
  if (rec.mode_final == Mode::Reuse)
    j["powers_mw"] = {rec.powers.p_dtx, rec.powers.p_mbs, rec.powers.p_fap};
  if (rec.mode_final == Mode::Dedicated) j["fractions"] = rec.fractions;
  if (rec.mode_final == Mode::Cellular && !rec.allocation_infeasible)
    j["cellular"] = {{"alpha", rec.cellular.alpha},
                     {"alpha_prime", rec.cellular.alpha_prime},
                     {"beta", rec.cellular.beta},
                     {"beta_prime", rec.cellular.beta_prime}};
  j["per_user_rate_bps_hz"] = rec.per_user_rate;
  j["sum_rate_bps_hz"] = rec.sum_rate;
  return j;
}

// ---------------------------------------------------------------------------
// Runner: per-trial work fans out across threads; aggregation stays serial
// and ordered, so the CSV is byte-identical for any worker count.
// ---------------------------------------------------------------------------

inline ExperimentResult run_experiment(const SimConfig& cfg, const RunOptions& options) {
  const auto& e = cfg.experiment;
  const std::size_t trials = static_cast<std::size_t>(e.trials);
  ExperimentResult result;
  result.csv_path = e.out_path;
  const std::string csv_name = detail::csv_basename(e.out_path);

  if (e.name == "fig5") {
    const std::size_t sweeps = e.drx_diag_sweep_m.size();
    std::vector<Fig5Trial> records(sweeps * trials);
    detail::parallel_for(sweeps * trials, options.jobs, [&](std::size_t i) {
      records[i] = fig5_trial(cfg, i / trials, i % trials);
    });
    CsvWriter csv("drx_diag_m,pct_dedicated_constant,pct_dedicated_adaptive,pct_dedicated_max");
    for (std::size_t si = 0; si < sweeps; ++si) {
      double c = 0, a = 0, m = 0;
      for (std::size_t ti = 0; ti < trials; ++ti) {
        const auto& r = records[si * trials + ti];
        c += r.admit_constant;
        a += r.admit_adaptive;
        m += r.admit_max;
      }
      const double scale = 100.0 / static_cast<double>(trials);
      csv.cell(e.drx_diag_sweep_m[si]).cell(c * scale).cell(a * scale).cell(m * scale);
      csv.end_row();
    }
    result.csv = csv.text();
    if (options.emit_plot)
      result.plot_script = detail::plot_header("DRx position on the diagonal (m)",
                                               "pairs entering dedicated mode (%)") +
                           "plot '" + csv_name + "' using 1:2 with linespoints, '" + csv_name +
                           "' using 1:3 with linespoints, '" + csv_name +
                           "' using 1:4 with linespoints\n";
    return result;
  }

  if (e.name == "fig6a") {
    const std::size_t sweeps = fig6a_sweep_size(e);
    std::vector<Fig6aTrial> records(sweeps * trials);
    detail::parallel_for(sweeps * trials, options.jobs, [&](std::size_t i) {
      records[i] = fig6a_trial(cfg, i / trials, i % trials);
    });
    CsvWriter csv(
        "d_mr_m,d_m,mean_d2d_rate_bps_hz,mean_ul_rate_bps_hz,mean_dl_rate_bps_hz,"
        "cellular_rate_bps_hz,gain");
    const std::size_t n_d = e.pair_distance_sweep_m.size();
    for (std::size_t si = 0; si < sweeps; ++si) {
      double d2d = 0, ul = 0, dl = 0;
      for (std::size_t ti = 0; ti < trials; ++ti) {
        const auto& r = records[si * trials + ti];
        d2d += r.rate_d2d;
        ul += r.rate_ul;
        dl += r.rate_dl;
      }
      d2d /= static_cast<double>(trials);
      ul /= static_cast<double>(trials);
      dl /= static_cast<double>(trials);
      const double cellular = std::min(ul, dl);
      csv.cell(e.drx_diag_sweep_m[si / n_d])
          .cell(e.pair_distance_sweep_m[si % n_d])
          .cell(d2d)
          .cell(ul)
          .cell(dl)
          .cell(cellular)
          .cell(cellular > 0.0 ? d2d / cellular : std::numeric_limits<double>::infinity());
      csv.end_row();
    }
    result.csv = csv.text();
    if (options.emit_plot)
      result.plot_script =
          detail::plot_header("DTx-DRx separation d (m)", "D2D rate gain") +
          "plot '" + csv_name + "' using 2:7 with linespoints, 1 with lines dashtype 2\n";
    return result;
  }

  if (e.name == "fig6b") {
    const std::size_t sweeps = e.drx_diag_sweep_m.size();
    std::vector<Fig6bTrial> records(sweeps * trials);
    detail::parallel_for(sweeps * trials, options.jobs, [&](std::size_t i) {
      records[i] = fig6b_trial(cfg, i / trials, i % trials);
    });
    CsvWriter csv("d_mr_m,mean_drx_rate_distance_only,mean_drx_rate_two_stage");
    for (std::size_t si = 0; si < sweeps; ++si) {
      double dist_only = 0, two_stage = 0;
      for (std::size_t ti = 0; ti < trials; ++ti) {
        const auto& r = records[si * trials + ti];
        dist_only += r.rate_distance_only;
        two_stage += r.rate_two_stage;
      }
      csv.cell(e.drx_diag_sweep_m[si])
          .cell(dist_only / static_cast<double>(trials))
          .cell(two_stage / static_cast<double>(trials));
      csv.end_row();
    }
    result.csv = csv.text();
    if (options.emit_plot)
      result.plot_script = detail::plot_header("MBS-DRx distance (m)", "DRx rate (bit/s/Hz)") +
                           "plot '" + csv_name + "' using 1:2 with linespoints, '" + csv_name +
                           "' using 1:3 with linespoints\n";
    return result;
  }

  if (e.name == "fig7") {
    const std::size_t sweeps = e.drx_diag_sweep_m.size();
    std::vector<Fig7Trial> records(sweeps * trials);
    detail::parallel_for(sweeps * trials, options.jobs, [&](std::size_t i) {
      records[i] = fig7_trial(cfg, i / trials, i % trials);
    });
    CsvWriter csv(
        "d_mr_m,mean_vertex_rate_bps_hz,mean_oracle_rate_bps_hz,mean_vertex_candidates,"
        "mean_oracle_evaluations,infeasible_trials,oracle_missed_trials");
    std::int64_t vertex_ns_total = 0, oracle_ns_total = 0;
    for (std::size_t si = 0; si < sweeps; ++si) {
      double v_rate = 0, o_rate = 0, v_cand = 0, o_eval = 0;
      long infeasible = 0, missed = 0, used = 0;
      for (std::size_t ti = 0; ti < trials; ++ti) {
        const auto& r = records[si * trials + ti];
        vertex_ns_total += r.vertex_ns;
        oracle_ns_total += r.oracle_ns;
        if (!r.feasible) {
          ++infeasible;
          continue;
        }
        if (r.oracle_missed) {
          ++missed;
          continue;
        }
        v_rate += r.vertex_rate;
        o_rate += r.oracle_rate;
        v_cand += r.vertex_candidates;
        o_eval += r.oracle_evaluations;
        ++used;
      }
      const double inv = used > 0 ? 1.0 / static_cast<double>(used) : 0.0;
      csv.cell(e.drx_diag_sweep_m[si])
          .cell(v_rate * inv)
          .cell(o_rate * inv)
          .cell(v_cand * inv)
          .cell(o_eval * inv)
          .cell(infeasible)
          .cell(missed);
      csv.end_row();
    }
    result.csv = csv.text();
    result.summary = "vertex search total " + std::to_string(vertex_ns_total / 1000000) +
                     " ms, exhaustive search total " + std::to_string(oracle_ns_total / 1000000) +
                     " ms, wall-time ratio " +
                     format_double(vertex_ns_total > 0 ? static_cast<double>(oracle_ns_total) /
                                                             static_cast<double>(vertex_ns_total)
                                                       : 0.0) +
                     "\n";
    if (options.emit_plot)
      result.plot_script = detail::plot_header("MBS-DRx distance (m)", "sum rate (bit/s/Hz)") +
                           "plot '" + csv_name + "' using 1:2 with linespoints, '" + csv_name +
                           "' using 1:3 with linespoints\n";
    return result;
  }

  if (e.name == "fig8") {
    const std::size_t sweeps = fig8_sweep_size(e);
    std::vector<Fig8Trial> records(sweeps * trials);
    detail::parallel_for(sweeps * trials, options.jobs, [&](std::size_t i) {
      records[i] = fig8_trial(cfg, i / trials, i % trials);
    });
    CsvWriter csv(
        "d_m,d_mr_m,mean_dedicated_sum_rate,mean_cellular_sum_rate,gain,"
        "infeasible_dedicated,infeasible_cellular");
    const std::size_t n_mr = e.drx_diag_sweep_m.size();
    for (std::size_t si = 0; si < sweeps; ++si) {
      double ded = 0, cell = 0;
      long bad_ded = 0, bad_cell = 0, used = 0;
      for (std::size_t ti = 0; ti < trials; ++ti) {
        const auto& r = records[si * trials + ti];
        if (!r.dedicated_ok) ++bad_ded;
        if (!r.cellular_ok) ++bad_cell;
        if (r.dedicated_ok && r.cellular_ok) {
          ded += r.dedicated_rate;
          cell += r.cellular_rate;
          ++used;
        }
      }
      const double inv = used > 0 ? 1.0 / static_cast<double>(used) : 0.0;
      const double mean_ded = ded * inv;
      const double mean_cell = cell * inv;
      csv.cell(e.pair_distance_sweep_m[si / n_mr])
          .cell(e.drx_diag_sweep_m[si % n_mr])
          .cell(mean_ded)
          .cell(mean_cell)
          .cell(mean_cell > 0.0 ? mean_ded / mean_cell : 0.0)
          .cell(bad_ded)
          .cell(bad_cell);
      csv.end_row();
    }
    result.csv = csv.text();
    if (options.emit_plot)
      result.plot_script = detail::plot_header("DTx-DRx separation d (m)", "sum rate gain") +
                           "plot '" + csv_name + "' using 1:5 with linespoints\n";
    return result;
  }

  if (e.name == "single-shot") {
    const TrialRecord rec = single_shot(cfg);
    result.csv = to_json(rec).dump(2) + "\n";
    result.csv_path = e.out_path == "single-shot.csv" ? "single-shot.json" : e.out_path;
    return result;
  }

  throw ConfigError("unknown experiment: " + e.name);
}

}  // namespace d2d::sim
