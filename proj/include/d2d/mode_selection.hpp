#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "d2d/channel.hpp"

namespace d2d {

enum class Mode { Dedicated, Reuse, Cellular };

inline const char* mode_name(Mode m) {
  switch (m) {
    case Mode::Dedicated: return "dedicated";
    case Mode::Reuse: return "reuse";
    default: return "cellular";
  }
}

// Outcome of the decision flow plus the quantities that justified it.
struct ModeDecision {
  Mode mode = Mode::Cellular;
  double d_threshold_m = 0.0;  // max(d_constant, d_adaptive)
  double d_adaptive_m = 0.0;
  double cellular_two_hop_sinr = 0.0;
  double d2d_sinr_at_max = 0.0;
  bool distance_gate_passed = false;
  bool interference_gate_passed = false;
};

// SINRs of the two hops of the relayed path at max powers, each against FAP
// interference: DTx->MBS uplink and MBS->DRx downlink.
struct TwoHopSinr {
  double ul = 0.0;
  double dl = 0.0;
};

inline TwoHopSinr two_hop_sinr_branches(const LinkGains& gains, const SystemParams& params) {
  TwoHopSinr s;
  s.ul = params.p_max_dtx_mw * gains.gain(TxId::Dtx, RxId::Mbs) /
         (params.p_max_fap_mw * gains.gain(TxId::Fap, RxId::Mbs) + gains.noise_mw);
  s.dl = params.p_max_mbs_mw * gains.gain(TxId::Mbs, RxId::Drx) /
         (params.p_max_fap_mw * gains.gain(TxId::Fap, RxId::Drx) + gains.noise_mw);
  return s;
}

// The relayed path is limited by its weaker hop.
inline double cellular_two_hop_sinr(const LinkGains& gains, const SystemParams& params) {
  const TwoHopSinr s = two_hop_sinr_branches(gains, params);
  return std::min(s.ul, s.dl);
}

inline double best_hop_sinr(const LinkGains& gains, const SystemParams& params) {
  const TwoHopSinr s = two_hop_sinr_branches(gains, params);
  return std::max(s.ul, s.dl);
}

// Direct-link SINR at max powers with both downlink interferers active.
inline double d2d_sinr_at_max(const LinkGains& gains, const SystemParams& params) {
  return params.p_max_dtx_mw * gains.gain(TxId::Dtx, RxId::Drx) /
         (params.p_max_mbs_mw * gains.gain(TxId::Mbs, RxId::Drx) +
          params.p_max_fap_mw * gains.gain(TxId::Fap, RxId::Drx) + gains.noise_mw);
}

// Separation at which the direct link stops beating the reference cellular
// SINR, found by inverting the D2D path-loss model:
//   P_T |h_TR|^2 10^(-I0/10) d^(-n) / (P_M g_MR + P_F g_FR + sigma^2) = S_ref.
// The fading coefficient is taken from the gains' h map; the current
// DTx-DRx path loss cancels out of the inversion.
// With n = slope/10 the returned d satisfies the equation exactly against
// pathloss_db; n and the reference branch are configurable because the
// source material is ambiguous on both (see the shipped experiment configs).
inline double adaptive_distance_threshold(const LinkGains& gains, const SystemParams& params) {
  const double s_ref = params.threshold_reference == ThresholdReference::BestHop
                           ? best_hop_sinr(gains, params)
                           : cellular_two_hop_sinr(gains, params);
  if (!(s_ref > 0.0)) return std::numeric_limits<double>::infinity();
  const double denom = params.p_max_mbs_mw * gains.gain(TxId::Mbs, RxId::Drx) +
                       params.p_max_fap_mw * gains.gain(TxId::Fap, RxId::Drx) + gains.noise_mw;
  const double num = params.p_max_dtx_mw * gains.fading(TxId::Dtx, RxId::Drx) *
                     db_to_linear(-params.pl_d2d.intercept_db);
  return std::pow(num / (denom * s_ref), 1.0 / params.path_loss_exponent_n);
}

// Inclusive: a pair exactly at the threshold is admitted.
inline bool distance_gate(double d_m, double d_adaptive_m, const SystemParams& params) {
  return d_m <= std::max(params.d_constant_m, d_adaptive_m);
}

// The full decision flow: dedicated when close enough and orthogonal
// resources exist, else reuse when the direct link also beats the relayed
// path, else cellular. Reuse-mode power feasibility is checked downstream;
// the harness falls back to cellular when it fails.
inline ModeDecision select_mode(const LinkGains& gains, const SystemParams& params, double d_m,
                                bool orthogonal_available) {
  ModeDecision dec;
  dec.d_adaptive_m = adaptive_distance_threshold(gains, params);
  dec.d_threshold_m = std::max(params.d_constant_m, dec.d_adaptive_m);
  dec.cellular_two_hop_sinr = cellular_two_hop_sinr(gains, params);
  dec.d2d_sinr_at_max = d2d_sinr_at_max(gains, params);
  dec.distance_gate_passed = distance_gate(d_m, dec.d_adaptive_m, params);
  dec.interference_gate_passed = dec.d2d_sinr_at_max > dec.cellular_two_hop_sinr;
  if (dec.distance_gate_passed && orthogonal_available)
    dec.mode = Mode::Dedicated;
  else if (dec.distance_gate_passed && dec.interference_gate_passed)
    dec.mode = Mode::Reuse;
  else
    dec.mode = Mode::Cellular;
  return dec;
}

}  // namespace d2d
