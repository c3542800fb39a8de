#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>

#include "d2d/rng.hpp"

namespace d2d {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
inline double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }

// Thermal noise over a bandwidth, in mW.
inline double noise_power(double density_dbm_hz, double bandwidth_hz) {
  if (!(bandwidth_hz > 0.0)) throw std::domain_error("noise_power: bandwidth must be positive");
  return dbm_to_mw(density_dbm_hz + 10.0 * std::log10(bandwidth_hz));
}

// PL(d) = intercept + slope * log10(d), d in meters.
struct PathlossModel {
  double intercept_db = 0.0;
  double slope_db_per_decade = 0.0;
};

inline double pathloss_db(const PathlossModel& model, double d_m) {
  if (!(d_m > 0.0)) throw std::domain_error("pathloss_db: distance must be positive");
  return model.intercept_db + model.slope_db_per_decade * std::log10(d_m);
}

enum class NodeId { Mbs, Fap, Cue, Fue, Dtx, Drx };
inline constexpr std::size_t kNodeCount = 6;

// Transmitter / receiver roles used by the decision framework.
enum class TxId { Dtx = 0, Mbs = 1, Fap = 2, Cue = 3 };
enum class RxId { Drx = 0, Cue = 1, Fue = 2, Mbs = 3 };
inline constexpr std::size_t kTxCount = 4;
inline constexpr std::size_t kRxCount = 4;

inline NodeId node_of(TxId t) {
  switch (t) {
    case TxId::Dtx: return NodeId::Dtx;
    case TxId::Mbs: return NodeId::Mbs;
    case TxId::Fap: return NodeId::Fap;
    default: return NodeId::Cue;
  }
}

inline NodeId node_of(RxId r) {
  switch (r) {
    case RxId::Drx: return NodeId::Drx;
    case RxId::Cue: return NodeId::Cue;
    case RxId::Fue: return NodeId::Fue;
    default: return NodeId::Mbs;
  }
}

// Which path-loss model a link gets. "Endpoint" picks by the most
// infrastructure-heavy endpoint (MBS link -> macro model, FAP link -> femto
// model, UE-UE -> D2D model); "transmitter" picks by transmitter class only.
enum class PathlossAssignment { Endpoint, Transmitter };

// Reference SINR used when inverting the mode-selection distance threshold:
// the two-hop bottleneck (min of uplink/downlink) or the better hop.
enum class ThresholdReference { TwoHopMin, BestHop };

struct SystemParams {
  // Stored linear/mW; dBm and dB only at the configuration boundary.
  double p_max_dtx_mw = dbm_to_mw(23.0);
  double p_max_mbs_mw = dbm_to_mw(43.0);
  double p_max_fap_mw = dbm_to_mw(21.0);
  double p_max_cue_mw = dbm_to_mw(23.0);
  double sinr_min_drx = db_to_linear(3.0);
  double sinr_min_cue = db_to_linear(0.0);
  double sinr_min_fue = db_to_linear(7.0);
  double bandwidth_hz = 20e6;
  double noise_density_dbm_hz = -174.0;
  double d_constant_m = 50.0;
  // Root exponent for the adaptive-distance inversion. 4.0 matches the D2D
  // model slope and makes the inversion exact against pathloss_db.
  double path_loss_exponent_n = 4.0;
  ThresholdReference threshold_reference = ThresholdReference::TwoHopMin;
  PathlossAssignment pathloss_assignment = PathlossAssignment::Endpoint;
  PathlossModel pl_d2d{28.0, 40.0};
  PathlossModel pl_macro{15.3, 37.6};
  PathlossModel pl_femto{38.5, 20.0};

  double noise_mw() const { return noise_power(noise_density_dbm_hz, bandwidth_hz); }
  double p_max(TxId t) const {
    switch (t) {
      case TxId::Dtx: return p_max_dtx_mw;
      case TxId::Mbs: return p_max_mbs_mw;
      case TxId::Fap: return p_max_fap_mw;
      default: return p_max_cue_mw;
    }
  }
  double sinr_min(RxId r) const {
    switch (r) {
      case RxId::Drx: return sinr_min_drx;
      case RxId::Cue: return sinr_min_cue;
      default: return sinr_min_fue;
    }
  }

  const PathlossModel& link_model(NodeId a, NodeId b) const {
    if (pathloss_assignment == PathlossAssignment::Transmitter) {
      if (a == NodeId::Mbs) return pl_macro;
      if (a == NodeId::Fap) return pl_femto;
      return pl_d2d;
    }
    if (a == NodeId::Mbs || b == NodeId::Mbs) return pl_macro;
    if (a == NodeId::Fap || b == NodeId::Fap) return pl_femto;
    return pl_d2d;
  }
};

struct Point {
  double x = 0.0, y = 0.0;
};

inline double distance(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

struct Topology {
  std::array<Point, kNodeCount> pos{};

  Point& at(NodeId n) { return pos[static_cast<std::size_t>(n)]; }
  const Point& at(NodeId n) const { return pos[static_cast<std::size_t>(n)]; }
  double dist(NodeId a, NodeId b) const { return distance(at(a), at(b)); }

  // Table-II layout; the D2D pair sits on the x = y diagonal.
  static Topology defaults() {
    Topology t;
    t.at(NodeId::Mbs) = {0.0, 0.0};
    t.at(NodeId::Fap) = {100.0, 200.0};
    t.at(NodeId::Cue) = {500.0, 0.0};
    t.at(NodeId::Fue) = {110.0, 200.0};
    t.at(NodeId::Drx) = diag_point(600.0);
    t.at(NodeId::Dtx) = diag_point(550.0);
    return t;
  }

  static Point diag_point(double dist_from_origin_m) {
    const double c = dist_from_origin_m / std::sqrt(2.0);
    return {c, c};
  }
};

// Transmit powers of the three reuse-mode transmitters, mW.
struct PowerVector {
  double p_dtx = 0.0;
  double p_mbs = 0.0;
  double p_fap = 0.0;

  double operator[](std::size_t i) const { return i == 0 ? p_dtx : (i == 1 ? p_mbs : p_fap); }
  double& operator[](std::size_t i) { return i == 0 ? p_dtx : (i == 1 ? p_mbs : p_fap); }
};

// One block-fading realization: g = |h|^2 * 10^(-PL/10) per directed link.
struct LinkGains {
  std::array<std::array<double, kRxCount>, kTxCount> g{};
  std::array<std::array<double, kRxCount>, kTxCount> h{};
  double noise_mw = 0.0;

  double gain(TxId t, RxId r) const { return g[static_cast<std::size_t>(t)][static_cast<std::size_t>(r)]; }
  double& gain(TxId t, RxId r) { return g[static_cast<std::size_t>(t)][static_cast<std::size_t>(r)]; }
  double fading(TxId t, RxId r) const { return h[static_cast<std::size_t>(t)][static_cast<std::size_t>(r)]; }
  double& fading(TxId t, RxId r) { return h[static_cast<std::size_t>(t)][static_cast<std::size_t>(r)]; }
};

inline bool link_exists(TxId t, RxId r) {
  // No self links; every other (transmitter, receiver) pair is filled,
  // including the uplinks into the MBS.
  return node_of(t) != node_of(r);
}

namespace detail {

template <typename FadingFn>
LinkGains make_gains(const Topology& topo, const SystemParams& params, FadingFn&& fading) {
  LinkGains gains;
  gains.noise_mw = params.noise_mw();
  for (std::size_t ti = 0; ti < kTxCount; ++ti) {
    for (std::size_t ri = 0; ri < kRxCount; ++ri) {
      const TxId t = static_cast<TxId>(ti);
      const RxId r = static_cast<RxId>(ri);
      if (!link_exists(t, r)) continue;
      const double h2 = fading(t, r);
      const double d = topo.dist(node_of(t), node_of(r));
      const double pl = pathloss_db(params.link_model(node_of(t), node_of(r)), d);
      gains.fading(t, r) = h2;
      gains.gain(t, r) = h2 * db_to_linear(-pl);
    }
  }
  return gains;
}

}  // namespace detail

// Draws i.i.d. unit-mean exponential |h|^2 per link, in a fixed link order so
// that a given stream state always yields the same realization.
inline LinkGains sample_gains(const Topology& topo, const SystemParams& params, Rng& rng) {
  return detail::make_gains(topo, params, [&rng](TxId, RxId) { return rng.exponential(); });
}

inline LinkGains unit_fading_gains(const Topology& topo, const SystemParams& params) {
  return detail::make_gains(topo, params, [](TxId, RxId) { return 1.0; });
}

inline TxId desired_transmitter(RxId r) {
  switch (r) {
    case RxId::Drx: return TxId::Dtx;
    case RxId::Cue: return TxId::Mbs;
    case RxId::Fue: return TxId::Fap;
    default: throw std::domain_error("desired_transmitter: MBS has no reuse-mode serving link");
  }
}

// SINR at a reuse-mode receiver: the serving link against the other two
// transmitters plus noise.
inline double sinr(const PowerVector& p, const LinkGains& gains, RxId r) {
  const TxId want = desired_transmitter(r);
  double signal = 0.0;
  double interference = 0.0;
  for (std::size_t ti = 0; ti < 3; ++ti) {  // Dtx, Mbs, Fap
    const TxId t = static_cast<TxId>(ti);
    const double rx_power = p[ti] * gains.gain(t, r);
    if (t == want)
      signal = rx_power;
    else
      interference += rx_power;
  }
  return signal / (interference + gains.noise_mw);
}

}  // namespace d2d
