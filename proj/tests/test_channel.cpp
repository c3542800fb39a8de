#include <catch2/catch.hpp>

#include <cmath>

#include "d2d/channel.hpp"
#include "d2d/rng.hpp"

using namespace d2d;

TEST_CASE("noise_power matches dBm arithmetic") {
  // -174 dBm/Hz over 20 MHz: -174 + 10 log10(2e7) dBm.
  const double expected = dbm_to_mw(-174.0 + 10.0 * std::log10(20e6));
  CHECK(noise_power(-174.0, 20e6) == Approx(expected).epsilon(1e-12));
  CHECK(mw_to_dbm(noise_power(-174.0, 20e6)) == Approx(-100.9897).margin(1e-3));
  CHECK(noise_power(0.0, 1.0) == Approx(1.0).epsilon(1e-12));
  CHECK(noise_power(-174.0, 1.0) == Approx(std::pow(10.0, -17.4)).epsilon(1e-12));
  CHECK_THROWS_AS(noise_power(-174.0, 0.0), std::domain_error);
}

TEST_CASE("pathloss_db values from the three models") {
  const SystemParams p;
  CHECK(pathloss_db(p.pl_d2d, 10.0) == Approx(68.0).epsilon(1e-12));
  CHECK(pathloss_db(p.pl_femto, 10.0) == Approx(58.5).epsilon(1e-12));
  CHECK(pathloss_db(p.pl_macro, 500.0) == Approx(15.3 + 37.6 * std::log10(500.0)).epsilon(1e-12));
  CHECK(pathloss_db(p.pl_macro, 500.0) == Approx(116.78).margin(5e-3));
  CHECK_THROWS_AS(pathloss_db(p.pl_d2d, 0.0), std::domain_error);
  CHECK_THROWS_AS(pathloss_db(p.pl_d2d, -5.0), std::domain_error);
}

TEST_CASE("pathloss_db strictly increases with distance") {
  const SystemParams p;
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double d1 = 1.0 + 999.0 * rng.uniform();
    const double d2 = d1 * (1.0 + rng.uniform());
    for (const auto& m : {p.pl_d2d, p.pl_macro, p.pl_femto})
      CHECK(pathloss_db(m, d2) > pathloss_db(m, d1));
  }
}

TEST_CASE("dbm/mw round trip") {
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    const double dbm = -120.0 + 170.0 * rng.uniform();
    CHECK(mw_to_dbm(dbm_to_mw(dbm)) == Approx(dbm).epsilon(1e-12));
  }
}

TEST_CASE("sample_gains is deterministic for a fixed stream") {
  const SystemParams params;
  const Topology topo = Topology::defaults();
  Rng a(77, 3, 9);
  Rng b(77, 3, 9);
  const LinkGains ga = sample_gains(topo, params, a);
  const LinkGains gb = sample_gains(topo, params, b);
  for (std::size_t t = 0; t < kTxCount; ++t)
    for (std::size_t r = 0; r < kRxCount; ++r) CHECK(ga.g[t][r] == gb.g[t][r]);
}

TEST_CASE("fading is unit-mean exponential") {
  const SystemParams params;
  const Topology topo = Topology::defaults();
  Rng rng(1234);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    LinkGains g = sample_gains(topo, params, rng);
    sum += g.fading(TxId::Dtx, RxId::Drx);
  }
  CHECK(sum / n == Approx(1.0).margin(0.02));
}

TEST_CASE("independent streams are uncorrelated") {
  const int n = 100000;
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    Rng a(99, 0, static_cast<std::uint64_t>(i));
    Rng b(99, 1, static_cast<std::uint64_t>(i));
    const double x = a.exponential();
    const double y = b.exponential();
    sx += x;
    sy += y;
    sxx += x * x;
    syy += y * y;
    sxy += x * y;
  }
  const double cov = sxy / n - (sx / n) * (sy / n);
  const double vx = sxx / n - (sx / n) * (sx / n);
  const double vy = syy / n - (sy / n) * (sy / n);
  CHECK(std::fabs(cov / std::sqrt(vx * vy)) < 0.02);
}

TEST_CASE("unit fading reproduces the raw path loss") {
  SystemParams params;
  Topology topo = Topology::defaults();
  topo.at(NodeId::Dtx) = {300.0, 0.0};
  topo.at(NodeId::Drx) = {310.0, 0.0};
  // Both endpoints are UEs, so the D2D model applies: 68 dB at 10 m.
  const LinkGains g = unit_fading_gains(topo, params);
  CHECK(g.gain(TxId::Dtx, RxId::Drx) == Approx(std::pow(10.0, -6.8)).epsilon(1e-12));
}

TEST_CASE("link model assignment by endpoint and by transmitter") {
  SystemParams params;
  params.pathloss_assignment = PathlossAssignment::Endpoint;
  // DTx -> MBS carries an MBS endpoint: macro model.
  CHECK(params.link_model(NodeId::Dtx, NodeId::Mbs).intercept_db == Approx(15.3));
  CHECK(params.link_model(NodeId::Fap, NodeId::Mbs).intercept_db == Approx(15.3));
  CHECK(params.link_model(NodeId::Fap, NodeId::Drx).intercept_db == Approx(38.5));
  CHECK(params.link_model(NodeId::Dtx, NodeId::Drx).intercept_db == Approx(28.0));
  params.pathloss_assignment = PathlossAssignment::Transmitter;
  CHECK(params.link_model(NodeId::Dtx, NodeId::Mbs).intercept_db == Approx(28.0));
  CHECK(params.link_model(NodeId::Fap, NodeId::Mbs).intercept_db == Approx(38.5));
  CHECK(params.link_model(NodeId::Mbs, NodeId::Drx).intercept_db == Approx(15.3));
}

namespace {

LinkGains manual_gains(double direct, double cross, double noise) {
  LinkGains g{};
  g.noise_mw = noise;
  for (std::size_t t = 0; t < 3; ++t)
    for (std::size_t r = 0; r < 3; ++r) g.g[t][r] = (t == r) ? direct : cross;
  return g;
}

}  // namespace

TEST_CASE("sinr hand examples") {
  // No interference: every receiver sees signal 1 over noise 1.
  LinkGains g = manual_gains(1.0, 0.0, 1.0);
  const PowerVector p{1.0, 1.0, 1.0};
  CHECK(sinr(p, g, RxId::Drx) == Approx(1.0));
  CHECK(sinr(p, g, RxId::Cue) == Approx(1.0));
  CHECK(sinr(p, g, RxId::Fue) == Approx(1.0));

  // Fully symmetric: 1 / (1 + 1 + 1) each.
  g = manual_gains(1.0, 1.0, 1.0);
  CHECK(sinr(p, g, RxId::Drx) == Approx(1.0 / 3.0));
  CHECK(sinr(p, g, RxId::Cue) == Approx(1.0 / 3.0));
  CHECK(sinr(p, g, RxId::Fue) == Approx(1.0 / 3.0));

  // Hand substitution: 2 / (0.5 + 0.5 + 1) = 1.
  g = LinkGains{};
  g.noise_mw = 1.0;
  g.gain(TxId::Dtx, RxId::Drx) = 1.0;
  g.gain(TxId::Mbs, RxId::Drx) = 0.5;
  g.gain(TxId::Fap, RxId::Drx) = 0.5;
  CHECK(sinr({2.0, 1.0, 1.0}, g, RxId::Drx) == Approx(1.0));
}

TEST_CASE("sinr is invariant under common power and noise scaling") {
  const SystemParams params;
  const Topology topo = Topology::defaults();
  Rng rng(31);
  for (int i = 0; i < 200; ++i) {
    LinkGains g = sample_gains(topo, params, rng);
    const PowerVector p{10.0 * rng.uniform(), 1000.0 * rng.uniform(), 50.0 * rng.uniform()};
    const double k = 1e-3 + 1e4 * rng.uniform();
    LinkGains gs = g;
    gs.noise_mw *= k;
    const PowerVector ps{p.p_dtx * k, p.p_mbs * k, p.p_fap * k};
    for (auto r : {RxId::Drx, RxId::Cue, RxId::Fue})
      CHECK(sinr(ps, gs, r) == Approx(sinr(p, g, r)).epsilon(1e-12));
  }
}
