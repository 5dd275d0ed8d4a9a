#include <catch2/catch_amalgamated.hpp>
#include <conleyflow/field.hpp>

#include <cmath>
#include <cstdlib>
#include <numeric>
#include <vector>

#include "bridge.hpp"
#include "gen.hpp"
#include "oracles.hpp"
#include "sampling.hpp"

using conleyflow::decay_time;
using conleyflow::decoupled_solution;
using conleyflow::FieldContext;
using conleyflow::VCell;

namespace {

oracle::Cx disk_cx() { return oracle::cx({"ABD", "BCD", "DE", "DF"}); }

oracle::Field disk_field() {
  oracle::Field V;
  V.critical = {oracle::vvs("F"), oracle::vvs("BD"), oracle::vvs("ABD")};
  V.arrows = {{oracle::vvs("A"), oracle::vvs("AD")},   {oracle::vvs("B"), oracle::vvs("AB")},
              {oracle::vvs("BC"), oracle::vvs("BCD")}, {oracle::vvs("C"), oracle::vvs("CD")},
              {oracle::vvs("D"), oracle::vvs("DF")},   {oracle::vvs("E"), oracle::vvs("DE")}};
  return V;
}

constexpr double kEps = 1.0 / 48;
constexpr int kD = 6;

std::vector<VCell> disk_cells() {
  auto K = bridge::make_complex(disk_cx());
  return bridge::to_vcells(K, disk_field());
}

VCell cell_for(const std::vector<VCell>& cells, const conleyflow::Simplex& minus) {
  for (const auto& c : cells)
    if (c.minus == minus) return c;
  std::abort();
}

}  // namespace

TEST_CASE("decay profile anchors") {
  VCell crit{{5}, {5}};
  FieldContext ctx(crit, kD, kEps);
  CHECK(ctx.g(0.0) == 0.0);
  CHECK(ctx.g(kEps) == Catch::Approx(kEps).margin(1e-16));
  CHECK(ctx.g(-0.5) == -ctx.g(0.5));
  CHECK(ctx.g(0.001) > 0.0);
  CHECK(ctx.g(0.0005) < ctx.g(0.001));
}

TEST_CASE("closed-form decay matches its governing equation and hits exact zero") {
  const double eps = kEps;
  // endpoint behaviour
  CHECK(decay_time(0.0, eps) == 0.0);
  CHECK(decay_time(eps, eps) == Catch::Approx(1.5).margin(1e-15));
  CHECK(decoupled_solution(0.0, 0.013, eps) == Catch::Approx(0.013).margin(1e-15));
  for (double zeta : {eps, 0.4 * eps, 0.9, 1e-6}) {
    const double tstar = decay_time(zeta, eps);
    CHECK(decoupled_solution(tstar, zeta, eps) == 0.0);
    CHECK(decoupled_solution(tstar * (1 + 1e-12), zeta, eps) == 0.0);
    CHECK(decoupled_solution(tstar + 5.0, zeta, eps) == 0.0);
    CHECK(decoupled_solution(tstar * (1 - 1e-6), zeta, eps) > 0.0);
    // odd symmetry
    CHECK(decoupled_solution(0.3 * tstar, -zeta, eps) ==
          -decoupled_solution(0.3 * tstar, zeta, eps));
    // derivative equals the field: d/dt psi = -g(psi)
    VCell crit{{5}, {5}};
    FieldContext ctx(crit, kD, eps);
    for (double frac : {0.1, 0.5, 0.8}) {
      const double t = frac * tstar;
      const double h = 1e-7 * tstar;
      const double dd =
          (decoupled_solution(t + h, zeta, eps) - decoupled_solution(t - h, zeta, eps)) / (2 * h);
      CHECK(dd == Catch::Approx(-ctx.g(decoupled_solution(t, zeta, eps))).epsilon(1e-5));
    }
    // semigroup property of the closed form
    for (double s : {0.2, 0.6, 1.4}) {
      const double mid = decoupled_solution(s, zeta, eps);
      CHECK(decoupled_solution(0.7, mid, eps) ==
            Catch::Approx(decoupled_solution(s + 0.7, zeta, eps)).margin(1e-12));
    }
  }
}

TEST_CASE("transversal speed profile anchors") {
  VCell arrow{{0}, {0, 3}};  // A -> AD
  FieldContext ctx(arrow, kD, kEps);
  const double e = kEps;
  CHECK(ctx.h(e) == Catch::Approx(-e / 2).margin(1e-18));
  CHECK(ctx.h(e / 2) == 1.0);
  CHECK(ctx.h(3 * e / 2) == 1.0);
  CHECK(ctx.h(0.0) == 1.0);
  CHECK(ctx.h(0.9) == 1.0);
  CHECK(ctx.h(e + e / 4) == Catch::Approx(0.5 - e / 4).margin(1e-15));
  CHECK(ctx.h(e - e / 4) == Catch::Approx(0.5 - e / 4).margin(1e-15));
  // continuity across both kinks
  CHECK(ctx.h(e / 2 + 1e-12) == Catch::Approx(1.0).margin(1e-9));
  CHECK(ctx.h(e + 1e-13) == Catch::Approx(-e / 2).margin(1e-9));

  FieldContext bad(arrow, kD, kEps);
  bad.flip_h_sign = true;
  CHECK(bad.h(e) == Catch::Approx(e / 2).margin(1e-18));
  CHECK(bad.h(e / 2) == -1.0);
}

TEST_CASE("clearance and gate anchors") {
  VCell arrow{{1, 3}, {1, 2, 3}};  // BD -> BCD, head vertex C
  FieldContext ctx(arrow, kD, kEps);
  const double e = kEps;
  std::vector<double> x(kD, 0.0);
  x[1] = e + 0.002;  // B
  x[3] = e + 0.005;  // D
  x[2] = 0.3;        // C takes some mass
  x[0] = 1.0 - x[1] - x[2] - x[3];
  // clearance is the smallest tail clearance, capped at eps
  CHECK(ctx.theta(x) == Catch::Approx(0.002).margin(1e-15));
  x[1] = e + 0.5;
  x[3] = e + 0.4;
  CHECK(ctx.theta(x) == e);

  // off the carrier plane the gate ramps with the head coordinate
  x[0] = 0.01;  // A is outside the head simplex
  CHECK_FALSE(ctx.on_carrier_plane(x));
  CHECK(ctx.eta(e / 8, x) == Catch::Approx(0.5).margin(1e-15));
  CHECK(ctx.eta(e / 2, x) == 1.0);
  CHECK(ctx.eta(-e / 8, x) == Catch::Approx(0.5).margin(1e-15));
  // on the carrier plane it is fully open
  x[0] = x[4] = x[5] = 0.0;
  CHECK(ctx.on_carrier_plane(x));
  CHECK(ctx.eta(e / 8, x) == 1.0);
  CHECK(ctx.eta(0.0, x) == 1.0);
  // the plane test has a tiny tolerance backstop
  x[0] = 1e-13;
  CHECK(ctx.on_carrier_plane(x));
  x[0] = 1e-6;
  CHECK_FALSE(ctx.on_carrier_plane(x));
}

TEST_CASE("threshold validation") {
  VCell crit{{5}, {5}};
  CHECK_THROWS_AS(FieldContext(crit, kD, 1.0 / 36), std::invalid_argument);
  CHECK_THROWS_AS(FieldContext(crit, kD, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(FieldContext(crit, kD, -0.1), std::invalid_argument);
  CHECK_NOTHROW(FieldContext(crit, kD, 1e-6));
  CHECK_NOTHROW(FieldContext(crit, kD, kEps));
}

TEST_CASE("field vanishes exactly at the equilibrium of a fixed cell") {
  auto cells = disk_cells();
  for (const auto& c : cells) {
    if (!c.critical()) continue;
    FieldContext ctx(c, kD, kEps);
    std::vector<double> x(kD, 0.0);
    for (int v : c.minus) x[static_cast<std::size_t>(v)] = 1.0 / static_cast<double>(c.minus.size());
    auto fx = ctx.f(x);
    for (double t : fx) CHECK(std::fabs(t) <= 1e-15);
    // nearby points are not at rest: shift mass onto a vertex off the cell
    std::vector<double> y = x;
    int off = 0;
    while (y[static_cast<std::size_t>(off)] != 0.0) ++off;
    y[static_cast<std::size_t>(c.minus[0])] -= 0.005;
    y[static_cast<std::size_t>(off)] += 0.005;
    auto fy = ctx.f(y);
    double mag = 0;
    for (double t : fy) mag = std::max(mag, std::fabs(t));
    CHECK(mag > 1e-6);
  }
}

TEST_CASE("tile samples are valid and the field conserves mass on them") {
  auto cells = disk_cells();
  gen::Rng r(90);
  for (const auto& c : cells) {
    FieldContext ctx(c, kD, kEps);
    for (int mode = 0; mode < 4; ++mode) {
      for (int k = 0; k < 300; ++k) {
        auto x = sampling::tile_point(r, c, kD, kEps, mode);
        REQUIRE(ctx.box_violation(x) == 0.0);
        REQUIRE(std::fabs(std::accumulate(x.begin(), x.end(), 0.0) - 1.0) <= 1e-12);
        auto f0 = ctx.f(x);
        auto f1 = ctx.f(x, true);
        auto f2 = ctx.f_capped(x);
        CHECK(std::fabs(std::accumulate(f0.begin(), f0.end(), 0.0)) <= 1e-12);
        CHECK(std::fabs(std::accumulate(f1.begin(), f1.end(), 0.0)) <= 1e-12);
        CHECK(std::fabs(std::accumulate(f2.begin(), f2.end(), 0.0)) <= 1e-12);
      }
    }
  }
}

TEST_CASE("capped gate agrees with the field away from the carrier plane") {
  auto cells = disk_cells();
  gen::Rng r(91);
  for (const auto& c : cells) {
    if (c.critical()) continue;
    FieldContext ctx(c, kD, kEps);
    for (int k = 0; k < 200; ++k) {
      auto x = sampling::tile_point(r, c, kD, kEps, sampling::Bulk);
      // force a coordinate off the head simplex away from zero
      int zc = -1;
      for (int v = 0; v < kD; ++v) {
        bool in_plus = false;
        for (int u : c.plus) in_plus |= (u == v);
        if (!in_plus) zc = v;
      }
      REQUIRE(zc >= 0);
      if (x[static_cast<std::size_t>(zc)] < kEps / 2) {
        double shift = kEps / 2 - x[static_cast<std::size_t>(zc)];
        x[static_cast<std::size_t>(zc)] += shift;
        // rebalance on the big tail coordinate
        int big = c.minus[0];
        for (int v : c.minus)
          if (x[static_cast<std::size_t>(v)] > x[static_cast<std::size_t>(big)]) big = v;
        x[static_cast<std::size_t>(big)] -= shift;
      }
      REQUIRE_FALSE(ctx.on_carrier_plane(x));
      CHECK(ctx.f(x) == ctx.f_capped(x));
    }
  }
}

TEST_CASE("gate distinction on the carrier plane") {
  auto cells = disk_cells();
  auto c = cell_for(cells, {0});  // A -> AD, head vertex D (id 3)
  FieldContext ctx(c, kD, kEps);
  std::vector<double> x(kD, 0.0);
  x[3] = kEps / 8;
  x[0] = 1.0 - x[3];
  REQUIRE(ctx.on_carrier_plane(x));
  auto plain = ctx.f(x);
  auto inner = ctx.f(x, true);
  auto capped = ctx.f_capped(x);
  // on the plane the plain gate is already fully open
  CHECK(plain == inner);
  // the capped variant halves the head component at s = eps/8
  CHECK(capped[3] == Catch::Approx(plain[3] / 2).margin(1e-15));
  CHECK(plain[3] == Catch::Approx(1.0 + kEps).margin(1e-12));
}

TEST_CASE("wall bounds hold on sampled tile points") {
  auto cells = disk_cells();
  gen::Rng r(92);
  long applicable_tail = 0, applicable_off = 0, applicable_head = 0;
  for (const auto& c : cells) {
    FieldContext ctx(c, kD, kEps);
    for (int mode : {sampling::TailWall, sampling::HeadWall, sampling::OffWall, sampling::Bulk}) {
      for (int k = 0; k < 400; ++k) {
        auto x = sampling::tile_point(r, c, kD, kEps, mode);
        auto sb = ctx.sign_bounds(x);
        applicable_tail += sb.applicable_tail;
        applicable_off += sb.applicable_off;
        applicable_head += sb.applicable_head;
        if (sb.applicable_tail) CHECK(sb.excess_tail <= 0.0);
        if (sb.applicable_off) CHECK(sb.excess_off <= 0.0);
        if (sb.applicable_head) CHECK(sb.excess_head <= 0.0);
        // exit direction: any coordinate pinned exactly at the threshold and
        // covered by a wall bound moves strictly downward
        auto fx = ctx.f(x);
        for (int v = 0; v < kD; ++v) {
          if (x[static_cast<std::size_t>(v)] != kEps) continue;
          bool in_plus = false, in_minus = false;
          for (int u : c.plus) in_plus |= (u == v);
          for (int u : c.minus) in_minus |= (u == v);
          if (in_minus || !in_plus) CHECK(fx[static_cast<std::size_t>(v)] < 0.0);
        }
      }
    }
  }
  // the wall modes actually exercised every hypothesis
  CHECK(applicable_tail > 200);
  CHECK(applicable_off > 200);
  CHECK(applicable_head > 200);
}

TEST_CASE("corrupted transversal profile breaks the head-vertex wall bound") {
  auto cells = disk_cells();
  gen::Rng r(93);
  int violations = 0, clean = 0;
  for (const auto& c : cells) {
    if (c.critical()) continue;
    FieldContext good(c, kD, kEps);
    FieldContext bad(c, kD, kEps);
    bad.flip_h_sign = true;
    for (int k = 0; k < 300; ++k) {
      auto x = sampling::tile_point(r, c, kD, kEps, sampling::HeadWall);
      auto gb = good.sign_bounds(x);
      auto bb = bad.sign_bounds(x);
      if (gb.applicable_head && gb.excess_head > 0.0) ++clean;
      if (bb.applicable_head && bb.excess_head > 0.0) ++violations;
    }
  }
  CHECK(clean == 0);
  CHECK(violations > 0);
}
