// Verification suites over a combinatorial vector field and its induced flow:
// sign and conservation bounds of the field sampled on every tile, equivalence
// of the combinatorial index with the homology of geometric index pairs, the
// two-parameter flow law, and settlement of long trajectories inside tiles of
// the Morse decomposition. Shared by the command-line `verify` command and the
// acceptance binary.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "conley.hpp"
#include "cvf.hpp"
#include "field.hpp"
#include "geometry.hpp"
#include "homology.hpp"
#include "semiflow.hpp"

namespace conleyflow::verify {

// deterministic uniform helpers; the stream is identical across standard
// libraries because no std distribution objects are involved
struct Rng {
  std::mt19937_64 g;
  explicit Rng(std::uint64_t seed) : g(seed) {}
  double uniform() { return std::ldexp(static_cast<double>(g() >> 11), -53); }
  int below(int n) { return static_cast<int>(g() % static_cast<std::uint64_t>(n)); }
  bool coin(double p) { return uniform() < p; }
};

enum TileMode { Bulk = 0, TailWall = 1, HeadWall = 2, OffWall = 3 };

// A point of the flow tile of `cell` over d vertices: coordinates sum to one,
// tail coordinates sit at or above eps, coordinates outside the head simplex
// lie in [0, eps]. Wall modes pin chosen coordinates exactly at eps when the
// remaining mass still fits, so the analytic wall bounds have applicable
// samples.
template <class R>
std::vector<double> tile_point(R& r, const VCell& cell, int d, double eps, int mode) {
  std::vector<char> in_minus(static_cast<std::size_t>(d), 0), in_plus(static_cast<std::size_t>(d), 0);
  for (int v : cell.minus) in_minus[static_cast<std::size_t>(v)] = 1;
  for (int v : cell.plus) in_plus[static_cast<std::size_t>(v)] = 1;
  int vp = -1;
  for (int v : cell.plus)
    if (!in_minus[static_cast<std::size_t>(v)]) vp = v;

  std::vector<int> zs, minus;
  for (int v = 0; v < d; ++v) {
    if (in_minus[static_cast<std::size_t>(v)]) minus.push_back(v);
    else if (v != vp) zs.push_back(v);
  }

  std::vector<double> x(static_cast<std::size_t>(d), 0.0);
  for (int v : zs) {
    double u = r.uniform();
    if (u < 0.2) x[static_cast<std::size_t>(v)] = 0.0;
    else x[static_cast<std::size_t>(v)] = 0.9 * eps * r.uniform();
  }
  if (mode == OffWall && !zs.empty()) {
    int pin = zs[static_cast<std::size_t>(r.below((int)zs.size()))];
    x[static_cast<std::size_t>(pin)] = r.coin(0.5) ? eps : eps * (1.0 - 0.4 * r.uniform());
  }

  // one tail coordinate absorbs whatever mass is left at the end
  int resid = minus[static_cast<std::size_t>(r.below((int)minus.size()))];
  for (int u : minus) {
    if (u == resid) continue;
    if (mode == TailWall)
      x[static_cast<std::size_t>(u)] = r.coin(0.5) ? eps : eps + (eps / 10) * r.uniform();
    else
      x[static_cast<std::size_t>(u)] = eps + (r.coin(0.5) ? (eps / 4) * r.uniform() : 0.1 * r.uniform());
  }

  if (vp >= 0) {
    if (mode == HeadWall) {
      const double halo = eps * eps / (8 + 4 * eps);
      x[static_cast<std::size_t>(vp)] =
          r.coin(0.3) ? eps : eps + (2 * r.uniform() - 1) * 0.999 * halo;
      // give the head-wall bound a companion coordinate close to eps
      bool placed = false;
      for (int u : minus)
        if (u != resid && !placed) {
          x[static_cast<std::size_t>(u)] = eps + (eps / 8) * 0.9 * r.uniform();
          placed = true;
        }
      if (!placed && !zs.empty()) {
        int u = zs[0];
        x[static_cast<std::size_t>(u)] = eps - (eps / 8) * 0.5 * r.uniform();
      }
    } else if (mode == TailWall && minus.size() == 1) {
      // single tail coordinate: its wall sample pins the tail itself and the
      // head vertex absorbs the mass instead
      double others = 0;
      for (int v = 0; v < d; ++v)
        if (v != vp && v != resid) others += x[static_cast<std::size_t>(v)];
      x[static_cast<std::size_t>(resid)] = r.coin(0.5) ? eps : eps + (eps / 10) * r.uniform();
      x[static_cast<std::size_t>(vp)] = 1.0 - others - x[static_cast<std::size_t>(resid)];
      return x;
    } else {
      double sofar = 0;
      for (int v = 0; v < d; ++v)
        if (v != vp && v != resid) sofar += x[static_cast<std::size_t>(v)];
      const double room = 1.0 - sofar - eps;
      x[static_cast<std::size_t>(vp)] = 0.8 * r.uniform() * room;
    }
  }

  double others = 0;
  for (int v = 0; v < d; ++v)
    if (v != resid) others += x[static_cast<std::size_t>(v)];
  x[static_cast<std::size_t>(resid)] = 1.0 - others;
  return x;
}

// a random interior point of a random maximal simplex: every carrier
// coordinate at least 0.05 before normalization
template <class R>
std::vector<double> random_start(R& r, const SimplicialComplex& X,
                                 const std::vector<Simplex>& maximal) {
  const int d = X.vertex_count();
  const Simplex& m = maximal[static_cast<std::size_t>(r.below((int)maximal.size()))];
  std::vector<double> x(static_cast<std::size_t>(d), 0.0);
  double sum = 0;
  for (int v : m) {
    x[static_cast<std::size_t>(v)] = 0.05 + r.uniform();
    sum += x[static_cast<std::size_t>(v)];
  }
  for (int v : m) x[static_cast<std::size_t>(v)] /= sum;
  return x;
}

// ---- sampled sign, conservation, and exit-direction bounds ----

struct BoundsSuite {
  long tiles = 0;
  long samples = 0;
  long applicable_tail = 0, applicable_off = 0, applicable_head = 0;
  long bound_violations = 0;
  long conservation_violations = 0;
  long direction_violations = 0;
  double conservation_tolerance = 1e-12;
  double worst_conservation = 0;
  double worst_excess = -std::numeric_limits<double>::infinity();
  bool ok() const {
    return bound_violations == 0 && conservation_violations == 0 && direction_violations == 0 &&
           applicable_tail > 0 && applicable_off > 0 && applicable_head > 0;
  }
};

// samples_per_tile points on every tile (split over the four wall modes);
// checks the three wall bounds where their hypotheses hold, mass conservation
// of the field, and the strict exit direction on coordinates pinned at the
// threshold. corrupt_transversal flips the transversal speed profile and must
// make the suite fail.
inline BoundsSuite field_bounds_suite(const CombinatorialVectorField& V, double eps,
                                      long samples_per_tile, std::uint64_t seed,
                                      bool corrupt_transversal = false) {
  BoundsSuite out;
  const int d = V.complex().vertex_count();
  Rng r(seed);
  const long per_mode = (samples_per_tile + 3) / 4;
  for (const auto& cell : V.cells()) {
    ++out.tiles;
    FieldContext ctx(cell, d, eps);
    ctx.flip_h_sign = corrupt_transversal;
    for (int mode : {TailWall, HeadWall, OffWall, Bulk}) {
      for (long k = 0; k < per_mode; ++k) {
        auto x = tile_point(r, cell, d, eps, mode);
        ++out.samples;
        auto sb = ctx.sign_bounds(x);
        out.applicable_tail += sb.applicable_tail;
        out.applicable_off += sb.applicable_off;
        out.applicable_head += sb.applicable_head;
        for (const auto& [app, excess] :
             {std::pair<int, double>{sb.applicable_tail, sb.excess_tail},
              {sb.applicable_off, sb.excess_off},
              {sb.applicable_head, sb.excess_head}}) {
          if (!app) continue;
          out.worst_excess = std::max(out.worst_excess, excess);
          if (excess > 0.0) ++out.bound_violations;
        }
        auto fx = ctx.f(x);
        double sum = 0;
        for (double fv : fx) sum += fv;
        out.worst_conservation = std::max(out.worst_conservation, std::fabs(sum));
        if (std::fabs(sum) > out.conservation_tolerance) ++out.conservation_violations;
        for (int v = 0; v < d; ++v) {
          if (x[static_cast<std::size_t>(v)] != eps) continue;
          if (ctx.in_minus[static_cast<std::size_t>(v)] || !ctx.in_plus[static_cast<std::size_t>(v)])
            if (!(fx[static_cast<std::size_t>(v)] < 0.0)) ++out.direction_violations;
        }
      }
    }
  }
  return out;
}

// ---- combinatorial index vs homology of geometric index pairs ----

struct EquivalenceRow {
  std::string label;
  PoincarePolynomial combinatorial;      // homology of (Cl S, Mo S)
  PoincarePolynomial block_pair;         // homology of the block and its exit set
  PoincarePolynomial neighborhood_pair;  // homology of the closure/mouth neighborhoods
  bool exit_sets_agree = false;          // definition vs boundary-classification table
  bool ok() const {
    return exit_sets_agree && combinatorial == block_pair && combinatorial == neighborhood_pair;
  }
};

struct EquivalenceSuite {
  std::vector<EquivalenceRow> rows;
  bool ok() const {
    for (const auto& r : rows)
      if (!r.ok()) return false;
    return true;
  }
};

// one comparison row for an isolated invariant set: its combinatorial index
// against the relative homology of both geometric index pairs, computed
// through the representable-set -> order-complex -> homology pipeline
inline EquivalenceRow equivalence_row(const std::set<Simplex>& S, const CombinatorialVectorField& V,
                                      const Realization& R) {
  const auto& X = V.complex();
  EquivalenceRow row;
  row.label = detail::node_label(S, X);
  row.combinatorial = poincare_polynomial(X.closure(S), mouth(S, X));
  auto pd = R.index_pairs(S, V);
  auto bp = R.triangulate_pair(pd.block, pd.exit_def);
  row.block_pair = PoincarePolynomial(relative_betti(bp.first, bp.second));
  auto np = R.triangulate_pair(pd.q1, pd.q2);
  row.neighborhood_pair = PoincarePolynomial(relative_betti(np.first, np.second));
  row.exit_sets_agree = (pd.exit_def == pd.exit_table);
  return row;
}

// the comparison over every Morse set of the finest decomposition
inline EquivalenceSuite index_equivalence_suite(const CombinatorialVectorField& V,
                                                const Rational& eps) {
  Realization R(V.complex(), eps);
  auto g = finest_morse_decomposition(V);
  EquivalenceSuite out;
  for (const auto& node : g.nodes) out.rows.push_back(equivalence_row(node.simplices, V, R));
  return out;
}

// ---- the two-parameter flow law ----

struct LawCheck {
  int triples = 0;
  double tolerance = 1e-6;
  double worst = 0;
  bool ok() const { return worst <= tolerance; }
};

// |phi(t, phi(s, x)) - phi(t+s, x)| over random grid-aligned durations s, t in
// (0, horizon] from random interior starts
inline LawCheck semiflow_law_suite(const CombinatorialVectorField& V, double eps, int n_triples,
                                   std::uint64_t seed, double horizon = 5.0,
                                   SemiflowParams params = {}) {
  Semiflow flow(V, eps, params);
  const auto& X = V.complex();
  auto maximal = X.maximal_simplices();
  Rng r(seed);
  LawCheck out;
  out.triples = n_triples;
  const int steps = std::max(1, static_cast<int>(horizon / params.dt));
  for (int k = 0; k < n_triples; ++k) {
    auto x = random_start(r, X, maximal);
    const double s = params.dt * (1 + r.below(steps));
    const double t = params.dt * (1 + r.below(steps));
    auto a = flow.run(x, s);
    auto b = flow.run(a.x, t);
    auto c = flow.run(x, s + t);
    for (std::size_t v = 0; v < b.x.size(); ++v)
      out.worst = std::max(out.worst, std::fabs(b.x[v] - c.x[v]));
  }
  return out;
}

// ---- settlement of long trajectories in Morse-set tiles ----

struct SettlementCheck {
  int starts = 0;
  int settled = 0;
  std::vector<std::string> violations;
  bool ok() const { return violations.empty() && settled == starts; }
};

// every long trajectory must come to rest inside a tile of some Morse set, and
// the itinerary of Morse-set tiles it touches must respect the connection
// order of the Conley-Morse graph
inline SettlementCheck morse_settlement_suite(const CombinatorialVectorField& V, double eps,
                                              int n_starts, double t_max, std::uint64_t seed,
                                              SemiflowParams params = {}) {
  Semiflow flow(V, eps, params);
  const auto& X = V.complex();
  auto g = finest_morse_decomposition(V);

  // a tile belongs to a Morse set when its whole carrier does
  std::vector<int> owner(V.cells().size(), -1);
  for (std::size_t ci = 0; ci < V.cells().size(); ++ci) {
    const VCell& c = V.cells()[ci];
    for (std::size_t p = 0; p < g.nodes.size(); ++p) {
      const auto& member = g.nodes[p].simplices;
      if (member.count(c.plus) && (c.critical() || member.count(c.minus))) {
        owner[ci] = static_cast<int>(p);
        break;
      }
    }
  }

  auto maximal = X.maximal_simplices();
  Rng r(seed);
  SettlementCheck out;
  out.starts = n_starts;
  for (int k = 0; k < n_starts; ++k) {
    auto res = flow.run(random_start(r, X, maximal), t_max);
    if (!res.settled) {
      out.violations.push_back("trajectory " + std::to_string(k) + " did not settle by t=" +
                               std::to_string(t_max));
      continue;
    }
    ++out.settled;
    std::vector<int> itinerary;
    for (const auto& visit : res.visits) {
      int o = owner[static_cast<std::size_t>(visit.cell_index)];
      if (o >= 0 && (itinerary.empty() || itinerary.back() != o)) itinerary.push_back(o);
    }
    if (itinerary.empty() ||
        owner[static_cast<std::size_t>(res.visits.back().cell_index)] < 0) {
      out.violations.push_back("trajectory " + std::to_string(k) +
                               " settled outside every Morse set");
      continue;
    }
    for (std::size_t i = 0; i < itinerary.size(); ++i)
      for (std::size_t j = i + 1; j < itinerary.size(); ++j) {
        if (itinerary[i] == itinerary[j]) {
          out.violations.push_back("trajectory " + std::to_string(k) + " returned to Morse set " +
                                   g.nodes[static_cast<std::size_t>(itinerary[i])].label);
        } else if (!g.order.count({itinerary[i], itinerary[j]})) {
          out.violations.push_back(
              "trajectory " + std::to_string(k) + " ran against the connection order: " +
              g.nodes[static_cast<std::size_t>(itinerary[i])].label + " -> " +
              g.nodes[static_cast<std::size_t>(itinerary[j])].label);
        }
      }
  }
  return out;
}

}  // namespace conleyflow::verify
