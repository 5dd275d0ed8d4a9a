// Glued semiflow on the polytope of a simplicial complex: per-tile integration
// with the coordinates off the head simplex solved in closed form until they
// reach exact zero, classical fixed-step fourth-order integration for the
// rest, bisection-localized wall events with threshold snapping, hand-off to
// the tile owning the minimal characteristic simplex, and a verification
// suite for the crossing discipline of the resulting trajectories.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cvf.hpp"
#include "field.hpp"

namespace conleyflow {

struct SemiflowParams {
  double dt = 1e-3;          // base step; steps land on global multiples of dt
  double tau_event = 1e-12;  // bisection window for wall and kink events
  double tau_snap = 1e-9;    // coordinates this close to the threshold snap onto it
  double tau_mem = 1e-8;     // allowed transient excursion outside the tile box
  double settle_speed = 1e-9;       // speed below which a critical tile counts as settled
  double budget_factor = 10.0;      // arrow-tile residence budget = budget_factor / eps
};

// callback receiving every accepted integration state (time, point, tile)
using StepSink = std::function<void(double, const std::vector<double>&, int)>;

struct TileVisit {
  int cell_index = -1;
  double t_enter = 0, t_exit = 0;
  std::vector<double> x_enter, x_exit;
  bool exited_through_wall = false;
  bool settled = false;
  bool budget_hit = false;
};

struct FlowResult {
  std::vector<double> x;
  double t = 0;
  bool settled = false;
  bool budget_exceeded = false;
  std::vector<TileVisit> visits;
};

namespace detail {

inline Simplex coords_above(const std::vector<double>& x, double eps) {
  Simplex s;
  for (int v = 0; v < static_cast<int>(x.size()); ++v)
    if (x[static_cast<std::size_t>(v)] > eps) s.push_back(v);
  return s;
}

inline Simplex coords_at_or_above(const std::vector<double>& x, double eps) {
  Simplex s;
  for (int v = 0; v < static_cast<int>(x.size()); ++v)
    if (x[static_cast<std::size_t>(v)] >= eps) s.push_back(v);
  return s;
}

inline bool subset(const Simplex& a, const Simplex& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace detail

class Semiflow {
 public:
  Semiflow(const CombinatorialVectorField& V, double eps, SemiflowParams params = {},
           bool corrupt_transversal = false)
      : V_(&V), X_(&V.complex()), eps_(eps), p_(params), d_(V.complex().vertex_count()) {
    for (const auto& c : V.cells()) {
      contexts_.emplace_back(c, d_, eps);
      if (corrupt_transversal) contexts_.back().flip_h_sign = true;
    }
    t_budget_ = p_.budget_factor / eps;
  }

  int dims() const { return d_; }
  double eps() const { return eps_; }
  double residence_budget() const { return t_budget_; }
  const SemiflowParams& params() const { return p_; }
  const CombinatorialVectorField& field() const { return *V_; }
  const SimplicialComplex& complex() const { return *X_; }
  const FieldContext& context(int cell_index) const {
    return contexts_[static_cast<std::size_t>(cell_index)];
  }

  void validate_point(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != d_)
      throw std::invalid_argument("point has the wrong number of coordinates");
    double sum = 0;
    Simplex support;
    for (int v = 0; v < d_; ++v) {
      double t = x[static_cast<std::size_t>(v)];
      if (t < -1e-12) throw std::invalid_argument("point has a negative coordinate");
      if (t > 0) support.push_back(v);
      sum += t;
    }
    if (std::fabs(sum - 1.0) > 1e-7)
      throw std::invalid_argument("point coordinates do not sum to one");
    if (!X_->contains(support))
      throw std::invalid_argument("point support " + X_->name_of(support) +
                                  " is not a simplex of the complex");
  }

  // the partition cell owning the minimal characteristic simplex of x
  int tile_index_of(const std::vector<double>& x) const {
    Simplex smin = detail::coords_above(x, eps_);
    if (smin.empty()) throw std::logic_error("no coordinate exceeds the threshold");
    return V_->cell_index_of(smin);
  }

  FlowResult run(std::vector<double> x, double duration, const StepSink& sink = {}) const {
    validate_point(x);
    if (duration < 0) throw std::invalid_argument("negative duration");
    FlowResult R;
    R.t = 0;
    long visit_guard = 0;
    while (R.t < duration) {
      int ci = tile_index_of(x);
      TileVisit visit = integrate_visit(ci, x, R.t, duration, sink);
      R.visits.push_back(visit);
      x = visit.x_exit;
      R.t = visit.t_exit;
      if (visit.settled) {
        R.settled = true;
        break;
      }
      if (visit.budget_hit) {
        R.budget_exceeded = true;
        break;
      }
      if (!visit.exited_through_wall) break;  // reached the requested time
      if (++visit_guard > 1000000) throw std::logic_error("tile visit count exploded");
    }
    R.x = x;
    return R;
  }

  std::vector<double> at(const std::vector<double>& x0, double t) const {
    FlowResult R = run(x0, t);
    if (R.budget_exceeded) throw std::runtime_error("trajectory overran the residence budget");
    return R.x;
  }

 private:
  const CombinatorialVectorField* V_;
  const SimplicialComplex* X_;
  double eps_;
  SemiflowParams p_;
  int d_;
  double t_budget_;
  std::vector<FieldContext> contexts_;

  double next_grid_time(double t) const {
    double k = std::floor(t / p_.dt + 1e-9);
    return (k + 1.0) * p_.dt;
  }

  TileVisit integrate_visit(int ci, std::vector<double> x, double t_in, double t_end,
                            const StepSink& sink) const {
    const FieldContext& ctx = contexts_[static_cast<std::size_t>(ci)];
    const double eps = eps_;
    const double min_sub = p_.dt / 16384.0;

    TileVisit visit;
    visit.cell_index = ci;
    visit.t_enter = t_in;
    visit.x_enter = x;

    for (int v = 0; v < d_; ++v)
      if (ctx.in_minus[static_cast<std::size_t>(v)] && x[static_cast<std::size_t>(v)] <= eps)
        throw std::logic_error("tile entry is not strictly inside: coordinate " +
                               X_->vertex_names()[static_cast<std::size_t>(v)] + " is at or below the threshold");

    // closed-form schedule for the coordinates off the head simplex
    std::vector<double> zeta(static_cast<std::size_t>(d_), 0.0);
    std::vector<double> tz(static_cast<std::size_t>(d_), t_in);
    std::vector<double> boundaries;
    double tau_abs = t_in;
    for (int v = 0; v < d_; ++v) {
      if (ctx.in_plus[static_cast<std::size_t>(v)]) continue;
      double z0 = x[static_cast<std::size_t>(v)];
      zeta[static_cast<std::size_t>(v)] = z0;
      if (z0 > 0) {
        double td = t_in + decay_time(z0, eps);
        tz[static_cast<std::size_t>(v)] = td;
        boundaries.push_back(td);
        tau_abs = std::max(tau_abs, td);
      }
    }
    std::sort(boundaries.begin(), boundaries.end());
    boundaries.erase(std::unique(boundaries.begin(), boundaries.end()), boundaries.end());

    auto zvalue = [&](int v, double t) -> double {
      if (t >= tz[static_cast<std::size_t>(v)]) return 0.0;
      return decoupled_solution(t - t_in, zeta[static_cast<std::size_t>(v)], eps);
    };
    auto put_analytic = [&](std::vector<double>& full, double t) {
      for (int v = 0; v < d_; ++v)
        if (!ctx.in_plus[static_cast<std::size_t>(v)]) full[static_cast<std::size_t>(v)] = zvalue(v, t);
    };
    auto deriv = [&](const std::vector<double>& xs, bool phase_a) {
      return phase_a ? ctx.f_capped(xs) : ctx.f(xs, true);
    };
    // one integration step from (t0, x0) landing exactly on tend; in the
    // analytic phase the coordinates off the head simplex follow the closed
    // form, re-expressed at the very time value the step is accepted at
    auto rk4 = [&](double t0, const std::vector<double>& x0, double tend, bool phase_a) {
      double h = tend - t0;
      std::vector<double> s(static_cast<std::size_t>(d_));
      auto k1 = deriv(x0, phase_a);
      for (int v = 0; v < d_; ++v)
        s[static_cast<std::size_t>(v)] = x0[static_cast<std::size_t>(v)] + 0.5 * h * k1[static_cast<std::size_t>(v)];
      if (phase_a) put_analytic(s, t0 + 0.5 * h);
      auto k2 = deriv(s, phase_a);
      for (int v = 0; v < d_; ++v)
        s[static_cast<std::size_t>(v)] = x0[static_cast<std::size_t>(v)] + 0.5 * h * k2[static_cast<std::size_t>(v)];
      if (phase_a) put_analytic(s, t0 + 0.5 * h);
      auto k3 = deriv(s, phase_a);
      for (int v = 0; v < d_; ++v)
        s[static_cast<std::size_t>(v)] = x0[static_cast<std::size_t>(v)] + h * k3[static_cast<std::size_t>(v)];
      if (phase_a) put_analytic(s, tend);
      auto k4 = deriv(s, phase_a);
      std::vector<double> out(static_cast<std::size_t>(d_));
      for (int v = 0; v < d_; ++v)
        out[static_cast<std::size_t>(v)] =
            x0[static_cast<std::size_t>(v)] +
            (h / 6.0) * (k1[static_cast<std::size_t>(v)] + 2 * k2[static_cast<std::size_t>(v)] +
                         2 * k3[static_cast<std::size_t>(v)] + k4[static_cast<std::size_t>(v)]);
      if (phase_a) put_analytic(out, tend);
      return out;
    };
    auto exited = [&](const std::vector<double>& xs) {
      for (int v = 0; v < d_; ++v)
        if (ctx.in_minus[static_cast<std::size_t>(v)] && xs[static_cast<std::size_t>(v)] < eps) return true;
      return false;
    };
    // earliest absolute time in (t0, tend] at which pred flips from false to
    // true, found by bisection over fresh steps from (t0, x0); returns the
    // crossing time and the state on the far side, expressed at that time
    auto bisect = [&](double t0, const std::vector<double>& x0, double tend, bool phase_a,
                      const std::function<bool(const std::vector<double>&)>& pred) {
      double lo = t0, hi = tend;
      std::vector<double> xhi = rk4(t0, x0, tend, phase_a);
      while (hi - lo > p_.tau_event) {
        double mid = 0.5 * (lo + hi);
        auto xm = rk4(t0, x0, mid, phase_a);
        if (pred(xm)) {
          hi = mid;
          xhi = std::move(xm);
        } else {
          lo = mid;
        }
      }
      return std::pair<double, std::vector<double>>(hi, std::move(xhi));
    };

    const double levels[5] = {-eps / 4, eps / 4, eps / 2, eps, 3 * eps / 2};
    auto snap = [&](std::vector<double>& xs) {
      for (int v = 0; v < d_; ++v)
        if (std::fabs(xs[static_cast<std::size_t>(v)] - eps) <= p_.tau_snap)
          xs[static_cast<std::size_t>(v)] = eps;
    };

    double t = t_in;
    if (sink) sink(t, x, ci);

    while (true) {
      if (t >= t_end) break;
      if (!ctx.critical() && t - t_in >= t_budget_) {
        visit.budget_hit = true;
        break;
      }
      bool phase_a = t < tau_abs;
      double t_stop = t_end;
      bool stop_is_decay = false;
      if (phase_a) {
        auto it = std::upper_bound(boundaries.begin(), boundaries.end(), t);
        if (it != boundaries.end() && *it < t_stop) {
          t_stop = *it;
          stop_is_decay = true;
        } else if (it != boundaries.end() && *it == t_stop) {
          stop_is_decay = true;
        }
      }
      if (!ctx.critical()) {
        double tb = t_in + t_budget_;
        if (tb < t_stop) {
          t_stop = tb;
          stop_is_decay = false;
        }
      }

      double h_end = std::min(next_grid_time(t), t_stop);
      // approach a decay boundary with geometrically shrinking steps: the
      // closed-form decay has unbounded curvature right before it hits zero,
      // so no single step may land deep inside the final slice before it
      if (stop_is_decay && t_stop - t > min_sub && t_stop - h_end < p_.dt)
        h_end = std::min(h_end, t + std::max(0.5 * (t_stop - t), min_sub));
      if (!(h_end > t)) throw std::logic_error("integration step collapsed");

      auto xn = rk4(t, x, h_end, phase_a);

      // locate the earliest event inside the step: a wall exit or a kink level
      // crossing of the head-vertex coordinate
      bool exit_in_step = exited(xn);
      double t_exit_ev = 0;
      std::vector<double> x_exit_ev;
      if (exit_in_step) {
        auto [te, xe] = bisect(t, x, h_end, phase_a, exited);
        t_exit_ev = te;
        x_exit_ev = std::move(xe);
      }
      bool kink_in_step = false;
      double t_kink_ev = 0;
      std::vector<double> x_kink_ev;
      if (ctx.vplus >= 0) {
        double s0 = x[static_cast<std::size_t>(ctx.vplus)];
        double s1 = xn[static_cast<std::size_t>(ctx.vplus)];
        bool any = false;
        for (double L : levels)
          if ((s0 - L) * (s1 - L) < 0) any = true;
        if (any) {
          auto crossed = [&](const std::vector<double>& xs) {
            double sv = xs[static_cast<std::size_t>(ctx.vplus)];
            for (double L : levels)
              if ((s0 - L) * (sv - L) < 0) return true;
            return false;
          };
          auto [tk, xk] = bisect(t, x, h_end, phase_a, crossed);
          kink_in_step = true;
          t_kink_ev = tk;
          x_kink_ev = std::move(xk);
        }
      }

      if (exit_in_step && (!kink_in_step || t_exit_ev <= t_kink_ev)) {
        snap(x_exit_ev);
        t = t_exit_ev;
        x = std::move(x_exit_ev);
        if (sink) sink(t, x, ci);
        visit.exited_through_wall = true;
        break;
      }
      if (kink_in_step) {
        // restart stepping at the kink so every step sees a smooth field
        t = t_kink_ev;
        x = std::move(x_kink_ev);
        if (sink) sink(t, x, ci);
        continue;
      }

      t = h_end;
      x = std::move(xn);
      if (sink) sink(t, x, ci);

      if (ctx.critical()) {
        auto fx = ctx.f(x, t >= tau_abs);
        double speed = 0;
        for (double c : fx) speed = std::max(speed, std::fabs(c));
        if (speed < p_.settle_speed) {
          visit.settled = true;
          break;
        }
      }
    }

    visit.t_exit = t;
    visit.x_exit = std::move(x);
    if (visit.exited_through_wall) {
      // hand-off sanity: the next tile brackets the minimal characteristic
      // simplex of the exit point and is a different tile
      Simplex smin = detail::coords_above(visit.x_exit, eps);
      int nxt = V_->cell_index_of(smin);
      if (nxt == ci) throw std::logic_error("wall exit did not leave the tile");
      const VCell& nc = V_->cells()[static_cast<std::size_t>(nxt)];
      if (!detail::subset(nc.minus, smin) || !detail::subset(smin, nc.plus))
        throw std::logic_error("hand-off does not bracket the minimal characteristic simplex");
    }
    return visit;
  }
};

// ---------------------------------------------------------------------------
// verification of the crossing discipline over random trajectories

struct AdmissibilityViolation {
  std::string kind;
  double t = 0;
  std::string detail;
};

struct AdmissibilityReport {
  int trajectories = 0;
  long crossings = 0;
  double max_arrow_residence = 0;
  double worst_conservation = 0;
  std::vector<AdmissibilityViolation> violations;
  bool ok() const { return violations.empty(); }
};

// Runs seeded random trajectories and polices: conservation and positivity,
// containment in the current tile box, hand-off bracketing, backward probes in
// the open cell of the maximal characteristic simplex, forward probes in the
// open cell of the minimal one, no tangential micro-visits, and the arrow-tile
// residence budget. corrupt_transversal flips the transversal speed profile
// and must make the suite fail.
inline AdmissibilityReport check_strong_admissibility(const CombinatorialVectorField& V, double eps,
                                                      int n_trajectories, double t_max,
                                                      std::uint64_t seed,
                                                      SemiflowParams params = {},
                                                      bool corrupt_transversal = false) {
  Semiflow flow(V, eps, params, corrupt_transversal);
  const SimplicialComplex& X = V.complex();
  const int d = X.vertex_count();
  auto maximal = X.maximal_simplices();
  std::mt19937_64 g(seed);
  auto uniform = [&g] { return std::ldexp(static_cast<double>(g() >> 11), -53); };

  AdmissibilityReport rep;
  auto flag = [&rep](const std::string& kind, double t, const std::string& detail) {
    rep.violations.push_back({kind, t, detail});
  };

  for (int i = 0; i < n_trajectories; ++i) {
    const Simplex& top = maximal[g() % maximal.size()];
    std::vector<double> x0(static_cast<std::size_t>(d), 0.0);
    double sum = 0;
    for (int v : top) {
      x0[static_cast<std::size_t>(v)] = 0.05 + uniform();
      sum += x0[static_cast<std::size_t>(v)];
    }
    for (int v : top) x0[static_cast<std::size_t>(v)] /= sum;

    double worst_sum = 0, worst_neg = 0, worst_box = 0, worst_box_t = 0;
    StepSink police = [&](double t, const std::vector<double>& xs, int ci) {
      double s = 0, neg = 0;
      for (double c : xs) {
        s += c;
        neg = std::min(neg, c);
      }
      worst_sum = std::max(worst_sum, std::fabs(s - 1.0));
      worst_neg = std::min(worst_neg, neg);
      double bv = flow.context(ci).box_violation(xs);
      if (bv > worst_box) {
        worst_box = bv;
        worst_box_t = t;
      }
    };

    FlowResult R;
    try {
      R = flow.run(x0, t_max, police);
    } catch (const std::exception& e) {
      flag("progress", 0, e.what());
      continue;
    }
    ++rep.trajectories;
    rep.worst_conservation = std::max(rep.worst_conservation, worst_sum);
    if (worst_sum > 1e-8) flag("conservation", 0, "mass drift " + std::to_string(worst_sum));
    if (worst_neg < -1e-12)
      flag("negative coordinate", 0, "coordinate reached " + std::to_string(worst_neg));
    if (worst_box > params.tau_mem)
      flag("box escape", worst_box_t, "tile box violated by " + std::to_string(worst_box));

    for (std::size_t k = 0; k < R.visits.size(); ++k) {
      const TileVisit& a = R.visits[k];
      const VCell& cell = V.cells()[static_cast<std::size_t>(a.cell_index)];
      double residence = a.t_exit - a.t_enter;
      if (!cell.critical()) {
        if (a.exited_through_wall)
          rep.max_arrow_residence = std::max(rep.max_arrow_residence, residence);
        if (a.budget_hit)
          flag("arrow residence budget", a.t_enter,
               "stuck in the tile of " + X.name_of(cell.plus) + " for " + std::to_string(residence));
      }
      if (!a.exited_through_wall || k + 1 >= R.visits.size()) continue;

      const TileVisit& b = R.visits[k + 1];
      ++rep.crossings;
      const std::vector<double>& xc = a.x_exit;
      double tc = a.t_exit;
      Simplex smin = detail::coords_above(xc, eps);
      Simplex smax = detail::coords_at_or_above(xc, eps);
      const VCell& nc = V.cells()[static_cast<std::size_t>(b.cell_index)];
      if (b.x_enter != xc || !detail::subset(nc.minus, smin) || !detail::subset(smin, nc.plus))
        flag("entry mismatch", tc, "hand-off into the tile of " + X.name_of(nc.plus));
      if (b.exited_through_wall && b.t_exit - b.t_enter <= params.tau_event)
        flag("tangency", tc, "re-crossed after " + std::to_string(b.t_exit - b.t_enter));

      // A head-vertex coordinate hovering close to the threshold at the
      // crossing may cross it inside the probe window without that being an
      // event, so the side test skips it there; coordinates exactly at the
      // threshold are the event coordinates and stay fully enforced.
      auto hovering = [eps](double ref, double band) {
        return ref != eps && std::fabs(ref - eps) <= band;
      };

      // the trajectory approaches the crossing from the open cell of the
      // maximal characteristic simplex...
      double dm = std::min(params.dt, 0.5 * (a.t_exit - a.t_enter));
      int vp_a = flow.context(a.cell_index).vplus;
      std::vector<double> pm = flow.run(a.x_enter, (tc - dm) - a.t_enter).x;
      bool ok_minus = true;
      for (int v = 0; v < d; ++v) {
        if (v == vp_a && hovering(xc[static_cast<std::size_t>(v)], 10 * eps * dm)) continue;
        bool inmax = std::binary_search(smax.begin(), smax.end(), v);
        double c = pm[static_cast<std::size_t>(v)];
        if (inmax ? !(c > eps) : !(c < eps)) ok_minus = false;
      }
      if (!ok_minus)
        flag("backward probe outside the upper cell", tc,
             "just before crossing out of the tile of " + X.name_of(cell.plus));

      // ...and leaves it into the open cell of the minimal one
      double dp = std::min(params.dt, 0.5 * (b.t_exit - b.t_enter));
      int vp_b = flow.context(b.cell_index).vplus;
      std::vector<double> pp = flow.run(xc, dp).x;
      bool ok_plus = true;
      for (int v = 0; v < d; ++v) {
        if (v == vp_b && hovering(xc[static_cast<std::size_t>(v)], 10 * eps * dp)) continue;
        bool inmin = std::binary_search(smin.begin(), smin.end(), v);
        double c = pp[static_cast<std::size_t>(v)];
        if (inmin ? !(c > eps) : !(c < eps)) ok_plus = false;
      }
      if (!ok_plus)
        flag("forward probe outside the lower cell", tc,
             "just after crossing into the tile of " + X.name_of(nc.plus));
    }
  }
  return rep;
}

}  // namespace conleyflow
