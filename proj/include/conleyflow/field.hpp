// The explicit smooth vector field attached to one partition cell: cube-root
// decay off the carrier plane, a gated transversal component on the extra
// head vertex, a mass-balancing component on the tail vertices, the closed
// form for the decoupled coordinates, and the analytic wall bounds used to
// police tile exits.
#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "cvf.hpp"

namespace conleyflow {

// closed form for one decoupled coordinate: starting from value zeta it obeys
// s' = -cbrt(eps^2 s) and reaches zero at a finite time, exactly zero after
inline double decay_time(double zeta, double eps) {
  if (zeta == 0.0) return 0.0;
  return 1.5 * std::cbrt((zeta / eps) * (zeta / eps));
}

inline double decoupled_solution(double t, double zeta, double eps) {
  if (zeta == 0.0) return 0.0;
  const double sign = zeta > 0 ? 1.0 : -1.0;
  const double az = std::fabs(zeta);
  if (t >= decay_time(az, eps)) return 0.0;
  const double base = std::cbrt(az * az) - (2.0 / 3.0) * std::cbrt(eps * eps) * t;
  if (base <= 0.0) return 0.0;
  return sign * base * std::sqrt(base);
}

// evaluation context for the field of one cell over a fixed vertex set
struct FieldContext {
  std::vector<char> in_minus, in_plus;
  int vplus = -1;  // the head vertex missing from the tail, -1 for critical cells
  int card_minus = 0;
  int d = 0;
  double eps = 0;
  bool flip_h_sign = false;      // fault injection for negative-control tests
  double plane_tol = 1e-24;      // sum-of-squares threshold for the carrier plane

  FieldContext(const VCell& cell, int dims, double threshold)
      : in_minus(static_cast<std::size_t>(dims), 0),
        in_plus(static_cast<std::size_t>(dims), 0),
        d(dims),
        eps(threshold) {
    if (!(eps > 0) || !(eps < 1.0 / (6.0 * d)))
      throw std::invalid_argument("field threshold must lie strictly between 0 and 1/(6d)");
    for (int v : cell.minus) in_minus[static_cast<std::size_t>(v)] = 1;
    for (int v : cell.plus) {
      in_plus[static_cast<std::size_t>(v)] = 1;
      if (!in_minus[static_cast<std::size_t>(v)]) vplus = v;
    }
    card_minus = static_cast<int>(cell.minus.size());
  }

  bool critical() const { return vplus < 0; }

  // decay speed profile: odd cube-root shape, zero only at zero
  double g(double s) const { return std::cbrt(eps * eps * s); }

  // transversal speed profile: one away from the threshold, dipping linearly
  // to -eps/2 exactly at it
  double h(double s) const {
    const double a = std::fabs(s - eps);
    double value = 1.0;
    if (a < eps / 2) value = (1.0 + eps / 2) * (2.0 / eps) * a - eps / 2;
    return flip_h_sign ? -value : value;
  }

  // clearance of the tail coordinates above the threshold, capped at eps
  double theta(const std::vector<double>& x) const {
    double m = eps;
    for (int v = 0; v < d; ++v)
      if (in_minus[static_cast<std::size_t>(v)])
        m = std::min(m, x[static_cast<std::size_t>(v)] - eps);
    return m;
  }

  // whether every coordinate outside the head simplex vanishes
  bool on_carrier_plane(const std::vector<double>& x) const {
    double ss = 0;
    for (int v = 0; v < d; ++v)
      if (!in_plus[static_cast<std::size_t>(v)])
        ss += x[static_cast<std::size_t>(v)] * x[static_cast<std::size_t>(v)];
    return ss <= plane_tol;
  }

  // gate for the transversal component: fully open on the carrier plane or
  // away from zero, proportional near zero
  double eta(double s, const std::vector<double>& x) const {
    if (on_carrier_plane(x) || std::fabs(s) > eps / 4) return 1.0;
    return 4.0 * std::fabs(s) / eps;
  }

  // the field itself; structurally_inner forces the carrier-plane gate open
  // (used once the decoupled coordinates have decayed to exact zero)
  std::vector<double> f(const std::vector<double>& x, bool structurally_inner = false) const {
    return assemble(x, structurally_inner ? GateMode::Open : GateMode::Plain);
  }

  // variant with the gate capped at one regardless of the carrier plane; it
  // coincides with f away from the plane
  std::vector<double> f_capped(const std::vector<double>& x) const {
    return assemble(x, GateMode::Capped);
  }

  // time at which the last coordinate outside the head simplex reaches zero
  double switch_time(const std::vector<double>& x) const {
    double t = 0;
    for (int v = 0; v < d; ++v)
      if (!in_plus[static_cast<std::size_t>(v)])
        t = std::max(t, decay_time(std::fabs(x[static_cast<std::size_t>(v)]), eps));
    return t;
  }

  // largest violation of the tile's coordinate box (0 when inside):
  // tail coordinates at least eps, head-vertex coordinate nonnegative,
  // coordinates off the head simplex between 0 and eps
  double box_violation(const std::vector<double>& x) const {
    double worst = 0;
    for (int v = 0; v < d; ++v) {
      const double t = x[static_cast<std::size_t>(v)];
      if (in_minus[static_cast<std::size_t>(v)]) {
        worst = std::max(worst, eps - t);
      } else if (v == vplus) {
        worst = std::max(worst, -t);
      } else {
        worst = std::max(worst, -t);
        worst = std::max(worst, t - eps);
      }
    }
    return worst;
  }

  // analytic wall bounds; excess values are max(f_v - bound) over the
  // coordinates where the hypothesis applies, so any positive excess is a
  // violation
  struct SignBounds {
    int applicable_tail = 0, applicable_off = 0, applicable_head = 0;
    double excess_tail = -std::numeric_limits<double>::infinity();
    double excess_off = -std::numeric_limits<double>::infinity();
    double excess_head = -std::numeric_limits<double>::infinity();
  };

  SignBounds sign_bounds(const std::vector<double>& x) const {
    SignBounds b;
    auto fx = f(x);
    for (int v = 0; v < d; ++v) {
      const double t = x[static_cast<std::size_t>(v)];
      if (in_minus[static_cast<std::size_t>(v)]) {
        if (std::fabs(t - eps) <= eps) {
          ++b.applicable_tail;
          b.excess_tail = std::max(b.excess_tail, fx[static_cast<std::size_t>(v)] + 1.0 / (4.0 * d));
        }
      } else if (v != vplus) {
        if (std::fabs(t - eps) <= eps / 2) {
          ++b.applicable_off;
          b.excess_off = std::max(b.excess_off, fx[static_cast<std::size_t>(v)] + eps / 2);
        }
      }
    }
    if (vplus >= 0 && std::fabs(x[static_cast<std::size_t>(vplus)] - eps) <= eps * eps / (8 + 4 * eps)) {
      bool companion = false;
      for (int v = 0; v < d; ++v)
        if (v != vplus && std::fabs(x[static_cast<std::size_t>(v)] - eps) <= eps / 8) companion = true;
      if (companion) {
        ++b.applicable_head;
        b.excess_head = std::max(b.excess_head, fx[static_cast<std::size_t>(vplus)] + eps / 8);
      }
    }
    return b;
  }

 private:
  enum class GateMode { Plain, Open, Capped };

  std::vector<double> assemble(const std::vector<double>& x, GateMode mode) const {
    if (static_cast<int>(x.size()) != d) throw std::invalid_argument("coordinate count mismatch");
    std::vector<double> r(x.size(), 0.0);
    double sum_off_minus_f = 0.0;

    for (int v = 0; v < d; ++v)
      if (!in_plus[static_cast<std::size_t>(v)]) {
        r[static_cast<std::size_t>(v)] = -g(x[static_cast<std::size_t>(v)]);
        sum_off_minus_f += r[static_cast<std::size_t>(v)];
      }

    if (vplus >= 0) {
      const double s = x[static_cast<std::size_t>(vplus)];
      double gate = 1.0;
      switch (mode) {
        case GateMode::Plain: gate = eta(s, x); break;
        case GateMode::Open: gate = 1.0; break;
        case GateMode::Capped: gate = std::min(1.0, 4.0 * std::fabs(s) / eps); break;
      }
      double sum_off_plus = 0.0;
      for (int v = 0; v < d; ++v)
        if (!in_plus[static_cast<std::size_t>(v)]) sum_off_plus += x[static_cast<std::size_t>(v)];
      r[static_cast<std::size_t>(vplus)] = gate * (h(s) + theta(x) - sum_off_plus);
      sum_off_minus_f += r[static_cast<std::size_t>(vplus)];
    }

    double sum_minus_x = 0.0;
    for (int v = 0; v < d; ++v)
      if (in_minus[static_cast<std::size_t>(v)]) sum_minus_x += x[static_cast<std::size_t>(v)];
    const double balance = (sum_minus_x + sum_off_minus_f) / card_minus;
    for (int v = 0; v < d; ++v)
      if (in_minus[static_cast<std::size_t>(v)]) r[static_cast<std::size_t>(v)] = x[static_cast<std::size_t>(v)] - balance;
    return r;
  }
};

}  // namespace conleyflow
