// Exact geometry of the standard realization in barycentric coordinates: the
// symbolic partition of the polytope at a rational threshold, open and closed
// threshold cells, representable unions with exact closure/interior/boundary,
// isolating blocks with their exit sets, order-complex triangulations of
// representable pairs, and the renormalizing projection onto subcomplexes.
#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "conley.hpp"
#include "cvf.hpp"
#include "homology.hpp"

namespace conleyflow {

// a point of the realization: one rational coordinate per vertex, nonnegative,
// summing to one, supported on a simplex of the complex
struct Point {
  std::vector<Rational> x;
};

inline Simplex support(const Point& p) {
  Simplex s;
  for (std::size_t v = 0; v < p.x.size(); ++v)
    if (p.x[v] != 0) s.push_back(static_cast<int>(v));
  return s;
}

inline Point barycenter(const Simplex& s, int d) {
  Point p;
  p.x.assign(static_cast<std::size_t>(d), 0);
  for (int v : s) p.x[static_cast<std::size_t>(v)] = Rational(1, static_cast<long>(s.size()));
  return p;
}

// where one coordinate sits relative to the thresholds 0 and eps:
// {0}, (0,eps), {eps}, (eps,1), {1}
enum class Sym : unsigned char { Zero, Low, Eps, Mid, One };

struct Cell {
  std::vector<Sym> sym;
  auto operator<=>(const Cell&) const = default;
};

inline Simplex cell_sigma_min(const Cell& c) {
  Simplex s;
  for (std::size_t v = 0; v < c.sym.size(); ++v)
    if (c.sym[v] == Sym::Mid || c.sym[v] == Sym::One) s.push_back(static_cast<int>(v));
  return s;
}

inline Simplex cell_sigma_max(const Cell& c) {
  Simplex s;
  for (std::size_t v = 0; v < c.sym.size(); ++v)
    if (c.sym[v] != Sym::Zero && c.sym[v] != Sym::Low) s.push_back(static_cast<int>(v));
  return s;
}

inline Simplex cell_support(const Cell& c) {
  Simplex s;
  for (std::size_t v = 0; v < c.sym.size(); ++v)
    if (c.sym[v] != Sym::Zero) s.push_back(static_cast<int>(v));
  return s;
}

// which symbols appear among the limits of points carrying this symbol
inline bool sym_in_closure(Sym of, Sym candidate) {
  switch (of) {
    case Sym::Zero: return candidate == Sym::Zero;
    case Sym::Low: return candidate == Sym::Zero || candidate == Sym::Low || candidate == Sym::Eps;
    case Sym::Eps: return candidate == Sym::Eps;
    case Sym::Mid: return candidate == Sym::Eps || candidate == Sym::Mid || candidate == Sym::One;
    case Sym::One: return candidate == Sym::One;
  }
  return false;
}

inline std::string cell_label(const Cell& c, const SimplicialComplex& X) {
  static const char* glyph[] = {"0", "low", "eps", "mid", "1"};
  std::string out = "(";
  for (std::size_t v = 0; v < c.sym.size(); ++v) {
    if (v) out += ' ';
    out += X.vertex_names()[v] + ':' + glyph[static_cast<int>(c.sym[v])];
  }
  return out + ")";
}

// the polytope of a complex partitioned at threshold eps into finitely many
// relatively open cells, one symbol per coordinate
class Realization {
 public:
  using CellSet = std::set<Cell>;

  Realization(const SimplicialComplex& X, Rational eps) : X_(&X), eps_(std::move(eps)) {
    if (X.dimension() < 0) throw std::invalid_argument("empty complex has no realization");
    if (!(eps_ > 0) || !(eps_ < Rational(1, X.dimension() + 1)))
      throw std::invalid_argument("threshold must lie strictly between 0 and 1/(1+dim)");
    build_universe();
  }

  const SimplicialComplex& complex() const { return *X_; }
  const Rational& eps() const { return eps_; }
  int d() const { return X_->vertex_count(); }

  // ---- the finite cell universe ----

  const std::vector<Cell>& universe() const { return universe_; }

  int cell_index(const Cell& c) const {
    auto it = index_.find(c);
    if (it == index_.end()) throw std::domain_error("cell not in the partition");
    return it->second;
  }

  bool feasible(const Cell& c) const {
    if (static_cast<int>(c.sym.size()) != d()) return false;
    if (!X_->contains(cell_support(c))) return false;
    Rational lo = 0, hi = 0;
    bool open = false;
    for (Sym s : c.sym) {
      switch (s) {
        case Sym::Zero: break;
        case Sym::Low: hi += eps_; open = true; break;
        case Sym::Eps: lo += eps_; hi += eps_; break;
        case Sym::Mid: lo += eps_; hi += 1; open = true; break;
        case Sym::One: lo += 1; hi += 1; break;
      }
    }
    return open ? (lo < 1 && hi > 1) : lo == 1;
  }

  // ---- threshold cells of simplices ----

  // closure of the cell of sigma: coordinates on sigma at least eps, others at
  // most eps
  CellSet closed_cc(const Simplex& sigma) const {
    require_member(sigma);
    CellSet out;
    for (const auto& c : universe_) {
      bool okc = true;
      for (std::size_t v = 0; v < c.sym.size() && okc; ++v) {
        bool on = std::binary_search(sigma.begin(), sigma.end(), static_cast<int>(v));
        okc = on ? (c.sym[v] != Sym::Zero && c.sym[v] != Sym::Low)
                 : (c.sym[v] != Sym::Mid && c.sym[v] != Sym::One);
      }
      if (okc) out.insert(c);
    }
    return out;
  }

  // the open cell itself: strict on both sides
  CellSet open_cc(const Simplex& sigma) const {
    require_member(sigma);
    CellSet out;
    for (const auto& c : universe_) {
      bool okc = true;
      for (std::size_t v = 0; v < c.sym.size() && okc; ++v) {
        bool on = std::binary_search(sigma.begin(), sigma.end(), static_cast<int>(v));
        okc = on ? (c.sym[v] == Sym::Mid || c.sym[v] == Sym::One)
                 : (c.sym[v] == Sym::Zero || c.sym[v] == Sym::Low);
      }
      if (okc) out.insert(c);
    }
    return out;
  }

  // union of the closed cells over a family of simplices
  CellSet neighborhood(const std::set<Simplex>& A) const {
    CellSet out;
    for (const auto& s : A)
      for (const auto& c : closed_cc(s)) out.insert(c);
    return out;
  }

  // union of the closed cells of an arrow's two simplices (one when critical)
  CellSet tile(const VCell& cell) const {
    CellSet out = closed_cc(cell.plus);
    if (!cell.critical())
      for (const auto& c : closed_cc(cell.minus)) out.insert(c);
    return out;
  }

  // ---- representable set operations ----

  CellSet cell_closure(const Cell& c) const {
    CellSet out;
    for (const auto& e : universe_) {
      bool okc = true;
      for (std::size_t v = 0; v < c.sym.size() && okc; ++v) okc = sym_in_closure(c.sym[v], e.sym[v]);
      if (okc) out.insert(e);
    }
    return out;
  }

  CellSet closure(const CellSet& A) const {
    CellSet out;
    for (const auto& c : A)
      for (const auto& e : cell_closure(c)) out.insert(e);
    return out;
  }

  bool is_closed_set(const CellSet& A) const { return closure(A) == A; }

  CellSet complement(const CellSet& A) const {
    CellSet out;
    for (const auto& c : universe_)
      if (!A.count(c)) out.insert(c);
    return out;
  }

  CellSet interior(const CellSet& A) const { return complement(closure(complement(A))); }

  CellSet boundary(const CellSet& A) const {
    auto cl = closure(A);
    auto in = interior(A);
    CellSet out;
    for (const auto& c : cl)
      if (!in.count(c)) out.insert(c);
    return out;
  }

  // ---- exact point classification ----

  bool is_valid_point(const Point& p) const {
    if (static_cast<int>(p.x.size()) != d()) return false;
    Rational sum = 0;
    for (const auto& t : p.x) {
      if (t < 0) return false;
      sum += t;
    }
    return sum == 1 && X_->contains(support(p));
  }

  Cell cell_of(const Point& p) const {
    require_point(p);
    Cell c;
    c.sym.reserve(p.x.size());
    for (const auto& t : p.x) {
      if (t == 0) c.sym.push_back(Sym::Zero);
      else if (t < eps_) c.sym.push_back(Sym::Low);
      else if (t == eps_) c.sym.push_back(Sym::Eps);
      else if (t < 1) c.sym.push_back(Sym::Mid);
      else c.sym.push_back(Sym::One);
    }
    return c;
  }

  Simplex sigma_min(const Point& p) const { return cell_sigma_min(cell_of(p)); }
  Simplex sigma_max(const Point& p) const { return cell_sigma_max(cell_of(p)); }

  // all simplices between sigma_min and sigma_max: exactly those whose closed
  // cell contains the point
  std::vector<Simplex> characteristic_simplices(const Point& p) const {
    auto lo = sigma_min(p), hi = sigma_max(p);
    std::vector<Simplex> out;
    for (const auto& s : X_->simplices())
      if (is_face(lo, s) && is_face(s, hi)) out.push_back(s);
    return out;
  }

  enum class Membership { Interior, Closure, Outside };

  Membership cc_membership(const Point& p, const Simplex& sigma) const {
    require_member(sigma);
    require_point(p);
    bool strict = true, weak = true;
    for (std::size_t v = 0; v < p.x.size(); ++v) {
      bool on = std::binary_search(sigma.begin(), sigma.end(), static_cast<int>(v));
      if (on) {
        strict = strict && p.x[v] > eps_;
        weak = weak && p.x[v] >= eps_;
      } else {
        strict = strict && p.x[v] < eps_;
        weak = weak && p.x[v] <= eps_;
      }
    }
    return strict ? Membership::Interior : (weak ? Membership::Closure : Membership::Outside);
  }

  // an exact rational point inside a feasible cell; open coordinates share the
  // leftover mass so every constraint stays strict
  Point sample(const Cell& c) const {
    if (!feasible(c)) throw std::domain_error("sampling an infeasible cell");
    Point p;
    p.x.assign(c.sym.size(), 0);
    Rational fixed = 0;
    long k = 0, m = 0;
    for (Sym s : c.sym) {
      if (s == Sym::Eps) fixed += eps_;
      if (s == Sym::One) fixed += 1;
      if (s == Sym::Low) ++k;
      if (s == Sym::Mid) ++m;
    }
    const Rational r = 1 - fixed;
    Rational low_val = 0, mid_val = 0;
    if (k > 0 && m > 0) {
      Rational lo = (r - m) / k;
      if (lo < 0) lo = 0;
      Rational hi = (r - m * eps_) / k;
      if (hi > eps_) hi = eps_;
      low_val = (lo + hi) / 2;
      mid_val = (r - k * low_val) / m;
    } else if (k > 0) {
      low_val = r / k;
    } else if (m > 0) {
      mid_val = r / m;
    }
    for (std::size_t v = 0; v < c.sym.size(); ++v) {
      switch (c.sym[v]) {
        case Sym::Zero: break;
        case Sym::Low: p.x[v] = low_val; break;
        case Sym::Eps: p.x[v] = eps_; break;
        case Sym::Mid: p.x[v] = mid_val; break;
        case Sym::One: p.x[v] = 1; break;
      }
    }
    return p;
  }

  // ---- the renormalizing projection ----

  // squashes every coordinate at or below the threshold to zero and rescales;
  // sends the closed cell of sigma into the geometric simplex of sigma
  Point project(const Point& p) const {
    require_point(p);
    Point out;
    out.x.assign(p.x.size(), 0);
    Rational den = 0;
    for (std::size_t v = 0; v < p.x.size(); ++v) {
      if (p.x[v] > eps_) {
        out.x[v] = (p.x[v] - eps_) / (1 - eps_);
        den += out.x[v];
      }
    }
    if (den == 0) throw std::logic_error("projection undefined: no coordinate above the threshold");
    for (auto& t : out.x) t /= den;
    return out;
  }

  // ---- isolating blocks and index pairs ----

  struct IndexPairData {
    CellSet block;       // closed neighborhood of the set
    CellSet exit_def;    // neighborhood of the mouth cut to the block boundary
    CellSet exit_table;  // boundary cells whose minimal simplex lies in the mouth
    CellSet q1, q2;      // neighborhoods of the closure and of the mouth
  };

  IndexPairData index_pairs(const std::set<Simplex>& S, const CombinatorialVectorField& V) const {
    if (&V.complex() != X_) throw std::invalid_argument("field lives on a different complex");
    auto rep = isolation_report(S, V);
    if (!rep.ok) throw std::domain_error("index pairs need an isolated invariant set: " + rep.reason);

    const auto mo = mouth(S, *X_);
    IndexPairData out;
    out.block = neighborhood(S);
    out.q1 = neighborhood(X_->closure(S));
    out.q2 = neighborhood(mo);

    auto bd = boundary(out.block);
    for (const auto& c : bd) {
      if (out.q2.count(c)) out.exit_def.insert(c);
      auto sm = cell_sigma_min(c);
      if (mo.count(sm)) out.exit_table.insert(c);
    }
    return out;
  }

  // ---- triangulation of representable pairs ----

  // order complex of the face relation on the cells of A: one triangulation
  // vertex per cell (numbered by universe index), one simplex per chain; the
  // cells of B span a full subcomplex
  std::pair<std::set<Simplex>, std::set<Simplex>> triangulate_pair(const CellSet& A,
                                                                   const CellSet& B) const {
    if (!is_closed_set(A) || !is_closed_set(B)) throw std::domain_error("triangulating a non-closed pair");
    for (const auto& c : B)
      if (!A.count(c)) throw std::domain_error("pair denominator not contained in numerator");

    std::vector<int> ids;
    for (const auto& c : A) ids.push_back(cell_index(c));
    std::sort(ids.begin(), ids.end());
    const std::size_t n = ids.size();

    // strictly-below relation between member cells
    std::vector<std::vector<bool>> below(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) {
      auto cl = cell_closure(universe_[static_cast<std::size_t>(ids[i])]);
      for (std::size_t j = 0; j < n; ++j)
        if (i != j && cl.count(universe_[static_cast<std::size_t>(ids[j])])) below[j][i] = true;
    }

    std::set<Simplex> full, sub;
    std::vector<char> inB(n, 0);
    for (std::size_t i = 0; i < n; ++i)
      inB[i] = B.count(universe_[static_cast<std::size_t>(ids[i])]) ? 1 : 0;

    // depth-first enumeration of all chains, extending upward from each start
    std::vector<std::size_t> chain;
    auto emit = [&]() {
      Simplex s;
      bool all_b = true;
      for (std::size_t e : chain) {
        s.push_back(ids[e]);
        all_b = all_b && inB[e];
      }
      std::sort(s.begin(), s.end());
      full.insert(s);
      if (all_b) sub.insert(std::move(s));
    };
    auto extend = [&](auto&& self, std::size_t top) -> void {
      emit();
      for (std::size_t nxt = 0; nxt < n; ++nxt)
        if (below[top][nxt]) {
          chain.push_back(nxt);
          self(self, nxt);
          chain.pop_back();
        }
    };
    for (std::size_t s = 0; s < n; ++s) {
      chain.assign(1, s);
      extend(extend, s);
    }
    return {std::move(full), std::move(sub)};
  }

 private:
  void require_member(const Simplex& s) const {
    if (!X_->contains(s)) throw std::domain_error("simplex not in complex: " + X_->name_of(s));
  }
  void require_point(const Point& p) const {
    if (!is_valid_point(p)) throw std::domain_error("point is not in the realization");
  }

  void build_universe() {
    const int n = d();
    for (const auto& tau : X_->simplices()) {
      const std::size_t k = tau.size();
      std::vector<Sym> choice(k, Sym::Low);
      static const Sym options[] = {Sym::Low, Sym::Eps, Sym::Mid, Sym::One};
      std::vector<int> pick(k, 0);
      while (true) {
        Cell c;
        c.sym.assign(static_cast<std::size_t>(n), Sym::Zero);
        for (std::size_t i = 0; i < k; ++i)
          c.sym[static_cast<std::size_t>(tau[i])] = options[pick[i]];
        if (feasible(c)) universe_.push_back(std::move(c));
        std::size_t carry = 0;
        while (carry < k && ++pick[carry] == 4) pick[carry++] = 0;
        if (carry == k) break;
      }
    }
    std::sort(universe_.begin(), universe_.end());
    for (std::size_t i = 0; i < universe_.size(); ++i) index_[universe_[i]] = static_cast<int>(i);
  }

  const SimplicialComplex* X_;
  Rational eps_;
  std::vector<Cell> universe_;
  std::map<Cell, int> index_;
};

// ---- floating-point classification used by the integrator ----

// vertices safely above the threshold (ties within tol count as the threshold)
inline Simplex sigma_min_float(const std::vector<double>& x, double eps, double tol) {
  Simplex s;
  for (std::size_t v = 0; v < x.size(); ++v)
    if (x[v] > eps + tol) s.push_back(static_cast<int>(v));
  return s;
}

// vertices at or above the threshold, up to tol
inline Simplex sigma_max_float(const std::vector<double>& x, double eps, double tol) {
  Simplex s;
  for (std::size_t v = 0; v < x.size(); ++v)
    if (x[v] >= eps - tol) s.push_back(static_cast<int>(v));
  return s;
}

}  // namespace conleyflow
