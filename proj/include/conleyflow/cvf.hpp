// Discrete vector fields on a simplicial complex: a partition into critical
// singletons and facet arrows, the equivalent map form, the induced
// multivalued flow map, its digraph, and combinatorial solutions.
#pragma once

#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "complex.hpp"

namespace conleyflow {

// one element of the partition: minus == plus marks a critical simplex,
// otherwise the arrow minus -> plus with minus a facet of plus
struct VCell {
  Simplex minus, plus;
  bool critical() const { return minus == plus; }
  bool operator==(const VCell&) const = default;
};

enum class SimplexClass { Critical, Tail, Head };

class CombinatorialVectorField {
 public:
  CombinatorialVectorField(const SimplicialComplex& X, std::vector<VCell> cells)
      : X_(&X), cells_(std::move(cells)) {
    auto r = validate_cells(X, cells_);
    if (!r.ok) {
      std::ostringstream msg;
      msg << "invalid vector field:";
      for (const auto& p : r.problems) msg << "\n  " << p;
      throw std::invalid_argument(msg.str());
    }
    cell_of_.assign(X.size(), -1);
    for (std::size_t i = 0; i < cells_.size(); ++i) {
      cell_of_[static_cast<std::size_t>(X.index_of(cells_[i].minus))] = static_cast<int>(i);
      cell_of_[static_cast<std::size_t>(X.index_of(cells_[i].plus))] = static_cast<int>(i);
    }
    adjacency_.assign(X.size(), {});
    for (std::size_t i = 0; i < X.size(); ++i)
      for (const auto& t : pi(X.simplices()[i]))
        adjacency_[i].push_back(X.index_of(t));
  }

  // checks that the pieces partition the complex: arrows join a facet to its
  // coface, and every simplex appears in exactly one piece
  static ValidationReport validate_cells(const SimplicialComplex& X, const std::vector<VCell>& cells) {
    ValidationReport r;
    auto note = [&r](const std::string& p) {
      r.ok = false;
      r.problems.push_back(p);
    };
    std::map<Simplex, int> count;
    for (const auto& c : cells) {
      for (const Simplex* s : {&c.minus, &c.plus})
        if (!X.contains(*s)) {
          note("not in complex: " + X.name_of(*s));
          return r;
        }
      if (!c.critical() && !is_facet(c.minus, c.plus))
        note("arrow tail is not a facet of its head: " + X.name_of(c.minus) + " -> " + X.name_of(c.plus));
      ++count[c.minus];
      if (!c.critical()) ++count[c.plus];
    }
    for (const auto& s : X.simplices()) {
      auto it = count.find(s);
      if (it == count.end())
        note("uncovered simplex: " + X.name_of(s));
      else if (it->second > 1)
        note("simplex covered more than once: " + X.name_of(s));
    }
    return r;
  }

  const SimplicialComplex& complex() const { return *X_; }
  const std::vector<VCell>& cells() const { return cells_; }

  int cell_index_of(const Simplex& s) const {
    return cell_of_[static_cast<std::size_t>(X_->index_of(s))];
  }
  const VCell& cell_of(const Simplex& s) const {
    return cells_[static_cast<std::size_t>(cell_index_of(s))];
  }

  SimplexClass classify(const Simplex& s) const {
    const VCell& c = cell_of(s);
    if (c.critical()) return SimplexClass::Critical;
    return s == c.minus ? SimplexClass::Tail : SimplexClass::Head;
  }

  bool is_critical(const Simplex& s) const { return cell_of(s).critical(); }

  // map form: each tail maps to its head, every other simplex to nothing
  std::map<Simplex, std::optional<Simplex>> map_form() const {
    std::map<Simplex, std::optional<Simplex>> m;
    for (const auto& s : X_->simplices()) m[s] = std::nullopt;
    for (const auto& c : cells_)
      if (!c.critical()) m[c.minus] = c.plus;
    return m;
  }

  // inverse constructor; the map must assign every simplex (nothing = fixed),
  // images must be cofacets, image simplices must map to nothing, and no two
  // simplices may share an image
  static CombinatorialVectorField from_map_form(const SimplicialComplex& X,
                                                const std::map<Simplex, std::optional<Simplex>>& m) {
    for (const auto& s : X.simplices())
      if (!m.count(s)) throw std::invalid_argument("map form misses a simplex: " + X.name_of(s));
    std::vector<VCell> cells;
    std::set<Simplex> heads;
    for (const auto& [s, img] : m) {
      if (!X.contains(s)) throw std::invalid_argument("map form key not in complex: " + X.name_of(s));
      if (!img) continue;
      if (!X.contains(*img) || !is_facet(s, *img))
        throw std::invalid_argument("image is not a cofacet of " + X.name_of(s));
      if (!heads.insert(*img).second)
        throw std::invalid_argument("two simplices share the image " + X.name_of(*img));
      cells.push_back({s, *img});
    }
    for (const auto& h : heads) {
      auto it = m.find(h);
      if (it != m.end() && it->second)
        throw std::invalid_argument("image simplex is itself moved: " + X.name_of(h));
    }
    for (const auto& [s, img] : m)
      if (!img && !heads.count(s)) cells.push_back({s, s});
    return CombinatorialVectorField(X, std::move(cells));
  }

  // the multivalued flow map: the whole closure at a critical simplex, the
  // head at a tail, and all boundary faces except the tail at a head
  std::set<Simplex> pi(const Simplex& s) const {
    const VCell& c = cell_of(s);
    if (c.critical()) {
      auto out = combinatorial_boundary(s);
      out.insert(s);
      return out;
    }
    if (s == c.minus) return {c.plus};
    auto out = combinatorial_boundary(s);
    out.erase(c.minus);
    return out;
  }

  // successor lists of the flow map, indexed like complex().simplices()
  const std::vector<std::vector<int>>& adjacency() const { return adjacency_; }

  // each consecutive pair must step along the flow map
  bool is_solution(const std::vector<Simplex>& rho) const {
    for (std::size_t i = 0; i + 1 < rho.size(); ++i) {
      auto step = pi(rho[i]);
      if (!step.count(rho[i + 1])) return false;
    }
    return true;
  }

 private:
  const SimplicialComplex* X_;
  std::vector<VCell> cells_;
  std::vector<int> cell_of_;
  std::vector<std::vector<int>> adjacency_;
};

}  // namespace conleyflow
