// Dynamics of the combinatorial flow map: invariant and isolated invariant
// sets, the homological index of an isolated set, the finest Morse
// decomposition, and the decomposition checker.
#pragma once

#include <algorithm>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cvf.hpp"
#include "homology.hpp"

namespace conleyflow {

namespace detail {

// successor lists restricted to a vertex subset (indices outside keep empty
// lists and are marked absent)
struct Restriction {
  std::vector<std::vector<int>> adj;
  std::vector<char> in;
};

inline Restriction restrict_graph(const std::vector<std::vector<int>>& adj, const std::vector<char>& in) {
  Restriction r;
  r.in = in;
  r.adj.assign(adj.size(), {});
  for (std::size_t u = 0; u < adj.size(); ++u) {
    if (!in[u]) continue;
    for (int v : adj[u])
      if (in[static_cast<std::size_t>(v)]) r.adj[u].push_back(v);
  }
  return r;
}

inline std::vector<std::vector<int>> reverse_graph(const std::vector<std::vector<int>>& adj) {
  std::vector<std::vector<int>> rev(adj.size());
  for (std::size_t u = 0; u < adj.size(); ++u)
    for (int v : adj[u]) rev[static_cast<std::size_t>(v)].push_back(static_cast<int>(u));
  return rev;
}

inline std::vector<char> reachable_from(const std::vector<std::vector<int>>& adj,
                                        const std::vector<int>& sources) {
  std::vector<char> seen(adj.size(), 0);
  std::queue<int> q;
  for (int s : sources)
    if (!seen[static_cast<std::size_t>(s)]) {
      seen[static_cast<std::size_t>(s)] = 1;
      q.push(s);
    }
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int v : adj[static_cast<std::size_t>(u)])
      if (!seen[static_cast<std::size_t>(v)]) {
        seen[static_cast<std::size_t>(v)] = 1;
        q.push(v);
      }
  }
  return seen;
}

// strongly connected components by Kosaraju's method (iterative)
inline std::vector<int> scc_ids(const std::vector<std::vector<int>>& adj) {
  const std::size_t n = adj.size();
  std::vector<int> order;
  order.reserve(n);
  std::vector<char> seen(n, 0);
  for (std::size_t s = 0; s < n; ++s) {
    if (seen[s]) continue;
    std::vector<std::pair<int, std::size_t>> stack{{static_cast<int>(s), 0}};
    seen[s] = 1;
    while (!stack.empty()) {
      auto& [u, next] = stack.back();
      if (next < adj[static_cast<std::size_t>(u)].size()) {
        int v = adj[static_cast<std::size_t>(u)][next++];
        if (!seen[static_cast<std::size_t>(v)]) {
          seen[static_cast<std::size_t>(v)] = 1;
          stack.push_back({v, 0});
        }
      } else {
        order.push_back(u);
        stack.pop_back();
      }
    }
  }
  auto rev = reverse_graph(adj);
  std::vector<int> comp(n, -1);
  int ncomp = 0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (comp[static_cast<std::size_t>(*it)] != -1) continue;
    std::queue<int> q;
    q.push(*it);
    comp[static_cast<std::size_t>(*it)] = ncomp;
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (int v : rev[static_cast<std::size_t>(u)])
        if (comp[static_cast<std::size_t>(v)] == -1) {
          comp[static_cast<std::size_t>(v)] = ncomp;
          q.push(v);
        }
    }
    ++ncomp;
  }
  return comp;
}

// vertices lying on some cycle (a component of size two or more, or a
// self-loop)
inline std::vector<char> cycle_vertices(const std::vector<std::vector<int>>& adj) {
  auto comp = scc_ids(adj);
  int ncomp = 0;
  for (int c : comp) ncomp = std::max(ncomp, c + 1);
  std::vector<int> size(static_cast<std::size_t>(ncomp), 0);
  for (std::size_t u = 0; u < adj.size(); ++u)
    if (comp[u] >= 0) ++size[static_cast<std::size_t>(comp[u])];
  std::vector<char> out(adj.size(), 0);
  for (std::size_t u = 0; u < adj.size(); ++u) {
    if (size[static_cast<std::size_t>(comp[u])] >= 2) out[u] = 1;
    for (int v : adj[u])
      if (v == static_cast<int>(u)) out[u] = 1;
  }
  return out;
}

inline std::vector<char> membership_mask(const SimplicialComplex& X, const std::set<Simplex>& S) {
  std::vector<char> in(X.size(), 0);
  for (const auto& s : S) in[static_cast<std::size_t>(X.index_of(s))] = 1;
  return in;
}

}  // namespace detail

// Cl S minus S
inline std::set<Simplex> mouth(const std::set<Simplex>& S, const SimplicialComplex& X) {
  auto cl = X.closure(S);
  std::set<Simplex> out;
  for (const auto& s : cl)
    if (!S.count(s)) out.insert(s);
  return out;
}

// every member lies on a two-sided solution inside S: it is reachable from a
// cycle of the restricted flow digraph and reaches one
inline bool is_invariant(const std::set<Simplex>& S, const CombinatorialVectorField& V) {
  const auto& X = V.complex();
  auto in = detail::membership_mask(X, S);
  auto r = detail::restrict_graph(V.adjacency(), in);
  auto cyc = detail::cycle_vertices(r.adj);
  std::vector<int> sources;
  for (std::size_t u = 0; u < cyc.size(); ++u)
    if (cyc[u] && in[u]) sources.push_back(static_cast<int>(u));
  auto fwd = detail::reachable_from(r.adj, sources);
  auto bwd = detail::reachable_from(detail::reverse_graph(r.adj), sources);
  for (std::size_t u = 0; u < in.size(); ++u)
    if (in[u] && !(fwd[u] && bwd[u])) return false;
  return true;
}

struct IsolationReport {
  bool ok = true;
  std::string reason;  // empty when ok
};

// invariance, no arrow with exactly one side in the set, and a closed mouth
inline IsolationReport isolation_report(const std::set<Simplex>& S, const CombinatorialVectorField& V) {
  const auto& X = V.complex();
  for (const auto& s : S)
    if (!X.contains(s)) throw std::domain_error("set member not in complex: " + X.name_of(s));
  if (!is_invariant(S, V)) return {false, "the set is not invariant"};
  for (const auto& c : V.cells()) {
    if (c.critical()) continue;
    if (S.count(c.minus) != S.count(c.plus))
      return {false, "an arrow is split by the set: " + X.name_of(c.minus) + " -> " + X.name_of(c.plus)};
  }
  auto mo = mouth(S, X);
  for (const auto& s : mo)
    for (const auto& f : proper_faces(s))
      if (!mo.count(f))
        return {false, "the mouth is not closed: " + X.name_of(f) + " is missing"};
  return {};
}

inline bool is_isolated_invariant(const std::set<Simplex>& S, const CombinatorialVectorField& V) {
  return isolation_report(S, V).ok;
}

// homological index of an isolated invariant set: the pair (Cl S, Cl S minus S)
inline PoincarePolynomial conley_index(const std::set<Simplex>& S, const CombinatorialVectorField& V) {
  auto rep = isolation_report(S, V);
  if (!rep.ok) throw std::domain_error("index of a non-isolated set: " + rep.reason);
  return poincare_polynomial(V.complex().closure(S), mouth(S, V.complex()));
}

struct MorseNode {
  std::set<Simplex> simplices;
  PoincarePolynomial index;
  std::string label;  // "{F}", "{A,AB,B}"
};

struct MorseGraph {
  std::vector<MorseNode> nodes;
  // (p, q) present when a connection runs from node p down to node q
  std::set<std::pair<int, int>> order;  // full strict reachability order
  std::set<std::pair<int, int>> edges;  // its transitive reduction
};

// canonical node key: dimension of the top simplex, then the sorted list of
// vertex-name lists
namespace detail {

inline std::pair<int, std::vector<std::vector<std::string>>> node_key(const std::set<Simplex>& S,
                                                                      const SimplicialComplex& X) {
  int top = -1;
  std::vector<std::vector<std::string>> names;
  for (const auto& s : S) {
    top = std::max(top, dim(s));
    std::vector<std::string> n;
    for (int v : s) n.push_back(X.vertex_names()[static_cast<std::size_t>(v)]);
    std::sort(n.begin(), n.end());
    names.push_back(std::move(n));
  }
  std::sort(names.begin(), names.end());
  return {top, std::move(names)};
}

inline std::string node_label(const std::set<Simplex>& S, const SimplicialComplex& X) {
  std::vector<Simplex> members(S.begin(), S.end());
  std::sort(members.begin(), members.end(), [](const Simplex& a, const Simplex& b) {
    return std::make_pair(a.size(), std::cref(a)) < std::make_pair(b.size(), std::cref(b));
  });
  std::string out = "{";
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (i) out += ',';
    out += X.name_of(members[i]);
  }
  return out + "}";
}

}  // namespace detail

// Morse sets are the strongly connected components of the flow digraph that
// carry at least one edge; the order is reachability between them
inline MorseGraph finest_morse_decomposition(const CombinatorialVectorField& V) {
  const auto& X = V.complex();
  const auto& adj = V.adjacency();
  auto comp = detail::scc_ids(adj);
  auto cyc = detail::cycle_vertices(adj);

  std::map<int, std::set<Simplex>> by_comp;
  for (std::size_t u = 0; u < adj.size(); ++u)
    if (cyc[u]) by_comp[comp[u]].insert(X.simplices()[u]);

  std::vector<std::set<Simplex>> sets;
  for (auto& [c, members] : by_comp) sets.push_back(std::move(members));
  std::sort(sets.begin(), sets.end(), [&X](const std::set<Simplex>& a, const std::set<Simplex>& b) {
    return detail::node_key(a, X) < detail::node_key(b, X);
  });

  MorseGraph g;
  for (auto& s : sets) {
    MorseNode node;
    node.index = poincare_polynomial(X.closure(s), mouth(s, X));
    node.label = detail::node_label(s, X);
    node.simplices = std::move(s);
    g.nodes.push_back(std::move(node));
  }

  // strict reachability between distinct nodes in the full digraph
  const int n = static_cast<int>(g.nodes.size());
  for (int p = 0; p < n; ++p) {
    std::vector<int> sources;
    for (const auto& s : g.nodes[static_cast<std::size_t>(p)].simplices)
      sources.push_back(X.index_of(s));
    auto seen = detail::reachable_from(adj, sources);
    for (int q = 0; q < n; ++q) {
      if (p == q) continue;
      for (const auto& s : g.nodes[static_cast<std::size_t>(q)].simplices)
        if (seen[static_cast<std::size_t>(X.index_of(s))]) {
          g.order.insert({p, q});
          break;
        }
    }
  }

  for (const auto& [p, q] : g.order) {
    bool shortcut = false;
    for (int r = 0; r < n && !shortcut; ++r)
      if (r != p && r != q && g.order.count({p, r}) && g.order.count({r, q})) shortcut = true;
    if (!shortcut) g.edges.insert({p, q});
  }
  return g;
}

struct MorseCheckReport {
  bool ok = true;
  std::vector<std::string> violations;
};

// checks a candidate family against the flow digraph: (a) all recurrent
// behavior is contained in single members, (b) connections only run downward
// in the given order, (c) no excursion leaves a member and returns to it
inline MorseCheckReport check_morse_decomposition(const std::vector<std::set<Simplex>>& sets,
                                                  const std::set<std::pair<int, int>>& order,
                                                  const CombinatorialVectorField& V) {
  const auto& X = V.complex();
  const auto& adj = V.adjacency();
  const int n = static_cast<int>(sets.size());
  MorseCheckReport rep;
  auto note = [&rep](const std::string& v) {
    rep.ok = false;
    rep.violations.push_back(v);
  };

  std::vector<int> owner(X.size(), -1);
  for (int p = 0; p < n; ++p) {
    if (sets[static_cast<std::size_t>(p)].empty()) note("empty member set");
    for (const auto& s : sets[static_cast<std::size_t>(p)]) {
      auto u = static_cast<std::size_t>(X.index_of(s));
      if (owner[u] != -1) note("sets overlap at " + X.name_of(s));
      owner[u] = p;
    }
  }

  // transitive closure of the given order; must stay irreflexive
  std::vector<std::vector<char>> above(static_cast<std::size_t>(n), std::vector<char>(static_cast<std::size_t>(n), 0));
  for (const auto& [p, q] : order) {
    if (p < 0 || q < 0 || p >= n || q >= n) {
      note("order pair out of range");
      continue;
    }
    above[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)] = 1;
  }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (above[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] &&
            above[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)])
          above[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = 1;
  for (int p = 0; p < n; ++p)
    if (above[static_cast<std::size_t>(p)][static_cast<std::size_t>(p)]) {
      note("order is not a strict partial order");
      break;
    }

  // (a) each cycle vertex of the full digraph must belong to some member, and
  // whole components must not straddle members
  auto cyc = detail::cycle_vertices(adj);
  auto comp = detail::scc_ids(adj);
  std::map<int, std::set<int>> comp_owners;
  for (std::size_t u = 0; u < adj.size(); ++u) {
    if (!cyc[u]) continue;
    if (owner[u] == -1)
      note("recurrent simplex outside every set: " + X.name_of(X.simplices()[u]));
    comp_owners[comp[u]].insert(owner[u]);
  }
  for (const auto& [c, owners] : comp_owners)
    if (owners.size() > 1) note("a strongly connected component straddles sets");

  // cycle vertices of each member's restriction
  std::vector<std::vector<int>> cyc_of(static_cast<std::size_t>(n));
  for (int p = 0; p < n; ++p) {
    std::vector<char> in(X.size(), 0);
    for (const auto& s : sets[static_cast<std::size_t>(p)]) in[static_cast<std::size_t>(X.index_of(s))] = 1;
    auto r = detail::restrict_graph(adj, in);
    auto c = detail::cycle_vertices(r.adj);
    for (std::size_t u = 0; u < c.size(); ++u)
      if (c[u] && in[u]) cyc_of[static_cast<std::size_t>(p)].push_back(static_cast<int>(u));
  }

  for (int p = 0; p < n; ++p) {
    auto seen = detail::reachable_from(adj, cyc_of[static_cast<std::size_t>(p)]);
    // (b) a reachable foreign recurrence needs the order pair
    for (int q = 0; q < n; ++q) {
      if (p == q) continue;
      bool connected = false;
      for (int u : cyc_of[static_cast<std::size_t>(q)])
        if (seen[static_cast<std::size_t>(u)]) connected = true;
      if (connected && !above[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)])
        note("connection not covered by the order: set " + std::to_string(p) + " reaches set " +
             std::to_string(q));
    }
    // (c) no path from the member's recurrence through outside back to it
    std::vector<char> in(X.size(), 0);
    for (const auto& s : sets[static_cast<std::size_t>(p)]) in[static_cast<std::size_t>(X.index_of(s))] = 1;
    auto rev = detail::reverse_graph(adj);
    auto back = detail::reachable_from(rev, cyc_of[static_cast<std::size_t>(p)]);
    for (std::size_t u = 0; u < adj.size(); ++u)
      if (!in[u] && seen[u] && back[u]) {
        note("an excursion leaves set " + std::to_string(p) + " and returns through " +
             X.name_of(X.simplices()[u]));
        break;
      }
  }
  return rep;
}

}  // namespace conleyflow
