// Finite abstract simplicial complexes: simplices as strictly increasing
// vertex-id lists, combinatorial closure/boundary/star, and the
// closed-under-faces validator.
#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace conleyflow {

// a simplex is a strictly increasing list of vertex ids
using Simplex = std::vector<int>;

inline int dim(const Simplex& s) { return static_cast<int>(s.size()) - 1; }

inline bool is_canonical_simplex(const Simplex& s) {
  if (s.empty() || s.front() < 0) return false;
  for (std::size_t i = 0; i + 1 < s.size(); ++i)
    if (s[i] >= s[i + 1]) return false;
  return true;
}

// a ⊆ b
inline bool is_face(const Simplex& a, const Simplex& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

// codimension-one face
inline bool is_facet(const Simplex& a, const Simplex& b) {
  return a.size() + 1 == b.size() && is_face(a, b);
}

// all nonempty proper faces
inline std::vector<Simplex> proper_faces(const Simplex& s) {
  std::vector<Simplex> out;
  const unsigned long full = (1ul << s.size()) - 1;
  for (unsigned long m = 1; m < full; ++m) {
    Simplex f;
    for (std::size_t i = 0; i < s.size(); ++i)
      if (m & (1ul << i)) f.push_back(s[i]);
    out.push_back(std::move(f));
  }
  return out;
}

inline std::set<Simplex> combinatorial_boundary(const Simplex& s) {
  auto f = proper_faces(s);
  return {f.begin(), f.end()};
}

struct ValidationReport {
  bool ok = true;
  std::vector<std::string> problems;
};

class SimplicialComplex {
 public:
  // close_under_faces: add every nonempty face of the given simplices, so the
  // input may list only maximal simplices
  SimplicialComplex(std::vector<std::string> vertex_names, const std::vector<Simplex>& simplices,
                    bool close_under_faces = true)
      : names_(std::move(vertex_names)) {
    std::set<std::string> seen;
    for (const auto& n : names_) {
      if (n.empty()) throw std::invalid_argument("empty vertex name");
      if (!seen.insert(n).second) throw std::invalid_argument("duplicate vertex name: " + n);
    }
    if (names_.size() >= 63) throw std::invalid_argument("vertex count limit exceeded");
    std::set<Simplex> members;
    for (Simplex s : simplices) {
      std::sort(s.begin(), s.end());
      if (!is_canonical_simplex(s) || s.back() >= static_cast<int>(names_.size()))
        throw std::invalid_argument("simplex with invalid or repeated vertex ids");
      if (close_under_faces)
        for (auto& f : proper_faces(s)) members.insert(std::move(f));
      members.insert(std::move(s));
    }
    simplices_.assign(members.begin(), members.end());
    std::sort(simplices_.begin(), simplices_.end(), [](const Simplex& a, const Simplex& b) {
      return std::make_pair(a.size(), std::cref(a)) < std::make_pair(b.size(), std::cref(b));
    });
    for (std::size_t i = 0; i < simplices_.size(); ++i) {
      index_[simplices_[i]] = static_cast<int>(i);
      dim_ = std::max(dim_, dim(simplices_[i]));
    }
  }

  const std::vector<std::string>& vertex_names() const { return names_; }
  int vertex_count() const { return static_cast<int>(names_.size()); }
  int dimension() const { return dim_; }
  std::size_t size() const { return simplices_.size(); }
  const std::vector<Simplex>& simplices() const { return simplices_; }

  bool contains(const Simplex& s) const { return index_.count(s) != 0; }

  int index_of(const Simplex& s) const {
    auto it = index_.find(s);
    if (it == index_.end()) throw std::domain_error("simplex not in complex: " + name_of(s));
    return it->second;
  }

  // Cl S: the members together with all their nonempty faces
  std::set<Simplex> closure(const std::set<Simplex>& S) const {
    std::set<Simplex> out;
    for (const auto& s : S) {
      if (!contains(s)) throw std::domain_error("closure: simplex not in complex: " + name_of(s));
      out.insert(s);
      for (auto& f : proper_faces(s)) out.insert(std::move(f));
    }
    return out;
  }

  // all simplices having v as a vertex
  std::set<Simplex> star(int v) const {
    if (v < 0 || v >= vertex_count()) throw std::domain_error("star: unknown vertex id");
    std::set<Simplex> out;
    for (const auto& s : simplices_)
      if (std::binary_search(s.begin(), s.end(), v)) out.insert(s);
    return out;
  }

  // members that are not a proper face of any other member
  std::vector<Simplex> maximal_simplices() const {
    std::vector<Simplex> out;
    for (const auto& s : simplices_) {
      bool maximal = true;
      for (const auto& t : simplices_)
        if (t.size() > s.size() && is_face(s, t)) maximal = false;
      if (maximal) out.push_back(s);
    }
    return out;
  }

  // checks that every nonempty face of every member is itself a member
  ValidationReport validate() const {
    ValidationReport r;
    std::set<Simplex> missing;
    for (const auto& s : simplices_)
      for (auto& f : proper_faces(s))
        if (!contains(f)) missing.insert(std::move(f));
    for (const auto& f : missing) {
      r.ok = false;
      r.problems.push_back("missing face: " + name_of(f));
    }
    return r;
  }

  // "ABD" when every vertex name is a single character, "v1-v2" otherwise
  std::string name_of(const Simplex& s) const {
    bool compact = true;
    for (const auto& n : names_)
      if (n.size() != 1) compact = false;
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const std::string& n =
          (s[i] >= 0 && s[i] < vertex_count()) ? names_[static_cast<std::size_t>(s[i])] : "?";
      if (i && !compact) out += '-';
      out += n;
    }
    return out;
  }

  int vertex_id(const std::string& name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
      if (names_[i] == name) return static_cast<int>(i);
    throw std::domain_error("unknown vertex name: " + name);
  }

  Simplex simplex_from_names(const std::vector<std::string>& vnames) const {
    Simplex s;
    for (const auto& n : vnames) s.push_back(vertex_id(n));
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    return s;
  }

 private:
  std::vector<std::string> names_;
  std::vector<Simplex> simplices_;
  std::map<Simplex, int> index_;
  int dim_ = -1;
};

}  // namespace conleyflow
