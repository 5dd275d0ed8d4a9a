// Input and export plumbing for the command-line tools: JSON system files
// holding a complex and its vector field, argument parsing for simplex sets,
// barycentric points, and exact rational thresholds, and deterministic
// exporters (DOT and JSON for the Conley-Morse graph).
#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "conley.hpp"
#include "cvf.hpp"
#include "homology.hpp"

namespace conleyflow {

using Json = nlohmann::ordered_json;

// the command line cannot be executed as given: malformed files or arguments
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// well-formed input that fails a semantic requirement
struct ContentError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---- system files ----

// a parsed but not yet validated system: the complex is closed under faces,
// the cell list is taken literally from the file (plus the optional critical
// completion)
struct ParsedSystem {
  std::unique_ptr<SimplicialComplex> complex;
  std::vector<VCell> cells;
  std::size_t listed_simplices = 0;  // simplex entries before face closure
  int completed_critical = 0;        // cells added by the completion flag
};

struct System {
  std::unique_ptr<SimplicialComplex> complex;
  std::unique_ptr<CombinatorialVectorField> field;
};

namespace io_detail {

inline const Json& expect_key(const Json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw UsageError(where + ": missing key \"" + key + "\"");
  return j.at(key);
}

inline std::vector<std::string> string_list(const Json& j, const std::string& where) {
  if (!j.is_array()) throw UsageError(where + ": expected an array");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_string())
      throw UsageError(where + "[" + std::to_string(i) + "]: expected a string");
    out.push_back(j[i].get<std::string>());
  }
  return out;
}

inline Simplex names_to_simplex(const std::vector<std::string>& names,
                                const std::map<std::string, int>& id, const std::string& where) {
  if (names.empty()) throw UsageError(where + ": empty simplex");
  Simplex s;
  for (const auto& n : names) {
    auto it = id.find(n);
    if (it == id.end()) throw UsageError(where + ": unknown vertex name \"" + n + "\"");
    s.push_back(it->second);
  }
  std::sort(s.begin(), s.end());
  for (std::size_t i = 0; i + 1 < s.size(); ++i)
    if (s[i] == s[i + 1]) throw UsageError(where + ": repeated vertex in a simplex");
  return s;
}

inline std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace io_detail

// Accepted shape: {"vertices": [names...], "simplices": [[names...]...],
// "critical": [[names...]...], "arrows": [[[tail],[head]]...]}. The simplex
// list may name only maximal simplices; the complex is closed under faces.
// Every simplex must be covered by the field exactly once unless
// complete_critical fills the uncovered ones in as critical. Keys starting
// with "_" are ignored as comments.
inline ParsedSystem parse_system_json(const Json& j, const std::string& where,
                                      bool complete_critical = false) {
  if (!j.is_object()) throw UsageError(where + ": expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (key != "vertices" && key != "simplices" && key != "critical" && key != "arrows" &&
        (key.empty() || key[0] != '_'))
      throw UsageError(where + ": unknown key \"" + key + "\"");
  }

  auto names = io_detail::string_list(io_detail::expect_key(j, "vertices", where),
                                      where + ": key \"vertices\"");
  std::map<std::string, int> id;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (!id.emplace(names[i], static_cast<int>(i)).second)
      throw UsageError(where + ": key \"vertices\": duplicate name \"" + names[i] + "\"");
  }

  auto read_simplex_array = [&](const Json& arr, const std::string& ctx) {
    if (!arr.is_array()) throw UsageError(ctx + ": expected an array");
    std::vector<Simplex> out;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string at = ctx + "[" + std::to_string(i) + "]";
      out.push_back(io_detail::names_to_simplex(io_detail::string_list(arr[i], at), id, at));
    }
    return out;
  };

  auto listed = read_simplex_array(io_detail::expect_key(j, "simplices", where),
                                   where + ": key \"simplices\"");
  if (listed.empty()) throw UsageError(where + ": key \"simplices\": at least one simplex required");

  ParsedSystem ps;
  ps.listed_simplices = listed.size();
  try {
    ps.complex = std::make_unique<SimplicialComplex>(names, listed, /*close_under_faces=*/true);
  } catch (const std::invalid_argument& e) {
    throw UsageError(where + ": " + e.what());
  }

  if (j.contains("critical"))
    for (auto& s : read_simplex_array(j.at("critical"), where + ": key \"critical\""))
      ps.cells.push_back({s, s});
  if (j.contains("arrows")) {
    const Json& arrows = j.at("arrows");
    if (!arrows.is_array()) throw UsageError(where + ": key \"arrows\": expected an array");
    for (std::size_t i = 0; i < arrows.size(); ++i) {
      const std::string at = where + ": key \"arrows\"[" + std::to_string(i) + "]";
      if (!arrows[i].is_array() || arrows[i].size() != 2)
        throw UsageError(at + ": expected a [tail, head] pair");
      Simplex tail = io_detail::names_to_simplex(io_detail::string_list(arrows[i][0], at + "[0]"),
                                                 id, at + "[0]");
      Simplex head = io_detail::names_to_simplex(io_detail::string_list(arrows[i][1], at + "[1]"),
                                                 id, at + "[1]");
      ps.cells.push_back({std::move(tail), std::move(head)});
    }
  }

  if (complete_critical) {
    std::set<Simplex> covered;
    for (const auto& c : ps.cells) {
      covered.insert(c.minus);
      covered.insert(c.plus);
    }
    for (const auto& s : ps.complex->simplices())
      if (!covered.count(s)) {
        ps.cells.push_back({s, s});
        ++ps.completed_critical;
      }
  }
  return ps;
}

inline ParsedSystem load_system(const std::string& path, bool complete_critical = false) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open input file: " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw UsageError(path + ": " + e.what());
  }
  return parse_system_json(j, path, complete_critical);
}

// validates the cell partition and constructs the field; the complex keeps a
// stable address inside the returned System
inline System build_system(ParsedSystem ps) {
  auto rep = CombinatorialVectorField::validate_cells(*ps.complex, ps.cells);
  if (!rep.ok) {
    std::string msg = "invalid vector field:";
    for (const auto& p : rep.problems) msg += "\n  " + p;
    throw ContentError(msg);
  }
  System s;
  s.complex = std::move(ps.complex);
  s.field = std::make_unique<CombinatorialVectorField>(*s.complex, std::move(ps.cells));
  return s;
}

// ---- command arguments ----

// Comma-separated simplices: "BD,ABD" when every vertex name is a single
// character, "B-D,A-B-D" in general; optional surrounding braces. Membership
// in the complex is not checked here.
inline std::set<Simplex> parse_simplex_set(const std::string& text, const SimplicialComplex& X) {
  std::string t = io_detail::trim(text);
  if (t.size() >= 2 && t.front() == '{' && t.back() == '}') t = t.substr(1, t.size() - 2);
  bool single_char_names = true;
  std::map<std::string, int> id;
  for (std::size_t i = 0; i < X.vertex_names().size(); ++i) {
    const auto& n = X.vertex_names()[i];
    single_char_names = single_char_names && n.size() == 1;
    id.emplace(n, static_cast<int>(i));
  }
  std::set<Simplex> out;
  for (const auto& raw : io_detail::split(t, ',')) {
    std::string tok = io_detail::trim(raw);
    if (tok.empty()) throw UsageError("set argument: empty simplex");
    std::vector<std::string> names;
    if (tok.find('-') != std::string::npos) {
      for (const auto& part : io_detail::split(tok, '-')) names.push_back(io_detail::trim(part));
    } else if (single_char_names) {
      for (char c : tok) names.emplace_back(1, c);
    } else {
      names.push_back(tok);
    }
    out.insert(io_detail::names_to_simplex(names, id, "set argument \"" + tok + "\""));
  }
  if (out.empty()) throw UsageError("set argument names no simplices");
  return out;
}

// Barycentric assignments "A=0.2,B=0.3,D=0.5"; unlisted vertices are zero.
// Syntax problems are usage errors; a syntactically fine point that is
// negative, off the unit sum by more than 1e-9, or supported outside the
// complex is a content error.
inline std::vector<double> parse_point(const std::string& text, const SimplicialComplex& X) {
  std::vector<double> x(static_cast<std::size_t>(X.vertex_count()), 0.0);
  std::vector<char> seen(x.size(), 0);
  for (const auto& raw : io_detail::split(text, ',')) {
    std::string part = io_detail::trim(raw);
    auto eq = part.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == part.size())
      throw UsageError("malformed coordinate assignment \"" + part + "\" (expected NAME=VALUE)");
    std::string name = io_detail::trim(part.substr(0, eq));
    std::string val = io_detail::trim(part.substr(eq + 1));
    int v;
    try {
      v = X.vertex_id(name);
    } catch (const std::domain_error&) {
      throw UsageError("unknown vertex name \"" + name + "\"");
    }
    if (seen[static_cast<std::size_t>(v)])
      throw UsageError("vertex \"" + name + "\" assigned twice");
    seen[static_cast<std::size_t>(v)] = 1;
    std::size_t pos = 0;
    double value = 0;
    try {
      value = std::stod(val, &pos);
    } catch (const std::exception&) {
      throw UsageError("cannot parse coordinate value \"" + val + "\"");
    }
    if (pos != val.size()) throw UsageError("cannot parse coordinate value \"" + val + "\"");
    x[static_cast<std::size_t>(v)] = value;
  }

  double sum = 0;
  Simplex support;
  for (std::size_t v = 0; v < x.size(); ++v) {
    if (x[v] < 0)
      throw ContentError("negative coordinate for vertex " + X.vertex_names()[v]);
    if (x[v] > 0) support.push_back(static_cast<int>(v));
    sum += x[v];
  }
  if (std::fabs(sum - 1.0) > 1e-9) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", sum);
    throw ContentError(std::string("coordinates sum to ") + buf + ", not 1 (tolerance 1e-9)");
  }
  if (support.empty()) throw ContentError("point has empty support");
  if (!X.contains(support))
    throw ContentError("point is not in the complex: support " + X.name_of(support) +
                       " is not a simplex");
  return x;
}

// exact rational text "p/q" (or an integer "p"); decimal and scientific float
// forms are refused
inline Rational parse_rational(const std::string& text) {
  std::string t = io_detail::trim(text);
  if (t.empty()) throw UsageError("empty rational");
  if (t.find_first_of(".eE") != std::string::npos)
    throw UsageError("threshold must be exact rational text like \"1/48\"; floats are refused");
  auto parts = io_detail::split(t, '/');
  if (parts.size() > 2) throw UsageError("malformed rational \"" + t + "\"");
  auto digits = [](const std::string& s, bool sign_ok) {
    std::string d = io_detail::trim(s);
    if (sign_ok && !d.empty() && (d[0] == '+' || d[0] == '-')) d = d.substr(1);
    if (d.empty()) return false;
    for (char c : d)
      if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
  };
  if (!digits(parts[0], true) || (parts.size() == 2 && !digits(parts[1], false)))
    throw UsageError("malformed rational \"" + t + "\"");
  boost::multiprecision::cpp_int num(io_detail::trim(parts[0]));
  boost::multiprecision::cpp_int den =
      parts.size() == 2 ? boost::multiprecision::cpp_int(io_detail::trim(parts[1])) : 1;
  if (den == 0) throw UsageError("rational with zero denominator");
  return Rational(num, den);
}

inline std::string rational_str(const Rational& r) {
  std::ostringstream os;
  os << r;
  return os.str();
}

// exact-geometry commands need 0 < eps < 1/(1+dim)
inline void require_geometry_threshold(const Rational& eps, const SimplicialComplex& X) {
  if (!(eps > 0) || !(eps < Rational(1, X.dimension() + 1)))
    throw UsageError("threshold " + rational_str(eps) +
                     " must lie strictly between 0 and 1/" + std::to_string(X.dimension() + 1) +
                     " for this complex");
}

// flow commands need the tighter 0 < eps < 1/(6d), which implies the geometry
// constraint
inline void require_field_threshold(const Rational& eps, const SimplicialComplex& X) {
  const int d = X.vertex_count();
  if (!(eps > 0) || !(eps < Rational(1, 6 * d)))
    throw UsageError("threshold " + rational_str(eps) +
                     " must lie strictly between 0 and 1/" + std::to_string(6 * d) +
                     " for this complex");
}

// default threshold 1/(8d): inside every constraint, and 1/48 on the
// six-vertex example
inline Rational default_threshold(const SimplicialComplex& X) {
  return Rational(1, 8 * X.vertex_count());
}

inline double threshold_as_double(const Rational& eps) { return eps.convert_to<double>(); }

// ---- deterministic exporters ----

inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// node id "m" + 16 hex digits: a stable hash of the sorted simplex-name list
inline std::string morse_node_id(const MorseNode& n, const SimplicialComplex& X) {
  std::vector<std::string> names;
  for (const auto& s : n.simplices) names.push_back(X.name_of(s));
  std::sort(names.begin(), names.end());
  std::string key;
  for (const auto& nm : names) {
    key += nm;
    key += '\n';
  }
  char buf[24];
  std::snprintf(buf, sizeof buf, "m%016llx",
                static_cast<unsigned long long>(fnv1a64(key)));
  return buf;
}

inline std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

inline std::string to_dot(const MorseGraph& g, const SimplicialComplex& X) {
  std::string out = "digraph conley_morse {\n  node [shape=box];\n";
  std::vector<std::string> ids;
  for (const auto& n : g.nodes) {
    ids.push_back(morse_node_id(n, X));
    out += "  " + ids.back() + " [label=\"" + dot_escape(n.label) + "\\np(t)=" +
           dot_escape(n.index.str()) + "\"];\n";
  }
  for (const auto& [p, q] : g.edges)
    out += "  " + ids[static_cast<std::size_t>(p)] + " -> " + ids[static_cast<std::size_t>(q)] +
           ";\n";
  out += "}\n";
  return out;
}

inline Json morse_to_json(const MorseGraph& g, const SimplicialComplex& X) {
  Json nodes = Json::array();
  for (const auto& n : g.nodes) {
    Json simplices = Json::array();
    std::vector<std::vector<std::string>> lists;
    for (const auto& s : n.simplices) {
      std::vector<std::string> names;
      for (int v : s) names.push_back(X.vertex_names()[static_cast<std::size_t>(v)]);
      std::sort(names.begin(), names.end());
      lists.push_back(std::move(names));
    }
    std::sort(lists.begin(), lists.end());
    for (auto& l : lists) simplices.push_back(l);
    nodes.push_back({{"id", morse_node_id(n, X)},
                     {"label", n.label},
                     {"poincare", n.index.str()},
                     {"betti", n.index.coefficients()},
                     {"simplices", simplices}});
  }
  auto pairs = [](const std::set<std::pair<int, int>>& s) {
    Json out = Json::array();
    for (const auto& [p, q] : s) out.push_back({p, q});
    return out;
  };
  return {{"nodes", nodes}, {"order", pairs(g.order)}, {"edges", pairs(g.edges)}};
}

// fixed-width float text for CSV rows; round-trips doubles exactly
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// display name of a tile's carrier: "F" for a critical cell, "A->AD" for an
// arrow
inline std::string carrier_label(const VCell& c, const SimplicialComplex& X) {
  if (c.critical()) return X.name_of(c.plus);
  return X.name_of(c.minus) + "->" + X.name_of(c.plus);
}

}  // namespace conleyflow
