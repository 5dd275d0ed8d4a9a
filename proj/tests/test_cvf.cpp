#include <catch2/catch_amalgamated.hpp>
#include <conleyflow/cvf.hpp>

#include <set>
#include <vector>

#include "bridge.hpp"
#include "gen.hpp"
#include "oracles.hpp"

using conleyflow::CombinatorialVectorField;
using conleyflow::Simplex;
using conleyflow::SimplexClass;
using conleyflow::SimplicialComplex;
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

}  // namespace

TEST_CASE("field construction and classification on the disk") {
  auto X = disk_cx();
  auto K = bridge::make_complex(X);
  auto V = bridge::make_field(K, disk_field());

  CHECK(V.cells().size() == 9);
  CHECK(V.classify(K.simplex_from_names({"F"})) == SimplexClass::Critical);
  CHECK(V.classify(K.simplex_from_names({"A"})) == SimplexClass::Tail);
  CHECK(V.classify(K.simplex_from_names({"A", "D"})) == SimplexClass::Head);
  CHECK(V.is_critical(K.simplex_from_names({"B", "D"})));
  CHECK_FALSE(V.is_critical(K.simplex_from_names({"D"})));

  const VCell& c = V.cell_of(K.simplex_from_names({"A", "D"}));
  CHECK(c.minus == K.simplex_from_names({"A"}));
  CHECK(c.plus == K.simplex_from_names({"A", "D"}));
}

TEST_CASE("flow map anchors on the disk") {
  auto K = bridge::make_complex(disk_cx());
  auto V = bridge::make_field(K, disk_field());

  auto s = [&K](const char* n) {
    std::vector<std::string> names;
    for (const char* p = n; *p; ++p) names.push_back(std::string(1, *p));
    return K.simplex_from_names(names);
  };

  // critical: the whole closure
  CHECK(V.pi(s("ABD")) == std::set<Simplex>{s("A"), s("B"), s("D"), s("AB"), s("AD"), s("BD"), s("ABD")});
  CHECK(V.pi(s("F")) == std::set<Simplex>{s("F")});
  // tail: just the head
  CHECK(V.pi(s("A")) == std::set<Simplex>{s("AD")});
  CHECK(V.pi(s("D")) == std::set<Simplex>{s("DF")});
  // head: boundary minus the tail
  CHECK(V.pi(s("AD")) == std::set<Simplex>{s("D")});
  CHECK(V.pi(s("BCD")) == std::set<Simplex>{s("B"), s("C"), s("D"), s("BD"), s("CD")});
}

TEST_CASE("solutions step along the flow map") {
  auto K = bridge::make_complex(disk_cx());
  auto V = bridge::make_field(K, disk_field());
  auto sfn = [&K](std::vector<std::string> names) { return K.simplex_from_names(names); };

  CHECK(V.is_solution({sfn({"A"}), sfn({"A", "D"}), sfn({"D"}), sfn({"D", "F"}), sfn({"F"}), sfn({"F"})}));
  CHECK(V.is_solution({sfn({"B", "D"})}));
  CHECK(V.is_solution({}));
  CHECK_FALSE(V.is_solution({sfn({"A"}), sfn({"D"})}));
  CHECK_FALSE(V.is_solution({sfn({"A", "D"}), sfn({"B", "D"})}));
}

TEST_CASE("map form round trip") {
  auto K = bridge::make_complex(disk_cx());
  auto V = bridge::make_field(K, disk_field());

  auto m = V.map_form();
  CHECK(m.size() == K.size());
  CHECK(m.at(K.simplex_from_names({"A"})) == K.simplex_from_names({"A", "D"}));
  CHECK_FALSE(m.at(K.simplex_from_names({"F"})).has_value());
  CHECK_FALSE(m.at(K.simplex_from_names({"A", "D"})).has_value());

  auto W = CombinatorialVectorField::from_map_form(K, m);
  std::set<std::pair<Simplex, Simplex>> a, b;
  for (const auto& c : V.cells()) a.insert({c.minus, c.plus});
  for (const auto& c : W.cells()) b.insert({c.minus, c.plus});
  CHECK(a == b);
}

TEST_CASE("zero map makes every simplex critical") {
  SimplicialComplex K({"A", "B", "C"}, {{0, 1, 2}});
  std::map<Simplex, std::optional<Simplex>> m;
  for (const auto& s : K.simplices()) m[s] = std::nullopt;
  auto V = CombinatorialVectorField::from_map_form(K, m);
  CHECK(V.cells().size() == 7);
  for (const auto& s : K.simplices()) CHECK(V.is_critical(s));
}

TEST_CASE("partition validation failures") {
  SimplicialComplex K({"A", "B"}, {{0, 1}});
  auto bad = [&K](std::vector<VCell> cells) {
    auto r = CombinatorialVectorField::validate_cells(K, cells);
    CHECK_FALSE(r.ok);
    CHECK_THROWS_AS(CombinatorialVectorField(K, cells), std::invalid_argument);
    return r;
  };

  auto r1 = bad({{{0}, {0}}, {{1}, {1}}});  // AB uncovered
  REQUIRE(r1.problems.size() == 1);
  CHECK(r1.problems[0] == "uncovered simplex: AB");

  auto r2 = bad({{{0}, {0}}, {{1}, {0, 1}}, {{0}, {0, 1}}});  // A and AB doubly covered
  CHECK(r2.problems.size() == 2);

  SimplicialComplex L({"A", "B", "C"}, {{0, 1, 2}});
  std::vector<VCell> cells{{{0}, {0, 1, 2}}};  // vertex to triangle: not a facet
  auto r3 = CombinatorialVectorField::validate_cells(L, cells);
  CHECK_FALSE(r3.ok);
  CHECK(r3.problems[0] == "arrow tail is not a facet of its head: A -> ABC");

  std::vector<VCell> cells2{{{2}, {2}}};  // C not in the edge complex
  CHECK_FALSE(CombinatorialVectorField::validate_cells(K, cells2).ok);
}

TEST_CASE("map form validation failures") {
  SimplicialComplex K({"A", "B", "C"}, {{0, 1}, {1, 2}});
  auto zero = [&K]() {
    std::map<Simplex, std::optional<Simplex>> m;
    for (const auto& s : K.simplices()) m[s] = std::nullopt;
    return m;
  };

  auto m1 = zero();
  m1[{0}] = Simplex{1, 2};  // not a cofacet of A
  CHECK_THROWS_AS(CombinatorialVectorField::from_map_form(K, m1), std::invalid_argument);

  auto m2 = zero();
  m2[{0}] = Simplex{0, 1};
  m2[{0, 1}] = Simplex{0, 1};  // image moved (also not a proper cofacet)
  CHECK_THROWS_AS(CombinatorialVectorField::from_map_form(K, m2), std::invalid_argument);

  auto m3 = zero();
  m3[{0}] = Simplex{0, 1};
  m3[{1}] = Simplex{0, 1};  // shared image
  CHECK_THROWS_AS(CombinatorialVectorField::from_map_form(K, m3), std::invalid_argument);

  auto m4 = zero();
  m4.erase(Simplex{1});  // missing key
  CHECK_THROWS_AS(CombinatorialVectorField::from_map_form(K, m4), std::invalid_argument);
}

TEST_CASE("flow map agrees with the reference on random fields") {
  for (std::uint64_t seed = 20; seed < 28; ++seed) {
    gen::Rng r(seed);
    auto X = gen::random_complex(r, 4 + static_cast<int>(r.below(4)), 3 + static_cast<int>(r.below(3)), 3);
    auto F = gen::random_field(r, X);
    auto K = bridge::make_complex(X);
    auto V = bridge::make_field(K, F);

    for (const auto& s : X) {
      auto got = bridge::to_vset_set(K, V.pi(bridge::to_simplex(K, s)));
      CHECK(got == oracle::pi(s, F, X));
    }

    // adjacency lists mirror the flow map
    const auto& adj = V.adjacency();
    for (std::size_t i = 0; i < K.size(); ++i) {
      std::set<Simplex> from_adj;
      for (int j : adj[i]) from_adj.insert(K.simplices()[static_cast<std::size_t>(j)]);
      CHECK(from_adj == V.pi(K.simplices()[i]));
    }

    // round trip through the map form reproduces the partition
    auto W = CombinatorialVectorField::from_map_form(K, V.map_form());
    std::set<std::pair<Simplex, Simplex>> a, b;
    for (const auto& c : V.cells()) a.insert({c.minus, c.plus});
    for (const auto& c : W.cells()) b.insert({c.minus, c.plus});
    CHECK(a == b);
  }
}
