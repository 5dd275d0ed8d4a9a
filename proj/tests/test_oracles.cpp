// Self-tests for the brute-force reference implementations: pins the anchor
// values (closures, flow-map images, Morse sets, homology ranks) that the
// library tests later rely on.
#include <catch2/catch_amalgamated.hpp>

#include "gen.hpp"
#include "oracles.hpp"

using namespace oracle;

namespace {

Cx disk_complex() { return cx({"ABD", "BCD", "DE", "DF"}); }

Field disk_field() {
  Field V;
  V.critical = {vvs("F"), vvs("BD"), vvs("ABD")};
  V.arrows = {{vvs("A"), vvs("AD")}, {vvs("B"), vvs("AB")}, {vvs("BC"), vvs("BCD")},
              {vvs("C"), vvs("CD")}, {vvs("D"), vvs("DF")}, {vvs("E"), vvs("DE")}};
  return V;
}

Cx segment_complex() { return cx({"EF", "FG"}); }

Field segment_field() {
  Field V;
  V.critical = {vvs("EF"), vvs("E"), vvs("G")};
  V.arrows = {{vvs("F"), vvs("FG")}};
  return V;
}

Field all_critical(const Cx& X) {
  Field V;
  V.critical = std::set<Vset>(X.begin(), X.end());
  return V;
}

Field cycle_field() {
  Field V;
  V.arrows = {{vvs("A"), vvs("AB")}, {vvs("B"), vvs("BC")}, {vvs("C"), vvs("AC")}};
  return V;
}

}  // namespace

TEST_CASE("oracle closure enumerates every nonempty face") {
  CHECK(closure({vvs("ABD")}) ==
        Cx{vvs("ABD"), vvs("AB"), vvs("AD"), vvs("BD"), vvs("A"), vvs("B"), vvs("D")});
  CHECK(closure({vvs("A")}) == Cx{vvs("A")});
  CHECK(closure({vvs("EF"), vvs("E")}) == Cx{vvs("EF"), vvs("E"), vvs("F")});
}

TEST_CASE("oracle boundary lists proper faces only") {
  CHECK(boundary(vvs("ABD")) ==
        Cx{vvs("AB"), vvs("AD"), vvs("BD"), vvs("A"), vvs("B"), vvs("D")});
  CHECK(boundary(vvs("A")).empty());
  CHECK(boundary(vvs("AB")) == Cx{vvs("A"), vvs("B")});
}

TEST_CASE("oracle star scans cofaces") {
  Cx X = disk_complex();
  REQUIRE(X.size() == 15);
  CHECK(star("F", X) == Cx{vvs("F"), vvs("DF")});
  CHECK(star("D", X) == Cx{vvs("D"), vvs("AD"), vvs("BD"), vvs("CD"), vvs("DE"), vvs("DF"),
                           vvs("ABD"), vvs("BCD")});
  CHECK(star("A", cx({"A"})) == Cx{vvs("A")});
}

TEST_CASE("oracle flow map branches") {
  Cx X = disk_complex();
  Field V = disk_field();
  CHECK(pi(vvs("ABD"), V, X) == std::set<Vset>{vvs("ABD"), vvs("AB"), vvs("AD"), vvs("BD"),
                                               vvs("A"), vvs("B"), vvs("D")});
  CHECK(pi(vvs("A"), V, X) == std::set<Vset>{vvs("AD")});
  CHECK(pi(vvs("AD"), V, X) == std::set<Vset>{vvs("D")});
  CHECK(pi(vvs("BCD"), V, X) ==
        std::set<Vset>{vvs("BD"), vvs("CD"), vvs("B"), vvs("C"), vvs("D")});
}

TEST_CASE("oracle invariance and isolation") {
  Cx X = disk_complex();
  Field V = disk_field();
  CHECK(invariant({vvs("F")}, V, X));
  CHECK_FALSE(invariant({vvs("A")}, V, X));
  CHECK(isolated_invariant({vvs("ABD")}, V, X));
  CHECK_FALSE(isolated_invariant({vvs("AD")}, V, X));  // splits the arrow A -> AD

  Cx P = segment_complex();
  Field W = segment_field();
  CHECK(isolated_invariant({vvs("EF")}, W, P));
  CHECK(isolated_invariant({vvs("EF"), vvs("E")}, W, P));
}

TEST_CASE("oracle relative homology ranks") {
  CHECK(relative_betti(cx({"EF"}), cx({"E", "F"})) == std::vector<long>{0, 1});
  CHECK(relative_betti(cx({"EF"}), cx({"F"})) == std::vector<long>{});
  CHECK(relative_betti(closure({vvs("ABD")}), boundary(vvs("ABD"))) ==
        std::vector<long>{0, 0, 1});
  CHECK(relative_betti(disk_complex(), {}) == std::vector<long>{1});
  CHECK(relative_betti(cx({"A", "B"}), {}) == std::vector<long>{2});
  CHECK(relative_betti(cx({"AB", "BC", "AC"}), {}) == std::vector<long>{1, 1});
}

TEST_CASE("oracle Morse graph of the disk example") {
  MorseGraphO M = morse_graph(disk_field(), disk_complex());
  REQUIRE(M.sets.size() == 3);
  CHECK(M.sets[0] == std::set<Vset>{vvs("F")});
  CHECK(M.sets[1] == std::set<Vset>{vvs("BD")});
  CHECK(M.sets[2] == std::set<Vset>{vvs("ABD")});
  CHECK(M.betti[0] == std::vector<long>{1});
  CHECK(M.betti[1] == std::vector<long>{0, 1});
  CHECK(M.betti[2] == std::vector<long>{0, 0, 1});
  CHECK(M.reach_order == std::set<std::pair<int, int>>{{2, 1}, {2, 0}, {1, 0}});
  CHECK(M.reduced == std::set<std::pair<int, int>>{{2, 1}, {1, 0}});
}

TEST_CASE("oracle Morse graph of the all-critical triangle") {
  Cx X = cx({"ABC"});
  MorseGraphO M = morse_graph(all_critical(X), X);
  REQUIRE(M.sets.size() == 7);
  for (size_t i = 0; i < 7; ++i) {
    REQUIRE(M.sets[i].size() == 1);
    int d = (int)M.sets[i].begin()->size() - 1;
    std::vector<long> expect((size_t)d + 1, 0);
    expect.back() = 1;
    CHECK(M.betti[i] == expect);
  }
  CHECK(M.reach_order.size() == 12);
  CHECK(M.reduced.size() == 9);
  // alternating node-label sum at t = -1 matches the Euler characteristic
  long sum = 0;
  for (const auto& b : M.betti) {
    long sign = 1;
    for (long c : b) {
      sum += sign * c;
      sign = -sign;
    }
  }
  CHECK(sum == 1);
}

TEST_CASE("oracle Morse graph of the cyclic triangle boundary") {
  Cx X = cx({"AB", "BC", "AC"});
  MorseGraphO M = morse_graph(cycle_field(), X);
  REQUIRE(M.sets.size() == 1);
  CHECK(M.sets[0].size() == 6);
  CHECK(M.betti[0] == std::vector<long>{1, 1});
  CHECK(M.reach_order.empty());
}

TEST_CASE("oracle Morse sets are isolated invariant on random fields") {
  for (uint64_t seed = 1; seed <= 6; ++seed) {
    gen::Rng r(seed);
    Cx X = gen::random_complex(r, 6, 4, 3);
    Field V = gen::random_field(r, X);
    MorseGraphO M = morse_graph(V, X);
    for (const auto& s : M.sets) {
      INFO("seed " << seed);
      CHECK(isolated_invariant(s, V, X));
    }
  }
}
