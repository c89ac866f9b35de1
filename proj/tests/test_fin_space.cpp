#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "ultrakit/ultrakit.hpp"

using namespace ultrakit;

namespace {

// Topologies on n points counted from scratch: families of subsets containing
// the empty and full sets, closed under union and intersection.
std::size_t countTopologies(std::size_t n) {
  std::size_t subsets = std::size_t{1} << n;
  std::size_t count = 0;
  Mask full = fullMask(n);
  for (std::uint64_t fam = 0; fam < (std::uint64_t{1} << subsets); ++fam) {
    if (!((fam >> 0) & 1u) || !((fam >> full) & 1u)) continue;
    bool closed = true;
    for (std::size_t a = 0; a < subsets && closed; ++a)
      for (std::size_t b = 0; b < subsets && closed; ++b)
        if (((fam >> a) & 1u) && ((fam >> b) & 1u))
          closed = ((fam >> (a | b)) & 1u) && ((fam >> (a & b)) & 1u);
    count += closed;
  }
  return count;
}

}  // namespace

TEST_CASE("space enumeration matches an independent count") {
  for (std::size_t n = 1; n <= 4; ++n) {
    auto spaces = enumerateSpaces(n);
    CHECK(spaces.size() == countTopologies(n));
    std::set<std::vector<Mask>> distinct;
    for (auto& T : spaces) distinct.insert(T.opens());
    CHECK(distinct.size() == spaces.size());
  }
  CHECK(enumerateSpaces(3).size() == 29);
  CHECK(enumerateSpaces(4).size() == 355);
}

TEST_CASE("non-topologies are rejected") {
  CHECK_THROWS_AS(FiniteSpace::validate(2, {0, 1, 2}), Error);  // union {0,1} missing
  CHECK_THROWS_AS(FiniteSpace::validate(2, {1, 3}), Error);     // no empty set
  CHECK_NOTHROW(FiniteSpace::validate(2, {0, 1, 3}));
}

TEST_CASE("ultraconvergence to principal families is specialization") {
  for (std::size_t n = 1; n <= 3; ++n)
    for (auto& T : enumerateSpaces(n)) {
      auto rel = ucvgRelation(T);
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
          bool everyOpen = true;
          for (Mask u : T.opens())
            if (has(u, a) && !has(u, b)) everyOpen = false;
          CHECK(has(rel[a], b) == everyOpen);
        }
      CHECK(relBetaValidate(n, rel).ok);
      CHECK(ucvgToTopology(n, rel) == T);
    }
}

TEST_CASE("a non-transitive relation is not a relational beta-module") {
  std::vector<Mask> rel = {0b011, 0b110, 0b100};
  CHECK_FALSE(relBetaValidate(3, rel).ok);
  CHECK_FALSE(relBetaValidate(2, {0b10, 0b10}).ok);
}

TEST_CASE("interior and closure from the convergence relation") {
  for (auto& T : enumerateSpaces(3))
    for (Mask A = 0; A <= T.full(); ++A) {
      Mask interior = 0, closure = T.full();
      for (Mask u : T.opens()) {
        if ((u & ~A) == 0) interior |= u;
        if ((u & A) == 0) closure &= ~u;
      }
      auto d = derivedSets(T, A);
      CHECK(d.interior == interior);
      CHECK(d.closure == closure);
    }
}

TEST_CASE("limit points of factorial families agree with closures of large sets") {
  for (auto& T : enumerateSpaces(3))
    forEachUPFunction(IndexSet::natural(), 3, 1, 3, 200, [&](const UPElement& x) {
      // with the limit at c, a family converges to a iff a specializes to c
      std::size_t c = ultralimit(Ultrafilter::factorial(), x);
      Mask expect = 0;
      for (std::size_t a = 0; a < 3; ++a)
        if (T.leq(a, c)) expect |= bit(a);
      CHECK(limitPoints(T, {Ultrafilter::factorial(), x}) == expect);
    });
}

TEST_CASE("continuity and openness: both routes agree on every small map") {
  std::vector<FiniteSpace> spaces;
  for (std::size_t n = 1; n <= 3; ++n)
    for (auto& T : enumerateSpaces(n)) spaces.push_back(T);
  std::size_t continuous = 0, open = 0;
  for (auto& S : spaces)
    for (auto& T : spaces) {
      std::vector<std::size_t> f(S.size(), 0);
      while (true) {
        SpaceMap m{S, T, f};
        bool c = false;
        REQUIRE_NOTHROW(c = mapContinuous(m));
        continuous += c;
        if (c) {
          bool o = false;
          REQUIRE_NOTHROW(o = mapOpen(m));
          open += o;
          auto pc = properCheck(m);
          CHECK(pc.closedMap == pc.dualLifting);
        }
        std::size_t i = 0;
        while (i < f.size() && ++f[i] == T.size()) f[i++] = 0;
        if (i == f.size()) break;
      }
    }
  CHECK(continuous > open);
  CHECK(open > 0);
}

TEST_CASE("the Sierpinski collapse is not etale") {
  SpaceMap p{FiniteSpace::sierpinski(), FiniteSpace::point(), {0, 0}};
  EtaleVerdict v = etaleCheck(p);
  REQUIRE_FALSE(v.isEtale);
  REQUIRE(v.counterexample);
  CHECK(v.counterexample->point == 0);
  CHECK(v.counterexample->lifts == std::vector<std::size_t>{0, 1});
}

TEST_CASE("covering maps are etale with certificates") {
  SpaceMap fold{FiniteSpace::discrete(2), FiniteSpace::point(), {0, 0}};
  EtaleVerdict v = etaleCheck(fold);
  CHECK(v.isEtale);
  CHECK(v.certificates.size() == 2);
  // two copies of the Sierpinski space over it
  FiniteSpace two = FiniteSpace::fromPreorder({0b0011, 0b0010, 0b1100, 0b1000});
  CHECK(etaleCheck({two, FiniteSpace::sierpinski(), {0, 1, 0, 1}}).isEtale);
  // open inclusion
  CHECK(etaleCheck({FiniteSpace::point(), FiniteSpace::sierpinski(), {1}}).isEtale);
  // closed inclusion of the closed point
  CHECK_FALSE(etaleCheck({FiniteSpace::point(), FiniteSpace::sierpinski(), {0}}).isEtale);
}

TEST_CASE("a discontinuous projection is refused") {
  SpaceMap p{FiniteSpace::sierpinski(), FiniteSpace::sierpinski(), {1, 0}};
  try {
    etaleCheck(p);
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotContinuous);
  }
}

TEST_CASE("fiber ultraproducts of finite maps are fibers") {
  SpaceMap p{FiniteSpace::discrete(3), FiniteSpace::discrete(2), {0, 1, 1}};
  for (std::size_t b = 0; b < 2; ++b) {
    auto u = fiberUltraproduct(p, Ultrafilter::principal(IndexSet::fin(2), b));
    CHECK(u.size() == static_cast<std::size_t>(std::popcount(p.fiber(b))));
  }
}

TEST_CASE("space documents") {
  CHECK(spaceDocument(FiniteSpace::sierpinski()) == R"({"opens":[[],[1],[0,1]],"points":2})");
  SpaceMap p{FiniteSpace::sierpinski(), FiniteSpace::point(), {0, 0}};
  CHECK(mapDocument(p).find(R"("map":[0,0])") != std::string::npos);
}
