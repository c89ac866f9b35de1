#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "ultrakit/ultrakit.hpp"

using namespace ultrakit;

namespace {

BoundedFamily randomFamily(std::mt19937_64& rng, IndexSet I, std::size_t bound) {
  BoundedFamily f{I, bound, {}};
  for (std::size_t j = 0; j < bound; ++j) f.fibers.push_back(randomQuery(rng, I, 3, 3));
  return f;
}

}  // namespace

TEST_CASE("principal ultraproducts are the fiber at the point") {
  std::mt19937_64 rng(2);
  for (int k = 0; k < 200; ++k) {
    std::size_t n = 1 + below(rng, 4), p = below(rng, n);
    auto mu = Ultrafilter::principal(IndexSet::fin(n), p);
    BoundedFamily A = randomFamily(rng, IndexSet::fin(n), 3);
    std::vector<std::size_t> atP;
    for (std::size_t j = 0; j < 3; ++j)
      if (A.contains(p, j)) atP.push_back(j);
    if (atP.empty()) {
      CHECK_THROWS_AS(uprodEnumerate(mu, A), Error);
      continue;
    }
    CHECK(uprodEnumerate(mu, A).labels == atP);
  }
}

TEST_CASE("ultraproduct classes are values at the point, by brute force over choice functions") {
  // Fin(3) index, delta_1: group all choice functions by their value at 1
  auto mu = Ultrafilter::principal(IndexSet::fin(3), 1);
  BoundedFamily A{IndexSet::fin(3), 3, {UPSet::finite({0, 1}), UPSet::finite({1, 2}), UPSet::finite({1})}};
  UltraProductSet u = uprodEnumerate(mu, A);
  std::set<std::size_t> classes;
  forEachUPFunction(IndexSet::fin(3), 3, 0, 1, 1000, [&](const UPElement& x) {
    if (u.isElement(x)) classes.insert(x.at(1));
  });
  CHECK(classes.size() == u.size());
  CHECK(u.size() == 3);
}

TEST_CASE("factorial ultraproducts keep the labels on large sets") {
  auto mu = Ultrafilter::factorial();
  BoundedFamily A{IndexSet::natural(), 3, {UPSet::evens(), UPSet::odds(), UPSet::residue(0, 3)}};
  UltraProductSet u = uprodEnumerate(mu, A);
  CHECK(u.labels == std::vector<std::size_t>{0, 2});
  SaturationReport s = saturationCheck(u, 2, 3);
  CHECK(s.ok);
  CHECK(s.classesHit == 2);
}

TEST_CASE("a large set of empty fibers is refused") {
  BoundedFamily A{IndexSet::natural(), 1, {UPSet::odds()}};
  CHECK_THROWS_AS(uprodEnumerate(Ultrafilter::factorial(), A), Error);
}

TEST_CASE("equality of families modulo an ultrafilter is an equivalence") {
  std::mt19937_64 rng(4);
  auto mu = Ultrafilter::factorial();
  std::vector<UPElement> xs;
  for (int k = 0; k < 12; ++k) xs.push_back(randomElement(rng, IndexSet::natural(), 2, 2, 2));
  for (auto& x : xs) {
    CHECK(ufamEq(x, x, mu));
    for (auto& y : xs) {
      CHECK(ufamEq(x, y, mu) == ufamEq(y, x, mu));
      for (auto& z : xs)
        if (ufamEq(x, y, mu) && ufamEq(y, z, mu)) CHECK(ufamEq(x, z, mu));
    }
  }
}

TEST_CASE("dependent products and quantifier exchange") {
  std::mt19937_64 rng(6);
  std::vector<Ultrafilter> ufs = {Ultrafilter::factorial(), Ultrafilter::principal(IndexSet::fin(3), 2),
                                  ufPushforward(Ultrafilter::factorial(), UPMap::affine(2, 1))};
  for (auto& mu : ufs)
    for (int k = 0; k < 30; ++k) {
      DependentPair d{randomFamily(rng, mu.carrier(), 2), {}};
      for (int a = 0; a < 2; ++a) d.B.push_back(randomFamily(rng, mu.carrier(), 2));
      LemmaReport r = dependentProductCheck(mu, d);
      INFO(mu.str() << " " << r.witness);
      CHECK(r.ok);
      BoundedFamily A = randomFamily(rng, mu.carrier(), 2);
      std::vector<UPSet> P = {randomQuery(rng, mu.carrier(), 2, 3), randomQuery(rng, mu.carrier(), 2, 3)};
      CHECK(quantifierExchangeCheck(mu, A, P).ok);
    }
}

TEST_CASE("associator carrier map is a bijection onto the nested sum") {
  std::mt19937_64 rng(8);
  for (int k = 0; k < 50; ++k) {
    auto mu = randomFinUF(rng, 3);
    UFFamily nus = UFFamily::tabulate(mu.carrier(), 0, 1, [&](std::size_t) { return randomFinUF(rng, 3); });
    auto sigma = ufSum(mu, nus);
    UFFamily lams = UFFamily::tabulate(sigma.carrier(), 0, 1, [&](std::size_t) { return randomFinUF(rng, 3); });
    auto d = detail::associatorData(mu, nus, lams, 0, 1);
    CHECK(detail::associatorCarrierMapOk(d));
    CHECK(ufIso(d.outer, d.outer2).isomorphic());
  }
}

TEST_CASE("coherence suite is clean and reproducible") {
  SeedTree seed(5);
  LawReport a = coherenceSuite(seed, 25), b = coherenceSuite(seed, 25);
  CHECK(a.ok());
  CHECK(a.instances == 50);
  CHECK(a.checks == b.checks);
  CoherenceKinds finOnly{true, false};
  CHECK(coherenceSuite(seed, 10, {}, finOnly).instances == 10);
}
