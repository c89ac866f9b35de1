#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "ultrakit/ultrakit.hpp"

using namespace ultrakit;

namespace {

// Natural transformations counted by trying every family of tables.
std::size_t bruteNat(const FiniteCategory& C, const SetFunctor& A, const SetFunctor& B) {
  std::size_t n = C.objects(), count = 0;
  SetNat h(n);
  std::function<void(std::size_t)> rec = [&](std::size_t a) {
    if (a == n) {
      count += isNatural(C, A, B, h);
      return;
    }
    std::size_t total = 1;
    for (std::size_t i = 0; i < A.fiber[a]; ++i) total *= B.fiber[a];
    for (std::size_t code = 0; code < total; ++code) {
      h[a].assign(A.fiber[a], 0);
      std::size_t c = code;
      for (std::size_t i = 0; i < A.fiber[a]; ++i, c /= B.fiber[a]) h[a][i] = c % B.fiber[a];
      rec(a + 1);
    }
  };
  rec(0);
  return count;
}

std::size_t power(std::size_t b, std::size_t e) {
  std::size_t r = 1;
  while (e--) r *= b;
  return r;
}

}  // namespace

TEST_CASE("one-object categories with at most two arrows are the three small monoids") {
  std::size_t monoids = 0;
  for (auto& C : enumerateSmallCategories(1, 2)) {
    CHECK(C.objects() == 1);
    ++monoids;
  }
  // {e}, {e,a} with a*a = e, {e,a} with a*a = a
  CHECK(monoids == 3);
}

TEST_CASE("small categories are pairwise non-isomorphic and complete under relabelling") {
  auto cats = enumerateSmallCategories(2, 2);
  CHECK(cats.size() == 48);
  for (std::size_t i = 0; i < cats.size(); ++i)
    for (std::size_t j = i + 1; j < cats.size(); ++j) REQUIRE_FALSE(categoriesIsomorphic(cats[i], cats[j]));
  // swapping the objects of a 2-object category lands on an isomorphic entry
  for (auto& C : cats) {
    if (C.objects() != 2) continue;
    std::vector<std::size_t> src, tgt, id = {C.identity(1), C.identity(0)};
    for (std::size_t f = 0; f < C.arrows(); ++f) {
      src.push_back(1 - C.source(f));
      tgt.push_back(1 - C.target(f));
    }
    FiniteCategory D(2, src, tgt, id, C.compositionTable());
    D.validate();
    std::size_t hits = 0;
    for (auto& E : cats) hits += categoriesIsomorphic(D, E);
    CHECK(hits == 1);
  }
}

TEST_CASE("star homs of the standard instances") {
  FinSetVUlt fs(2);
  CHECK(fs.objects() == 4);
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = 0; b < 4; ++b)
      CHECK(fs.points().hom(a, b).size() == power(std::popcount(b), std::popcount(a)));
  PtSpaceVUlt sp(FiniteSpace::sierpinski());
  CHECK(sp.points().hom(0, 1).size() == 1);
  CHECK(sp.points().hom(1, 0).empty());
  CHECK(PointVUlt().points().arrows() == 1);
}

TEST_CASE("identity and space functors validate on the probe set") {
  auto S = std::make_shared<const PtSpaceVUlt>(FiniteSpace::sierpinski());
  auto P = std::make_shared<const PtSpaceVUlt>(FiniteSpace::point());
  ValidationReport r = functorValidate(identityFunctor(S));
  CHECK(r.ok);
  CHECK(r.probe == "probe-v1");
  CHECK(functorValidate(spaceFunctor(S, P, {FiniteSpace::sierpinski(), FiniteSpace::point(), {0, 0}})).ok);
  auto F = identityFunctor(S);
  CHECK(natValidate(F, F, {S->points().identity(0), S->points().identity(1)}).ok);
}

TEST_CASE("ultrasheaf validation runs probes on nonempty sheaves") {
  for (auto& T : enumerateSpaces(2)) {
    auto X = std::make_shared<const PtSpaceVUlt>(T);
    std::size_t sheaves = 0;
    enumerateSetFunctors(X->points(), 2, [&](const SetFunctor& F) {
      UltraSheaf A(X, F);
      ValidationReport r = ultrasheafValidate(A);
      INFO(T.str() << " " << r.witness);
      CHECK(r.ok);
      std::size_t nonempty = 0;
      for (auto z : F.fiber) nonempty += z > 0;
      if (nonempty) CHECK(r.queries > 0);
      ++sheaves;
      return true;
    });
    CHECK(sheaves > 0);
  }
}

TEST_CASE("a broken action is rejected") {
  auto X = std::make_shared<const PtSpaceVUlt>(FiniteSpace::sierpinski());
  const auto& P = X->points();
  std::mt19937_64 rng(1);
  SetFunctor F = randomSetFunctor(P, 2, rng);
  F.fiber = {2, 2};
  F.action.assign(P.arrows(), {});
  for (std::size_t f = 0; f < P.arrows(); ++f) F.action[f] = {1, 0};  // identities swap
  CHECK(setFunctorViolation(P, F));
  CHECK_FALSE(ultrasheafValidate(UltraSheaf(X, F)).ok);
}

TEST_CASE("natural transformation counts agree with brute force") {
  std::mt19937_64 rng(12);
  for (auto& C : enumerateSmallCategories(2, 2))
    for (int k = 0; k < 3; ++k) {
      SetFunctor A = randomSetFunctor(C, 2, rng), B = randomSetFunctor(C, 2, rng);
      REQUIRE(countNat(C, A, B) == bruteNat(C, A, B));
    }
}

TEST_CASE("sheaves over the Sierpinski space are maps between sets") {
  // iso classes of functions m -> n with m, n <= 2: 1 + 3 + 4
  EvReport r = evEquivalenceCheck(FiniteSpace::sierpinski(), 2);
  CHECK(r.ok);
  CHECK(r.sheafObjects == 8);
  CHECK(r.etaleObjects == 8);
  CHECK(evEquivalenceCheck(FiniteSpace::point(), 2).sheafObjects == 3);
}

TEST_CASE("stalk sheaf and etale space round trip") {
  FiniteSpace two = FiniteSpace::fromPreorder({0b0011, 0b0010, 0b1100, 0b1000});
  EtaleSheaf E = etaleSheaf({two, FiniteSpace::sierpinski(), {0, 1, 0, 1}});
  UltraSheaf A = evSpace(E);
  CHECK(A.fiber == std::vector<std::size_t>{2, 2});
  EtaleSheaf back = ultrasheafToEtale(A);
  CHECK(back.p.source.size() == 4);
  CHECK(etaleCheck(back.p).isEtale);
  CHECK(etaNaturality(E));
  CHECK_THROWS_AS(etaleSheaf({FiniteSpace::sierpinski(), FiniteSpace::point(), {0, 0}}), Error);
}

TEST_CASE("the unit at pt(T) is bijective") {
  for (std::size_t n = 1; n <= 3; ++n)
    for (auto& T : enumerateSpaces(n)) {
      INFO(T.str());
      CHECK(etaUnit(T).ok());
    }
}

TEST_CASE("presheaves over the walking arrow round trip") {
  FiniteCategory C = FiniteCategory::arrow();
  auto X = std::make_shared<const AlexVUlt>(C);
  std::size_t n = 0;
  enumerateSetFunctors(C, 2, [&](const SetFunctor& F) {
    Presheaf P(C, F);
    UltraSheaf A = presheafToUltrasheaf(P, X);
    CHECK(ultrasheafValidate(A).ok);
    CHECK(ultrasheafToPresheaf(A) == P);
    ++n;
    return true;
  });
  // (m, n) with m, n <= 2 and a function m -> n: 1+1+1 + 0+1+2 + 0+1+4
  CHECK(n == 11);
}

TEST_CASE("limits and colimits are computed fiberwise") {
  auto X = std::make_shared<const PtSpaceVUlt>(FiniteSpace::sierpinski());
  std::mt19937_64 rng(3);
  for (int k = 0; k < 20; ++k) {
    UltraSheaf A(X, randomSetFunctor(X->points(), 3, rng)), B(X, randomSetFunctor(X->points(), 3, rng));
    SheafCone p = sheafProduct(A, B), s = sheafCoproduct(A, B);
    for (std::size_t a = 0; a < 2; ++a) {
      CHECK(p.apex.fiber[a] == A.fiber[a] * B.fiber[a]);
      CHECK(s.apex.fiber[a] == A.fiber[a] + B.fiber[a]);
    }
  }
  CHECK(terminalSheaf(X).fiber == std::vector<std::size_t>{1, 1});
  CHECK(initialSheaf(X).fiber == std::vector<std::size_t>{0, 0});
}

TEST_CASE("pretopos laws hold on every space with at most three points") {
  SeedTree seed(17);
  std::size_t i = 0;
  for (std::size_t n = 1; n <= 3; ++n)
    for (auto& T : enumerateSpaces(n)) {
      auto X = std::make_shared<const PtSpaceVUlt>(T);
      LawReport rep = pretoposLawSuite(X, 3, 3, seed.child(i++));
      INFO(T.str() << (rep.ok() ? "" : " " + rep.violations.front().law + " " + rep.violations.front().witness));
      CHECK(rep.ok());
    }
}
