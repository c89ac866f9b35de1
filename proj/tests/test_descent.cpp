#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "ultrakit/ultrakit.hpp"

using namespace ultrakit;

namespace {

using SpacePtr = std::shared_ptr<const PtSpaceVUlt>;

SpacePtr pt(const FiniteSpace& T) { return std::make_shared<const PtSpaceVUlt>(T); }

std::size_t distinct(const std::vector<std::size_t>& v) { return std::set<std::size_t>(v.begin(), v.end()).size(); }

}  // namespace

TEST_CASE("kernel of the identity is the trivial groupoid") {
  auto S = pt(FiniteSpace::sierpinski());
  CodescentDiagram K = kernelGroupoid(identityFunctor(S));
  CHECK(K.X1->objects() == S->objects());
  CHECK(K.X2->objects() == S->objects());
  CHECK_FALSE(simplicialViolation(K));
  CHECK(coconeValidate(K, canonicalCocone(identityFunctor(S), K)).ok);
}

TEST_CASE("kernel of the fold map is the pair groupoid") {
  auto X = pt(FiniteSpace::discrete(2)), Z = pt(FiniteSpace::point());
  VUltFunctor pi = spaceFunctor(X, Z, {FiniteSpace::discrete(2), FiniteSpace::point(), {0, 0}});
  CodescentDiagram K = kernelGroupoid(pi);
  CHECK(K.X1->objects() == 4);  // all pairs (x, y)
  CHECK(K.X2->objects() == 8);  // all triples
  CHECK_FALSE(simplicialViolation(K));
  CHECK(coconeValidate(K, canonicalCocone(pi, K)).ok);
  UniversalityReport u = universalityCheck(K, canonicalCocone(pi, K));
  CHECK(u.battery == "battery-v1");
  CHECK(u.apexes.size() == 8);
  CHECK(u.ok());
}

TEST_CASE("descent data for Z/2 on a point are involutions") {
  TopGroupoid G = TopGroupoid::z2();
  auto Y = std::make_shared<const FinSetVUlt>(2);
  DescCategory desc = descCategory(groupoidDiagram(G), Y);
  // subsets of Fin(2) with an involution: {} , {0}, {1} one each, {0,1} two
  CHECK(desc.size() == 5);
  CHECK(distinct(desc.isoClasses()) == 4);
  FiniteCategory C = desc.category();
  CHECK_NOTHROW(C.validate());
  CHECK(countIsoClasses(C) == 4);
}

TEST_CASE("a cocone with a non-coherent component is rejected") {
  TopGroupoid G = TopGroupoid::z2();
  auto Y = std::make_shared<const FinSetVUlt>(2);
  CodescentDiagram D = groupoidDiagram(G);
  DescCategory desc = descCategory(D, Y);
  std::size_t swap = Y->arrowId(3, 3, {1, 0}), id = Y->points().identity(3);
  const DescObject* twisted = nullptr;
  for (auto& o : desc.objects())
    if (o.F.obj[0] == 3 && o.theta[1] == swap) twisted = &o;
  REQUIRE(twisted);
  DescentCocone c{Y, twisted->F, twisted->theta};
  CHECK(coconeValidate(D, c).ok);
  c.theta[0] = swap;  // the unit arrow acts by the swap
  CoconeCheck r = coconeValidate(D, c);
  CHECK_FALSE(r.ok);
  CHECK(r.condition == "unit");
  c.theta[0] = id;
  c.theta[1] = Y->arrowId(3, 3, {0, 0});  // not invertible
  CHECK(coconeValidate(D, c).condition == "invertibility");
}

TEST_CASE("the lifting criterion") {
  auto S = pt(FiniteSpace::sierpinski()), P = pt(FiniteSpace::point()), D2 = pt(FiniteSpace::discrete(2));
  CHECK(effectiveDescentCriterion(identityFunctor(S)).holds());
  CHECK(effectiveDescentCriterion(spaceFunctor(S, P, {FiniteSpace::sierpinski(), FiniteSpace::point(), {0, 0}})).holds());

  CriterionReport miss = effectiveDescentCriterion(spaceFunctor(P, D2, {FiniteSpace::point(), FiniteSpace::discrete(2), {0}}));
  CHECK_FALSE(miss.surjective);
  CHECK_FALSE(miss.witness.empty());

  // surjective and continuous, but the image of {0} is not open
  CriterionReport notOpen = effectiveDescentCriterion(spaceFunctor(D2, S, {FiniteSpace::discrete(2), FiniteSpace::sierpinski(), {0, 1}}));
  CHECK(notOpen.surjective);
  CHECK_FALSE(notOpen.lifting);
  CHECK_FALSE(notOpen.witness.empty());
}

TEST_CASE("a functor missing an object is not universal") {
  auto P = pt(FiniteSpace::point()), D2 = pt(FiniteSpace::discrete(2));
  VUltFunctor pi = spaceFunctor(P, D2, {FiniteSpace::point(), FiniteSpace::discrete(2), {0}});
  CodescentDiagram K = kernelGroupoid(pi);
  UniversalityReport u = universalityCheck(K, canonicalCocone(pi, K));
  CHECK_FALSE(u.ok());
  bool witnessed = false;
  for (auto& a : u.apexes) witnessed = witnessed || (!a.ok() && !a.witness.empty());
  CHECK(witnessed);
}

TEST_CASE("groupoid validation") {
  CHECK_NOTHROW(TopGroupoid::z2().validate());
  CHECK_NOTHROW(TopGroupoid::pair(FiniteSpace::discrete(2)).validate());
  CHECK_NOTHROW(TopGroupoid::trivial(FiniteSpace::sierpinski()).validate());
  CHECK_NOTHROW(TopGroupoid::group({{0, 1, 2}, {1, 2, 0}, {2, 0, 1}}).validate());
  TopGroupoid bad = TopGroupoid::z2();
  bad.mult[1 * 2 + 1] = 1;  // g * g = g
  try {
    bad.validate();
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidGroupoid);
  }
}

TEST_CASE("equivariant sheaves match descent data") {
  struct Case {
    const char* name;
    TopGroupoid G;
    std::size_t classes;
  };
  std::vector<Case> cases = {
      {"z2", TopGroupoid::z2(), 4},
      // maps m -> n of sets with m, n <= 2, up to iso
      {"trivial sierpinski", TopGroupoid::trivial(FiniteSpace::sierpinski()), 8},
      // descent along the pair groupoid collapses to sets of size <= 2
      {"pair discrete2", TopGroupoid::pair(FiniteSpace::discrete(2)), 3},
      // Z/3 on a point: a set of size <= 2 with a Z/3 action is trivial
      {"z3", TopGroupoid::group({{0, 1, 2}, {1, 2, 0}, {2, 0, 1}}), 3},
  };
  for (auto& c : cases) {
    EquivalenceReport r = equivariantComparison(c.G, 2);
    INFO(c.name << " " << r.witness);
    CHECK(r.ok());
    CHECK(r.sheafClasses == c.classes);
    CHECK(r.descClasses == c.classes);
  }
}
