#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <sstream>

#include "ultrakit/document.hpp"

using namespace ultrakit;

namespace {

std::string slurp(const std::string& name) {
  std::ifstream in(std::string(ULTRAKIT_DATA_DIR) + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ErrorKind kindOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error");
  return ErrorKind::ParseError;
}

}  // namespace

TEST_CASE("syntax errors carry line and column") {
  try {
    parseDocument("{\n  \"points\": 2,\n  \"opens\": [[], [0,]]\n}");
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ParseError);
    CHECK_THAT(e.detail(), Catch::Matchers::StartsWith("line 3 column"));
  }
  CHECK_THROWS(parseDocument(slurp("bad_syntax.json")));
}

TEST_CASE("structural errors name the field") {
  try {
    spaceFromJson(parseDocument(R"({"points": 2})"));
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK_THAT(e.detail(), Catch::Matchers::ContainsSubstring("opens"));
  }
  CHECK(kindOf([] { spaceFromJson(parseDocument(R"({"points": 2, "opens": [[], [5], [0, 1]]})")); }) == ErrorKind::ParseError);
  CHECK(kindOf([] { spaceFromJson(parseDocument(R"({"points": 20, "opens": []})")); }) == ErrorKind::BoundExceeded);
  CHECK(kindOf([] { spaceFromJson(parseDocument(R"({"points": 2, "opens": [[], [0]]})")); }) != ErrorKind::ParseError);
}

TEST_CASE("documents round trip") {
  for (auto& T : enumerateSpaces(3)) CHECK(spaceFromJson(toJson(T)) == T);
  SpaceMap f{FiniteSpace::sierpinski(), FiniteSpace::point(), {0, 0}};
  SpaceMap g = mapFromJson(toJson(f));
  CHECK(g.map == f.map);
  CHECK(g.source == f.source);
  for (auto& C : enumerateSmallCategories(2, 1)) CHECK(categoryFromJson(toJson(C)) == C);
  TopGroupoid G = TopGroupoid::pair(FiniteSpace::discrete(2));
  TopGroupoid H = groupoidFromJson(toJson(G));
  CHECK(H.mult == G.mult);
  CHECK(H.T1 == G.T1);
}

TEST_CASE("shipped data files") {
  CHECK_NOTHROW(spaceFromJson(parseDocument(slurp("sierpinski.json"))));
  CHECK(categoriesIsomorphic(categoryFromJson(parseDocument(slurp("walking_arrow.json"))), FiniteCategory::arrow()));
  CHECK_FALSE(etaleCheck(mapFromJson(parseDocument(slurp("sierpinski_collapse.json")))).isEtale);
  CHECK(etaleCheck(mapFromJson(parseDocument(slurp("discrete_fold.json")))).isEtale);
  TopGroupoid z2 = groupoidFromJson(parseDocument(slurp("z2_on_point.json")));
  CHECK(z2.mult == TopGroupoid::z2().mult);
}

TEST_CASE("an inconsistent groupoid document is refused") {
  Json j = toJson(TopGroupoid::z2());
  j["m"] = {0, 1, 1, 1};
  CHECK(kindOf([&] { groupoidFromJson(j); }) == ErrorKind::InvalidGroupoid);
  j["m"] = {0, 1};
  CHECK(kindOf([&] { groupoidFromJson(j); }) == ErrorKind::InvalidGroupoid);
}
