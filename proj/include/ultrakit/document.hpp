#pragma once

// JSON documents for spaces, maps, categories and groupoids.
//   space:     {"points": n, "opens": [[...], ...]}
//   map:       {"map": [images], "source": space, "target": space}
//   category:  {"objects": n, "source": [...], "target": [...], "identity": [...], "compose": [[g o f or -1]]}
//   groupoid:  {"T0": space, "T1": space, "s": map, "t": map, "u": map, "inv": map, "m": map}
//              maps are documents or bare image arrays; m lists g o h for the
//              composable pairs (g, h) in lexicographic order.

#include <string>
#include <string_view>

#include <json.hpp>

#include "descent.hpp"
#include "text.hpp"

namespace ultrakit {

using Json = nlohmann::json;

inline Json parseDocument(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    auto [line, col] = lineColumn(text, e.byte == 0 ? 0 : e.byte - 1);
    fail(ErrorKind::ParseError, "line " + std::to_string(line) + " column " + std::to_string(col) + ": " + e.what());
  }
}

namespace detail {

inline const Json& field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) fail(ErrorKind::ParseError, where + ": missing field \"" + key + "\"");
  return j.at(key);
}

inline std::size_t natural(const Json& j, const std::string& where) {
  if (!j.is_number_integer() || j.get<long long>() < 0) fail(ErrorKind::ParseError, where + ": expected a natural number");
  return j.get<std::size_t>();
}

inline std::vector<std::size_t> naturals(const Json& j, const std::string& where) {
  if (!j.is_array()) fail(ErrorKind::ParseError, where + ": expected an array");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(natural(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

inline std::vector<std::size_t> images(const Json& j, const std::string& where) {
  return j.is_object() ? naturals(field(j, "map", where), where + ".map") : naturals(j, where);
}

}  // namespace detail

inline FiniteSpace spaceFromJson(const Json& j, const std::string& where = "space") {
  std::size_t n = detail::natural(detail::field(j, "points", where), where + ".points");
  require(n <= 16, ErrorKind::BoundExceeded, where + ": more than 16 points");
  const Json& os = detail::field(j, "opens", where);
  if (!os.is_array()) fail(ErrorKind::ParseError, where + ".opens: expected an array");
  std::vector<Mask> opens;
  for (std::size_t i = 0; i < os.size(); ++i) {
    Mask m = 0;
    for (auto a : detail::naturals(os[i], where + ".opens[" + std::to_string(i) + "]")) {
      require(a < n, ErrorKind::ParseError, where + ".opens: point " + std::to_string(a) + " outside the space");
      m |= bit(a);
    }
    opens.push_back(m);
  }
  return FiniteSpace::validate(n, opens);
}

inline SpaceMap mapFromJson(const Json& j, const std::string& where = "map") {
  SpaceMap f{spaceFromJson(detail::field(j, "source", where), where + ".source"),
             spaceFromJson(detail::field(j, "target", where), where + ".target"),
             detail::naturals(detail::field(j, "map", where), where + ".map")};
  f.check();
  return f;
}

inline Json toJson(const FiniteSpace& T) { return Json::parse(spaceDocument(T)); }
inline Json toJson(const SpaceMap& f) { return Json::parse(mapDocument(f)); }

inline FiniteCategory categoryFromJson(const Json& j, const std::string& where = "category") {
  std::size_t n = detail::natural(detail::field(j, "objects", where), where + ".objects");
  auto src = detail::naturals(detail::field(j, "source", where), where + ".source");
  auto tgt = detail::naturals(detail::field(j, "target", where), where + ".target");
  auto id = detail::naturals(detail::field(j, "identity", where), where + ".identity");
  const Json& cj = detail::field(j, "compose", where);
  std::size_t A = src.size();
  if (!cj.is_array() || cj.size() != A || tgt.size() != A)
    fail(ErrorKind::ParseError, where + ": compose must be an arrows x arrows table");
  std::vector<std::size_t> comp(A * A, npos);
  for (std::size_t g = 0; g < A; ++g) {
    if (!cj[g].is_array() || cj[g].size() != A) fail(ErrorKind::ParseError, where + ".compose[" + std::to_string(g) + "]: row length");
    for (std::size_t f = 0; f < A; ++f)
      if (cj[g][f].is_number_integer() && cj[g][f].get<long long>() >= 0) comp[g * A + f] = cj[g][f].get<std::size_t>();
  }
  FiniteCategory C(n, src, tgt, id, comp);
  C.validate();
  return C;
}

inline Json toJson(const FiniteCategory& C) {
  Json comp = Json::array();
  for (std::size_t g = 0; g < C.arrows(); ++g) {
    Json row = Json::array();
    for (std::size_t f = 0; f < C.arrows(); ++f) {
      std::size_t h = C.compose(g, f);
      row.push_back(h == npos ? -1 : static_cast<long long>(h));
    }
    comp.push_back(row);
  }
  std::vector<std::size_t> src, tgt, id;
  for (std::size_t f = 0; f < C.arrows(); ++f) {
    src.push_back(C.source(f));
    tgt.push_back(C.target(f));
  }
  for (std::size_t a = 0; a < C.objects(); ++a) id.push_back(C.identity(a));
  return {{"objects", C.objects()}, {"source", src}, {"target", tgt}, {"identity", id}, {"compose", comp}};
}

inline TopGroupoid groupoidFromJson(const Json& j, const std::string& where = "groupoid") {
  TopGroupoid G;
  G.T0 = spaceFromJson(detail::field(j, "T0", where), where + ".T0");
  G.T1 = spaceFromJson(detail::field(j, "T1", where), where + ".T1");
  auto get = [&](const char* key) { return detail::images(detail::field(j, key, where), where + "." + key); };
  G.s = {G.T1, G.T0, get("s")};
  G.t = {G.T1, G.T0, get("t")};
  G.u = {G.T0, G.T1, get("u")};
  G.inv = {G.T1, G.T1, get("inv")};
  for (auto* f : {&G.s, &G.t, &G.u, &G.inv}) f->check();
  for (std::size_t x = 0; x < G.T1.size(); ++x)
    require(G.s.map[x] < G.T0.size() && G.t.map[x] < G.T0.size(), ErrorKind::InvalidGroupoid, "source or target outside T0");
  auto m = get("m");
  std::size_t n1 = G.T1.size();
  G.mult.assign(n1 * n1, npos);
  auto pairs = G.composable();
  require(m.size() == pairs.size(), ErrorKind::InvalidGroupoid,
          "m lists " + std::to_string(m.size()) + " values for " + std::to_string(pairs.size()) + " composable pairs");
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    require(m[i] < n1, ErrorKind::InvalidGroupoid, "composite outside T1");
    G.mult[pairs[i].first * n1 + pairs[i].second] = m[i];
  }
  G.validate();
  return G;
}

inline Json toJson(const TopGroupoid& G) {
  std::vector<std::size_t> m;
  for (auto [g, h] : G.composable()) m.push_back(G.compose(g, h));
  return {{"T0", toJson(G.T0)}, {"T1", toJson(G.T1)}, {"s", G.s.map}, {"t", G.t.map},
          {"u", G.u.map},       {"inv", G.inv.map},   {"m", m}};
}

}  // namespace ultrakit
