#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "random.hpp"
#include "report.hpp"
#include "vult.hpp"

namespace ultrakit {

using Table = std::vector<std::size_t>;

// A functor from a finite category to finite sets; fiber a is {0, ..., fiber[a]-1}.
struct SetFunctor {
  std::vector<std::size_t> fiber;
  std::vector<Table> action;  // indexed by arrow

  friend bool operator==(const SetFunctor& x, const SetFunctor& y) { return x.fiber == y.fiber && x.action == y.action; }
};

// Components per object.
using SetNat = std::vector<Table>;

inline std::optional<std::string> setFunctorViolation(const FiniteCategory& C, const SetFunctor& F) {
  if (F.fiber.size() != C.objects() || F.action.size() != C.arrows()) return "fiber or action table count";
  for (std::size_t f = 0; f < C.arrows(); ++f) {
    const auto& t = F.action[f];
    if (t.size() != F.fiber[C.source(f)]) return "action of arrow " + std::to_string(f) + " has the wrong length";
    for (auto v : t)
      if (v >= F.fiber[C.target(f)]) return "action of arrow " + std::to_string(f) + " leaves its codomain";
  }
  for (std::size_t a = 0; a < C.objects(); ++a)
    for (std::size_t i = 0; i < F.fiber[a]; ++i)
      if (F.action[C.identity(a)][i] != i) return "identity of object " + std::to_string(a) + " acts nontrivially";
  for (std::size_t g = 0; g < C.arrows(); ++g)
    for (std::size_t f = 0; f < C.arrows(); ++f) {
      std::size_t h = C.compose(g, f);
      if (h == npos) continue;
      for (std::size_t i = 0; i < F.fiber[C.source(f)]; ++i)
        if (F.action[h][i] != F.action[g][F.action[f][i]])
          return "composite " + std::to_string(g) + "o" + std::to_string(f) + " differs at element " + std::to_string(i);
    }
  return std::nullopt;
}

inline bool isNatural(const FiniteCategory& C, const SetFunctor& A, const SetFunctor& B, const SetNat& h) {
  if (h.size() != C.objects()) return false;
  for (std::size_t a = 0; a < C.objects(); ++a) {
    if (h[a].size() != A.fiber[a]) return false;
    for (auto v : h[a])
      if (v >= B.fiber[a]) return false;
  }
  for (std::size_t f = 0; f < C.arrows(); ++f) {
    std::size_t a = C.source(f), b = C.target(f);
    for (std::size_t i = 0; i < A.fiber[a]; ++i)
      if (h[b][A.action[f][i]] != B.action[f][h[a][i]]) return false;
  }
  return true;
}

inline SetNat composeNat(const SetNat& k, const SetNat& h) {
  SetNat out(h.size());
  for (std::size_t a = 0; a < h.size(); ++a)
    for (auto v : h[a]) out[a].push_back(k[a][v]);
  return out;
}

inline SetNat identityNat(const SetFunctor& A) {
  SetNat out;
  for (auto n : A.fiber) {
    Table t(n);
    std::iota(t.begin(), t.end(), 0);
    out.push_back(t);
  }
  return out;
}

namespace detail {

// Tables A_a -> B_a for one object, visited in odometer order (or a random order).
template <class Visit>
bool forEachTable(std::size_t n, std::size_t m, std::mt19937_64* rng, Visit visit) {
  if (n == 0) return visit(Table{});
  if (m == 0) return true;
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= m;
  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), 0);
  if (rng) std::shuffle(order.begin(), order.end(), *rng);
  for (auto code : order) {
    Table t(n);
    for (std::size_t i = 0; i < n; ++i) {
      t[i] = code % m;
      code /= m;
    }
    if (!visit(t)) return false;
  }
  return true;
}

}  // namespace detail

// Natural transformations A => B; the visitor returns false to stop.
template <class Visit>
void enumerateNat(const FiniteCategory& C, const SetFunctor& A, const SetFunctor& B, Visit visit, std::mt19937_64* rng = nullptr) {
  std::size_t n = C.objects();
  SetNat h(n);
  std::function<bool(std::size_t)> rec = [&](std::size_t a) -> bool {
    if (a == n) return visit(h);
    return detail::forEachTable(A.fiber[a], B.fiber[a], rng, [&](const Table& t) {
      h[a] = t;
      for (std::size_t f = 0; f < C.arrows(); ++f) {
        std::size_t s = C.source(f), u = C.target(f);
        if (std::max(s, u) != a) continue;
        for (std::size_t i = 0; i < A.fiber[s]; ++i)
          if (h[u][A.action[f][i]] != B.action[f][h[s][i]]) return true;
      }
      return rec(a + 1);
    });
  };
  rec(0);
}

inline std::size_t countNat(const FiniteCategory& C, const SetFunctor& A, const SetFunctor& B) {
  std::size_t count = 0;
  enumerateNat(C, A, B, [&](const SetNat&) {
    ++count;
    return true;
  });
  return count;
}

inline std::optional<SetNat> randomNat(const FiniteCategory& C, const SetFunctor& A, const SetFunctor& B, std::mt19937_64& rng) {
  std::optional<SetNat> out;
  enumerateNat(
      C, A, B,
      [&](const SetNat& h) {
        out = h;
        return false;
      },
      &rng);
  return out;
}

// Action tables for fixed fibers, arrows filled in index order.
template <class Visit>
bool searchActions(const FiniteCategory& C, const std::vector<std::size_t>& fiber, std::mt19937_64* rng, Visit visit) {
  std::size_t A = C.arrows();
  std::vector<std::vector<std::array<std::size_t, 3>>> constraints(A);
  for (std::size_t g = 0; g < A; ++g)
    for (std::size_t f = 0; f < A; ++f) {
      std::size_t h = C.compose(g, f);
      if (h != npos) constraints[std::max({g, f, h})].push_back({g, f, h});
    }
  SetFunctor F{fiber, std::vector<Table>(A)};
  std::function<bool(std::size_t)> rec = [&](std::size_t k) -> bool {
    if (k == A) return visit(F);
    auto ok = [&]() {
      for (auto& [g, f, h] : constraints[k])
        for (std::size_t i = 0; i < fiber[C.source(f)]; ++i)
          if (F.action[h][i] != F.action[g][F.action[f][i]]) return false;
      return true;
    };
    std::size_t a = C.source(k);
    if (C.identity(a) == k) {
      F.action[k].resize(fiber[a]);
      std::iota(F.action[k].begin(), F.action[k].end(), 0);
      return ok() ? rec(k + 1) : true;
    }
    return detail::forEachTable(fiber[a], fiber[C.target(k)], rng, [&](const Table& t) {
      F.action[k] = t;
      return ok() ? rec(k + 1) : true;
    });
  };
  return rec(0);
}

// Every set functor with fibers of size <= bound.
template <class Visit>
void enumerateSetFunctors(const FiniteCategory& C, std::size_t bound, Visit visit) {
  std::size_t n = C.objects();
  std::vector<std::size_t> fiber(n, 0);
  while (true) {
    if (!searchActions(C, fiber, nullptr, visit)) return;
    std::size_t i = 0;
    while (i < n && ++fiber[i] > bound) fiber[i++] = 0;
    if (i == n) return;
  }
}

inline SetFunctor randomSetFunctor(const FiniteCategory& C, std::size_t bound, std::mt19937_64& rng) {
  while (true) {
    std::vector<std::size_t> fiber(C.objects());
    for (auto& z : fiber) z = below(rng, bound + 1);
    std::optional<SetFunctor> out;
    searchActions(C, fiber, &rng, [&](const SetFunctor& F) {
      out = F;
      return false;
    });
    if (out) return *out;
  }
}

// Smallest relabelled encoding over all permutations of every fiber.
inline std::vector<std::size_t> canonicalCode(const FiniteCategory& C, const SetFunctor& F) {
  std::size_t n = C.objects();
  std::vector<Table> perm(n);
  for (std::size_t a = 0; a < n; ++a) {
    perm[a].resize(F.fiber[a]);
    std::iota(perm[a].begin(), perm[a].end(), 0);
  }
  std::vector<std::size_t> best;
  std::function<void(std::size_t)> rec = [&](std::size_t a) {
    if (a == n) {
      std::vector<std::size_t> code(F.fiber);
      for (std::size_t f = 0; f < C.arrows(); ++f) {
        std::size_t s = C.source(f), t = C.target(f);
        Table row(F.fiber[s]);
        for (std::size_t i = 0; i < F.fiber[s]; ++i) row[perm[s][i]] = perm[t][F.action[f][i]];
        code.insert(code.end(), row.begin(), row.end());
      }
      if (best.empty() || code < best) best = code;
      return;
    }
    std::sort(perm[a].begin(), perm[a].end());
    do rec(a + 1);
    while (std::next_permutation(perm[a].begin(), perm[a].end()));
  };
  rec(0);
  return best;
}

// ---- ultrasheaves --------------------------------------------------------

// A functor X -> Set.  The action is stored on star-arrows; on an arrow of
// type mu it is forced: element i goes to the class of the constant family at
// the star-action of the arrow's limit.  For PtSpace and Alex instances this
// covers every arrow (posetal homs, diagonal factorisation).
struct UltraSheaf : SetFunctor {
  VUltPtr X;

  UltraSheaf() = default;
  UltraSheaf(VUltPtr x, SetFunctor F) : SetFunctor(std::move(F)), X(std::move(x)) {}
};

inline UPElement actionOn(const UltraSheaf& A, const UltraArrow& f, std::size_t i) {
  std::size_t id = starOf(*A.X, f);
  require(i < A.fiber.at(f.dom), ErrorKind::TypeMismatch, "element outside the fiber");
  return UPElement::constant(f.mu.carrier(), A.action[id][i]);
}

inline BoundedFamily fiberFamily(const UltraSheaf& A, const ObjectFamily& fam) {
  std::size_t bound = 0;
  for (auto b : fam.values()) bound = std::max(bound, A.fiber[b]);
  BoundedFamily bf{fam.index(), bound, {}};
  for (std::size_t j = 0; j < bound; ++j) bf.fibers.push_back(fam.where([&](std::size_t b) { return A.fiber[b] > j; }));
  return bf;
}

inline ValidationReport ultrasheafValidate(const UltraSheaf& A, const ProbeConfig& cfg = {}) {
  ValidationReport rep{true, cfg.version, 0, {}};
  const VUlt& X = *A.X;
  if (auto v = setFunctorViolation(X.points(), A)) {
    rep.ok = false;
    rep.witness = *v;
    return rep;
  }
  forEachProbe(X, cfg, [&](std::size_t a, const Ultrafilter& mu, const ObjectFamily& fam) {
    if (!rep.ok || A.fiber[a] == 0) return;
    ++rep.queries;
    for (auto& f : vultHom(X, a, mu, fam)) {
      UltraProductSet u = uprodEnumerate(mu, fiberFamily(A, fam));
      for (std::size_t i = 0; i < A.fiber[a] && rep.ok; ++i) {
        UPElement x = actionOn(A, f, i);
        if (!u.isElement(x)) {
          rep.ok = false;
          rep.witness = "action of " + f.str() + " leaves the ultraproduct";
          return;
        }
        for (auto& gs : probeContinuations(X, mu, fam, 2)) {
          UltraArrow h = vultCompose(X, f, gs);
          UPElement lhs = actionOn(A, h, i);
          std::size_t v = ultralimit(mu, x);
          auto nested = gs.map([&](const UltraArrow& g) {
            return v < A.fiber[g.dom] ? actionOn(A, g, v) : UPElement::constant(g.mu.carrier(), 0);
          });
          UPElement rhs = uncurry(h.mu.sumInfo(), nested);
          if (!ufamEq(lhs, rhs, h.mu)) {
            rep.ok = false;
            rep.witness = "composite through " + f.str() + " disagrees at element " + std::to_string(i);
            return;
          }
        }
      }
    }
    UPElement e = actionOn(A, vultIdentity(X, a), 0);
    if (ultralimit(Ultrafilter::star(), e) != 0) {
      rep.ok = false;
      rep.witness = "identity of " + std::to_string(a) + " is not the unit";
    }
  });
  return rep;
}

// ---- etale sheaves over finite spaces ------------------------------------

struct EtaleSheaf {
  SpaceMap p;
};

inline EtaleSheaf etaleSheaf(SpaceMap p) {
  if (!etaleCheck(p).isEtale) fail(ErrorKind::InvalidFamily, "projection is not a local homeomorphism: " + mapDocument(p));
  return {std::move(p)};
}

inline std::vector<std::size_t> fiberElements(const SpaceMap& p, std::size_t a) {
  std::vector<std::size_t> out;
  for (std::size_t e = 0; e < p.source.size(); ++e)
    if (p(e) == a) out.push_back(e);
  return out;
}

inline std::shared_ptr<const PtSpaceVUlt> asSpace(const VUltPtr& X) {
  auto S = std::dynamic_pointer_cast<const PtSpaceVUlt>(X);
  require(S != nullptr, ErrorKind::TypeMismatch, X->name() + " is not a space instance");
  return S;
}

// Stalks, with a <= b acting by the unique lift in up(e).
inline UltraSheaf evSpace(const EtaleSheaf& E, std::shared_ptr<const PtSpaceVUlt> X) {
  const SpaceMap& p = E.p;
  require(X->space() == p.target, ErrorKind::TypeMismatch, "base space differs");
  const auto& P = X->points();
  std::vector<std::vector<std::size_t>> elems(p.target.size());
  SetFunctor F;
  for (std::size_t a = 0; a < p.target.size(); ++a) {
    elems[a] = fiberElements(p, a);
    F.fiber.push_back(elems[a].size());
  }
  for (std::size_t f = 0; f < P.arrows(); ++f) {
    std::size_t a = P.source(f), b = P.target(f);
    Table t;
    for (auto e : elems[a]) {
      Mask lift = p.source.up(e) & p.fiber(b);
      require(std::popcount(lift) == 1, ErrorKind::TheoremMismatch, "stalk transport is not unique");
      std::size_t x = static_cast<std::size_t>(std::countr_zero(lift));
      t.push_back(static_cast<std::size_t>(std::find(elems[b].begin(), elems[b].end(), x) - elems[b].begin()));
    }
    F.action.push_back(t);
  }
  return UltraSheaf(X, std::move(F));
}

inline UltraSheaf evSpace(const EtaleSheaf& E) { return evSpace(E, std::make_shared<const PtSpaceVUlt>(E.p.target)); }

// Total space of the disjoint union of fibers; (a, i) lies below (b, A(a<=b)(i)).
inline EtaleSheaf ultrasheafToEtale(const UltraSheaf& A) {
  auto X = asSpace(A.X);
  const FiniteSpace& T = X->space();
  const auto& P = X->points();
  if (auto v = setFunctorViolation(P, A)) fail(ErrorKind::FunctorialityViolation, *v);
  std::vector<std::size_t> offset(T.size() + 1, 0);
  for (std::size_t a = 0; a < T.size(); ++a) offset[a + 1] = offset[a] + A.fiber[a];
  std::size_t N = offset.back();
  require(N <= kMaxPoints, ErrorKind::BoundExceeded, "total space above " + std::to_string(kMaxPoints) + " points");
  std::vector<Mask> up(N, 0);
  std::vector<std::size_t> proj(N);
  for (std::size_t a = 0; a < T.size(); ++a)
    for (std::size_t i = 0; i < A.fiber[a]; ++i) {
      proj[offset[a] + i] = a;
      for (std::size_t b = 0; b < T.size(); ++b)
        if (T.leq(a, b)) up[offset[a] + i] |= bit(offset[b] + A.action[P.hom(a, b)[0]][i]);
    }
  FiniteSpace E = FiniteSpace::fromPreorder(up);
  // B is open iff every action restricts to B
  for (Mask B = 0; B <= fullMask(N); ++B) {
    bool restricts = true;
    for (std::size_t f = 0; f < P.arrows() && restricts; ++f) {
      std::size_t a = P.source(f), b = P.target(f);
      for (std::size_t i = 0; i < A.fiber[a]; ++i)
        if (has(B, offset[a] + i) && !has(B, offset[b] + A.action[f][i])) restricts = false;
    }
    if (restricts != E.isOpen(B)) fail(ErrorKind::TheoremMismatch, "open sets of the total space disagree");
    if (B == fullMask(N)) break;
  }
  return etaleSheaf(SpaceMap{E, T, proj});
}

// h : E -> F over the common base is a homeomorphism.
inline bool isHomeomorphismOver(const SpaceMap& p, const SpaceMap& q, const std::vector<std::size_t>& h) {
  if (h.size() != p.source.size() || p.source.size() != q.source.size() || !(p.target == q.target)) return false;
  Mask seen = 0;
  for (std::size_t e = 0; e < h.size(); ++e) {
    if (h[e] >= q.source.size() || q(h[e]) != p(e)) return false;
    seen |= bit(h[e]);
  }
  if (seen != q.source.full()) return false;
  SpaceMap fwd{p.source, q.source, h};
  std::vector<std::size_t> inv(h.size());
  for (std::size_t e = 0; e < h.size(); ++e) inv[h[e]] = e;
  SpaceMap bwd{q.source, p.source, inv};
  return continuousByOpens(fwd) && continuousByOpens(bwd);
}

// ---- presheaves and the Alexandroff instance -----------------------------

struct Presheaf : SetFunctor {
  FiniteCategory C;

  Presheaf() = default;
  Presheaf(FiniteCategory c, SetFunctor F) : SetFunctor(std::move(F)), C(std::move(c)) {}
};

inline UltraSheaf presheafToUltrasheaf(const Presheaf& P, std::shared_ptr<const AlexVUlt> X) {
  if (auto v = setFunctorViolation(P.C, P)) fail(ErrorKind::FunctorialityViolation, *v);
  require(X->category() == P.C, ErrorKind::TypeMismatch, "presheaf over a different category");
  const auto& Q = X->points();
  SetFunctor F{P.fiber, std::vector<Table>(Q.arrows())};
  for (std::size_t k = 0; k < Q.arrows(); ++k) F.action[k] = P.action[X->payloadOf(k).at(0)];
  return UltraSheaf(X, std::move(F));
}

inline UltraSheaf presheafToUltrasheaf(const Presheaf& P) { return presheafToUltrasheaf(P, std::make_shared<const AlexVUlt>(P.C)); }

// Restriction to principal arrows: f : a -> b read off the delta_1 arrow a -> (a, b).
inline Presheaf ultrasheafToPresheaf(const UltraSheaf& A) {
  auto X = std::dynamic_pointer_cast<const AlexVUlt>(A.X);
  require(X != nullptr, ErrorKind::TypeMismatch, A.X->name() + " is not an Alexandroff instance");
  const FiniteCategory& C = X->category();
  Ultrafilter d1 = Ultrafilter::principal(IndexSet::fin(2), 1);
  SetFunctor F{A.fiber, std::vector<Table>(C.arrows())};
  for (std::size_t f = 0; f < C.arrows(); ++f) {
    std::size_t a = C.source(f), b = C.target(f);
    ObjectFamily fam = ObjectFamily::tabulate(IndexSet::fin(2), 0, 1, [&](std::size_t s) { return s == 0 ? a : b; });
    for (auto& arr : vultHom(*X, a, d1, fam)) {
      if (arr.payload != Payload{f}) continue;
      for (std::size_t i = 0; i < A.fiber[a]; ++i) F.action[f].push_back(ultralimit(d1, actionOn(A, arr, i)));
    }
  }
  return Presheaf(C, std::move(F));
}

// ---- finite limits and colimits ------------------------------------------

struct SheafDiagram {
  FiniteCategory shape;
  std::vector<UltraSheaf> objects;
  std::vector<SetNat> arrows;  // per shape arrow
};

struct SheafCone {
  UltraSheaf apex;
  std::vector<SetNat> legs;  // per shape object
};

// Shapes with no composable pair of non-identity arrows.
inline FiniteCategory freeShape(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& gens) {
  std::vector<std::size_t> src, tgt, id(n);
  for (std::size_t a = 0; a < n; ++a) {
    id[a] = src.size();
    src.push_back(a);
    tgt.push_back(a);
  }
  for (auto [s, t] : gens) {
    src.push_back(s);
    tgt.push_back(t);
  }
  std::size_t A = src.size();
  std::vector<std::size_t> comp(A * A, npos);
  for (std::size_t g = 0; g < A; ++g)
    for (std::size_t f = 0; f < A; ++f) {
      if (tgt[f] != src[g]) continue;
      if (g == id[src[g]]) comp[g * A + f] = f;
      else if (f == id[tgt[f]]) comp[g * A + f] = g;
    }
  FiniteCategory C(n, src, tgt, id, comp);
  C.validate();
  return C;
}
inline FiniteCategory shapeDiscrete(std::size_t n) { return freeShape(n, {}); }
inline FiniteCategory shapeParallel() { return freeShape(2, {{0, 1}, {0, 1}}); }
inline FiniteCategory shapeCospan() { return freeShape(3, {{0, 2}, {1, 2}}); }
inline FiniteCategory shapeSpan() { return freeShape(3, {{2, 0}, {2, 1}}); }

inline void checkDiagram(const SheafDiagram& D) {
  const auto& J = D.shape;
  require(D.objects.size() == J.objects() && D.arrows.size() == J.arrows(), ErrorKind::InvalidFamily, "diagram size");
  for (std::size_t u = 0; u < J.arrows(); ++u) {
    const auto& A = D.objects[J.source(u)];
    const auto& B = D.objects[J.target(u)];
    require(isNatural(A.X->points(), A, B, D.arrows[u]), ErrorKind::FunctorialityViolation,
            "diagram arrow " + std::to_string(u) + " is not natural");
  }
}

inline SheafCone ultrasheafLimit(const VUltPtr& X, const SheafDiagram& D) {
  checkDiagram(D);
  const auto& J = D.shape;
  const auto& P = X->points();
  std::size_t nJ = J.objects();
  SheafCone cone{UltraSheaf(X, {}), std::vector<SetNat>(nJ, SetNat(P.objects()))};
  std::vector<std::vector<std::vector<std::size_t>>> tuples(P.objects());
  std::vector<std::map<std::vector<std::size_t>, std::size_t>> index(P.objects());
  for (std::size_t a = 0; a < P.objects(); ++a) {
    std::vector<std::size_t> t(nJ, 0);
    bool empty = false;
    for (std::size_t j = 0; j < nJ; ++j) empty = empty || D.objects[j].fiber[a] == 0;
    while (!empty) {
      bool ok = true;
      for (std::size_t u = 0; u < J.arrows() && ok; ++u) ok = D.arrows[u][a][t[J.source(u)]] == t[J.target(u)];
      if (ok) {
        index[a][t] = tuples[a].size();
        tuples[a].push_back(t);
      }
      std::size_t j = 0;
      while (j < nJ && ++t[j] == D.objects[j].fiber[a]) t[j++] = 0;
      if (j == nJ) break;
    }
    cone.apex.fiber.push_back(tuples[a].size());
    for (std::size_t j = 0; j < nJ; ++j)
      for (auto& tu : tuples[a]) cone.legs[j][a].push_back(tu[j]);
  }
  for (std::size_t f = 0; f < P.arrows(); ++f) {
    std::size_t a = P.source(f), b = P.target(f);
    Table row;
    for (auto& tu : tuples[a]) {
      std::vector<std::size_t> img(nJ);
      for (std::size_t j = 0; j < nJ; ++j) img[j] = D.objects[j].action[f][tu[j]];
      row.push_back(index[b].at(img));
    }
    cone.apex.action.push_back(row);
  }
  return cone;
}

// Legs point into the apex (cocone).
inline SheafCone ultrasheafColimit(const VUltPtr& X, const SheafDiagram& D) {
  checkDiagram(D);
  const auto& J = D.shape;
  const auto& P = X->points();
  std::size_t nJ = J.objects();
  SheafCone co{UltraSheaf(X, {}), std::vector<SetNat>(nJ, SetNat(P.objects()))};
  std::vector<std::vector<std::size_t>> offset(P.objects()), cls(P.objects());
  for (std::size_t a = 0; a < P.objects(); ++a) {
    offset[a].assign(nJ + 1, 0);
    for (std::size_t j = 0; j < nJ; ++j) offset[a][j + 1] = offset[a][j] + D.objects[j].fiber[a];
    std::vector<std::size_t> parent(offset[a][nJ]);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<std::size_t(std::size_t)> root = [&](std::size_t x) { return parent[x] == x ? x : parent[x] = root(parent[x]); };
    for (std::size_t u = 0; u < J.arrows(); ++u) {
      std::size_t s = J.source(u), t = J.target(u);
      for (std::size_t i = 0; i < D.objects[s].fiber[a]; ++i) {
        std::size_t x = root(offset[a][s] + i), y = root(offset[a][t] + D.arrows[u][a][i]);
        if (x != y) parent[std::max(x, y)] = std::min(x, y);
      }
    }
    std::map<std::size_t, std::size_t> number;
    cls[a].resize(parent.size());
    for (std::size_t x = 0; x < parent.size(); ++x) {
      std::size_t r = root(x);
      auto it = number.find(r);
      if (it == number.end()) it = number.emplace(r, number.size()).first;
      cls[a][x] = it->second;
    }
    co.apex.fiber.push_back(number.size());
    for (std::size_t j = 0; j < nJ; ++j)
      for (std::size_t i = 0; i < D.objects[j].fiber[a]; ++i) co.legs[j][a].push_back(cls[a][offset[a][j] + i]);
  }
  for (std::size_t f = 0; f < P.arrows(); ++f) {
    std::size_t a = P.source(f), b = P.target(f);
    Table row(co.apex.fiber[a], npos);
    for (std::size_t j = 0; j < nJ; ++j)
      for (std::size_t i = 0; i < D.objects[j].fiber[a]; ++i) {
        std::size_t c = cls[a][offset[a][j] + i], img = cls[b][offset[b][j] + D.objects[j].action[f][i]];
        if (row[c] != npos && row[c] != img) fail(ErrorKind::FunctorialityViolation, "induced action is not well defined");
        row[c] = img;
      }
    co.apex.action.push_back(row);
  }
  return co;
}

inline SheafCone sheafProduct(const UltraSheaf& A, const UltraSheaf& B) {
  return ultrasheafLimit(A.X, {shapeDiscrete(2), {A, B}, {identityNat(A), identityNat(B)}});
}
inline SheafCone sheafCoproduct(const UltraSheaf& A, const UltraSheaf& B) {
  return ultrasheafColimit(A.X, {shapeDiscrete(2), {A, B}, {identityNat(A), identityNat(B)}});
}
inline SheafCone sheafPullback(const UltraSheaf& A, const UltraSheaf& B, const UltraSheaf& C, const SetNat& f, const SetNat& g) {
  return ultrasheafLimit(A.X, {shapeCospan(), {A, B, C}, {identityNat(A), identityNat(B), identityNat(C), f, g}});
}
inline SheafCone sheafEqualizer(const UltraSheaf& A, const UltraSheaf& B, const SetNat& f, const SetNat& g) {
  return ultrasheafLimit(A.X, {shapeParallel(), {A, B}, {identityNat(A), identityNat(B), f, g}});
}
inline SheafCone sheafCoequalizer(const UltraSheaf& A, const UltraSheaf& B, const SetNat& f, const SetNat& g) {
  return ultrasheafColimit(A.X, {shapeParallel(), {A, B}, {identityNat(A), identityNat(B), f, g}});
}
inline UltraSheaf terminalSheaf(const VUltPtr& X) { return ultrasheafLimit(X, {shapeDiscrete(0), {}, {}}).apex; }
inline UltraSheaf initialSheaf(const VUltPtr& X) { return ultrasheafColimit(X, {shapeDiscrete(0), {}, {}}).apex; }

inline bool injectiveNat(const SetNat& h) {
  for (auto& t : h) {
    auto s = t;
    std::sort(s.begin(), s.end());
    if (std::adjacent_find(s.begin(), s.end()) != s.end()) return false;
  }
  return true;
}
inline bool surjectiveNat(const SetNat& h, const SetFunctor& B) {
  for (std::size_t a = 0; a < h.size(); ++a) {
    std::vector<bool> hit(B.fiber[a], false);
    for (auto v : h[a]) hit[v] = true;
    if (std::find(hit.begin(), hit.end(), false) != hit.end()) return false;
  }
  return true;
}
inline bool allEmpty(const SetFunctor& A) {
  return std::all_of(A.fiber.begin(), A.fiber.end(), [](std::size_t z) { return z == 0; });
}

// ---- pretopos laws -------------------------------------------------------

namespace detail {

inline std::string fibersStr(const SetFunctor& A) {
  std::string s = "[";
  for (std::size_t a = 0; a < A.fiber.size(); ++a) s += (a ? "," : "") + std::to_string(A.fiber[a]);
  return s + "]";
}

// Smallest action-closed equivalence relation containing random merges.
inline std::vector<Table> randomCongruence(const FiniteCategory& C, const SetFunctor& A, std::mt19937_64& rng) {
  std::vector<Table> cls(C.objects());
  for (std::size_t a = 0; a < C.objects(); ++a) {
    cls[a].resize(A.fiber[a]);
    std::iota(cls[a].begin(), cls[a].end(), 0);
  }
  auto merge = [&](std::size_t a, std::size_t x, std::size_t y) {
    std::size_t cx = cls[a][x], cy = cls[a][y];
    if (cx == cy) return false;
    for (auto& c : cls[a])
      if (c == std::max(cx, cy)) c = std::min(cx, cy);
    return true;
  };
  for (std::size_t a = 0; a < C.objects(); ++a)
    if (A.fiber[a] > 1 && below(rng, 2)) merge(a, below(rng, A.fiber[a]), below(rng, A.fiber[a]));
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t f = 0; f < C.arrows(); ++f) {
      std::size_t a = C.source(f), b = C.target(f);
      for (std::size_t x = 0; x < A.fiber[a]; ++x)
        for (std::size_t y = 0; y < A.fiber[a]; ++y)
          if (cls[a][x] == cls[a][y] && merge(b, A.action[f][x], A.action[f][y])) changed = true;
    }
  }
  return cls;
}

}  // namespace detail

// The relation as a subsheaf of A x A, with its two projections.
struct Relation {
  UltraSheaf R;
  SetNat first, second;
};

inline Relation relationSheaf(const UltraSheaf& A, const std::vector<Table>& cls) {
  const auto& P = A.X->points();
  Relation rel{UltraSheaf(A.X, {}), SetNat(P.objects()), SetNat(P.objects())};
  std::vector<std::map<std::pair<std::size_t, std::size_t>, std::size_t>> idx(P.objects());
  for (std::size_t a = 0; a < P.objects(); ++a) {
    for (std::size_t x = 0; x < A.fiber[a]; ++x)
      for (std::size_t y = 0; y < A.fiber[a]; ++y)
        if (cls[a][x] == cls[a][y]) {
          idx[a][{x, y}] = rel.first[a].size();
          rel.first[a].push_back(x);
          rel.second[a].push_back(y);
        }
    rel.R.fiber.push_back(rel.first[a].size());
  }
  for (std::size_t f = 0; f < P.arrows(); ++f) {
    std::size_t a = P.source(f), b = P.target(f);
    Table row;
    for (std::size_t k = 0; k < rel.first[a].size(); ++k)
      row.push_back(idx[b].at({A.action[f][rel.first[a][k]], A.action[f][rel.second[a][k]]}));
    rel.R.action.push_back(row);
  }
  return rel;
}

inline LawReport pretoposLawSuite(const VUltPtr& X, std::size_t bound, std::size_t instances, const SeedTree& seed,
                                  std::size_t firstInstance = 0) {
  LawReport rep;
  const auto& P = X->points();
  for (std::size_t k = 0; k < instances; ++k) {
    std::size_t inst = firstInstance + k;
    auto rng = seed.child(inst).engine();
    ++rep.instances;
    auto check = [&](bool ok, const std::string& law, const std::string& witness) {
      ++rep.checks;
      if (!ok) rep.violations.push_back({inst, law, witness});
    };
    UltraSheaf A(X, randomSetFunctor(P, bound, rng));
    UltraSheaf B(X, randomSetFunctor(P, bound, rng));
    UltraSheaf C(X, randomSetFunctor(P, bound, rng));
    for (auto* S : {&A, &B, &C}) {
      auto v = setFunctorViolation(P, *S);
      check(!v, "generated sheaf", v.value_or(""));
    }
    UltraSheaf zero = initialSheaf(X), one = terminalSheaf(X);
    check(allEmpty(zero) && countNat(P, zero, A) == 1, "initial object", detail::fibersStr(A));
    check(countNat(P, A, one) == 1, "terminal object", detail::fibersStr(A));
    check(countNat(P, A, zero) == 0 || allEmpty(A), "strict initial object", detail::fibersStr(A));

    SheafCone prod = sheafProduct(A, B);
    bool prodOk = !setFunctorViolation(P, prod.apex);
    for (std::size_t a = 0; a < P.objects(); ++a) prodOk = prodOk && prod.apex.fiber[a] == A.fiber[a] * B.fiber[a];
    check(prodOk, "fiberwise product", detail::fibersStr(A) + "x" + detail::fibersStr(B));

    SheafCone sum = sheafCoproduct(A, B);
    const UltraSheaf& S = sum.apex;
    check(!setFunctorViolation(P, S), "coproduct validates", detail::fibersStr(S));
    check(injectiveNat(sum.legs[0]) && injectiveNat(sum.legs[1]), "coproduct inclusions are monic", detail::fibersStr(S));
    check(allEmpty(sheafPullback(A, B, S, sum.legs[0], sum.legs[1]).apex), "coproduct is disjoint", detail::fibersStr(S));
    check(countNat(P, S, C) == countNat(P, A, C) * countNat(P, B, C), "coproduct universal property",
          detail::fibersStr(S) + "->" + detail::fibersStr(C));
    if (auto f = randomNat(P, C, S, rng)) {
      SheafCone ca = sheafPullback(C, A, S, *f, sum.legs[0]);
      SheafCone cb = sheafPullback(C, B, S, *f, sum.legs[1]);
      SheafCone back = sheafCoproduct(ca.apex, cb.apex);
      // canonical comparison ca + cb -> C
      SetNat cmp(P.objects());
      for (std::size_t a = 0; a < P.objects(); ++a) {
        cmp[a].assign(back.apex.fiber[a], npos);
        for (std::size_t i = 0; i < ca.apex.fiber[a]; ++i) cmp[a][back.legs[0][a][i]] = ca.legs[0][a][i];
        for (std::size_t i = 0; i < cb.apex.fiber[a]; ++i) cmp[a][back.legs[1][a][i]] = cb.legs[0][a][i];
      }
      check(isNatural(P, back.apex, C, cmp) && injectiveNat(cmp) && surjectiveNat(cmp, C), "coproducts are pullback-stable",
            detail::fibersStr(C) + "->" + detail::fibersStr(S));
    }

    Relation rel = relationSheaf(A, detail::randomCongruence(P, A, rng));
    check(!setFunctorViolation(P, rel.R), "relation validates", detail::fibersStr(rel.R));
    SheafCone quo = sheafCoequalizer(rel.R, A, rel.first, rel.second);
    const UltraSheaf& Q = quo.apex;
    const SetNat& q = quo.legs[1];
    check(!setFunctorViolation(P, Q) && surjectiveNat(q, Q), "quotient validates", detail::fibersStr(Q));
    SheafCone ker = sheafPullback(A, A, Q, q, q);
    bool effective = ker.apex.fiber == rel.R.fiber;
    for (std::size_t a = 0; a < P.objects() && effective; ++a) {
      std::vector<std::pair<std::size_t, std::size_t>> lhs, rhs;
      for (std::size_t i = 0; i < ker.apex.fiber[a]; ++i) lhs.emplace_back(ker.legs[0][a][i], ker.legs[1][a][i]);
      for (std::size_t i = 0; i < rel.R.fiber[a]; ++i) rhs.emplace_back(rel.first[a][i], rel.second[a][i]);
      std::sort(lhs.begin(), lhs.end());
      std::sort(rhs.begin(), rhs.end());
      effective = lhs == rhs;
    }
    check(effective, "quotients are effective", detail::fibersStr(A) + "/" + detail::fibersStr(rel.R));
    if (auto g = randomNat(P, C, Q, rng)) {
      SheafCone pb = sheafPullback(C, A, Q, *g, q);
      check(surjectiveNat(pb.legs[0], C), "quotients are pullback-stable", detail::fibersStr(C) + "->" + detail::fibersStr(Q));
    }
    auto f1 = randomNat(P, A, B, rng), f2 = randomNat(P, A, B, rng);
    if (f1 && f2) {
      SheafCone eq = sheafEqualizer(A, B, *f1, *f2);
      bool ok = !setFunctorViolation(P, eq.apex) && injectiveNat(eq.legs[0]);
      ok = ok && composeNat(*f1, eq.legs[0]) == composeNat(*f2, eq.legs[0]);
      check(ok, "equalizer", detail::fibersStr(A) + "->" + detail::fibersStr(B));
      SheafCone co = sheafCoequalizer(A, B, *f1, *f2);
      ok = !setFunctorViolation(P, co.apex) && composeNat(co.legs[1], *f1) == composeNat(co.legs[1], *f2);
      check(ok, "coequalizer", detail::fibersStr(A) + "->" + detail::fibersStr(B));
    }
  }
  return rep;
}

// ---- reconstruction at a finite space ------------------------------------

// Etale spaces over T with fibers <= bound, visited once per labelled total space.
template <class Visit>
void enumerateEtale(const FiniteSpace& T, std::size_t bound, Visit visit) {
  std::size_t n = T.size();
  std::vector<std::size_t> sizes(n, 0);
  while (true) {
    std::vector<std::size_t> proj;
    std::vector<std::size_t> offset(n + 1, 0);
    for (std::size_t a = 0; a < n; ++a) {
      offset[a + 1] = offset[a] + sizes[a];
      for (std::size_t i = 0; i < sizes[a]; ++i) proj.push_back(a);
    }
    std::size_t N = proj.size();
    std::vector<Mask> up(N, 0);
    // up(e) has e and at most one point over each b >= p(e)
    std::function<void(std::size_t)> rec = [&](std::size_t e) {
      if (e == N) {
        SpaceMap p{FiniteSpace::fromPreorder(up), T, proj};
        if (mapContinuous(p) && isLocalHomeomorphism(p)) visit(p);
        return;
      }
      std::size_t a = proj[e];
      std::vector<std::size_t> over;
      for (std::size_t b = 0; b < n; ++b)
        if (b != a && T.leq(a, b)) over.push_back(b);
      std::vector<std::size_t> pick(over.size(), 0);
      while (true) {
        Mask m = bit(e);
        for (std::size_t k = 0; k < over.size(); ++k)
          if (pick[k]) m |= bit(offset[over[k]] + pick[k] - 1);
        bool ok = true;
        for (std::size_t f = 0; f < e && ok; ++f) {
          if (has(m, f) && (up[f] & ~m)) ok = false;
          if (has(up[f], e) && (m & ~up[f])) ok = false;
        }
        if (ok) {
          up[e] = m;
          rec(e + 1);
        }
        std::size_t k = 0;
        while (k < over.size() && ++pick[k] > sizes[over[k]]) pick[k++] = 0;
        if (k == over.size()) break;
      }
      up[e] = 0;
    };
    rec(0);
    std::size_t i = 0;
    while (i < n && ++sizes[i] > bound) sizes[i++] = 0;
    if (i == n) return;
  }
}

inline std::vector<std::size_t> etaleCode(const SpaceMap& p) {
  std::size_t n = p.target.size();
  std::vector<std::vector<std::size_t>> fibers(n);
  for (std::size_t a = 0; a < n; ++a) fibers[a] = fiberElements(p, a);
  std::vector<std::size_t> relabel(p.source.size());
  std::vector<std::size_t> best;
  std::function<void(std::size_t)> rec = [&](std::size_t a) {
    if (a == n) {
      std::vector<std::size_t> code;
      for (std::size_t b = 0; b < n; ++b) code.push_back(fibers[b].size());
      std::vector<Mask> ups(p.source.size());
      for (std::size_t e = 0; e < p.source.size(); ++e) {
        Mask m = 0;
        for (std::size_t f = 0; f < p.source.size(); ++f)
          if (p.source.leq(e, f)) m |= bit(relabel[f]);
        ups[relabel[e]] = m;
      }
      code.insert(code.end(), ups.begin(), ups.end());
      if (best.empty() || code < best) best = code;
      return;
    }
    auto perm = fibers[a];
    std::size_t base = 0;
    for (std::size_t b = 0; b < a; ++b) base += fibers[b].size();
    std::vector<std::size_t> order(perm.size());
    std::iota(order.begin(), order.end(), 0);
    do {
      for (std::size_t k = 0; k < perm.size(); ++k) relabel[perm[k]] = base + order[k];
      rec(a + 1);
    } while (std::next_permutation(order.begin(), order.end()));
  };
  rec(0);
  return best;
}

// Continuous maps E -> F commuting with the projections.
inline std::size_t countMapsOver(const SpaceMap& p, const SpaceMap& q) {
  std::size_t N = p.source.size(), count = 0;
  std::vector<std::vector<std::size_t>> choices(N);
  for (std::size_t e = 0; e < N; ++e) {
    choices[e] = fiberElements(q, p(e));
    if (choices[e].empty()) return 0;
  }
  std::vector<std::size_t> pick(N, 0);
  while (true) {
    std::vector<std::size_t> h(N);
    for (std::size_t e = 0; e < N; ++e) h[e] = choices[e][pick[e]];
    if (mapContinuous(SpaceMap{p.source, q.source, h})) ++count;
    std::size_t e = 0;
    while (e < N && ++pick[e] == choices[e].size()) pick[e++] = 0;
    if (e == N) break;
  }
  return count;
}

struct EvReport {
  bool ok = true;
  std::size_t sheafObjects = 0, etaleObjects = 0;
  std::size_t sheafHoms = 0, etaleHoms = 0;
  bool essentiallySurjective = true, fullyFaithful = true, roundTrips = true;
  std::string witness;
};

inline EvReport evEquivalenceCheck(const FiniteSpace& T, std::size_t bound) {
  EvReport rep;
  auto X = std::make_shared<const PtSpaceVUlt>(T);
  const auto& P = X->points();
  auto note = [&](bool& flag, const std::string& w) {
    flag = false;
    rep.ok = false;
    if (rep.witness.empty()) rep.witness = w;
  };

  std::map<std::vector<std::size_t>, UltraSheaf> sheaves;
  enumerateSetFunctors(P, bound, [&](const SetFunctor& F) {
    sheaves.emplace(canonicalCode(P, F), UltraSheaf(X, F));
    return true;
  });
  std::map<std::vector<std::size_t>, SpaceMap> etale;
  enumerateEtale(T, bound, [&](const SpaceMap& p) { etale.emplace(etaleCode(p), p); });
  rep.sheafObjects = sheaves.size();
  rep.etaleObjects = etale.size();

  for (auto& [code, A] : sheaves) {
    EtaleSheaf E = ultrasheafToEtale(A);
    if (!(evSpace(E, X) == A)) note(rep.roundTrips, "ev(etale(A)) differs from A for fibers " + detail::fibersStr(A));
  }
  std::vector<std::pair<const SpaceMap*, const UltraSheaf*>> matched;
  std::map<std::vector<std::size_t>, std::size_t> hits;
  for (auto& [code, p] : etale) {
    UltraSheaf A = evSpace(EtaleSheaf{p}, X);
    EtaleSheaf back = ultrasheafToEtale(A);
    std::vector<std::size_t> h(p.source.size());
    std::size_t k = 0;
    for (std::size_t a = 0; a < T.size(); ++a)
      for (auto e : fiberElements(p, a)) h[k++] = e;
    if (!isHomeomorphismOver(back.p, p, h)) note(rep.roundTrips, "etale(ev(E)) is not E for " + mapDocument(p));
    auto it = sheaves.find(canonicalCode(P, A));
    if (it == sheaves.end()) {
      note(rep.essentiallySurjective, "ev(E) matches no enumerated ultrasheaf: " + mapDocument(p));
      continue;
    }
    ++hits[it->first];
    matched.emplace_back(&p, &it->second);
  }
  if (hits.size() != sheaves.size()) note(rep.essentiallySurjective, "some ultrasheaf is not the stalk sheaf of any etale space");
  for (auto& [c, n] : hits)
    if (n != 1) note(rep.fullyFaithful, "two non-homeomorphic etale spaces have isomorphic stalk sheaves");
  if (rep.sheafObjects != rep.etaleObjects) note(rep.essentiallySurjective, "object counts differ");
  for (auto& [p, A] : matched)
    for (auto& [q, B] : matched) {
      std::size_t he = countMapsOver(*p, *q), hs = countNat(P, *A, *B);
      rep.etaleHoms += he;
      rep.sheafHoms += hs;
      if (he != hs) note(rep.fullyFaithful, "hom counts differ: " + mapDocument(*p) + " to " + mapDocument(*q));
    }
  return rep;
}

// ---- the unit at pt(T) ---------------------------------------------------

struct EtaReport {
  FiniteCategory evaluation;
  CatFunctor eta;
  bool functor = false, bijectiveOnObjects = false, bijectiveOnHoms = false;
  bool ok() const { return functor && bijectiveOnObjects && bijectiveOnHoms; }
};

// Evaluation points ev_a, with transformations ev_a => ev_b computed on the
// open-representables y(U); ev_a(y(U)) is a point when a is in U, else empty.
inline EtaReport etaUnit(const FiniteSpace& T) {
  std::size_t n = T.size();
  const auto& opens = T.opens();
  // arrows: (a, b, component table per open)
  std::vector<std::size_t> src, tgt;
  std::vector<std::vector<Table>> comps;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      std::vector<Table> c(opens.size());
      std::function<void(std::size_t)> rec = [&](std::size_t u) {
        if (u == opens.size()) {
          // naturality along inclusions y(U) -> y(V) holds between sets of size <= 1
          src.push_back(a);
          tgt.push_back(b);
          comps.push_back(c);
          return;
        }
        std::size_t from = has(opens[u], a) ? 1 : 0, to = has(opens[u], b) ? 1 : 0;
        detail::forEachTable(from, to, nullptr, [&](const Table& t) {
          c[u] = t;
          rec(u + 1);
          return true;
        });
      };
      rec(0);
    }
  std::size_t A = src.size();
  std::vector<std::size_t> id(n), comp(A * A, npos);
  for (std::size_t f = 0; f < A; ++f)
    if (src[f] == tgt[f]) id[src[f]] = f;
  for (std::size_t g = 0; g < A; ++g)
    for (std::size_t f = 0; f < A; ++f) {
      if (tgt[f] != src[g]) continue;
      std::vector<Table> c(opens.size());
      for (std::size_t u = 0; u < opens.size(); ++u)
        for (auto v : comps[f][u]) c[u].push_back(comps[g][u][v]);
      for (std::size_t h = 0; h < A; ++h)
        if (src[h] == src[f] && tgt[h] == tgt[g] && comps[h] == c) comp[g * A + f] = h;
    }
  EtaReport rep{FiniteCategory(n, src, tgt, id, comp), {}, false, false, false};
  rep.evaluation.validate();
  PtSpaceVUlt X(T);
  const auto& P = X.points();
  rep.eta.obj.resize(n);
  std::iota(rep.eta.obj.begin(), rep.eta.obj.end(), 0);
  rep.bijectiveOnObjects = true;
  rep.bijectiveOnHoms = true;
  for (std::size_t f = 0; f < P.arrows(); ++f) {
    const auto& h = rep.evaluation.hom(P.source(f), P.target(f));
    rep.eta.arr.push_back(h.size() == 1 ? h[0] : npos);
  }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      if (P.hom(a, b).size() != rep.evaluation.hom(a, b).size()) rep.bijectiveOnHoms = false;
  rep.functor = std::find(rep.eta.arr.begin(), rep.eta.arr.end(), npos) == rep.eta.arr.end() &&
                isFunctor(P, rep.evaluation, rep.eta);
  return rep;
}

// Stalk transport along a <= b through a local section, against evSpace.
inline bool etaNaturality(const EtaleSheaf& E) {
  const SpaceMap& p = E.p;
  UltraSheaf A = evSpace(E);
  const auto& P = A.X->points();
  for (std::size_t f = 0; f < P.arrows(); ++f) {
    std::size_t a = P.source(f), b = P.target(f);
    auto ea = fiberElements(p, a), eb = fiberElements(p, b);
    for (std::size_t i = 0; i < ea.size(); ++i) {
      auto cert = localHomeomorphismAt(p, ea[i]);
      if (!cert) return false;
      std::size_t via = npos;
      for (auto [base, e] : cert->section)
        if (base == b) via = e;
      if (via == npos || eb[A.action[f][i]] != via) return false;
    }
  }
  return true;
}

}  // namespace ultrakit
