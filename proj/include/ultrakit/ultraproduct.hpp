#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "ultrafilter.hpp"

namespace ultrakit {

using UPElement = UPFamily<std::size_t>;

// A family (A_s) of subsets of Fin(bound), stored by the sets {s : j in A_s}.
struct BoundedFamily {
  IndexSet index;
  std::size_t bound = 0;
  std::vector<UPSet> fibers;

  static BoundedFamily constant(IndexSet index, std::size_t bound, const std::vector<std::size_t>& elems) {
    BoundedFamily f{index, bound, std::vector<UPSet>(bound, UPSet::empty())};
    for (auto j : elems) f.fibers.at(j) = index.full();
    return f;
  }
  // Fibers given as an object family of bitmasks.
  static BoundedFamily fromMasks(const UPFamily<std::size_t>& masks, std::size_t bound) {
    BoundedFamily f{masks.index(), bound, {}};
    for (std::size_t j = 0; j < bound; ++j) f.fibers.push_back(masks.where([&](std::size_t m) { return (m >> j) & 1u; }));
    return f;
  }
  bool contains(std::size_t s, std::size_t j) const { return j < bound && fibers[j].contains(s); }
  UPSet emptyFibers() const {
    UPSet any = UPSet::empty();
    for (auto& f : fibers) any = any | f;
    return index.complement(any);
  }
  std::string str() const {
    std::string s = "bound:" + std::to_string(bound) + "\n";
    for (std::size_t j = 0; j < bound; ++j) s += "fiber" + std::to_string(j) + ":" + fibers[j].str() + "\n";
    return s;
  }
};

inline bool ufamEq(const UPElement& x, const UPElement& y, const Ultrafilter& mu) {
  require(x.index() == y.index() && x.index() == mu.carrier(), ErrorKind::CarrierMismatch,
          "elements over " + x.index().str() + "/" + y.index().str() + " under " + mu.carrier().str());
  return mu.large(agreementSet(x, y));
}

// The set where x(s) lies in A_s.
inline UPSet membershipSet(const UPElement& x, const BoundedFamily& fam) {
  UPSet out = UPSet::empty();
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x.value(i) < fam.bound) out = out | (x.level(i) & fam.fibers[x.value(i)]);
  return out;
}

// Classes of UP-representable choice functions.  A finitely-valued function
// agrees with the constant at its ultralimit on a large set, so the classes
// are the labels j with {s : j in A_s} large, represented by constants.
struct UltraProductSet {
  Ultrafilter mu;
  BoundedFamily family;
  std::vector<std::size_t> labels;

  std::size_t size() const { return labels.size(); }
  UPElement representative(std::size_t i) const { return UPElement::constant(family.index, labels.at(i)); }
  bool isElement(const UPElement& x) const { return mu.large(membershipSet(x, family)); }
  std::size_t classOf(const UPElement& x) const {
    require(isElement(x), ErrorKind::InvalidFamily, "not a choice function on a large set");
    std::size_t j = ultralimit(mu, x);
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == j) return i;
    fail(ErrorKind::TheoremMismatch, "choice function outside every class");
  }
};

inline UltraProductSet uprodEnumerate(const Ultrafilter& mu, const BoundedFamily& fam) {
  require(fam.index == mu.carrier(), ErrorKind::CarrierMismatch, "family over " + fam.index.str() + " under " + mu.carrier().str());
  if (mu.large(fam.emptyFibers())) fail(ErrorKind::EmptyLargeFiber, "{s : A_s empty} is large");
  UltraProductSet u{mu, fam, {}};
  for (std::size_t j = 0; j < fam.bound; ++j)
    if (mu.large(fam.fibers[j])) u.labels.push_back(j);
  return u;
}

// All functions index -> Fin(k) with prefix <= maxPrefix and period <= maxPeriod
// (for Fin(n) index: all k^n functions).  Stops after `cap` functions.
template <class F>
void forEachUPFunction(IndexSet index, std::size_t k, std::size_t maxPrefix, std::size_t maxPeriod, std::size_t cap, F visit) {
  std::size_t seen = 0;
  auto run = [&](std::size_t L, std::size_t p) {
    std::size_t len = L + p;
    std::vector<std::size_t> digits(len, 0);
    while (seen < cap) {
      std::vector<std::pair<UPSet, std::size_t>> pieces;
      for (std::size_t v = 0; v < k; ++v) {
        UPSet s = index.nat ? UPSet::tabulate(L, p, [&](std::size_t i) { return digits[i] == v; })
                            : UPSet::tabulate(len, 1, [&](std::size_t i) { return i < len && digits[i] == v; });
        pieces.emplace_back(s, v);
      }
      visit(UPElement(index, std::move(pieces)));
      ++seen;
      std::size_t i = 0;
      while (i < len && ++digits[i] == k) digits[i++] = 0;
      if (i == len) break;
    }
  };
  if (k == 0) return;
  if (!index.nat) {
    if (index.n == 0) {
      visit(UPElement(index, {}));
      return;
    }
    run(index.n, 0);
    return;
  }
  for (std::size_t L = 0; L <= maxPrefix; ++L)
    for (std::size_t p = 1; p <= maxPeriod; ++p) run(L, p);
}

struct SaturationReport {
  bool ok = true;
  std::size_t functions = 0, choiceFunctions = 0, classesHit = 0;
  std::string detail;
};

// Every enumerated choice function equals exactly one representative and
// each representative is hit.
inline SaturationReport saturationCheck(const UltraProductSet& u, std::size_t maxPrefix, std::size_t maxPeriod,
                                        std::size_t cap = 20000) {
  SaturationReport r;
  std::vector<bool> hit(u.size(), false);
  forEachUPFunction(u.family.index, u.family.bound, maxPrefix, maxPeriod, cap, [&](const UPElement& x) {
    ++r.functions;
    if (!u.isElement(x)) return;
    ++r.choiceFunctions;
    std::size_t matches = 0, which = 0;
    for (std::size_t i = 0; i < u.size(); ++i)
      if (ufamEq(x, u.representative(i), u.mu)) {
        ++matches;
        which = i;
      }
    if (matches != 1 && r.ok) {
      r.ok = false;
      r.detail = "choice function matches " + std::to_string(matches) + " representatives";
    }
    if (matches == 1) hit[which] = true;
  });
  for (bool h : hit) r.classesHit += h;
  if (r.ok && r.classesHit != u.size()) {
    r.ok = false;
    r.detail = "a representative is never hit";
  }
  return r;
}

// ---- currying over sum carriers -----------------------------------------

template <class V>
UPFamily<UPFamily<V>> curry(const SumInfo& si, const UPFamily<V>& x) {
  require(x.index() == si.carrier, ErrorKind::CarrierMismatch, "curry: family over " + x.index().str() + ", sum carrier " + si.carrier.str());
  auto [L, q] = x.periodicity();
  switch (si.enc) {
    case SumEncoding::FinFin:
      return UPFamily<UPFamily<V>>::tabulate(si.base, 0, 1, [&](std::size_t s) {
        return UPFamily<V>::tabulate(si.fiber(s), 0, 1, [&](std::size_t t) { return x.at(si.code(s, t)); });
      });
    case SumEncoding::NatFin:
      return UPFamily<UPFamily<V>>::tabulate(si.base, (L + si.m - 1) / si.m, q, [&](std::size_t s) {
        return UPFamily<V>::tabulate(si.fiber(s), 0, 1, [&](std::size_t t) { return x.at(si.code(s, t)); });
      });
    case SumEncoding::FinNat:
      return UPFamily<UPFamily<V>>::tabulate(si.base, 0, 1, [&](std::size_t s) {
        return UPFamily<V>::tabulate(IndexSet::natural(), (L + si.n - 1) / si.n, q,
                                     [&](std::size_t t) { return x.at(si.code(s, t)); });
      });
    case SumEncoding::Graph:
      // Each fiber ultrafilter is delta_g(s); the constant family represents its class.
      return x.map([](const V& v) { return UPFamily<V>::constant(IndexSet::natural(), v); });
  }
  fail(ErrorKind::UnsupportedEncoding, "curry");
}

template <class V>
UPFamily<V> uncurry(const SumInfo& si, const UPFamily<UPFamily<V>>& nested) {
  require(nested.index() == si.base, ErrorKind::CarrierMismatch, "uncurry over " + nested.index().str());
  switch (si.enc) {
    case SumEncoding::FinFin:
      return UPFamily<V>::tabulate(si.carrier, 0, 1, [&](std::size_t c) {
        auto [s, t] = si.decode(c);
        return nested.at(s).at(t);
      });
    case SumEncoding::NatFin: {
      auto [L, q] = nested.periodicity();
      return UPFamily<V>::tabulate(si.carrier, L * si.m, q * si.m, [&](std::size_t c) {
        auto [s, t] = si.decode(c);
        return nested.at(s).at(t);
      });
    }
    case SumEncoding::FinNat: {
      std::size_t L = 0, q = 1;
      for (auto& inner : nested.values()) {
        auto [l, p] = inner.periodicity();
        L = std::max(L, l);
        q = std::lcm(q, p);
      }
      return UPFamily<V>::tabulate(si.carrier, L * si.n, q * si.n, [&](std::size_t c) {
        auto [s, t] = si.decode(c);
        return nested.at(s).at(t);
      });
    }
    case SumEncoding::Graph: {
      std::vector<std::pair<UPSet, V>> pieces;
      for (std::size_t i = 0; i < nested.size(); ++i) {
        const auto& inner = nested.value(i);
        for (std::size_t j = 0; j < inner.size(); ++j) {
          UPSet s = nested.level(i) & si.section->preimage(inner.level(j));
          if (!s.isEmpty()) pieces.emplace_back(s, inner.value(j));
        }
      }
      return UPFamily<V>(si.carrier, std::move(pieces));
    }
  }
  fail(ErrorKind::UnsupportedEncoding, "uncurry");
}

// Equality of mu-families of nu_s-families: the inner families agree
// nu_s-almost everywhere for mu-almost all s.
template <class V, class InnerEq>
bool nestedEqWith(const Ultrafilter& mu, const UFFamily& nus, const UPFamily<UPFamily<V>>& x,
                  const UPFamily<UPFamily<V>>& y, InnerEq innerEq) {
  return mu.large(agreementSet(x, y, nus, [&](const UPFamily<V>& a, const UPFamily<V>& b, const Ultrafilter& nu) {
    return innerEq(nu, a, b);
  }));
}

template <class V>
bool nestedEq(const Ultrafilter& mu, const UFFamily& nus, const UPFamily<UPFamily<V>>& x, const UPFamily<UPFamily<V>>& y) {
  return nestedEqWith(mu, nus, x, y, [](const Ultrafilter& nu, const UPFamily<V>& a, const UPFamily<V>& b) {
    return nu.large(agreementSet(a, b));
  });
}

using NestedElement = UPFamily<UPElement>;

inline NestedElement associatorApply(const Ultrafilter& sum, const UPElement& x) { return curry(sum.sumInfo(), x); }
inline UPElement associatorInverse(const Ultrafilter& sum, const NestedElement& y) { return uncurry(sum.sumInfo(), y); }

// Transport of a family along an arrow f of ultrafilters: a |-> a o f.
template <class V>
UPFamily<V> pullbackFamily(const UPMap& f, const UPFamily<V>& a) {
  require(a.index() == f.codomain(), ErrorKind::CarrierMismatch, "pullback of a family over " + a.index().str());
  std::vector<std::pair<UPSet, V>> pieces;
  for (std::size_t i = 0; i < a.size(); ++i) pieces.emplace_back(f.preimage(a.level(i)), a.value(i));
  return UPFamily<V>(f.domain(), std::move(pieces));
}

inline UPElement reindex(const UPMap& f, const Ultrafilter& lambda, const Ultrafilter& kappa, const UPElement& a) {
  if (!ufArrowCheck(f, lambda, kappa))
    fail(ErrorKind::NotAnUltrafilterMap, "f_*(" + lambda.str() + ") is not " + kappa.str());
  return pullbackFamily(f, a);
}

inline BoundedFamily reindexFamily(const UPMap& f, const BoundedFamily& a) {
  BoundedFamily r{f.domain(), a.bound, {}};
  for (auto& s : a.fibers) r.fibers.push_back(f.preimage(s));
  return r;
}

// ---- structural lemmas ---------------------------------------------------

// Dependent products: pairs (a, b) with b in B_s(a) are coded a*k2 + b.
struct DependentPair {
  BoundedFamily A;
  std::vector<BoundedFamily> B;  // B[a] : fibers of B_s(a), all with bound k2
};

struct LemmaReport {
  bool ok = true;
  std::size_t checked = 0;
  std::string witness;
};

inline LemmaReport dependentProductCheck(const Ultrafilter& mu, const DependentPair& d) {
  LemmaReport r;
  std::size_t k1 = d.A.bound, k2 = d.B.empty() ? 0 : d.B.front().bound;
  BoundedFamily pairs{d.A.index, k1 * k2, {}};
  for (std::size_t a = 0; a < k1; ++a)
    for (std::size_t b = 0; b < k2; ++b) pairs.fibers.push_back(d.A.fibers[a] & d.B[a].fibers[b]);
  if (mu.large(pairs.emptyFibers())) return r;
  UltraProductSet left = uprodEnumerate(mu, pairs);
  std::set<std::pair<std::size_t, std::size_t>> image;
  for (std::size_t i = 0; i < left.size(); ++i) {
    UPElement x = left.representative(i);
    UPElement pa = x.map([&](std::size_t c) { return c / k2; });
    UPElement pb = x.map([&](std::size_t c) { return c % k2; });
    UltraProductSet ua = uprodEnumerate(mu, d.A);
    std::size_t ca = ua.classOf(pa);
    std::size_t a = ua.labels[ca];
    UltraProductSet ub = uprodEnumerate(mu, d.B[a]);
    image.insert({a, ub.labels[ub.classOf(pb)]});
    ++r.checked;
  }
  std::size_t rightCount = 0;
  UltraProductSet ua = uprodEnumerate(mu, d.A);
  for (auto a : ua.labels) {
    if (mu.large(d.B[a].emptyFibers())) continue;
    rightCount += uprodEnumerate(mu, d.B[a]).size();
  }
  if (image.size() != left.size() || image.size() != rightCount) {
    r.ok = false;
    r.witness = "left " + std::to_string(left.size()) + " classes, image " + std::to_string(image.size()) + ", right " +
                std::to_string(rightCount);
  }
  return r;
}

// forall x:mu forall a in A_x psi(x,a)  <=>  forall (a_x) in int A_x, forall x:mu psi(x,a_x).
// psi is given by the sets P[j] = {x : psi(x, j)}.
inline LemmaReport quantifierExchangeCheck(const Ultrafilter& mu, const BoundedFamily& A, const std::vector<UPSet>& P,
                                           std::size_t maxPrefix = 2, std::size_t maxPeriod = 4) {
  LemmaReport r;
  UPSet good = A.index.full();
  for (std::size_t j = 0; j < A.bound; ++j) good = good & (A.index.complement(A.fibers[j]) | P[j]);
  bool lhs = mu.large(good);
  bool rhs = true;
  forEachUPFunction(A.index, A.bound, maxPrefix, maxPeriod, 50000, [&](const UPElement& x) {
    if (!mu.large(membershipSet(x, A))) return;
    ++r.checked;
    UPSet holds = UPSet::empty();
    for (std::size_t i = 0; i < x.size(); ++i) holds = holds | (x.level(i) & P[x.value(i)]);
    if (!mu.large(holds)) rhs = false;
  });
  if (lhs != rhs) {
    r.ok = false;
    r.witness = std::string("lhs=") + (lhs ? "true" : "false") + " rhs=" + (rhs ? "true" : "false");
  }
  return r;
}

}  // namespace ultrakit
