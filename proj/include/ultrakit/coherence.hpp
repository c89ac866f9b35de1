#pragma once

#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "random.hpp"
#include "report.hpp"
#include "ultraproduct.hpp"

namespace ultrakit {

// ---- random queries and elements -----------------------------------------

inline UPSet randomUPSet(std::mt19937_64& rng, std::size_t maxPrefix, std::size_t maxPeriod) {
  std::size_t L = below(rng, maxPrefix + 1), p = 1 + below(rng, maxPeriod);
  std::vector<bool> bits(L + p);
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = rng() & 1u;
  return UPSet::tabulate(L, p, [&](std::size_t i) { return bits[i]; });
}

inline UPSet randomQuery(std::mt19937_64& rng, const IndexSet& I, std::size_t maxPrefix = 6, std::size_t maxPeriod = 6) {
  if (I.nat) return randomUPSet(rng, maxPrefix, maxPeriod);
  std::vector<std::size_t> xs;
  for (std::size_t i = 0; i < I.n; ++i)
    if (rng() & 1u) xs.push_back(i);
  return UPSet::finite(xs);
}

// Values below k; over N the function has the given prefix and period.
inline UPElement randomElement(std::mt19937_64& rng, const IndexSet& I, std::size_t k, std::size_t L = 0, std::size_t q = 1) {
  std::size_t span = I.nat ? L + q : I.n;
  std::vector<std::size_t> v(span);
  for (auto& x : v) x = below(rng, k);
  return UPElement::tabulate(I, L, q, [&](std::size_t i) { return v[i]; });
}

inline Ultrafilter randomFinUF(std::mt19937_64& rng, std::size_t maxCarrier) {
  std::size_t n = 1 + below(rng, maxCarrier);
  return Ultrafilter::principal(IndexSet::fin(n), below(rng, n));
}

inline std::string elementStr(const UPElement& x) {
  std::string s = "[";
  for (std::size_t i = 0; i < x.size(); ++i) s += (i ? "," : "") + x.level(i).str() + "=>" + std::to_string(x.value(i));
  return s + "]";
}

// ---- lattice laws of the largeness oracle --------------------------------

inline LawReport ufLawCheck(const Ultrafilter& mu, std::size_t pairs, std::mt19937_64& rng, std::size_t instance = 0) {
  LawReport rep;
  rep.instances = 1;
  const IndexSet& I = mu.carrier();
  rep.check(instance, mu.large(I.full()), "full is large", mu.str());
  rep.check(instance, !mu.large(UPSet::empty()), "empty is small", mu.str());
  for (std::size_t k = 0; k < pairs; ++k) {
    UPSet a = randomQuery(rng, I), b = randomQuery(rng, I);
    bool la = mu.large(a), lb = mu.large(b);
    std::string w = mu.str() + " a=" + a.str() + " b=" + b.str();
    rep.check(instance, mu.large(a & b) == (la && lb), "meet", w);
    rep.check(instance, mu.large(a | b) == (la || lb), "join", w);
    rep.check(instance, mu.large(a - b) == (la && !lb), "difference", w);
    rep.check(instance, ufForall(mu, I.complement(a)) == !ufForall(mu, a), "autoduality", w);
  }
  return rep;
}

// ---- coherence of the ultracategory structure on sets --------------------

struct CoherenceConfig {
  std::size_t maxCarrier = 3;
  std::size_t probePeriod = 4;
  std::size_t elements = 6;
  std::size_t valueBound = 3;
};

template <class V>
using Nested2 = UPFamily<UPFamily<V>>;
template <class V>
using Nested3 = UPFamily<UPFamily<UPFamily<V>>>;

namespace detail {

inline std::size_t roundUp(std::size_t x, std::size_t b) { return (x + b - 1) / b * b; }

struct AssociatorData {
  Ultrafilter mu, sigma, outer, outer2;
  UFFamily nus, lams;
  std::vector<Ultrafilter> rho;  // rho[s] = sum over nu_s of lambda_(s,-); only s below rhoSpan
  std::size_t rhoL = 0, rhoQ = 1;

  const Ultrafilter& rhoAt(std::size_t s) const { return rho[s < rho.size() ? s : rhoL + (s - rhoL) % rhoQ]; }
};

// lams is indexed by the carrier of sum(mu, nus); rho is periodic in s with (L, q).
inline AssociatorData associatorData(const Ultrafilter& mu, const UFFamily& nus, const UFFamily& lams, std::size_t L, std::size_t q) {
  AssociatorData d{mu, ufSum(mu, nus), {}, {}, nus, lams, {}, L, q};
  d.outer = ufSum(d.sigma, lams);
  const SumInfo& si = d.sigma.sumInfo();
  std::size_t span = mu.carrier().nat ? L + q : mu.carrier().n;
  for (std::size_t s = 0; s < span; ++s) {
    const Ultrafilter& nu = nus.at(s);
    d.rho.push_back(ufSum(nu, UFFamily::tabulate(nu.carrier(), 0, 1, [&](std::size_t t) { return lams.at(si.code(s, t)); })));
  }
  d.outer2 = ufSum(mu, UFFamily::tabulate(mu.carrier(), L, q, [&](std::size_t s) { return d.rhoAt(s); }));
  return d;
}

// Code in outer2 of the point coded c in outer.
inline std::size_t associatorCarrierMap(const AssociatorData& d, std::size_t c) {
  auto [c1, r] = d.outer.sumInfo().decode(c);
  auto [s, t] = d.sigma.sumInfo().decode(c1);
  return d.outer2.sumInfo().code(s, d.rhoAt(s).sumInfo().code(t, r));
}

inline std::size_t associatorCarrierInverse(const AssociatorData& d, std::size_t c2) {
  auto [s, inner] = d.outer2.sumInfo().decode(c2);
  auto [t, r] = d.rhoAt(s).sumInfo().decode(inner);
  return d.outer.sumInfo().code(d.sigma.sumInfo().code(s, t), r);
}

template <class F>
UPElement transport(const IndexSet& target, std::size_t L, std::size_t q, const UPElement& x, F inverse) {
  return UPElement::tabulate(target, L, q, [&](std::size_t c) { return x.at(inverse(c)); });
}

// Both composites from the integral over the iterated sum to the triple integral.
// (Lx, qx) bound the periodicity of x; B is the block size of outer2 over N.
inline std::pair<Nested3<std::size_t>, Nested3<std::size_t>> associatorPaths(const AssociatorData& d, const UPElement& x,
                                                                           std::size_t Lx, std::size_t qx) {
  auto path1 = curry(d.sigma.sumInfo(), curry(d.outer.sumInfo(), x));
  std::size_t B = d.mu.carrier().nat ? d.outer2.sumInfo().m : 1;
  UPElement x2 = transport(d.outer2.carrier(), roundUp(Lx, B), std::lcm(qx, B), x,
                           [&](std::size_t c2) { return associatorCarrierInverse(d, c2); });
  auto y = curry(d.outer2.sumInfo(), x2);
  std::size_t L = std::max(d.rhoL, (Lx + B - 1) / B), q = std::lcm(d.rhoQ, qx);
  auto path2 = Nested3<std::size_t>::tabulate(d.mu.carrier(), L, q, [&](std::size_t s) {
    return curry(d.rhoAt(s).sumInfo(), y.at(s));
  });
  return {path1, path2};
}

// The carrier map is a bijection sending the point of outer to the point of outer2.
inline bool associatorCarrierMapOk(const AssociatorData& d) {
  if (!d.outer.carrier().isFin()) return true;
  std::vector<bool> hit(d.outer2.carrier().n, false);
  for (std::size_t c = 0; c < d.outer.carrier().n; ++c) {
    std::size_t c2 = associatorCarrierMap(d, c);
    if (c2 >= hit.size() || hit[c2] || associatorCarrierInverse(d, c2) != c) return false;
    hit[c2] = true;
  }
  return associatorCarrierMap(d, d.outer.profile().point) == d.outer2.profile().point;
}

}  // namespace detail

// Fin carriers of size at most cfg.maxCarrier.
inline void coherenceFinInstance(std::mt19937_64& rng, const CoherenceConfig& cfg, std::size_t inst, LawReport& rep) {
  const std::size_t K = cfg.maxCarrier, V = cfg.valueBound;
  Ultrafilter mu = randomFinUF(rng, K);
  UFFamily nus = UFFamily::tabulate(mu.carrier(), 0, 1, [&](std::size_t) { return randomFinUF(rng, K); });
  Ultrafilter sigma = ufSum(mu, nus);
  UFFamily lams = UFFamily::tabulate(sigma.carrier(), 0, 1, [&](std::size_t) { return randomFinUF(rng, K); });
  std::string tag = "mu=" + mu.str() + " sigma=" + sigma.str();

  // associator
  auto d = detail::associatorData(mu, nus, lams, 0, 1);
  for (std::size_t e = 0; e < cfg.elements; ++e) {
    UPElement x = randomElement(rng, d.outer.carrier(), V);
    auto [p1, p2] = detail::associatorPaths(d, x, 0, 1);
    rep.check(inst, p1 == p2, "ass-coh", tag + " x=" + elementStr(x));
    rep.check(inst, associatorInverse(d.outer, associatorApply(d.outer, x)) == x, "associator inverse", tag + " x=" + elementStr(x));
  }
  rep.check(inst, ufIso(d.outer, d.outer2).isomorphic() && ufIso(d.outer, d.outer2).witness->points &&
                      detail::associatorCarrierMapOk(d),
            "sum associativity", tag);

  // unitors
  Ultrafilter star = Ultrafilter::star();
  Ultrafilter left = ufSum(mu, UFFamily::constant(mu.carrier(), star));
  Ultrafilter right = ufSum(star, UFFamily::constant(IndexSet::star(), mu));
  rep.check(inst, ufIso(left, mu).isomorphic() && ufIso(right, mu).isomorphic(), "sum neutrality", tag);
  auto eps = [](const UPElement& y) { return y.at(0); };
  for (std::size_t e = 0; e < cfg.elements; ++e) {
    UPElement x = randomElement(rng, left.carrier(), V);
    UPElement viaCurry = curry(left.sumInfo(), x).map(eps);
    UPElement direct = UPElement::tabulate(mu.carrier(), 0, 1, [&](std::size_t s) { return x.at(left.sumInfo().code(s, 0)); });
    rep.check(inst, viaCurry == direct, "unit-coh left", tag + " x=" + elementStr(x));
    UPElement xr = randomElement(rng, right.carrier(), V);
    UPElement viaCurryR = curry(right.sumInfo(), xr).at(0);
    UPElement directR = UPElement::tabulate(mu.carrier(), 0, 1, [&](std::size_t t) { return xr.at(right.sumInfo().code(0, t)); });
    rep.check(inst, viaCurryR == directR, "unit-coh right", tag + " x=" + elementStr(xr));
  }
  // middle triangle: sum over (s, 0) of nu_s against sum over s of nu_s
  UFFamily nusLeft = UFFamily::tabulate(left.carrier(), 0, 1, [&](std::size_t c) { return nus.at(left.sumInfo().decode(c).first); });
  Ultrafilter outerL = ufSum(left, nusLeft);
  for (std::size_t e = 0; e < cfg.elements; ++e) {
    UPElement x = randomElement(rng, outerL.carrier(), V);
    auto p1 = curry(left.sumInfo(), curry(outerL.sumInfo(), x)).map([&](const UPFamily<UPElement>& z) { return z.at(0); });
    UPElement x2 = UPElement::tabulate(sigma.carrier(), 0, 1, [&](std::size_t c) {
      auto [s, t] = sigma.sumInfo().decode(c);
      return x.at(outerL.sumInfo().code(left.sumInfo().code(s, 0), t));
    });
    rep.check(inst, p1 == curry(sigma.sumInfo(), x2), "unit-coh middle", tag + " x=" + elementStr(x));
  }

  // reindexing is strictly functorial
  {
    Ultrafilter lam = randomFinUF(rng, K);
    std::size_t b = 1 + below(rng, K), c = 1 + below(rng, K);
    std::vector<std::size_t> ft(lam.carrier().n), gt(b);
    for (auto& v : ft) v = below(rng, b);
    for (auto& v : gt) v = below(rng, c);
    UPMap f = UPMap::table(ft.size(), IndexSet::fin(b), ft), g = UPMap::table(b, IndexSet::fin(c), gt);
    Ultrafilter kappa = ufPushforward(lam, f), rho = ufPushforward(kappa, g);
    std::string w = "lambda=" + lam.str() + " f=" + f.str() + " g=" + g.str();
    for (std::size_t e = 0; e < cfg.elements; ++e) {
      UPElement x = randomElement(rng, rho.carrier(), V);
      rep.check(inst, reindex(UPMap::compose(g, f), lam, rho, x) == reindex(f, lam, kappa, reindex(g, kappa, rho, x)),
                "reindexing-fctorial", w + " x=" + elementStr(x));
      UPElement y = randomElement(rng, lam.carrier(), V);
      rep.check(inst, reindex(UPMap::identity(lam.carrier()), lam, lam, y) == y, "reindexing identity", w);
    }
  }

  // reindexing respects associators
  {
    Ultrafilter lam = randomFinUF(rng, K);
    std::size_t b = 1 + below(rng, K);
    std::vector<std::size_t> ft(lam.carrier().n);
    for (auto& v : ft) v = below(rng, b);
    UPMap f = UPMap::table(ft.size(), IndexSet::fin(b), ft);
    Ultrafilter kappa = ufPushforward(lam, f);
    UFFamily nu = UFFamily::tabulate(kappa.carrier(), 0, 1, [&](std::size_t) { return randomFinUF(rng, K); });
    std::vector<Ultrafilter> nuP;
    std::vector<UPMap> gs;
    for (std::size_t l = 0; l < lam.carrier().n; ++l) {
      const Ultrafilter& target = nu.at(ft[l]);
      Ultrafilter src = randomFinUF(rng, K);
      std::vector<std::size_t> gt(src.carrier().n);
      for (auto& v : gt) v = below(rng, target.carrier().n);
      gt[src.profile().point] = target.profile().point;
      nuP.push_back(src);
      gs.push_back(UPMap::table(gt.size(), target.carrier(), gt));
    }
    Ultrafilter sumP = ufSum(lam, UFFamily::tabulate(lam.carrier(), 0, 1, [&](std::size_t l) { return nuP[l]; }));
    Ultrafilter sum = ufSum(kappa, nu);
    std::vector<std::size_t> ht(sumP.carrier().n);
    for (std::size_t c = 0; c < ht.size(); ++c) {
      auto [l, t] = sumP.sumInfo().decode(c);
      ht[c] = sum.sumInfo().code(ft[l], gs[l].apply(t));
    }
    UPMap h = UPMap::table(ht.size(), sum.carrier(), ht);
    std::string w = "lambda=" + lam.str() + " f=" + f.str() + " h=" + h.str();
    rep.check(inst, ufArrowCheck(h, sumP, sum), "induced arrow of sums", w);
    for (std::size_t e = 0; e < cfg.elements; ++e) {
      UPElement x = randomElement(rng, sum.carrier(), V);
      auto p1 = curry(sumP.sumInfo(), reindex(h, sumP, sum, x));
      auto y = curry(sum.sumInfo(), x);
      auto p2 = Nested2<std::size_t>::tabulate(lam.carrier(), 0, 1, [&](std::size_t l) {
        return reindex(gs[l], nuP[l], nu.at(ft[l]), y.at(ft[l]));
      });
      rep.check(inst, p1 == p2, "reindexing-ass", w + " x=" + elementStr(x));
    }
  }
}

// The same laws with the factorial ultrafilter as base; inner carriers are finite.
inline void coherenceFactorialInstance(std::mt19937_64& rng, const CoherenceConfig& cfg, std::size_t inst, LawReport& rep) {
  const std::size_t K = cfg.maxCarrier, P = cfg.probePeriod, V = cfg.valueBound;
  Ultrafilter mu = Ultrafilter::factorial();
  auto periodic = [&](std::size_t L, std::size_t q, std::size_t n) {
    std::vector<std::size_t> v(L + q);
    for (auto& x : v) x = below(rng, n);
    return v;
  };
  auto at = [](const std::vector<std::size_t>& v, std::size_t L, std::size_t q, std::size_t i) {
    return i < L ? v[i] : v[L + (i - L) % q];
  };
  auto deltas = [&](std::size_t L, std::size_t q, std::size_t m, const std::vector<std::size_t>& v) {
    return UFFamily::tabulate(IndexSet::natural(), L, q, [&](std::size_t i) { return Ultrafilter::principal(IndexSet::fin(m), v[i]); });
  };

  // associator
  std::size_t m1 = 1 + below(rng, K), m2 = 1 + below(rng, K);
  std::size_t Ln = below(rng, P + 1), qn = 1 + below(rng, P), Ll = below(rng, P + 1), ql = 1 + below(rng, P);
  UFFamily nus = deltas(Ln, qn, m1, periodic(Ln, qn, m1));
  Ultrafilter sigma = ufSum(mu, nus);
  UFFamily lams = deltas(Ll, ql, m2, periodic(Ll, ql, m2));
  std::string tag = "mu=factorial m1=" + std::to_string(m1) + " m2=" + std::to_string(m2);
  auto d = detail::associatorData(mu, nus, lams, std::max(Ln, Ll), std::lcm(qn, ql));
  for (std::size_t e = 0; e < cfg.elements; ++e) {
    std::size_t Lx = below(rng, P * m1 * m2 + 1), qx = 1 + below(rng, P * m1 * m2);
    UPElement x = randomElement(rng, IndexSet::natural(), V, Lx, qx);
    auto [p1, p2] = detail::associatorPaths(d, x, Lx, qx);
    rep.check(inst, p1 == p2, "ass-coh", tag + " x=" + elementStr(x));
    rep.check(inst, associatorInverse(d.outer, associatorApply(d.outer, x)) == x, "associator inverse", tag + " x=" + elementStr(x));
  }
  rep.check(inst, ufIso(d.outer, d.outer2).isomorphic(), "sum associativity", tag);

  // unitors
  Ultrafilter star = Ultrafilter::star();
  Ultrafilter left = ufSum(mu, UFFamily::constant(IndexSet::natural(), star));
  Ultrafilter right = ufSum(star, UFFamily::constant(IndexSet::star(), mu));
  rep.check(inst, ufIso(left, mu).isomorphic() && ufIso(right, mu).isomorphic(), "sum neutrality", tag);
  for (std::size_t e = 0; e < cfg.elements; ++e) {
    std::size_t Lx = below(rng, P + 1), qx = 1 + below(rng, P);
    UPElement x = randomElement(rng, IndexSet::natural(), V, Lx, qx);
    UPElement viaCurry = curry(left.sumInfo(), x).map([](const UPElement& y) { return y.at(0); });
    UPElement direct = UPElement::tabulate(IndexSet::natural(), Lx, qx, [&](std::size_t s) { return x.at(left.sumInfo().code(s, 0)); });
    rep.check(inst, viaCurry == direct, "unit-coh left", tag + " x=" + elementStr(x));
    UPElement viaCurryR = curry(right.sumInfo(), x).at(0);
    UPElement directR = UPElement::tabulate(IndexSet::natural(), Lx, qx, [&](std::size_t t) { return x.at(right.sumInfo().code(0, t)); });
    rep.check(inst, viaCurryR == directR, "unit-coh right", tag + " x=" + elementStr(x));

    Ultrafilter outerL = ufSum(left, nus);  // the carrier of left is N with s coded as s
    std::size_t Ly = below(rng, P * m1 + 1), qy = 1 + below(rng, P * m1);
    UPElement y = randomElement(rng, IndexSet::natural(), V, Ly, qy);
    auto p1 = curry(left.sumInfo(), curry(outerL.sumInfo(), y)).map([](const UPFamily<UPElement>& z) { return z.at(0); });
    UPElement y2 = UPElement::tabulate(IndexSet::natural(), detail::roundUp(Ly, m1), std::lcm(qy, m1), [&](std::size_t c) {
      auto [s, t] = sigma.sumInfo().decode(c);
      return y.at(outerL.sumInfo().code(left.sumInfo().code(s, 0), t));
    });
    rep.check(inst, p1 == curry(sigma.sumInfo(), y2), "unit-coh middle", tag + " x=" + elementStr(y));
  }

  auto randomNatMap = [&]() {
    switch (below(rng, 3)) {
      case 0: return UPMap::affine(1 + below(rng, 3), below(rng, 4));
      case 1: return UPMap::quotient(1 + below(rng, 3));
      default: {
        std::size_t m = 1 + below(rng, K), n = 1 + below(rng, K);
        std::vector<std::size_t> g(m);
        for (auto& v : g) v = below(rng, n);
        return UPMap::blockLift(UPMap::affine(1 + below(rng, 2), below(rng, 3)), m, n, g);
      }
    }
  };

  // reindexing is strictly functorial
  {
    UPMap f = randomNatMap(), g0 = randomNatMap();
    std::size_t k = 1 + below(rng, K);
    UPElement part = randomElement(rng, IndexSet::natural(), k, below(rng, P + 1), 1 + below(rng, P));
    std::vector<UPSet> parts;
    std::vector<std::size_t> vals;
    for (std::size_t i = 0; i < part.size(); ++i) {
      parts.push_back(part.level(i));
      vals.push_back(part.value(i));
    }
    UPMap toFin = UPMap::step(IndexSet::natural(), IndexSet::fin(k), parts, vals);
    UPMap g = (rng() & 1u) ? UPMap::compose(toFin, g0) : g0;
    Ultrafilter kappa = ufPushforward(mu, f), rho = ufPushforward(kappa, g);
    std::string w = "f=" + f.str() + " g=" + g.str();
    for (std::size_t e = 0; e < cfg.elements; ++e) {
      UPElement x = randomElement(rng, rho.carrier(), V, below(rng, P + 1), 1 + below(rng, P));
      rep.check(inst, reindex(UPMap::compose(g, f), mu, rho, x) == reindex(f, mu, kappa, reindex(g, kappa, rho, x)),
                "reindexing-fctorial", w + " x=" + elementStr(x));
      UPElement y = randomElement(rng, IndexSet::natural(), V, below(rng, P + 1), 1 + below(rng, P));
      rep.check(inst, reindex(UPMap::affine(1, 0), mu, mu, y) == y,
                "reindexing identity", w);
    }
  }

  // reindexing respects associators, along f = affine(a, b) with a uniform inner map
  {
    std::size_t a = 1 + below(rng, 3), b = below(rng, 4);
    UPMap f = UPMap::affine(a, b);
    Ultrafilter kappa = ufPushforward(mu, f);
    std::size_t mp = 1 + below(rng, K), m = 1 + below(rng, K);
    std::vector<std::size_t> g(mp);
    for (auto& v : g) v = below(rng, m);
    std::size_t Lq = below(rng, P + 1), Pq = 1 + below(rng, P), Pr = 1 + below(rng, P);
    auto qv = periodic(Lq, Pq, mp);
    auto rv = periodic(0, Pr, m);
    auto q = [&](std::size_t l) { return at(qv, Lq, Pq, l); };
    UFFamily nuP = UFFamily::tabulate(IndexSet::natural(), Lq, Pq, [&](std::size_t l) {
      return Ultrafilter::principal(IndexSet::fin(mp), q(l));
    });
    std::size_t Ln2 = b + a * Lq, qn2 = std::lcm(a * Pq, Pr);
    UFFamily nu = UFFamily::tabulate(IndexSet::natural(), Ln2, qn2, [&](std::size_t k) {
      std::size_t p = (k >= b && (k - b) % a == 0) ? g[q((k - b) / a)] : rv[k % Pr];
      return Ultrafilter::principal(IndexSet::fin(m), p);
    });
    Ultrafilter sumP = ufSum(mu, nuP), sum = ufSum(kappa, nu);
    UPMap h = UPMap::blockLift(f, mp, m, g);
    UPMap gm = UPMap::table(mp, IndexSet::fin(m), g);
    std::string w = "f=" + f.str() + " h=" + h.str();
    rep.check(inst, ufArrowCheck(h, sumP, sum), "induced arrow of sums", w);
    for (std::size_t e = 0; e < cfg.elements; ++e) {
      std::size_t Lx = below(rng, P * m + 1), qx = 1 + below(rng, P * m);
      UPElement x = randomElement(rng, IndexSet::natural(), V, Lx, qx);
      auto p1 = curry(sumP.sumInfo(), reindex(h, sumP, sum, x));
      auto y = curry(sum.sumInfo(), x);
      auto [Ly, qy] = y.periodicity();
      auto p2 = Nested2<std::size_t>::tabulate(IndexSet::natural(), std::max(Lq, Ly), std::lcm(Pq, qy), [&](std::size_t l) {
        return reindex(gm, nuP.at(l), nu.at(f.apply(l)), y.at(f.apply(l)));
      });
      rep.check(inst, p1 == p2, "reindexing-ass", w + " x=" + elementStr(x));
    }
  }
}

struct CoherenceKinds {
  bool fin = true, factorial = true;
};

// Instance i of each kind draws from seed.child(kind).child(i).
inline LawReport coherenceSuite(const SeedTree& seed, std::size_t instances, const CoherenceConfig& cfg = {},
                                CoherenceKinds kinds = {}, std::size_t first = 0) {
  LawReport rep;
  for (std::size_t k = 0; k < instances; ++k) {
    std::size_t inst = first + k;
    if (kinds.fin) {
      auto rng = seed.child("fin").child(inst).engine();
      coherenceFinInstance(rng, cfg, inst, rep);
      ++rep.instances;
    }
    if (kinds.factorial) {
      auto rng = seed.child("factorial").child(inst).engine();
      coherenceFactorialInstance(rng, cfg, inst, rep);
      ++rep.instances;
    }
  }
  return rep;
}

}  // namespace ultrakit
