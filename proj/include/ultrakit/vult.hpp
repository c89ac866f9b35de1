#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "finite_category.hpp"
#include "finite_space.hpp"
#include "ultraproduct.hpp"

namespace ultrakit {

// Instance-specific data carried by an ultraarrow.
//   FinSet:   images of the domain elements, as labels of the codomain ultraproduct
//   Alex:     {arrow of C}
//   PtSpace, Point: {}
//   Pullback: {len, left payload..., right payload...}
using Payload = std::vector<std::size_t>;

using ObjectFamily = UPFamily<std::size_t>;

// A virtual ultracategory with finitely many objects.  Every instance here is
// determined by its star-arrows: hom(a, (b_s)_mu) is in bijection with
// hom(a, (b)_star) for b the mu-limit of the family, with equal payloads.
class VUlt {
 public:
  virtual ~VUlt() = default;

  virtual std::string name() const = 0;
  virtual std::size_t objects() const = 0;
  virtual std::string objectName(std::size_t a) const { return std::to_string(a); }

  virtual std::vector<Payload> starHom(std::size_t a, std::size_t b) const = 0;
  virtual Payload starIdentity(std::size_t a) const = 0;
  // g o f for f : a -> b, g : b -> c
  virtual Payload starCompose(std::size_t a, std::size_t b, std::size_t c, const Payload& g, const Payload& f) const = 0;

  // Payloads of hom(a, fam) over mu.
  virtual std::vector<Payload> homPayloads(std::size_t a, const Ultrafilter& mu, const ObjectFamily& fam) const {
    return starHom(a, ultralimit(mu, fam));
  }

  const FiniteCategory& points() const { return points_; }
  const Payload& payloadOf(std::size_t arrow) const { return payloads_.at(arrow); }
  std::size_t arrowId(std::size_t a, std::size_t b, const Payload& p) const {
    auto it = ids_.find({a, b, p});
    return it == ids_.end() ? npos : it->second;
  }

 protected:
  // Builds the category of points; concrete constructors call this last.
  void finish() {
    std::size_t n = objects();
    std::vector<std::size_t> src, tgt, id(n);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        for (auto& p : starHom(a, b)) {
          ids_[{a, b, p}] = src.size();
          src.push_back(a);
          tgt.push_back(b);
          payloads_.push_back(p);
        }
    for (std::size_t a = 0; a < n; ++a) {
      id[a] = arrowId(a, a, starIdentity(a));
      require(id[a] != npos, ErrorKind::InvalidCategory, name() + ": identity of " + objectName(a) + " is not a star-arrow");
    }
    std::size_t A = src.size();
    std::vector<std::size_t> comp(A * A, npos);
    for (std::size_t g = 0; g < A; ++g)
      for (std::size_t f = 0; f < A; ++f) {
        if (tgt[f] != src[g]) continue;
        std::size_t h = arrowId(src[f], tgt[g], starCompose(src[f], tgt[f], tgt[g], payloads_[g], payloads_[f]));
        require(h != npos, ErrorKind::InvalidCategory, name() + ": composite is not a star-arrow");
        comp[g * A + f] = h;
      }
    points_ = FiniteCategory(n, src, tgt, id, comp);
    points_.validate();
  }

 private:
  FiniteCategory points_;
  std::vector<Payload> payloads_;
  std::map<std::tuple<std::size_t, std::size_t, Payload>, std::size_t> ids_;
};

using VUltPtr = std::shared_ptr<const VUlt>;

inline const FiniteCategory& vultPoints(const VUlt& X) { return X.points(); }

// ---- instances ---------------------------------------------------------

class PointVUlt final : public VUlt {
 public:
  PointVUlt() { finish(); }
  std::string name() const override { return "point"; }
  std::size_t objects() const override { return 1; }
  std::vector<Payload> starHom(std::size_t, std::size_t) const override { return {{}}; }
  Payload starIdentity(std::size_t) const override { return {}; }
  Payload starCompose(std::size_t, std::size_t, std::size_t, const Payload&, const Payload&) const override { return {}; }
  std::vector<Payload> homPayloads(std::size_t, const Ultrafilter&, const ObjectFamily&) const override { return {{}}; }
};

// Objects are the subsets of Fin(k), numbered by bitmask.
class FinSetVUlt final : public VUlt {
 public:
  explicit FinSetVUlt(std::size_t bound) : k_(bound) {
    require(bound <= 3, ErrorKind::BoundExceeded, "FinSet bound above 3");
    finish();
  }
  std::size_t bound() const { return k_; }
  std::string name() const override { return "finset(" + std::to_string(k_) + ")"; }
  std::size_t objects() const override { return std::size_t{1} << k_; }
  std::string objectName(std::size_t a) const override {
    std::string s = "{";
    for (auto e : elements(a)) s += (s.size() > 1 ? "," : "") + std::to_string(e);
    return s + "}";
  }

  static std::vector<std::size_t> elements(std::size_t mask) {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < 32; ++j)
      if ((mask >> j) & 1u) out.push_back(j);
    return out;
  }

  std::vector<Payload> starHom(std::size_t a, std::size_t b) const override { return functions(elements(a).size(), elements(b)); }
  Payload starIdentity(std::size_t a) const override { return elements(a); }
  Payload starCompose(std::size_t, std::size_t b, std::size_t, const Payload& g, const Payload& f) const override {
    auto eb = elements(b);
    Payload h;
    for (auto x : f) h.push_back(g[static_cast<std::size_t>(std::find(eb.begin(), eb.end(), x) - eb.begin())]);
    return h;
  }
  // Functions into the enumerated ultraproduct of the codomain family.
  std::vector<Payload> homPayloads(std::size_t a, const Ultrafilter& mu, const ObjectFamily& fam) const override {
    BoundedFamily bf = BoundedFamily::fromMasks(fam, k_);
    std::vector<std::size_t> labels;
    if (!mu.large(bf.emptyFibers())) labels = uprodEnumerate(mu, bf).labels;
    return functions(elements(a).size(), labels);
  }

 private:
  static std::vector<Payload> functions(std::size_t n, const std::vector<std::size_t>& into) {
    std::vector<Payload> out;
    if (into.empty()) {
      if (n == 0) out.push_back({});
      return out;
    }
    std::vector<std::size_t> d(n, 0);
    while (true) {
      Payload p;
      for (auto i : d) p.push_back(into[i]);
      out.push_back(p);
      std::size_t i = 0;
      while (i < n && ++d[i] == into.size()) d[i++] = 0;
      if (i == n) break;
    }
    return out;
  }

  std::size_t k_;
};

class PtSpaceVUlt final : public VUlt {
 public:
  explicit PtSpaceVUlt(FiniteSpace T) : T_(std::move(T)) { finish(); }
  const FiniteSpace& space() const { return T_; }
  std::string name() const override { return "pt(" + T_.str() + ")"; }
  std::size_t objects() const override { return T_.size(); }
  std::vector<Payload> starHom(std::size_t a, std::size_t b) const override {
    if (T_.leq(a, b)) return {{}};
    return {};
  }
  Payload starIdentity(std::size_t) const override { return {}; }
  Payload starCompose(std::size_t, std::size_t, std::size_t, const Payload&, const Payload&) const override { return {}; }
  std::vector<Payload> homPayloads(std::size_t a, const Ultrafilter& mu, const ObjectFamily& fam) const override {
    if (ucvg(T_, a, PointFamily{mu, fam})) return {{}};
    return {};
  }

 private:
  FiniteSpace T_;
};

class AlexVUlt final : public VUlt {
 public:
  explicit AlexVUlt(FiniteCategory C) : C_(std::move(C)) {
    C_.validate();
    finish();
  }
  const FiniteCategory& category() const { return C_; }
  std::string name() const override { return "alex(" + C_.str() + ")"; }
  std::size_t objects() const override { return C_.objects(); }
  std::vector<Payload> starHom(std::size_t a, std::size_t b) const override {
    std::vector<Payload> out;
    for (auto f : C_.hom(a, b)) out.push_back({f});
    return out;
  }
  Payload starIdentity(std::size_t a) const override { return {C_.identity(a)}; }
  Payload starCompose(std::size_t, std::size_t, std::size_t, const Payload& g, const Payload& f) const override {
    return {C_.compose(g[0], f[0])};
  }
  // Hom sets encoded as subsets of the arrow set; the ultraproduct of C(a, b_s).
  std::vector<Payload> homPayloads(std::size_t a, const Ultrafilter& mu, const ObjectFamily& fam) const override {
    BoundedFamily bf{fam.index(), C_.arrows(), {}};
    for (std::size_t j = 0; j < C_.arrows(); ++j) {
      std::size_t t = C_.target(j);
      bf.fibers.push_back(C_.source(j) == a ? fam.where([t](std::size_t b) { return b == t; }) : UPSet::empty());
    }
    std::vector<Payload> out;
    if (mu.large(bf.emptyFibers())) return out;
    for (auto j : uprodEnumerate(mu, bf).labels) out.push_back({j});
    return out;
  }

 private:
  FiniteCategory C_;
};

// ---- ultraarrows -------------------------------------------------------

struct UltraArrow {
  std::size_t dom = 0;
  Ultrafilter mu;
  ObjectFamily cod;
  Payload payload;

  friend bool operator==(const UltraArrow& x, const UltraArrow& y) {
    return x.dom == y.dom && x.mu.carrier() == y.mu.carrier() && x.mu == y.mu && x.cod == y.cod && x.payload == y.payload;
  }

  std::string str() const {
    std::string s = std::to_string(dom) + " -> (";
    for (std::size_t i = 0; i < cod.size(); ++i) s += (i ? "," : "") + cod.level(i).str() + "=>" + std::to_string(cod.value(i));
    s += ") over " + mu.str() + " payload [";
    for (std::size_t i = 0; i < payload.size(); ++i) s += (i ? "," : "") + std::to_string(payload[i]);
    return s + "]";
  }
};

// Same arrow up to mu-almost-everywhere agreement of codomains.
inline bool arrowEq(const UltraArrow& x, const UltraArrow& y) {
  if (x.dom != y.dom || x.payload != y.payload || x.mu.carrier() != y.mu.carrier() || !(x.mu == y.mu)) return false;
  return x.mu.large(agreementSet(x.cod, y.cod));
}

inline std::size_t codomainLimit(const UltraArrow& f) { return ultralimit(f.mu, f.cod); }

inline void checkQuery(const VUlt& X, std::size_t a, const Ultrafilter& mu, const ObjectFamily& fam) {
  require(a < X.objects(), ErrorKind::TypeMismatch, "object " + std::to_string(a) + " outside " + X.name());
  require(fam.index() == mu.carrier(), ErrorKind::CarrierMismatch, "family over " + fam.index().str() + " under " + mu.str());
  for (auto b : fam.values()) require(b < X.objects(), ErrorKind::TypeMismatch, "family value outside " + X.name());
}

inline std::vector<UltraArrow> vultHom(const VUlt& X, std::size_t a, const Ultrafilter& mu, const ObjectFamily& fam) {
  checkQuery(X, a, mu, fam);
  std::vector<UltraArrow> out;
  for (auto& p : X.homPayloads(a, mu, fam)) out.push_back({a, mu, fam, p});
  return out;
}

inline UltraArrow starArrow(const VUlt& X, std::size_t arrow) {
  const auto& P = X.points();
  return {P.source(arrow), Ultrafilter::star(), ObjectFamily::constant(IndexSet::star(), P.target(arrow)), X.payloadOf(arrow)};
}

inline UltraArrow vultIdentity(const VUlt& X, std::size_t a) { return starArrow(X, X.points().identity(a)); }

// The star-arrow a -> lim cod corresponding to f.
inline std::size_t starOf(const VUlt& X, const UltraArrow& f) {
  std::size_t id = X.arrowId(f.dom, codomainLimit(f), f.payload);
  require(id != npos, ErrorKind::TypeMismatch, "payload is not an arrow of " + X.name() + ": " + f.str());
  return id;
}

// Composite of f : a -> (b_s)_mu with gs(s) : b_s -> (c_st)_{nu_s}, typed by the sum.
inline UltraArrow vultCompose(const VUlt& X, const UltraArrow& f, const UPFamily<UltraArrow>& gs) {
  require(gs.index() == f.mu.carrier(), ErrorKind::CarrierMismatch, "composing family over " + gs.index().str());
  auto doms = gs.map([](const UltraArrow& g) { return g.dom; });
  if (!f.mu.large(agreementSet(doms, f.cod)))
    fail(ErrorKind::TypeMismatch, "domains of the second family do not match " + f.str());
  UFFamily nus = gs.map([](const UltraArrow& g) { return g.mu; });
  Ultrafilter sum = ufSum(f.mu, nus);
  ObjectFamily cod = uncurry(sum.sumInfo(), gs.map([](const UltraArrow& g) { return g.cod; }));
  const UltraArrow& g = ultralimit(f.mu, gs);
  std::size_t b = codomainLimit(f), c = codomainLimit(g);
  Payload p = X.starCompose(f.dom, b, c, g.payload, f.payload);
  return {f.dom, sum, cod, p};
}

// ---- functors and natural transformations --------------------------------

// Arrow images are star-arrow ids; npos marks a star-arrow with no image.
struct VUltFunctor {
  VUltPtr src, tgt;
  std::vector<std::size_t> obj, arr;

  UltraArrow apply(const UltraArrow& f) const {
    std::size_t id = starOf(*src, f);
    require(arr.at(id) != npos, ErrorKind::FunctorialityViolation, "no image for " + f.str());
    const auto& o = obj;
    return {obj.at(f.dom), f.mu, f.cod.map([&o](std::size_t b) { return o.at(b); }), tgt->payloadOf(arr[id])};
  }
  CatFunctor onPoints() const { return {obj, arr}; }
};

inline VUltFunctor identityFunctor(VUltPtr X) {
  auto F = identityFunctor(X->points());
  return {X, X, F.obj, F.arr};
}

inline VUltFunctor composeFunctors(const VUltFunctor& G, const VUltFunctor& F) {
  require(F.tgt == G.src, ErrorKind::TypeMismatch, "functors do not compose");
  VUltFunctor H{F.src, G.tgt, {}, {}};
  for (auto o : F.obj) H.obj.push_back(G.obj[o]);
  for (auto a : F.arr) H.arr.push_back(a == npos ? npos : G.arr[a]);
  return H;
}

// Object map extended to star-arrows by payload translation.
template <class PayloadMap>
VUltFunctor functorFromPayloads(VUltPtr src, VUltPtr tgt, std::vector<std::size_t> obj, PayloadMap pm) {
  const auto& P = src->points();
  VUltFunctor F{src, tgt, std::move(obj), std::vector<std::size_t>(P.arrows(), npos)};
  for (std::size_t f = 0; f < P.arrows(); ++f) {
    std::optional<Payload> q = pm(f, src->payloadOf(f));
    if (q) F.arr[f] = tgt->arrowId(F.obj.at(P.source(f)), F.obj.at(P.target(f)), *q);
  }
  return F;
}

// Object map into a target with at most one star-arrow per pair (posetal).
inline VUltFunctor functorFromObjects(VUltPtr src, VUltPtr tgt, std::vector<std::size_t> obj) {
  const auto& P = src->points();
  const auto& Q = tgt->points();
  VUltFunctor F{src, tgt, std::move(obj), std::vector<std::size_t>(P.arrows(), npos)};
  for (std::size_t f = 0; f < P.arrows(); ++f) {
    const auto& h = Q.hom(F.obj.at(P.source(f)), F.obj.at(P.target(f)));
    if (h.size() == 1) F.arr[f] = h[0];
  }
  return F;
}

inline VUltFunctor spaceFunctor(std::shared_ptr<const PtSpaceVUlt> src, std::shared_ptr<const PtSpaceVUlt> tgt, const SpaceMap& f) {
  return functorFromObjects(src, tgt, f.map);
}

// ---- probes ------------------------------------------------------------

// Named probe configuration.  probe-v1: star families, delta_0 / delta_1 on
// Fin(2) over every pair of objects, and FactorialUF families with empty
// prefix and period <= period (at most cap of them per domain object).
struct ProbeConfig {
  std::string version = "probe-v1";
  std::size_t period = 4;
  std::size_t cap = 64;
};

template <class Visit>
void forEachProbe(const VUlt& X, const ProbeConfig& cfg, Visit visit) {
  std::size_t n = X.objects();
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) visit(a, Ultrafilter::star(), ObjectFamily::constant(IndexSet::star(), b));
    for (std::size_t p = 0; p < 2; ++p) {
      Ultrafilter d = Ultrafilter::principal(IndexSet::fin(2), p);
      for (std::size_t b0 = 0; b0 < n; ++b0)
        for (std::size_t b1 = 0; b1 < n; ++b1)
          visit(a, d, ObjectFamily::tabulate(IndexSet::fin(2), 0, 1, [&](std::size_t s) { return s == 0 ? b0 : b1; }));
    }
    Ultrafilter fac = Ultrafilter::factorial();
    forEachUPFunction(IndexSet::natural(), n, 0, cfg.period, cfg.cap, [&](const ObjectFamily& fam) { visit(a, fac, fam); });
  }
}

struct ValidationReport {
  bool ok = true;
  std::string probe;
  std::size_t queries = 0;
  std::string witness;

  std::string scope() const { return "validated on probe set " + probe; }
};

// Second-stage families: level i of fam continues with the r-th star-arrow out of its value.
inline std::vector<UPFamily<UltraArrow>> probeContinuations(const VUlt& X, const Ultrafilter& mu, const ObjectFamily& fam,
                                                            std::size_t choices) {
  const auto& P = X.points();
  std::vector<UPFamily<UltraArrow>> out;
  for (std::size_t r = 0; r < choices; ++r) {
    std::vector<std::pair<UPSet, UltraArrow>> pieces;
    for (std::size_t i = 0; i < fam.size(); ++i) {
      auto outs = P.outOf(fam.value(i));
      pieces.emplace_back(fam.level(i), starArrow(X, outs[r % outs.size()]));
    }
    out.emplace_back(mu.carrier(), std::move(pieces));
  }
  return out;
}

inline ValidationReport functorValidate(const VUltFunctor& F, const ProbeConfig& cfg = {}) {
  ValidationReport rep{true, cfg.version, 0, {}};
  const VUlt& X = *F.src;
  const VUlt& Y = *F.tgt;
  const auto& P = X.points();
  auto bad = [&](std::string w) {
    rep.ok = false;
    rep.witness = std::move(w);
    return rep;
  };
  if (F.obj.size() != X.objects() || F.arr.size() != P.arrows()) return bad("object or arrow map has the wrong length");
  for (auto o : F.obj)
    if (o >= Y.objects()) return bad("object image outside " + Y.name());
  for (std::size_t f = 0; f < P.arrows(); ++f)
    if (F.arr[f] == npos)
      return bad("query " + std::to_string(P.source(f)) + " -> (" + std::to_string(P.target(f)) + ")_star has no image");
  if (!isFunctor(P, Y.points(), F.onPoints())) return bad("star-arrow map is not functorial");
  forEachProbe(X, cfg, [&](std::size_t a, const Ultrafilter& mu, const ObjectFamily& fam) {
    if (!rep.ok) return;
    ++rep.queries;
    ObjectFamily ffam = fam.map([&](std::size_t b) { return F.obj[b]; });
    auto target = vultHom(Y, F.obj[a], mu, ffam);
    auto id = vultIdentity(X, a);
    if (!arrowEq(F.apply(id), vultIdentity(Y, F.obj[a]))) {
      bad("identity of " + std::to_string(a) + " not preserved");
      return;
    }
    for (auto& f : vultHom(X, a, mu, fam)) {
      UltraArrow Ff = F.apply(f);
      bool found = false;
      for (auto& g : target) found = found || arrowEq(g, Ff);
      if (!found) {
        bad("image of " + f.str() + " is not in the target hom");
        return;
      }
      for (auto& gs : probeContinuations(X, mu, fam, 2)) {
        UltraArrow lhs = F.apply(vultCompose(X, f, gs));
        UltraArrow rhs = vultCompose(Y, Ff, gs.map([&](const UltraArrow& g) { return F.apply(g); }));
        if (!arrowEq(lhs, rhs)) {
          bad("composite through " + f.str() + " not preserved");
          return;
        }
      }
    }
  });
  return rep;
}

// alpha[a] : F a -> G a, as star-arrow ids of the common target.
inline ValidationReport natValidate(const VUltFunctor& F, const VUltFunctor& G, const std::vector<std::size_t>& alpha,
                                    const ProbeConfig& cfg = {}) {
  ValidationReport rep{true, cfg.version, 0, {}};
  const VUlt& Y = *F.tgt;
  const auto& Q = Y.points();
  if (F.src != G.src || F.tgt != G.tgt || alpha.size() != F.src->objects()) {
    rep.ok = false;
    rep.witness = "functors or components do not match";
    return rep;
  }
  for (std::size_t a = 0; a < alpha.size(); ++a)
    if (alpha[a] >= Q.arrows() || Q.source(alpha[a]) != F.obj[a] || Q.target(alpha[a]) != G.obj[a]) {
      rep.ok = false;
      rep.witness = "component at " + std::to_string(a) + " has the wrong type";
      return rep;
    }
  forEachProbe(*F.src, cfg, [&](std::size_t a, const Ultrafilter& mu, const ObjectFamily& fam) {
    if (!rep.ok) return;
    ++rep.queries;
    for (auto& f : vultHom(*F.src, a, mu, fam)) {
      UltraArrow lhs = vultCompose(Y, starArrow(Y, alpha[a]), UPFamily<UltraArrow>::constant(IndexSet::star(), G.apply(f)));
      UltraArrow rhs = vultCompose(Y, F.apply(f), fam.map([&](std::size_t b) { return starArrow(Y, alpha[b]); }));
      if (lhs.dom != rhs.dom || lhs.payload != rhs.payload || !(lhs.mu == rhs.mu) ||
          ultralimit(lhs.mu, lhs.cod) != ultralimit(rhs.mu, rhs.cod)) {
        rep.ok = false;
        rep.witness = "naturality fails at " + f.str();
        return;
      }
    }
  });
  return rep;
}

// ---- strict 2-pullbacks ------------------------------------------------

// Objects (theta, x, y) with theta : F x -> G y an isomorphism among points.
class PullbackVUlt final : public VUlt {
 public:
  struct Triple {
    std::size_t theta, x, y;
  };

  PullbackVUlt(VUltFunctor F, VUltFunctor G) : F_(std::move(F)), G_(std::move(G)) {
    require(F_.tgt == G_.tgt, ErrorKind::TypeMismatch, "pullback of functors with different codomains");
    const auto& C = F_.tgt->points();
    for (std::size_t x = 0; x < F_.src->objects(); ++x)
      for (std::size_t y = 0; y < G_.src->objects(); ++y)
        for (auto th : C.hom(F_.obj[x], G_.obj[y]))
          if (C.isIso(th)) triples_.push_back({th, x, y});
    finish();
  }

  const VUltFunctor& left() const { return F_; }
  const VUltFunctor& right() const { return G_; }
  const Triple& triple(std::size_t i) const { return triples_.at(i); }
  std::size_t find(std::size_t theta, std::size_t x, std::size_t y) const {
    for (std::size_t i = 0; i < triples_.size(); ++i)
      if (triples_[i].theta == theta && triples_[i].x == x && triples_[i].y == y) return i;
    return npos;
  }

  std::string name() const override { return "pullback(" + F_.src->name() + "," + G_.src->name() + ")"; }
  std::size_t objects() const override { return triples_.size(); }
  std::string objectName(std::size_t i) const override {
    const auto& t = triples_[i];
    return "(" + std::to_string(t.theta) + "," + F_.src->objectName(t.x) + "," + G_.src->objectName(t.y) + ")";
  }

  static Payload pack(const Payload& f, const Payload& g) {
    Payload p{f.size()};
    p.insert(p.end(), f.begin(), f.end());
    p.insert(p.end(), g.begin(), g.end());
    return p;
  }
  static std::pair<Payload, Payload> unpack(const Payload& p) {
    std::size_t n = p.at(0);
    return {Payload(p.begin() + 1, p.begin() + 1 + static_cast<std::ptrdiff_t>(n)),
            Payload(p.begin() + 1 + static_cast<std::ptrdiff_t>(n), p.end())};
  }

  std::vector<Payload> starHom(std::size_t i, std::size_t j) const override {
    const auto& a = triples_[i];
    const auto& b = triples_[j];
    std::vector<Payload> out;
    for (auto& f : F_.src->starHom(a.x, b.x))
      for (auto& g : G_.src->starHom(a.y, b.y))
        if (compatible(a, b, f, g)) out.push_back(pack(f, g));
    return out;
  }
  Payload starIdentity(std::size_t i) const override {
    return pack(F_.src->starIdentity(triples_[i].x), G_.src->starIdentity(triples_[i].y));
  }
  Payload starCompose(std::size_t i, std::size_t j, std::size_t k, const Payload& g, const Payload& f) const override {
    auto [g1, g2] = unpack(g);
    auto [f1, f2] = unpack(f);
    const auto &a = triples_[i], &b = triples_[j], &c = triples_[k];
    return pack(F_.src->starCompose(a.x, b.x, c.x, g1, f1), G_.src->starCompose(a.y, b.y, c.y, g2, f2));
  }
  // Pairs of arrows in the two factors whose images agree under theta-conjugation.
  std::vector<Payload> homPayloads(std::size_t i, const Ultrafilter& mu, const ObjectFamily& fam) const override {
    const auto& a = triples_[i];
    auto xs = fam.map([&](std::size_t t) { return triples_[t].x; });
    auto ys = fam.map([&](std::size_t t) { return triples_[t].y; });
    const auto& b = triples_[ultralimit(mu, fam)];
    std::vector<Payload> out;
    for (auto& f : F_.src->homPayloads(a.x, mu, xs))
      for (auto& g : G_.src->homPayloads(a.y, mu, ys))
        if (compatible(a, b, f, g)) out.push_back(pack(f, g));
    return out;
  }

 private:
  // G(g) o theta == theta' o F(f)
  bool compatible(const Triple& a, const Triple& b, const Payload& f, const Payload& g) const {
    const auto& C = F_.tgt->points();
    std::size_t fi = F_.src->arrowId(a.x, b.x, f), gi = G_.src->arrowId(a.y, b.y, g);
    if (fi == npos || gi == npos || F_.arr[fi] == npos || G_.arr[gi] == npos) return false;
    return C.compose(G_.arr[gi], a.theta) == C.compose(b.theta, F_.arr[fi]);
  }

  VUltFunctor F_, G_;
  std::vector<Triple> triples_;
};

inline std::shared_ptr<const PullbackVUlt> vultPullback(const VUltFunctor& F, const VUltFunctor& G) {
  return std::make_shared<const PullbackVUlt>(F, G);
}

// The two projections out of a pullback.
inline std::pair<VUltFunctor, VUltFunctor> pullbackProjections(const std::shared_ptr<const PullbackVUlt>& P) {
  std::vector<std::size_t> xs, ys;
  for (std::size_t i = 0; i < P->objects(); ++i) {
    xs.push_back(P->triple(i).x);
    ys.push_back(P->triple(i).y);
  }
  auto left = functorFromPayloads(P, P->left().src, xs, [](std::size_t, const Payload& p) {
    return std::optional<Payload>(PullbackVUlt::unpack(p).first);
  });
  auto right = functorFromPayloads(P, P->right().src, ys, [](std::size_t, const Payload& p) {
    return std::optional<Payload>(PullbackVUlt::unpack(p).second);
  });
  return {left, right};
}

}  // namespace ultrakit
