#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ultrasheaf.hpp"

namespace ultrakit {

// X2 => X1 => X0 with s, t : X1 -> X0, u : X0 -> X1 and m, p1, p2 : X2 -> X1.
// An object w of X2 is a composable pair p1(w) then p2(w), with composite m(w).
struct CodescentDiagram {
  VUltPtr X0, X1, X2;
  VUltFunctor s, t, u, m, p1, p2;
};

inline std::optional<std::string> simplicialViolation(const CodescentDiagram& D) {
  auto same = [](const CatFunctor& F, const CatFunctor& G) { return F == G; };
  CatFunctor id0 = identityFunctor(D.X0->points());
  const auto s = D.s.onPoints(), t = D.t.onPoints(), u = D.u.onPoints();
  const auto m = D.m.onPoints(), p1 = D.p1.onPoints(), p2 = D.p2.onPoints();
  if (!same(composeFunctors(s, u), id0)) return "s o u is not the identity";
  if (!same(composeFunctors(t, u), id0)) return "t o u is not the identity";
  if (!same(composeFunctors(s, m), composeFunctors(s, p1))) return "s o m differs from s o p1";
  if (!same(composeFunctors(t, m), composeFunctors(t, p2))) return "t o m differs from t o p2";
  if (!same(composeFunctors(t, p1), composeFunctors(s, p2))) return "t o p1 differs from s o p2";
  for (auto* F : {&D.s, &D.t, &D.u, &D.m, &D.p1, &D.p2})
    if (!isFunctor(F->src->points(), F->tgt->points(), F->onPoints())) return "a structure map is not a functor";
  return std::nullopt;
}

// Groupoid kernel of F : X0 -> Z built from strict 2-pullbacks.
inline CodescentDiagram kernelGroupoid(const VUltFunctor& F) {
  auto X1 = vultPullback(F, F);
  auto [s, t] = pullbackProjections(X1);
  auto X2 = vultPullback(composeFunctors(F, t), F);
  auto [p1, last] = pullbackProjections(X2);
  const auto& C = F.tgt->points();

  std::vector<std::size_t> uo, mo, p2o;
  for (std::size_t x = 0; x < F.src->objects(); ++x) uo.push_back(X1->find(C.identity(F.obj[x]), x, x));
  for (std::size_t w = 0; w < X2->objects(); ++w) {
    const auto& tw = X2->triple(w);
    const auto& k = X1->triple(tw.x);
    mo.push_back(X1->find(C.compose(tw.theta, k.theta), k.x, tw.y));
    p2o.push_back(X1->find(tw.theta, k.y, tw.y));
  }
  auto u = functorFromPayloads(F.src, X1, uo, [](std::size_t, const Payload& p) { return std::optional<Payload>(PullbackVUlt::pack(p, p)); });
  auto m = functorFromPayloads(X2, X1, mo, [](std::size_t, const Payload& p) {
    auto [k, z] = PullbackVUlt::unpack(p);
    return std::optional<Payload>(PullbackVUlt::pack(PullbackVUlt::unpack(k).first, z));
  });
  auto p2 = functorFromPayloads(X2, X1, p2o, [](std::size_t, const Payload& p) {
    auto [k, z] = PullbackVUlt::unpack(p);
    return std::optional<Payload>(PullbackVUlt::pack(PullbackVUlt::unpack(k).second, z));
  });
  return {F.src, X1, X2, s, t, u, m, p1, p2};
}

// ---- cocones -------------------------------------------------------------

// F : X0 -> Z on points, theta[k] : F(s k) -> F(t k) for each object k of X1.
struct DescentCocone {
  VUltPtr Z;
  CatFunctor F;
  std::vector<std::size_t> theta;
};

struct CoconeCheck {
  bool ok = true;
  std::string condition, witness;
};

inline CoconeCheck coconeValidate(const CodescentDiagram& D, const DescentCocone& c) {
  const auto& P0 = D.X0->points();
  const auto& P1 = D.X1->points();
  const auto& Z = c.Z->points();
  auto bad = [](std::string cond, std::string w) { return CoconeCheck{false, std::move(cond), std::move(w)}; };
  if (!isFunctor(P0, Z, c.F)) return bad("functor", "F is not a functor on points");
  if (c.theta.size() != D.X1->objects()) return bad("components", "one component per object of X1 expected");
  for (std::size_t k = 0; k < c.theta.size(); ++k) {
    std::size_t th = c.theta[k];
    if (th >= Z.arrows() || Z.source(th) != c.F.obj[D.s.obj[k]] || Z.target(th) != c.F.obj[D.t.obj[k]])
      return bad("components", "theta at " + D.X1->objectName(k) + " has the wrong type");
    if (!Z.isIso(th)) return bad("invertibility", "theta at " + D.X1->objectName(k) + " is not invertible");
  }
  for (std::size_t w = 0; w < P1.arrows(); ++w) {
    std::size_t k = P1.source(w), l = P1.target(w);
    if (Z.compose(c.F.arr[D.t.arr[w]], c.theta[k]) != Z.compose(c.theta[l], c.F.arr[D.s.arr[w]]))
      return bad("naturality", "arrow " + D.X1->objectName(k) + " -> " + D.X1->objectName(l));
  }
  for (std::size_t x = 0; x < P0.objects(); ++x)
    if (c.theta[D.u.obj[x]] != Z.identity(c.F.obj[x])) return bad("unit", "object " + D.X0->objectName(x));
  for (std::size_t w = 0; w < D.X2->objects(); ++w)
    if (c.theta[D.m.obj[w]] != Z.compose(c.theta[D.p2.obj[w]], c.theta[D.p1.obj[w]]))
      return bad("cocycle", "simplex " + D.X2->objectName(w));
  return {};
}

// The cocone of F over its own kernel: theta at (theta, x, y) is theta.
inline DescentCocone canonicalCocone(const VUltFunctor& F, const CodescentDiagram& K) {
  auto X1 = std::dynamic_pointer_cast<const PullbackVUlt>(K.X1);
  require(X1 != nullptr, ErrorKind::TypeMismatch, "not a kernel diagram");
  DescentCocone c{F.tgt, F.onPoints(), {}};
  for (std::size_t k = 0; k < X1->objects(); ++k) c.theta.push_back(X1->triple(k).theta);
  return c;
}

// ---- the descent category ------------------------------------------------

struct DescObject {
  CatFunctor F;
  std::vector<std::size_t> theta;
  friend bool operator==(const DescObject& a, const DescObject& b) { return a.F == b.F && a.theta == b.theta; }
  friend bool operator<(const DescObject& a, const DescObject& b) {
    return a.F == b.F ? a.theta < b.theta : a.F < b.F;
  }
};

// Objects are the cocones with apex Y; an arrow (F, theta) -> (F', theta') is
// alpha : F => F' with alpha_t o theta = theta' o alpha_s.
class DescCategory {
 public:
  DescCategory(const CodescentDiagram& D, VUltPtr Y) : D_(D), Y_(std::move(Y)) {
    const auto& P0 = D_.X0->points();
    const auto& P1 = D_.X1->points();
    const auto& Z = Y_->points();
    std::size_t n1 = D_.X1->objects();
    // constraints keyed by the largest X1 object they mention
    std::vector<std::vector<std::size_t>> natAt(n1), cocAt(n1);
    for (std::size_t w = 0; w < P1.arrows(); ++w) natAt[std::max(P1.source(w), P1.target(w))].push_back(w);
    for (std::size_t w = 0; w < D_.X2->objects(); ++w)
      cocAt[std::max({D_.m.obj[w], D_.p1.obj[w], D_.p2.obj[w]})].push_back(w);
    std::vector<std::size_t> unitOf(n1, npos);
    for (std::size_t x = 0; x < P0.objects(); ++x) unitOf[D_.u.obj[x]] = x;

    enumerateFunctors(P0, Z, [&](const CatFunctor& F) {
      std::vector<std::size_t> theta(n1, npos);
      std::function<void(std::size_t)> rec = [&](std::size_t k) {
        if (k == n1) {
          objects_.push_back({F, theta});
          return;
        }
        std::size_t a = F.obj[D_.s.obj[k]], b = F.obj[D_.t.obj[k]];
        for (auto th : Z.hom(a, b)) {
          if (!Z.isIso(th)) continue;
          if (unitOf[k] != npos && th != Z.identity(a)) continue;
          theta[k] = th;
          bool ok = true;
          for (auto w : natAt[k]) {
            std::size_t i = P1.source(w), j = P1.target(w);
            ok = ok && Z.compose(F.arr[D_.t.arr[w]], theta[i]) == Z.compose(theta[j], F.arr[D_.s.arr[w]]);
          }
          for (auto w : cocAt[k])
            ok = ok && theta[D_.m.obj[w]] == Z.compose(theta[D_.p2.obj[w]], theta[D_.p1.obj[w]]);
          if (ok) rec(k + 1);
        }
        theta[k] = npos;
      };
      rec(0);
      return true;
    });
  }

  const CodescentDiagram& diagram() const { return D_; }
  const VUltPtr& apex() const { return Y_; }
  std::size_t size() const { return objects_.size(); }
  const DescObject& object(std::size_t i) const { return objects_.at(i); }
  const std::vector<DescObject>& objects() const { return objects_; }
  std::size_t find(const DescObject& d) const {
    auto it = std::find(objects_.begin(), objects_.end(), d);
    return it == objects_.end() ? npos : static_cast<std::size_t>(it - objects_.begin());
  }

  bool isMorphism(const DescObject& a, const DescObject& b, const std::vector<std::size_t>& alpha) const {
    const auto& Z = Y_->points();
    for (std::size_t k = 0; k < D_.X1->objects(); ++k)
      if (Z.compose(alpha[D_.t.obj[k]], a.theta[k]) != Z.compose(b.theta[k], alpha[D_.s.obj[k]])) return false;
    return true;
  }

  template <class Visit>
  void forEachMorphism(const DescObject& a, const DescObject& b, Visit visit) const {
    enumerateNatTrans(D_.X0->points(), Y_->points(), a.F, b.F, [&](const std::vector<std::size_t>& alpha) {
      return isMorphism(a, b, alpha) ? visit(alpha) : true;
    });
  }

  std::vector<std::vector<std::size_t>> homs(std::size_t i, std::size_t j) const {
    std::vector<std::vector<std::size_t>> out;
    forEachMorphism(objects_[i], objects_[j], [&](const std::vector<std::size_t>& alpha) {
      out.push_back(alpha);
      return true;
    });
    return out;
  }

  bool isomorphic(const DescObject& a, const DescObject& b) const {
    const auto& Z = Y_->points();
    bool found = false;
    forEachMorphism(a, b, [&](const std::vector<std::size_t>& alpha) {
      found = std::all_of(alpha.begin(), alpha.end(), [&](std::size_t f) { return Z.isIso(f); });
      return !found;
    });
    return found;
  }

  // Representatives of the isomorphism classes, in enumeration order.
  std::vector<std::size_t> isoClasses() const {
    std::vector<std::size_t> reps;
    for (std::size_t i = 0; i < objects_.size(); ++i) {
      bool fresh = true;
      for (auto r : reps)
        if (isomorphic(objects_[r], objects_[i])) {
          fresh = false;
          break;
        }
      if (fresh) reps.push_back(i);
    }
    return reps;
  }

  // The whole category; only for small instances.
  FiniteCategory category(std::size_t maxArrows = 4096) const {
    const auto& Z = Y_->points();
    std::vector<std::size_t> src, tgt, id(objects_.size());
    std::vector<std::vector<std::size_t>> comps;
    std::map<std::tuple<std::size_t, std::size_t, std::vector<std::size_t>>, std::size_t> index;
    for (std::size_t i = 0; i < objects_.size(); ++i)
      for (std::size_t j = 0; j < objects_.size(); ++j)
        for (auto& alpha : homs(i, j)) {
          index[{i, j, alpha}] = src.size();
          src.push_back(i);
          tgt.push_back(j);
          comps.push_back(alpha);
          require(src.size() <= maxArrows, ErrorKind::BoundExceeded, "descent category above " + std::to_string(maxArrows) + " arrows");
        }
    for (std::size_t i = 0; i < objects_.size(); ++i) {
      std::vector<std::size_t> idc;
      for (auto x : objects_[i].F.obj) idc.push_back(Z.identity(x));
      id[i] = index.at({i, i, idc});
    }
    std::size_t A = src.size();
    std::vector<std::size_t> comp(A * A, npos);
    for (std::size_t g = 0; g < A; ++g)
      for (std::size_t f = 0; f < A; ++f) {
        if (tgt[f] != src[g]) continue;
        std::vector<std::size_t> c;
        for (std::size_t x = 0; x < comps[f].size(); ++x) c.push_back(Z.compose(comps[g][x], comps[f][x]));
        comp[g * A + f] = index.at({src[f], tgt[g], c});
      }
    FiniteCategory C(objects_.size(), src, tgt, id, comp);
    C.validate();
    return C;
  }

 private:
  CodescentDiagram D_;
  VUltPtr Y_;
  std::vector<DescObject> objects_;
};

inline DescCategory descCategory(const CodescentDiagram& D, VUltPtr Y) { return DescCategory(D, std::move(Y)); }

// ---- the effective descent criterion -------------------------------------

struct CriterionReport {
  bool surjective = true, lifting = true;
  std::string probe, witness;
  bool holds() const { return surjective && lifting; }
};

// Surjective on objects, and every probed arrow out of pi(x) lifts to an
// arrow out of x of the same type over a componentwise lift of its codomain.
inline CriterionReport effectiveDescentCriterion(const VUltFunctor& pi, const ProbeConfig& cfg = {}, std::size_t liftCap = 4096) {
  CriterionReport rep{true, true, cfg.version, {}};
  const VUlt& X = *pi.src;
  const VUlt& Z = *pi.tgt;
  std::vector<std::vector<std::size_t>> pre(Z.objects());
  for (std::size_t x = 0; x < X.objects(); ++x) pre[pi.obj[x]].push_back(x);
  for (std::size_t b = 0; b < Z.objects(); ++b)
    if (pre[b].empty()) {
      rep.surjective = false;
      rep.witness = "object " + Z.objectName(b) + " is not in the image";
      return rep;
    }
  forEachProbe(Z, cfg, [&](std::size_t a, const Ultrafilter& mu, const ObjectFamily& fam) {
    if (!rep.lifting) return;
    for (auto x : pre[a])
      for (auto& f : vultHom(Z, a, mu, fam)) {
        bool lifted = false;
        std::vector<std::size_t> pick(fam.size(), 0);
        std::size_t tried = 0;
        while (!lifted && tried++ < liftCap) {
          std::vector<std::pair<UPSet, std::size_t>> pieces;
          for (std::size_t i = 0; i < fam.size(); ++i) pieces.emplace_back(fam.level(i), pre[fam.value(i)][pick[i]]);
          ObjectFamily xs(mu.carrier(), std::move(pieces));
          for (auto& g : vultHom(X, x, mu, xs))
            if (arrowEq(pi.apply(g), f)) lifted = true;
          std::size_t i = 0;
          while (i < fam.size() && ++pick[i] == pre[fam.value(i)].size()) pick[i++] = 0;
          if (i == fam.size()) break;
        }
        if (!lifted) {
          rep.lifting = false;
          rep.witness = "no lift of " + f.str() + " out of " + X.objectName(x);
          return;
        }
      }
  });
  return rep;
}

// ---- universality ------------------------------------------------------

struct ApexResult {
  std::string apex;
  std::size_t homObjects = 0, descObjects = 0;
  bool essentiallySurjective = true, fullyFaithful = true;
  std::string witness;
  bool ok() const { return essentiallySurjective && fullyFaithful; }
};

struct UniversalityReport {
  std::string battery;
  std::vector<ApexResult> apexes;
  bool ok() const {
    return std::all_of(apexes.begin(), apexes.end(), [](const ApexResult& r) { return r.ok(); });
  }
};

struct ApexBattery {
  std::string version;
  std::vector<VUltPtr> apexes;
};

// battery-v1: FinSet bounds 1 and 2, the point, and every space with at most two points.
inline ApexBattery defaultBattery() {
  ApexBattery b{"battery-v1", {}};
  b.apexes.push_back(std::make_shared<const FinSetVUlt>(1));
  b.apexes.push_back(std::make_shared<const FinSetVUlt>(2));
  b.apexes.push_back(std::make_shared<const PointVUlt>());
  for (std::size_t n = 1; n <= 2; ++n)
    for (auto& T : enumerateSpaces(n)) b.apexes.push_back(std::make_shared<const PtSpaceVUlt>(T));
  return b;
}

// Precomposition Hom(Z, Y) -> Desc(X; Y), checked by enumerating both sides.
inline ApexResult universalityAt(const CodescentDiagram& D, const DescentCocone& c, const VUltPtr& Y) {
  ApexResult r{Y->name(), 0, 0, true, true, {}};
  const auto& PZ = c.Z->points();
  const auto& PY = Y->points();
  DescCategory desc(D, Y);
  r.descObjects = desc.size();
  auto Gs = allFunctors(PZ, PY);
  r.homObjects = Gs.size();
  std::vector<DescObject> images;
  for (auto& G : Gs) {
    DescObject d{composeFunctors(G, c.F), {}};
    for (auto th : c.theta) d.theta.push_back(G.arr[th]);
    images.push_back(d);
  }
  for (std::size_t i = 0; i < desc.size() && r.essentiallySurjective; ++i) {
    bool hit = false;
    for (auto& img : images)
      if (desc.isomorphic(img, desc.object(i))) {
        hit = true;
        break;
      }
    if (!hit) {
      r.essentiallySurjective = false;
      r.witness = "descent datum " + std::to_string(i) + " is not isomorphic to any image";
    }
  }
  for (std::size_t i = 0; i < Gs.size() && r.fullyFaithful; ++i)
    for (std::size_t j = 0; j < Gs.size() && r.fullyFaithful; ++j) {
      std::set<std::vector<std::size_t>> whiskered;
      std::size_t nat = 0;
      enumerateNatTrans(PZ, PY, Gs[i], Gs[j], [&](const std::vector<std::size_t>& beta) {
        std::vector<std::size_t> alpha;
        for (auto x : c.F.obj) alpha.push_back(beta[x]);
        whiskered.insert(alpha);
        ++nat;
        return true;
      });
      std::size_t dh = 0;
      desc.forEachMorphism(images[i], images[j], [&](const std::vector<std::size_t>&) {
        ++dh;
        return true;
      });
      if (whiskered.size() != nat || nat != dh) {
        r.fullyFaithful = false;
        r.witness = "functors " + std::to_string(i) + ", " + std::to_string(j) + ": " + std::to_string(nat) +
                    " transformations, " + std::to_string(whiskered.size()) + " distinct restrictions, " + std::to_string(dh) +
                    " descent morphisms";
      }
    }
  return r;
}

inline UniversalityReport universalityCheck(const CodescentDiagram& D, const DescentCocone& c, const ApexBattery& battery = defaultBattery()) {
  UniversalityReport rep{battery.version, {}};
  for (auto& Y : battery.apexes) rep.apexes.push_back(universalityAt(D, c, Y));
  return rep;
}

// ---- topological groupoids -----------------------------------------------

// Subspace of T x T on the given pairs.
inline FiniteSpace pairSubspace(const FiniteSpace& A, const FiniteSpace& B, const std::vector<std::pair<std::size_t, std::size_t>>& pts) {
  std::vector<Mask> up(pts.size(), 0);
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = 0; j < pts.size(); ++j)
      if (A.leq(pts[i].first, pts[j].first) && B.leq(pts[i].second, pts[j].second)) up[i] |= bit(j);
  return FiniteSpace::fromPreorder(up);
}

// Arrows g with source s(g), target t(g); m(g, h) = g o h for s(g) = t(h).
struct TopGroupoid {
  FiniteSpace T0, T1;
  SpaceMap s, t, u, inv;
  std::vector<std::size_t> mult;  // mult[g * |T1| + h], npos off T2

  std::vector<std::pair<std::size_t, std::size_t>> composable() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t g = 0; g < T1.size(); ++g)
      for (std::size_t h = 0; h < T1.size(); ++h)
        if (s(g) == t(h)) out.emplace_back(g, h);
    return out;
  }
  FiniteSpace T2() const { return pairSubspace(T1, T1, composable()); }
  std::size_t compose(std::size_t g, std::size_t h) const { return mult.at(g * T1.size() + h); }
  SpaceMap m() const {
    SpaceMap f{T2(), T1, {}};
    for (auto [g, h] : composable()) f.map.push_back(compose(g, h));
    return f;
  }
  SpaceMap first() const {
    SpaceMap f{T2(), T1, {}};
    for (auto [g, h] : composable()) f.map.push_back(h);
    return f;
  }
  SpaceMap second() const {
    SpaceMap f{T2(), T1, {}};
    for (auto [g, h] : composable()) f.map.push_back(g);
    return f;
  }

  void validate() const {
    std::size_t n1 = T1.size();
    require(mult.size() == n1 * n1, ErrorKind::InvalidGroupoid, "multiplication table size");
    for (auto* f : {&s, &t, &inv})
      require(f->source == T1 && f->target == (f == &inv ? T1 : T0), ErrorKind::InvalidGroupoid, "structure map types");
    require(u.source == T0 && u.target == T1, ErrorKind::InvalidGroupoid, "unit map type");
    for (std::size_t g = 0; g < n1; ++g)
      for (std::size_t h = 0; h < n1; ++h)
        require((s(g) == t(h)) == (compose(g, h) != npos), ErrorKind::InvalidGroupoid, "composite defined off T2");
    for (auto* f : {&s, &t, &u, &inv})
      if (!mapContinuous(*f)) fail(ErrorKind::InvalidGroupoid, "a structure map is not continuous");
    if (!mapContinuous(m())) fail(ErrorKind::InvalidGroupoid, "multiplication is not continuous");
    for (std::size_t x = 0; x < T0.size(); ++x)
      require(s(u(x)) == x && t(u(x)) == x, ErrorKind::InvalidGroupoid, "unit at " + std::to_string(x));
    for (auto [g, h] : composable()) {
      std::size_t gh = compose(g, h);
      require(s(gh) == s(h) && t(gh) == t(g), ErrorKind::InvalidGroupoid, "composite endpoints");
      for (std::size_t k = 0; k < n1; ++k)
        if (s(h) == t(k))
          require(compose(gh, k) == compose(g, compose(h, k)), ErrorKind::InvalidGroupoid, "associativity");
    }
    for (std::size_t g = 0; g < n1; ++g) {
      require(compose(g, u(s(g))) == g && compose(u(t(g)), g) == g, ErrorKind::InvalidGroupoid, "unit laws");
      require(compose(g, inv(g)) == u(t(g)) && compose(inv(g), g) == u(s(g)), ErrorKind::InvalidGroupoid, "inverse laws");
    }
  }

  static TopGroupoid trivial(const FiniteSpace& T) {
    std::vector<std::size_t> id(T.size()), mult(T.size() * T.size(), npos);
    for (std::size_t x = 0; x < T.size(); ++x) {
      id[x] = x;
      mult[x * T.size() + x] = x;
    }
    return {T, T, {T, T, id}, {T, T, id}, {T, T, id}, {T, T, id}, mult};
  }
  // A finite group acting on the one-point space; table[g][h] = g*h, 0 the unit.
  static TopGroupoid group(const std::vector<std::vector<std::size_t>>& table) {
    std::size_t n = table.size();
    FiniteSpace P = FiniteSpace::point(), G = FiniteSpace::discrete(n);
    std::vector<std::size_t> inv(n), mult(n * n);
    for (std::size_t g = 0; g < n; ++g)
      for (std::size_t h = 0; h < n; ++h) {
        mult[g * n + h] = table[g][h];
        if (table[g][h] == 0) inv[g] = h;
      }
    return {P, G, {G, P, std::vector<std::size_t>(n, 0)}, {G, P, std::vector<std::size_t>(n, 0)}, {P, G, {0}}, {G, G, inv}, mult};
  }
  static TopGroupoid z2() { return group({{0, 1}, {1, 0}}); }
  // Pair groupoid on a space: arrows (x, y) from y to x, numbered x * n + y.
  static TopGroupoid pair(const FiniteSpace& T) {
    std::size_t n = T.size();
    std::vector<std::pair<std::size_t, std::size_t>> pts;
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = 0; y < n; ++y) pts.emplace_back(x, y);
    FiniteSpace T1 = pairSubspace(T, T, pts);
    std::vector<std::size_t> s, t, u, inv, mult(n * n * n * n, npos);
    for (auto [x, y] : pts) {
      s.push_back(y);
      t.push_back(x);
      inv.push_back(y * n + x);
    }
    for (std::size_t x = 0; x < n; ++x) u.push_back(x * n + x);
    for (std::size_t g = 0; g < n * n; ++g)
      for (std::size_t h = 0; h < n * n; ++h)
        if (g % n == h / n) mult[g * n * n + h] = (g / n) * n + h % n;
    return {T, T1, {T1, T, s}, {T1, T, t}, {T, T1, u}, {T1, T1, inv}, mult};
  }
};

// The diagram pt(T2) => pt(T1) => pt(T0).
inline CodescentDiagram groupoidDiagram(const TopGroupoid& G) {
  auto X0 = std::make_shared<const PtSpaceVUlt>(G.T0);
  auto X1 = std::make_shared<const PtSpaceVUlt>(G.T1);
  auto X2 = std::make_shared<const PtSpaceVUlt>(G.T2());
  return {X0, X1, X2,
          spaceFunctor(X1, X0, G.s), spaceFunctor(X1, X0, G.t), spaceFunctor(X0, X1, G.u),
          spaceFunctor(X2, X1, G.m()), spaceFunctor(X2, X1, G.first()), spaceFunctor(X2, X1, G.second())};
}

// An etale space over T0 with act[g] : E_{s g} -> E_{t g} on fiber indices.
struct EquivariantSheaf {
  SpaceMap p;
  std::vector<Table> act;
};

struct EquivariantCategory {
  std::vector<EquivariantSheaf> objects;
  FiniteCategory category;
  std::vector<SetNat> arrows;  // fiber maps per arrow
};

namespace detail {

inline bool actionContinuous(const TopGroupoid& G, const SpaceMap& p, const std::vector<Table>& act) {
  std::vector<std::pair<std::size_t, std::size_t>> pts;
  for (std::size_t g = 0; g < G.T1.size(); ++g)
    for (std::size_t e = 0; e < p.source.size(); ++e)
      if (p(e) == G.s(g)) pts.emplace_back(g, e);
  SpaceMap a{pairSubspace(G.T1, p.source, pts), p.source, {}};
  for (auto [g, e] : pts) {
    auto src = fiberElements(p, G.s(g));
    auto tgt = fiberElements(p, G.t(g));
    std::size_t i = static_cast<std::size_t>(std::find(src.begin(), src.end(), e) - src.begin());
    a.map.push_back(tgt[act[g][i]]);
  }
  return mapContinuous(a);
}

}  // namespace detail

inline EquivariantCategory equivariantSheaves(const TopGroupoid& G, std::size_t fiberBound) {
  G.validate();
  EquivariantCategory out;
  std::size_t n1 = G.T1.size();
  enumerateEtale(G.T0, fiberBound, [&](const SpaceMap& p) {
    std::vector<std::size_t> size(G.T0.size());
    for (std::size_t x = 0; x < G.T0.size(); ++x) size[x] = fiberElements(p, x).size();
    std::vector<Table> act(n1);
    std::function<void(std::size_t)> rec = [&](std::size_t g) {
      if (g == n1) {
        for (auto [a, b] : G.composable())
          for (std::size_t i = 0; i < size[G.s(b)]; ++i)
            if (act[G.compose(a, b)][i] != act[a][act[b][i]]) return;
        if (detail::actionContinuous(G, p, act)) out.objects.push_back({p, act});
        return;
      }
      std::size_t from = size[G.s(g)], to = size[G.t(g)];
      bool unit = false;
      for (std::size_t x = 0; x < G.T0.size(); ++x) unit = unit || G.u(x) == g;
      detail::forEachTable(from, to, nullptr, [&](const Table& t) {
        if (unit)
          for (std::size_t i = 0; i < from; ++i)
            if (t[i] != i) return true;
        act[g] = t;
        rec(g + 1);
        return true;
      });
    };
    rec(0);
  });
  // morphisms: continuous maps over T0 commuting with the actions
  std::vector<std::size_t> src, tgt;
  std::map<std::tuple<std::size_t, std::size_t, SetNat>, std::size_t> index;
  for (std::size_t i = 0; i < out.objects.size(); ++i)
    for (std::size_t j = 0; j < out.objects.size(); ++j) {
      const auto &E = out.objects[i], &F = out.objects[j];
      std::size_t n0 = G.T0.size();
      SetFunctor a, b;
      for (std::size_t x = 0; x < n0; ++x) {
        a.fiber.push_back(fiberElements(E.p, x).size());
        b.fiber.push_back(fiberElements(F.p, x).size());
      }
      SetNat h(n0);
      std::function<void(std::size_t)> rec = [&](std::size_t x) {
        if (x == n0) {
          for (std::size_t g = 0; g < n1; ++g)
            for (std::size_t k = 0; k < a.fiber[G.s(g)]; ++k)
              if (h[G.t(g)][E.act[g][k]] != F.act[g][h[G.s(g)][k]]) return;
          SpaceMap m{E.p.source, F.p.source, std::vector<std::size_t>(E.p.source.size())};
          for (std::size_t y = 0; y < n0; ++y) {
            auto ey = fiberElements(E.p, y), fy = fiberElements(F.p, y);
            for (std::size_t k = 0; k < ey.size(); ++k) m.map[ey[k]] = fy[h[y][k]];
          }
          if (!mapContinuous(m)) return;
          index[{i, j, h}] = src.size();
          src.push_back(i);
          tgt.push_back(j);
          out.arrows.push_back(h);
          return;
        }
        detail::forEachTable(a.fiber[x], b.fiber[x], nullptr, [&](const Table& t) {
          h[x] = t;
          rec(x + 1);
          return true;
        });
      };
      rec(0);
    }
  std::size_t A = src.size();
  std::vector<std::size_t> id(out.objects.size()), comp(A * A, npos);
  for (std::size_t i = 0; i < out.objects.size(); ++i) {
    SetNat h;
    for (std::size_t x = 0; x < G.T0.size(); ++x) {
      Table t(fiberElements(out.objects[i].p, x).size());
      std::iota(t.begin(), t.end(), 0);
      h.push_back(t);
    }
    id[i] = index.at({i, i, h});
  }
  for (std::size_t g = 0; g < A; ++g)
    for (std::size_t f = 0; f < A; ++f)
      if (tgt[f] == src[g]) comp[g * A + f] = index.at({src[f], tgt[g], composeNat(out.arrows[g], out.arrows[f])});
  out.category = FiniteCategory(out.objects.size(), src, tgt, id, comp);
  out.category.validate();
  return out;
}

inline std::size_t countIsoClasses(const FiniteCategory& C) {
  std::vector<std::size_t> reps;
  for (std::size_t a = 0; a < C.objects(); ++a) {
    bool fresh = true;
    for (auto r : reps)
      for (auto f : C.hom(r, a))
        if (C.isIso(f)) fresh = false;
    if (fresh) reps.push_back(a);
  }
  return reps.size();
}

struct EquivalenceReport {
  std::size_t sheafObjects = 0, sheafClasses = 0, descObjects = 0, descClasses = 0;
  bool functor = true, fullyFaithful = true, essentiallySurjective = true;
  std::string witness;
  bool ok() const { return functor && fullyFaithful && essentiallySurjective; }
};

// Comparison EqSh(G) -> Desc(pt(G); FinSet(bound)): fibers become the initial
// segments {0..n-1}, stalk transport and the action become star-arrows.
inline EquivalenceReport equivariantComparison(const TopGroupoid& G, std::size_t fiberBound) {
  EquivalenceReport rep;
  EquivariantCategory eq = equivariantSheaves(G, fiberBound);
  auto Y = std::make_shared<const FinSetVUlt>(fiberBound);
  CodescentDiagram D = groupoidDiagram(G);
  if (auto v = simplicialViolation(D)) fail(ErrorKind::InvalidGroupoid, *v);
  DescCategory desc(D, Y);
  const auto& P0 = D.X0->points();
  const auto& Z = Y->points();
  rep.sheafObjects = eq.objects.size();
  rep.sheafClasses = countIsoClasses(eq.category);
  rep.descObjects = desc.size();
  rep.descClasses = desc.isoClasses().size();

  auto mask = [](std::size_t n) { return (std::size_t{1} << n) - 1; };
  std::vector<DescObject> image;
  for (auto& E : eq.objects) {
    UltraSheaf A = evSpace(EtaleSheaf{E.p}, std::dynamic_pointer_cast<const PtSpaceVUlt>(D.X0));
    DescObject d;
    for (std::size_t x = 0; x < P0.objects(); ++x) d.F.obj.push_back(mask(A.fiber[x]));
    for (std::size_t f = 0; f < P0.arrows(); ++f)
      d.F.arr.push_back(Y->arrowId(d.F.obj[P0.source(f)], d.F.obj[P0.target(f)], A.action[f]));
    for (std::size_t k = 0; k < D.X1->objects(); ++k)
      d.theta.push_back(Y->arrowId(d.F.obj[D.s.obj[k]], d.F.obj[D.t.obj[k]], E.act[k]));
    if (desc.find(d) == npos) {
      rep.functor = false;
      rep.witness = "an equivariant sheaf is not sent to a descent datum";
      return rep;
    }
    image.push_back(d);
  }
  for (std::size_t i = 0; i < eq.objects.size() && rep.fullyFaithful; ++i)
    for (std::size_t j = 0; j < eq.objects.size() && rep.fullyFaithful; ++j) {
      std::set<std::vector<std::size_t>> mapped;
      std::size_t n = 0;
      for (auto f : eq.category.hom(i, j)) {
        std::vector<std::size_t> alpha;
        for (std::size_t x = 0; x < P0.objects(); ++x) alpha.push_back(Y->arrowId(image[i].F.obj[x], image[j].F.obj[x], eq.arrows[f][x]));
        if (!desc.isMorphism(image[i], image[j], alpha)) rep.functor = false;
        mapped.insert(alpha);
        ++n;
      }
      std::size_t dh = 0;
      desc.forEachMorphism(image[i], image[j], [&](const std::vector<std::size_t>&) {
        ++dh;
        return true;
      });
      if (!rep.functor || mapped.size() != n || n != dh) {
        rep.fullyFaithful = false;
        rep.witness = "hom sets differ between equivariant sheaves " + std::to_string(i) + " and " + std::to_string(j);
      }
    }
  for (std::size_t k = 0; k < desc.size() && rep.essentiallySurjective; ++k) {
    bool hit = false;
    for (auto& d : image)
      if (desc.isomorphic(d, desc.object(k))) {
        hit = true;
        break;
      }
    if (!hit) {
      rep.essentiallySurjective = false;
      rep.witness = "descent datum " + std::to_string(k) + " has no equivariant sheaf";
    }
  }
  (void)Z;
  return rep;
}

}  // namespace ultrakit
