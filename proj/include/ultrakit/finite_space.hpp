#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ultraproduct.hpp"

namespace ultrakit {

using Mask = std::uint32_t;

inline Mask bit(std::size_t i) { return Mask{1} << i; }
inline bool has(Mask m, std::size_t i) { return (m >> i) & 1u; }
inline Mask fullMask(std::size_t n) { return n >= 32 ? ~Mask{0} : (Mask{1} << n) - 1; }
inline std::string maskStr(Mask m, std::size_t n) {
  std::string s = "{";
  bool first = true;
  for (std::size_t i = 0; i < n; ++i)
    if (has(m, i)) {
      if (!first) s += ",";
      s += std::to_string(i);
      first = false;
    }
  return s + "}";
}

constexpr std::size_t kMaxPoints = 16;

// A finite topological space on points 0..n-1, stored by its open sets.
class FiniteSpace {
 public:
  FiniteSpace() = default;

  static FiniteSpace validate(std::size_t n, std::vector<Mask> opens) {
    require(n <= kMaxPoints, ErrorKind::BoundExceeded, "at most " + std::to_string(kMaxPoints) + " points");
    Mask full = fullMask(n);
    for (Mask u : opens) require((u & ~full) == 0, ErrorKind::InvalidFamily, "open set mentions a point >= " + std::to_string(n));
    std::sort(opens.begin(), opens.end());
    opens.erase(std::unique(opens.begin(), opens.end()), opens.end());
    auto isOpen = [&](Mask m) { return std::binary_search(opens.begin(), opens.end(), m); };
    if (!isOpen(0)) fail(ErrorKind::MissingEmptyOrFull, "the empty set is not open");
    if (!isOpen(full)) fail(ErrorKind::MissingEmptyOrFull, "the full set " + maskStr(full, n) + " is not open");
    for (Mask u : opens)
      for (Mask v : opens) {
        if (!isOpen(u | v)) fail(ErrorKind::NotClosedUnderUnion, maskStr(u, n) + " | " + maskStr(v, n));
        if (!isOpen(u & v)) fail(ErrorKind::NotClosedUnderIntersection, maskStr(u, n) + " & " + maskStr(v, n));
      }
    FiniteSpace t;
    t.n_ = n;
    t.opens_ = std::move(opens);
    t.computeUp();
    return t;
  }

  // up[a] = {b : a <= b}, assumed reflexive and transitive.  Opens are up-sets.
  static FiniteSpace fromPreorder(const std::vector<Mask>& up) {
    std::size_t n = up.size();
    require(n <= kMaxPoints, ErrorKind::BoundExceeded, "at most " + std::to_string(kMaxPoints) + " points");
    FiniteSpace t;
    t.n_ = n;
    for (Mask m = 0; m <= fullMask(n); ++m) {
      bool ok = true;
      for (std::size_t a = 0; a < n && ok; ++a)
        if (has(m, a) && (up[a] & ~m)) ok = false;
      if (ok) t.opens_.push_back(m);
      if (m == fullMask(n)) break;
    }
    t.computeUp();
    require(t.up_ == up, ErrorKind::InvalidFamily, "relation is not a preorder");
    return t;
  }

  static FiniteSpace discrete(std::size_t n) {
    std::vector<Mask> up(n);
    for (std::size_t a = 0; a < n; ++a) up[a] = bit(a);
    return fromPreorder(up);
  }
  static FiniteSpace codiscrete(std::size_t n) { return fromPreorder(std::vector<Mask>(n, fullMask(n))); }
  static FiniteSpace point() { return discrete(1); }
  // 0 is the closed point, 1 the open point.
  static FiniteSpace sierpinski() { return validate(2, {0, 2, 3}); }

  std::size_t size() const { return n_; }
  const std::vector<Mask>& opens() const { return opens_; }
  Mask full() const { return fullMask(n_); }
  bool isOpen(Mask m) const { return std::binary_search(opens_.begin(), opens_.end(), m); }
  // Smallest open neighbourhood of a.
  Mask up(std::size_t a) const { return up_[a]; }
  const std::vector<Mask>& upSets() const { return up_; }
  // a converges to delta_b, i.e. a is below b in the specialisation preorder.
  bool leq(std::size_t a, std::size_t b) const { return has(up_[a], b); }
  Mask down(std::size_t b) const {
    Mask m = 0;
    for (std::size_t a = 0; a < n_; ++a)
      if (leq(a, b)) m |= bit(a);
    return m;
  }
  bool isT0() const {
    for (std::size_t a = 0; a < n_; ++a)
      for (std::size_t b = a + 1; b < n_; ++b)
        if (leq(a, b) && leq(b, a)) return false;
    return true;
  }
  Mask interiorDirect(Mask A) const {
    Mask best = 0;
    for (Mask u : opens_)
      if ((u & ~A) == 0) best |= u;
    return best;
  }

  std::string str() const {
    std::string s = "points " + std::to_string(n_) + " opens [";
    for (std::size_t i = 0; i < opens_.size(); ++i) s += (i ? "," : "") + maskStr(opens_[i], n_);
    return s + "]";
  }
  friend bool operator==(const FiniteSpace& a, const FiniteSpace& b) { return a.n_ == b.n_ && a.opens_ == b.opens_; }
  friend bool operator!=(const FiniteSpace& a, const FiniteSpace& b) { return !(a == b); }

 private:
  void computeUp() {
    up_.assign(n_, 0);
    for (std::size_t a = 0; a < n_; ++a) {
      Mask m = full();
      for (Mask u : opens_)
        if (has(u, a)) m &= u;
      up_[a] = m;
    }
  }

  std::size_t n_ = 0;
  std::vector<Mask> opens_;
  std::vector<Mask> up_;
};

// All preorders on n points (n <= 5), as up-set vectors, in a fixed order.
inline std::vector<std::vector<Mask>> enumeratePreorders(std::size_t n) {
  require(n <= 5, ErrorKind::BoundExceeded, "preorder enumeration is limited to 5 points");
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      if (a != b) pairs.emplace_back(a, b);
  std::vector<std::vector<Mask>> out;
  for (std::uint64_t r = 0; r < (std::uint64_t{1} << pairs.size()); ++r) {
    std::vector<Mask> up(n);
    for (std::size_t a = 0; a < n; ++a) up[a] = bit(a);
    for (std::size_t i = 0; i < pairs.size(); ++i)
      if ((r >> i) & 1u) up[pairs[i].first] |= bit(pairs[i].second);
    bool trans = true;
    for (std::size_t a = 0; a < n && trans; ++a)
      for (std::size_t b = 0; b < n && trans; ++b)
        if (has(up[a], b) && (up[b] & ~up[a])) trans = false;
    if (trans) out.push_back(up);
  }
  return out;
}

inline std::vector<FiniteSpace> enumerateSpaces(std::size_t n) {
  std::vector<FiniteSpace> out;
  for (auto& up : enumeratePreorders(n)) out.push_back(FiniteSpace::fromPreorder(up));
  return out;
}

// ---- ultraconvergence -----------------------------------------------------

// A mu-family of points of a finite space.
struct PointFamily {
  Ultrafilter mu;
  UPFamily<std::size_t> values;
};

// a converges to the family: every open containing a pulls back to a large set.
inline bool ucvg(const FiniteSpace& T, std::size_t a, const PointFamily& fam) {
  for (Mask u : T.opens()) {
    if (!has(u, a)) continue;
    if (!fam.mu.large(fam.values.where([&](std::size_t x) { return x < T.size() && has(u, x); }))) return false;
  }
  return true;
}

// rel[a] = {b : a converges to delta_b}
inline std::vector<Mask> ucvgRelation(const FiniteSpace& T) {
  std::vector<Mask> rel(T.size(), 0);
  for (std::size_t a = 0; a < T.size(); ++a)
    for (std::size_t b = 0; b < T.size(); ++b) {
      PointFamily delta{Ultrafilter::star(), UPFamily<std::size_t>::constant(IndexSet::star(), b)};
      if (ucvg(T, a, delta)) rel[a] |= bit(b);
    }
  return rel;
}

// Opens are the A with: a in A and a converges to delta_b imply b in A.
inline FiniteSpace ucvgToTopology(std::size_t n, const std::vector<Mask>& rel) {
  std::vector<Mask> opens;
  for (Mask A = 0;; ++A) {
    bool ok = true;
    for (std::size_t a = 0; a < n && ok; ++a)
      if (has(A, a) && (rel[a] & ~A)) ok = false;
    if (ok) opens.push_back(A);
    if (A == fullMask(n)) break;
  }
  return FiniteSpace::validate(n, opens);
}

struct RelBetaReport {
  bool ok = true;
  std::string witness;
};

// Axiom 1 is reflexivity; for finite carriers axiom 2 is transitivity.
inline RelBetaReport relBetaValidate(std::size_t n, const std::vector<Mask>& rel) {
  for (std::size_t a = 0; a < n; ++a)
    if (!has(rel[a], a)) return {false, "point " + std::to_string(a) + " does not converge to its principal ultrafilter"};
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      if (has(rel[a], b))
        for (std::size_t c = 0; c < n; ++c)
          if (has(rel[b], c) && !has(rel[a], c))
            return {false, std::to_string(a) + "<=" + std::to_string(b) + "<=" + std::to_string(c) + " but not " +
                               std::to_string(a) + "<=" + std::to_string(c)};
  return {};
}

struct DerivedSets {
  Mask interior = 0, closure = 0;
};

inline DerivedSets derivedSets(const FiniteSpace& T, Mask A) {
  DerivedSets d;
  for (std::size_t a = 0; a < T.size(); ++a) {
    if ((T.up(a) & ~A) == 0) d.interior |= bit(a);
    if (T.up(a) & A) d.closure |= bit(a);
  }
  return d;
}

// Points to which the family converges, computed directly and as the
// intersection of closures of large sets; the two must agree.
inline Mask limitPoints(const FiniteSpace& T, const PointFamily& fam) {
  Mask direct = 0;
  for (std::size_t a = 0; a < T.size(); ++a)
    if (ucvg(T, a, fam)) direct |= bit(a);
  Mask viaClosures = T.full();
  for (Mask B = 0;; ++B) {
    if (fam.mu.large(fam.values.where([&](std::size_t x) { return x < T.size() && has(B, x); })))
      viaClosures &= derivedSets(T, B).closure;
    if (B == T.full()) break;
  }
  if (direct != viaClosures)
    fail(ErrorKind::TheoremMismatch, "limit set " + maskStr(direct, T.size()) + " vs closures " + maskStr(viaClosures, T.size()));
  return direct;
}

// ---- maps ---------------------------------------------------------------

struct SpaceMap {
  FiniteSpace source, target;
  std::vector<std::size_t> map;

  std::size_t operator()(std::size_t a) const { return map[a]; }
  Mask image(Mask A) const {
    Mask m = 0;
    for (std::size_t a = 0; a < source.size(); ++a)
      if (has(A, a)) m |= bit(map[a]);
    return m;
  }
  Mask preimage(Mask B) const {
    Mask m = 0;
    for (std::size_t a = 0; a < source.size(); ++a)
      if (has(B, map[a])) m |= bit(a);
    return m;
  }
  Mask fiber(std::size_t b) const { return preimage(bit(b)); }
  bool surjective() const { return image(source.full()) == target.full(); }
  void check() const {
    require(map.size() == source.size(), ErrorKind::InvalidFamily, "map length differs from the source size");
    for (auto v : map) require(v < target.size(), ErrorKind::InvalidFamily, "map value outside the target");
  }
};

inline bool continuousByOpens(const SpaceMap& f) {
  for (Mask v : f.target.opens())
    if (!f.source.isOpen(f.preimage(v))) return false;
  return true;
}
inline bool continuousByConvergence(const SpaceMap& f) {
  for (std::size_t a = 0; a < f.source.size(); ++a)
    for (std::size_t b = 0; b < f.source.size(); ++b)
      if (f.source.leq(a, b) && !f.target.leq(f(a), f(b))) return false;
  return true;
}
inline bool openByImages(const SpaceMap& f) {
  for (Mask u : f.source.opens())
    if (!f.target.isOpen(f.image(u))) return false;
  return true;
}
// Every f(a) converging to delta_c lifts to some delta_e with a converging to it.
inline bool openByLifting(const SpaceMap& f) {
  for (std::size_t a = 0; a < f.source.size(); ++a)
    for (std::size_t c = 0; c < f.target.size(); ++c) {
      if (!f.target.leq(f(a), c)) continue;
      if (!(f.source.up(a) & f.fiber(c))) return false;
    }
  return true;
}

inline bool mapContinuous(const SpaceMap& f) {
  f.check();
  bool a = continuousByOpens(f), b = continuousByConvergence(f);
  if (a != b) fail(ErrorKind::TheoremMismatch, "continuity checks disagree");
  return a;
}
inline bool mapOpen(const SpaceMap& f) {
  f.check();
  bool a = openByImages(f), b = openByLifting(f);
  if (a != b) fail(ErrorKind::TheoremMismatch, "openness checks disagree");
  return a;
}

// Closed-map and the ultrafilter dual of the lifting criterion, side by side.
struct ProperComparison {
  bool closedMap = false, dualLifting = false;
};
inline ProperComparison properCheck(const SpaceMap& f) {
  ProperComparison r;
  r.closedMap = true;
  for (Mask u : f.source.opens()) {
    Mask closedImg = f.image(f.source.full() & ~u);
    if (!f.target.isOpen(f.target.full() & ~closedImg)) r.closedMap = false;
  }
  r.dualLifting = true;
  for (std::size_t e = 0; e < f.source.size(); ++e)
    for (std::size_t b = 0; b < f.target.size(); ++b)
      if (f.target.leq(b, f(e)) && !(f.source.down(e) & f.fiber(b))) r.dualLifting = false;
  return r;
}

// ---- etale maps -----------------------------------------------------------

struct EtaleCertificate {
  std::size_t point = 0;
  Mask neighbourhood = 0, image = 0;
  std::vector<std::pair<std::size_t, std::size_t>> section;  // (b, e) with p(e) = b
};

struct EtaleCounterexample {
  std::size_t point = 0;       // e
  std::size_t target = 0;      // mu = delta_target on the base
  std::vector<std::size_t> lifts;  // points f with e <= f and p(f) = target
};

struct EtaleVerdict {
  bool isEtale = false;
  std::vector<EtaleCertificate> certificates;
  std::optional<EtaleCounterexample> counterexample;
};

// Conditions of the lifting theorem over principal ultrafilters; on a finite
// space every ultrafilter is principal and every lift is principal over T.
inline std::optional<EtaleCounterexample> uniqueLiftFailure(const SpaceMap& p) {
  for (std::size_t e = 0; e < p.source.size(); ++e)
    for (std::size_t b = 0; b < p.target.size(); ++b) {
      if (!p.target.leq(p(e), b)) continue;
      Mask lifts = p.source.up(e) & p.fiber(b);
      if (std::popcount(lifts) != 1) {
        EtaleCounterexample c{e, b, {}};
        for (std::size_t f = 0; f < p.source.size(); ++f)
          if (has(lifts, f)) c.lifts.push_back(f);
        return c;
      }
    }
  return std::nullopt;
}

// Textbook definition: an open U around e mapped homeomorphically onto an open.
inline std::optional<EtaleCertificate> localHomeomorphismAt(const SpaceMap& p, std::size_t e) {
  for (Mask u : p.source.opens()) {
    if (!has(u, e)) continue;
    Mask img = p.image(u);
    if (!p.target.isOpen(img)) continue;
    if (std::popcount(img) != std::popcount(u)) continue;
    bool homeo = true;
    for (Mask w : p.source.opens()) {
      if ((w & ~u) != 0) continue;
      if (!p.target.isOpen(p.image(w))) {
        homeo = false;
        break;
      }
    }
    if (!homeo) continue;
    EtaleCertificate c{e, u, img, {}};
    for (std::size_t x = 0; x < p.source.size(); ++x)
      if (has(u, x)) c.section.emplace_back(p(x), x);
    std::sort(c.section.begin(), c.section.end());
    return c;
  }
  return std::nullopt;
}

inline bool isLocalHomeomorphism(const SpaceMap& p, std::vector<EtaleCertificate>* certs = nullptr) {
  for (std::size_t e = 0; e < p.source.size(); ++e) {
    auto c = localHomeomorphismAt(p, e);
    if (!c) return false;
    if (certs) certs->push_back(*c);
  }
  return true;
}

inline std::string mapDocument(const SpaceMap& p);

inline EtaleVerdict etaleCheck(const SpaceMap& p) {
  p.check();
  if (!mapContinuous(p)) fail(ErrorKind::NotContinuous, "the projection is not continuous");
  EtaleVerdict v;
  v.counterexample = uniqueLiftFailure(p);
  bool theorem = !v.counterexample.has_value();
  bool direct = isLocalHomeomorphism(p, theorem ? &v.certificates : nullptr);
  if (theorem != direct)
    fail(ErrorKind::TheoremMismatch, std::string("lifting verdict ") + (theorem ? "etale" : "not etale") +
                                         ", direct verdict " + (direct ? "etale" : "not etale") + " for " + mapDocument(p));
  v.isEtale = theorem;
  return v;
}

// ---- principal-over and fiber ultraproducts -------------------------------

enum class Tri { False, True, Inconclusive };

inline const char* to_string(Tri t) {
  return t == Tri::True ? "true" : t == Tri::False ? "false" : "inconclusive";
}

// Is there a nu-large set on which p is injective?
inline Tri principalOver(const Ultrafilter& nu, const UPMap& p) {
  require(nu.carrier() == p.domain(), ErrorKind::CarrierMismatch, "map from " + p.domain().str());
  if (nu.isPrincipal()) return Tri::True;
  if (p.finiteImage()) return Tri::False;  // injective sets are finite, never large
  // Chains of affine maps and quotients: p(x + Q) = p(x) + c with c >= 1 for
  // Q the product of all coefficients, so p is injective on each class mod Q.
  std::function<bool(const UPMap&, std::size_t&)> chain = [&](const UPMap& f, std::size_t& Q) -> bool {
    switch (f.kind()) {
      case UPMap::Kind::Affine: Q *= f.a(); return true;
      case UPMap::Kind::Quotient: Q *= f.a(); return true;
      case UPMap::Kind::Composite: return chain(f.first(), Q) && chain(f.second(), Q);
      default: return false;
    }
  };
  std::size_t Q = 1;
  if (chain(p, Q)) return Tri::True;
  return Tri::Inconclusive;
}

inline bool principalOver(const SpaceMap&, std::size_t) { return true; }

inline UltraProductSet fiberUltraproduct(const SpaceMap& p, const Ultrafilter& mu) {
  require(mu.carrier() == IndexSet::fin(p.target.size()), ErrorKind::CarrierMismatch, "ultrafilter is not on the base points");
  std::size_t bound = 0;
  for (std::size_t x = 0; x < p.target.size(); ++x) bound = std::max<std::size_t>(bound, std::popcount(p.fiber(x)));
  BoundedFamily fam{mu.carrier(), bound, {}};
  for (std::size_t j = 0; j < bound; ++j) {
    std::vector<std::size_t> xs;
    for (std::size_t x = 0; x < p.target.size(); ++x)
      if (static_cast<std::size_t>(std::popcount(p.fiber(x))) > j) xs.push_back(x);
    fam.fibers.push_back(UPSet::finite(xs));
  }
  return uprodEnumerate(mu, fam);
}

// Fibers of a map into N, labelled by rank within the fiber.
inline UltraProductSet fiberUltraproduct(const UPMap& p, const Ultrafilter& mu) {
  require(mu.carrier() == p.codomain(), ErrorKind::CarrierMismatch, "ultrafilter is not on the codomain");
  BoundedFamily fam{p.codomain(), 0, {}};
  switch (p.kind()) {
    case UPMap::Kind::Quotient:
      fam.bound = p.a();
      fam.fibers.assign(p.a(), UPSet::full());
      break;
    case UPMap::Kind::Affine:
      fam.bound = 1;
      fam.fibers.push_back(UPSet::tabulate(p.b(), p.a(), [&](std::size_t x) { return x >= p.b() && (x - p.b()) % p.a() == 0; }));
      break;
    case UPMap::Kind::Step: {
      if (p.domain().nat) fail(ErrorKind::UnboundedFibers, "a map from N with finitely many values");
      fam.bound = p.domain().n;
      std::vector<std::size_t> count;
      for (std::size_t k = 0; k < p.domain().n; ++k) {
        std::size_t v = p.apply(k);
        if (count.size() <= v) count.resize(v + 1, 0);
        ++count[v];
      }
      for (std::size_t j = 0; j < fam.bound; ++j) {
        std::vector<std::size_t> xs;
        for (std::size_t x = 0; x < count.size(); ++x)
          if (count[x] > j) xs.push_back(x);
        fam.fibers.push_back(UPSet::finite(xs));
      }
      break;
    }
    default: fail(ErrorKind::UnsupportedEncoding, "fiber bound not computed for " + p.str());
  }
  return uprodEnumerate(mu, fam);
}

inline std::string spaceDocument(const FiniteSpace& T) {
  std::string s = "{\"opens\":[";
  for (std::size_t i = 0; i < T.opens().size(); ++i) {
    s += i ? ",[" : "[";
    bool first = true;
    for (std::size_t a = 0; a < T.size(); ++a)
      if (has(T.opens()[i], a)) {
        s += (first ? "" : ",") + std::to_string(a);
        first = false;
      }
    s += "]";
  }
  return s + "],\"points\":" + std::to_string(T.size()) + "}";
}

inline std::string mapDocument(const SpaceMap& p) {
  std::string s = "{\"map\":[";
  for (std::size_t i = 0; i < p.map.size(); ++i) s += (i ? "," : "") + std::to_string(p.map[i]);
  return s + "],\"source\":" + spaceDocument(p.source) + ",\"target\":" + spaceDocument(p.target) + "}";
}

}  // namespace ultrakit
