#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "family.hpp"
#include "upmap.hpp"

namespace ultrakit {

// Every ultrafilter built by this library, restricted to UPSets, is either
// principal or of the form N_b: Q is large iff Q eventually contains the
// residue class of b modulo Q's period.  The factorial ultrafilter is N_0.
struct Profile {
  bool principal = true;
  IndexSet carrier;
  std::size_t point = 0;  // principal point, or the residue b

  bool large(const UPSet& q) const { return principal ? q.contains(point) : q.eventuallyContainsClassOf(point); }
  std::string str() const {
    return principal ? "delta(" + carrier.str() + "," + std::to_string(point) + ")" : "residue(" + std::to_string(point) + ")";
  }
  friend bool operator==(const Profile& x, const Profile& y) {
    return x.principal == y.principal && x.carrier == y.carrier && x.point == y.point;
  }
  friend bool operator!=(const Profile& x, const Profile& y) { return !(x == y); }
};

inline Profile pushProfile(const Profile& p, const UPMap& f) {
  require(p.carrier == f.domain(), ErrorKind::CarrierMismatch, "push " + p.carrier.str() + " along map from " + f.domain().str());
  if (p.principal) return {true, f.codomain(), f.apply(p.point)};
  std::size_t b = p.point;
  switch (f.kind()) {
    case UPMap::Kind::Step:
      for (std::size_t i = 0; i < f.parts().size(); ++i)
        if (f.parts()[i].eventuallyContainsClassOf(b)) return {true, f.codomain(), f.values()[i]};
      break;
    case UPMap::Kind::Affine: return {false, f.codomain(), f.a() * b + f.b()};
    case UPMap::Kind::Quotient: return {false, f.codomain(), b / f.a()};
    case UPMap::Kind::SumLift: {
      std::size_t m = f.a();
      Profile inner = pushProfile({false, IndexSet::natural(), b / m}, f.first());
      return {inner.principal, f.codomain(), inner.point * f.b() + f.values()[b % m]};
    }
    case UPMap::Kind::Composite: return pushProfile(pushProfile(p, f.first()), f.second());
  }
  fail(ErrorKind::TheoremMismatch, "no large part for residue " + std::to_string(b));
}

class Ultrafilter;

enum class SumEncoding { FinFin, NatFin, FinNat, Graph };

inline const char* to_string(SumEncoding e) {
  switch (e) {
    case SumEncoding::FinFin: return "fin-fin";
    case SumEncoding::NatFin: return "nat-fin";
    case SumEncoding::FinNat: return "fin-nat";
    case SumEncoding::Graph: return "graph";
  }
  return "?";
}

// How pairs (s, t) of a dependent sum are coded as points of one IndexSet.
//   FinFin: offset[s] + t          (base Fin(n), fibers Fin(m_s))
//   NatFin: s*m + t                (base N, every fiber Fin(m))
//   FinNat: t*n + s                (base Fin(n), every fiber N)
//   Graph:  s, standing for (s, g(s))  (base N, fibers N, principal fibers delta_g(s))
struct SumInfo {
  SumEncoding enc = SumEncoding::FinFin;
  IndexSet base;
  IndexSet carrier;
  std::vector<std::size_t> sizes, offsets;  // FinFin
  std::size_t m = 0;                        // NatFin fiber size
  std::size_t n = 0;                        // FinNat base size
  std::shared_ptr<const UPMap> section;     // Graph

  IndexSet fiber(std::size_t s) const {
    switch (enc) {
      case SumEncoding::FinFin: return IndexSet::fin(sizes.at(s));
      case SumEncoding::NatFin: return IndexSet::fin(m);
      default: return IndexSet::natural();
    }
  }
  bool uniformFiber() const {
    if (enc != SumEncoding::FinFin) return true;
    for (auto z : sizes)
      if (z != sizes.front()) return false;
    return true;
  }
  std::size_t code(std::size_t s, std::size_t t) const {
    switch (enc) {
      case SumEncoding::FinFin: return offsets.at(s) + t;
      case SumEncoding::NatFin: return s * m + t;
      case SumEncoding::FinNat: return t * n + s;
      case SumEncoding::Graph:
        require(section->apply(s) == t, ErrorKind::UnsupportedEncoding, "pair off the graph of the section");
        return s;
    }
    return 0;
  }
  std::pair<std::size_t, std::size_t> decode(std::size_t c) const {
    switch (enc) {
      case SumEncoding::FinFin:
        for (std::size_t s = 0; s < sizes.size(); ++s)
          if (c < offsets[s] + sizes[s]) return {s, c - offsets[s]};
        fail(ErrorKind::CarrierMismatch, "code outside the sum carrier");
      case SumEncoding::NatFin: return {c / m, c % m};
      case SumEncoding::FinNat: return {c % n, c / n};
      case SumEncoding::Graph: return {c, section->apply(c)};
    }
    return {0, 0};
  }
  // Slice {t : (s,t) in q}.
  UPSet slice(const UPSet& q, std::size_t s) const {
    switch (enc) {
      case SumEncoding::FinFin:
        return UPSet::tabulate(sizes[s], 1, [&](std::size_t t) { return t < sizes[s] && q.contains(offsets[s] + t); });
      case SumEncoding::NatFin:
        return UPSet::tabulate(m, 1, [&](std::size_t t) { return t < m && q.contains(s * m + t); });
      case SumEncoding::FinNat: return q.affinePreimage(n, s);
      case SumEncoding::Graph: return q.contains(s) ? UPSet::singleton(section->apply(s)) : UPSet::empty();
    }
    return UPSet::empty();
  }
  // Second projection, defined when every fiber is the same IndexSet.
  UPMap projection() const {
    switch (enc) {
      case SumEncoding::FinFin: {
        require(uniformFiber(), ErrorKind::CarrierMismatch, "fibers of different size");
        std::size_t k = sizes.empty() ? 0 : sizes.front();
        std::vector<std::size_t> img(carrier.n);
        for (std::size_t c = 0; c < carrier.n; ++c) img[c] = decode(c).second;
        return UPMap::table(carrier.n, IndexSet::fin(k), img);
      }
      case SumEncoding::NatFin: return UPMap::residues(m);
      case SumEncoding::FinNat: return UPMap::quotient(n);
      case SumEncoding::Graph: return *section;
    }
    fail(ErrorKind::UnsupportedEncoding, "projection");
  }
  // First projection.
  UPMap baseProjection() const {
    switch (enc) {
      case SumEncoding::FinFin: {
        std::vector<std::size_t> img(carrier.n);
        for (std::size_t c = 0; c < carrier.n; ++c) img[c] = decode(c).first;
        return UPMap::table(carrier.n, base, img);
      }
      case SumEncoding::NatFin: return UPMap::quotient(m);
      case SumEncoding::FinNat: {
        std::vector<UPSet> parts;
        for (std::size_t s = 0; s < n; ++s) parts.push_back(UPSet::residue(s, n));
        return UPMap::partition(IndexSet::natural(), parts);
      }
      case SumEncoding::Graph: return UPMap::identity(IndexSet::natural());
    }
    fail(ErrorKind::UnsupportedEncoding, "projection");
  }
};

class Ultrafilter {
 public:
  enum class Kind { Principal, Factorial, Pushforward, Sum };

  Ultrafilter() : Ultrafilter(principal(IndexSet::star(), 0)) {}

  static Ultrafilter principal(IndexSet carrier, std::size_t point) {
    require(carrier.hasPoint(point), ErrorKind::CarrierMismatch, "point " + std::to_string(point) + " outside " + carrier.str());
    auto n = std::make_shared<Node>();
    n->kind = Kind::Principal;
    n->carrier = carrier;
    n->point = point;
    n->profile = {true, carrier, point};
    return Ultrafilter(n);
  }
  static Ultrafilter star() { return principal(IndexSet::star(), 0); }
  static Ultrafilter factorial() {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Factorial;
    n->carrier = IndexSet::natural();
    n->profile = {false, IndexSet::natural(), 0};
    return Ultrafilter(n);
  }

  Kind kind() const { return node_->kind; }
  const IndexSet& carrier() const { return node_->carrier; }
  const Profile& profile() const { return node_->profile; }
  bool isPrincipal() const { return node_->profile.principal; }
  std::size_t point() const { return node_->point; }
  const Ultrafilter& base() const { return *node_->base; }
  const UPMap& map() const { return *node_->map; }
  const UPFamily<Ultrafilter>& family() const { return *node_->family; }
  bool hasFamily() const { return node_->family != nullptr; }
  const SumInfo& sumInfo() const {
    require(node_->kind == Kind::Sum, ErrorKind::UnsupportedEncoding, "not a sum ultrafilter");
    return node_->sum;
  }

  // Largeness by structural recursion over the construction.
  bool large(const UPSet& q) const {
    carrier().check(q);
    const Node& n = *node_;
    switch (n.kind) {
      case Kind::Principal: return q.contains(n.point);
      case Kind::Factorial: {
        // k! is eventually 0 mod p and eventually >= L.
        std::size_t p = q.periodLength(), L = q.prefixLength();
        return q.period()[(p - L % p) % p];
      }
      case Kind::Pushforward: return n.base->large(n.map->preimage(q));
      case Kind::Sum: return n.base->large(largeSlices(q));
    }
    return false;
  }

  // The set of base points s whose slice of q is nu_s-large.
  UPSet largeSlices(const UPSet& q) const {
    const Node& n = *node_;
    const SumInfo& si = n.sum;
    switch (si.enc) {
      case SumEncoding::FinFin:
      case SumEncoding::FinNat: {
        std::vector<std::size_t> good;
        for (std::size_t s = 0; s < si.base.n; ++s)
          if (n.family->at(s).large(si.slice(q, s))) good.push_back(s);
        return UPSet::finite(good);
      }
      case SumEncoding::NatFin: {
        std::size_t m = si.m;
        std::size_t L = (q.prefixLength() + m - 1) / m, per = q.periodLength();
        auto slices = UPFamily<Bits>::tabulate(IndexSet::natural(), L, per, [&](std::size_t s) {
          Bits b(m);
          for (std::size_t t = 0; t < m; ++t) b[t] = q.contains(s * m + t);
          return b;
        });
        UPFamily<int> dummy = UPFamily<int>::constant(IndexSet::natural(), 0);
        return agreementSet(*n.family, slices, dummy, [&](const Ultrafilter& nu, const Bits& b, int) {
          return nu.large(UPSet::tabulate(m, 1, [&](std::size_t t) { return t < m && b[t]; }));
        });
      }
      case SumEncoding::Graph: return q;
    }
    return UPSet::empty();
  }

  // Largeness read off the normal form; must agree with large().
  bool largeByProfile(const UPSet& q) const {
    carrier().check(q);
    return node_->profile.large(q);
  }

  std::string str() const;

  // Extensional equality on the UPSet algebra; exact because profiles are.
  friend bool operator==(const Ultrafilter& a, const Ultrafilter& b) { return a.profile() == b.profile(); }
  friend bool operator!=(const Ultrafilter& a, const Ultrafilter& b) { return !(a == b); }

 private:
  struct Node {
    Kind kind = Kind::Principal;
    IndexSet carrier;
    std::size_t point = 0;
    std::shared_ptr<const Ultrafilter> base;
    std::shared_ptr<const UPMap> map;
    std::shared_ptr<const UPFamily<Ultrafilter>> family;
    SumInfo sum;
    Profile profile;
  };
  explicit Ultrafilter(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  friend Ultrafilter ufPushforward(const Ultrafilter&, const UPMap&);
  friend Ultrafilter ufSum(const Ultrafilter&, const UPFamily<Ultrafilter>&);
  friend Ultrafilter ufSumSection(const Ultrafilter&, const UPMap&);
  friend Ultrafilter rawPushforward(const Ultrafilter&, const UPMap&);

  std::shared_ptr<const Node> node_;
};

using UFFamily = UPFamily<Ultrafilter>;

inline bool ufLarge(const Ultrafilter& mu, const UPSet& q) { return mu.large(q); }
inline bool ufForall(const Ultrafilter& mu, const UPSet& phi) { return mu.large(phi); }

// Pushforward without normalisation, keeping the construction tree.
inline Ultrafilter rawPushforward(const Ultrafilter& mu, const UPMap& f) {
  require(mu.carrier() == f.domain(), ErrorKind::CarrierMismatch,
          "pushforward of an ultrafilter on " + mu.carrier().str() + " along a map from " + f.domain().str());
  auto n = std::make_shared<Ultrafilter::Node>();
  n->kind = Ultrafilter::Kind::Pushforward;
  n->carrier = f.codomain();
  n->base = std::make_shared<Ultrafilter>(mu);
  n->map = std::make_shared<UPMap>(f);
  n->profile = pushProfile(mu.profile(), f);
  return Ultrafilter(n);
}

inline Ultrafilter ufPushforward(const Ultrafilter& mu, const UPMap& f) {
  if (f.isIdentity() && mu.carrier() == f.domain()) return mu;
  Ultrafilter r = rawPushforward(mu, f);
  if (r.isPrincipal()) return Ultrafilter::principal(r.carrier(), r.profile().point);
  return r;
}

inline SumInfo sumEncoding(const Ultrafilter& mu, const UFFamily& nus) {
  require(nus.index() == mu.carrier(), ErrorKind::CarrierMismatch,
          "family indexed by " + nus.index().str() + " over an ultrafilter on " + mu.carrier().str());
  SumInfo si;
  si.base = mu.carrier();
  bool allFin = true, allNat = true;
  for (auto& nu : nus.values()) {
    allFin = allFin && nu.carrier().isFin();
    allNat = allNat && nu.carrier().nat;
  }
  if (mu.carrier().isFin()) {
    if (allFin) {
      si.enc = SumEncoding::FinFin;
      std::size_t off = 0;
      for (std::size_t s = 0; s < mu.carrier().n; ++s) {
        si.offsets.push_back(off);
        si.sizes.push_back(nus.at(s).carrier().n);
        off += si.sizes.back();
      }
      si.carrier = IndexSet::fin(off);
      return si;
    }
    if (allNat) {
      si.enc = SumEncoding::FinNat;
      si.n = mu.carrier().n;
      si.carrier = IndexSet::natural();
      return si;
    }
    fail(ErrorKind::UnsupportedEncoding, "fibers mix finite and infinite carriers");
  }
  if (allFin) {
    std::size_t m = nus.value(0).carrier().n;
    for (auto& nu : nus.values())
      require(nu.carrier().n == m, ErrorKind::UnsupportedEncoding, "finite fibers of different sizes over N");
    require(m > 0, ErrorKind::UnsupportedEncoding, "empty fibers over N");
    si.enc = SumEncoding::NatFin;
    si.m = m;
    si.carrier = IndexSet::natural();
    return si;
  }
  if (allNat) {
    std::vector<UPSet> parts;
    std::vector<std::size_t> vals;
    for (std::size_t i = 0; i < nus.size(); ++i) {
      require(nus.value(i).isPrincipal(), ErrorKind::UnsupportedEncoding,
              "sum over N with a non-principal fiber on N");
      parts.push_back(nus.level(i));
      vals.push_back(nus.value(i).profile().point);
    }
    si.enc = SumEncoding::Graph;
    si.section = std::make_shared<UPMap>(UPMap::step(IndexSet::natural(), IndexSet::natural(), parts, vals));
    si.carrier = IndexSet::natural();
    return si;
  }
  fail(ErrorKind::UnsupportedEncoding, "fibers mix finite and infinite carriers");
}

inline Profile sumProfile(const Ultrafilter& mu, const UFFamily& nus, const SumInfo& si) {
  const Profile& bp = mu.profile();
  switch (si.enc) {
    case SumEncoding::FinFin: {
      const Profile& fp = nus.at(bp.point).profile();
      return {true, si.carrier, si.code(bp.point, fp.point)};
    }
    case SumEncoding::NatFin: {
      if (bp.principal) return {true, si.carrier, si.code(bp.point, nus.at(bp.point).profile().point)};
      for (std::size_t i = 0; i < nus.size(); ++i)
        if (nus.level(i).eventuallyContainsClassOf(bp.point))
          return {false, si.carrier, bp.point * si.m + nus.value(i).profile().point};
      break;
    }
    case SumEncoding::FinNat: {
      const Profile& fp = nus.at(bp.point).profile();
      return {fp.principal, si.carrier, fp.point * si.n + bp.point};
    }
    case SumEncoding::Graph: return {bp.principal, si.carrier, bp.point};
  }
  fail(ErrorKind::TheoremMismatch, "sum profile");
}

inline Ultrafilter ufSum(const Ultrafilter& mu, const UFFamily& nus) {
  SumInfo si = sumEncoding(mu, nus);
  auto n = std::make_shared<Ultrafilter::Node>();
  n->kind = Ultrafilter::Kind::Sum;
  n->carrier = si.carrier;
  n->base = std::make_shared<Ultrafilter>(mu);
  n->family = std::make_shared<UFFamily>(nus);
  n->profile = sumProfile(mu, nus, si);
  n->sum = std::move(si);
  return Ultrafilter(n);
}

// Sum of delta_g(s) over s:mu, for mu on N and g : N -> N.
inline Ultrafilter ufSumSection(const Ultrafilter& mu, const UPMap& g) {
  require(mu.carrier().nat && g.domain().nat && g.codomain().nat, ErrorKind::UnsupportedEncoding,
          "section sums need N -> N");
  auto n = std::make_shared<Ultrafilter::Node>();
  n->kind = Ultrafilter::Kind::Sum;
  n->carrier = IndexSet::natural();
  n->base = std::make_shared<Ultrafilter>(mu);
  n->sum.enc = SumEncoding::Graph;
  n->sum.base = IndexSet::natural();
  n->sum.carrier = IndexSet::natural();
  n->sum.section = std::make_shared<UPMap>(g);
  n->profile = {mu.isPrincipal(), IndexSet::natural(), mu.profile().point};
  return Ultrafilter(n);
}

// Tensor mu (x) nu: the sum of a constant family.
inline Ultrafilter ufTensor(const Ultrafilter& mu, const Ultrafilter& nu) {
  return ufSum(mu, UFFamily::constant(mu.carrier(), nu));
}

inline Ultrafilter ufLimit(const Ultrafilter& mu, const UFFamily& nus) {
  const IndexSet& t = nus.value(0).carrier();
  for (auto& nu : nus.values())
    require(nu.carrier() == t, ErrorKind::CarrierMismatch, "limit over fibers with different carriers");
  Ultrafilter s = ufSum(mu, nus);
  return ufPushforward(s, s.sumInfo().projection());
}

// The value of a finitely-valued family on its large level set.
template <class V>
const V& ultralimit(const Ultrafilter& mu, const UPFamily<V>& fam) {
  require(fam.index() == mu.carrier(), ErrorKind::CarrierMismatch,
          "family over " + fam.index().str() + " under an ultrafilter on " + mu.carrier().str());
  for (std::size_t i = 0; i < fam.size(); ++i)
    if (mu.large(fam.level(i))) return fam.value(i);
  fail(ErrorKind::EmptyLargeFiber, "no level set is large (empty index?)");
}

template <class V>
std::size_t ultralimitIndex(const Ultrafilter& mu, const UPFamily<V>& fam) {
  for (std::size_t i = 0; i < fam.size(); ++i)
    if (mu.large(fam.level(i))) return i;
  fail(ErrorKind::EmptyLargeFiber, "no level set is large (empty index?)");
}

// ---- isomorphism -------------------------------------------------------

// A bijection between a mu-large and a nu-large set.  Either a pair of
// points, or the translation x |-> x + shift from [from, inf) onto [from + shift, inf).
struct IsoWitness {
  bool points = true;
  std::size_t p = 0, q = 0;
  std::size_t from = 0;
  std::int64_t shift = 0;

  UPSet domainSet() const { return points ? UPSet::singleton(p) : UPSet::from(from); }
  UPSet codomainSet() const {
    return points ? UPSet::singleton(q) : UPSet::from(static_cast<std::size_t>(static_cast<std::int64_t>(from) + shift));
  }
  // Preimage under the bijection of a subset of the codomain set.
  UPSet pullBack(const UPSet& b) const {
    if (points) return b.contains(q) ? UPSet::singleton(p) : UPSet::empty();
    std::size_t to = static_cast<std::size_t>(static_cast<std::int64_t>(from) + shift);
    UPSet inRange = b & UPSet::from(to);
    if (shift >= 0) return inRange.affinePreimage(1, static_cast<std::size_t>(shift)) & UPSet::from(from);
    // x |-> x - d: preimage is (b shifted up by d)
    std::size_t d = static_cast<std::size_t>(-shift);
    return UPSet::tabulate(inRange.prefixLength() + d, inRange.periodLength(),
                           [&](std::size_t x) { return x >= d && inRange.contains(x - d); }) &
           UPSet::from(from);
  }
  std::string str() const {
    if (points) return "{" + std::to_string(p) + "}<->{" + std::to_string(q) + "}";
    return "x|->x" + std::string(shift >= 0 ? "+" : "") + std::to_string(shift) + " on [" + std::to_string(from) + ",inf)";
  }
};

struct IsoResult {
  enum class Verdict { Isomorphic, NotIsomorphic, Unknown } verdict = Verdict::Unknown;
  std::optional<IsoWitness> witness;
  std::string reason;
  bool isomorphic() const { return verdict == Verdict::Isomorphic; }
};

inline IsoResult ufIso(const Ultrafilter& mu, const Ultrafilter& nu) {
  const Profile &a = mu.profile(), &b = nu.profile();
  IsoResult r;
  if (a.principal != b.principal) {
    r.verdict = IsoResult::Verdict::NotIsomorphic;
    r.reason = "principality: " + std::string(a.principal ? "left" : "right") + " is principal, the other is not";
    return r;
  }
  IsoWitness w;
  if (a.principal) {
    w.points = true;
    w.p = a.point;
    w.q = b.point;
  } else {
    w.points = false;
    w.from = a.point;
    w.shift = static_cast<std::int64_t>(b.point) - static_cast<std::int64_t>(a.point);
  }
  r.verdict = IsoResult::Verdict::Isomorphic;
  r.witness = w;
  return r;
}

// Restrictions agree along the witness on query q (a subset of nu's carrier).
inline bool isoAgreesOn(const Ultrafilter& mu, const Ultrafilter& nu, const IsoWitness& w, const UPSet& q) {
  UPSet qb = q & w.codomainSet();
  return nu.large(qb) == mu.large(w.pullBack(qb));
}

inline bool ufArrowCheck(const UPMap& f, const Ultrafilter& mu, const Ultrafilter& nu) {
  require(f.domain() == mu.carrier(), ErrorKind::CarrierMismatch, "arrow domain " + f.domain().str() + " vs " + mu.carrier().str());
  require(f.codomain() == nu.carrier(), ErrorKind::CarrierMismatch, "arrow codomain " + f.codomain().str() + " vs " + nu.carrier().str());
  return pushProfile(mu.profile(), f) == nu.profile();
}

inline std::string Ultrafilter::str() const {
  const Node& n = *node_;
  switch (n.kind) {
    case Kind::Principal: return "principal(" + n.carrier.str() + "," + std::to_string(n.point) + ")";
    case Kind::Factorial: return "factorial";
    case Kind::Pushforward: return "push(" + n.base->str() + "," + n.map->str() + ")";
    case Kind::Sum: {
      std::string s = "sum(" + n.base->str() + ",";
      if (!n.family) return s + "section(" + n.sum.section->str() + "))";
      s += "[";
      if (n.sum.base.isFin()) {
        for (std::size_t i = 0; i < n.sum.base.n; ++i) s += (i ? "," : "") + n.family->at(i).str();
      } else {
        for (std::size_t i = 0; i < n.family->size(); ++i)
          s += (i ? "," : "") + n.family->level(i).str() + "=>" + n.family->value(i).str();
      }
      return s + "])";
    }
  }
  return "?";
}

}  // namespace ultrakit
