#pragma once

#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include "upset.hpp"

namespace ultrakit {

// A map between index sets with computable preimages of UPSets.
//   Step:     domain split into UPSet parts, part i sent to values[i]
//   Affine:   N -> N, k |-> a*k + b
//   Quotient: N -> N, k |-> k / a
//   SumLift:  N -> N, s*m + t |-> f(s)*n + g(t)   (n = m, g = id for sumLift)
//   Composite: second after first
class UPMap {
 public:
  enum class Kind { Step, Affine, Quotient, SumLift, Composite };

  static UPMap partition(IndexSet domain, std::vector<UPSet> parts) {
    std::vector<std::size_t> vals(parts.size());
    for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = i;
    IndexSet cod = IndexSet::fin(parts.size());
    return step(domain, cod, std::move(parts), std::move(vals));
  }
  static UPMap step(IndexSet domain, IndexSet codomain, std::vector<UPSet> parts, std::vector<std::size_t> values) {
    require(parts.size() == values.size(), ErrorKind::InvalidFamily, "step map parts/values length");
    UPSet cover = UPSet::empty();
    for (std::size_t i = 0; i < parts.size(); ++i) {
      domain.check(parts[i], "map part");
      require(codomain.hasPoint(values[i]), ErrorKind::CarrierMismatch, "map value outside " + codomain.str());
      require((cover & parts[i]).isEmpty(), ErrorKind::InvalidFamily, "map parts overlap");
      cover = cover | parts[i];
    }
    require(cover == domain.full(), ErrorKind::InvalidFamily, "map parts do not cover " + domain.str());
    UPMap m(Kind::Step, domain, codomain);
    m.parts_ = std::move(parts);
    m.values_ = std::move(values);
    return m;
  }
  static UPMap table(std::size_t n, IndexSet codomain, const std::vector<std::size_t>& images) {
    require(images.size() == n, ErrorKind::InvalidFamily, "table length");
    std::vector<UPSet> parts;
    std::vector<std::size_t> vals;
    for (std::size_t i = 0; i < n; ++i) {
      parts.push_back(UPSet::singleton(i));
      vals.push_back(images[i]);
    }
    return step(IndexSet::fin(n), codomain, std::move(parts), std::move(vals));
  }
  static UPMap constant(IndexSet domain, IndexSet codomain, std::size_t c) {
    if (domain.isFin() && domain.n == 0) return step(domain, codomain, {}, {});
    return step(domain, codomain, {domain.full()}, {c});
  }
  static UPMap residues(std::size_t m) {
    std::vector<UPSet> parts;
    for (std::size_t t = 0; t < m; ++t) parts.push_back(UPSet::residue(t, m));
    return partition(IndexSet::natural(), std::move(parts));
  }
  static UPMap affine(std::size_t a, std::size_t b) {
    require(a >= 1, ErrorKind::InvalidFamily, "affine map needs a >= 1");
    UPMap m(Kind::Affine, IndexSet::natural(), IndexSet::natural());
    m.a_ = a;
    m.b_ = b;
    return m;
  }
  static UPMap quotient(std::size_t a) {
    require(a >= 1, ErrorKind::InvalidFamily, "quotient needs a >= 1");
    UPMap m(Kind::Quotient, IndexSet::natural(), IndexSet::natural());
    m.a_ = a;
    return m;
  }
  static UPMap identity(IndexSet x) {
    if (x.nat) return affine(1, 0);
    std::vector<std::size_t> id(x.n);
    for (std::size_t i = 0; i < x.n; ++i) id[i] = i;
    return table(x.n, x, id);
  }
  static UPMap sumLift(const UPMap& f, std::size_t m) {
    std::vector<std::size_t> id(m);
    std::iota(id.begin(), id.end(), 0);
    return blockLift(f, m, m, id);
  }
  static UPMap blockLift(const UPMap& f, std::size_t m, std::size_t n, std::vector<std::size_t> g) {
    require(f.domain().nat && f.codomain().nat, ErrorKind::UnsupportedEncoding, "sum lift needs N -> N");
    require(m >= 1 && n >= 1 && g.size() == m, ErrorKind::InvalidFamily, "block sizes");
    for (auto t : g) require(t < n, ErrorKind::CarrierMismatch, "block map value outside the target block");
    UPMap r(Kind::SumLift, IndexSet::natural(), IndexSet::natural());
    r.a_ = m;
    r.b_ = n;
    r.values_ = std::move(g);
    r.first_ = std::make_shared<UPMap>(f);
    return r;
  }
  bool plainLift() const {
    if (b_ != a_) return false;
    for (std::size_t t = 0; t < values_.size(); ++t)
      if (values_[t] != t) return false;
    return true;
  }
  // g after f
  static UPMap compose(const UPMap& g, const UPMap& f) {
    require(f.codomain() == g.domain(), ErrorKind::CarrierMismatch,
            "compose " + f.codomain().str() + " with " + g.domain().str());
    if (f.isIdentity()) return g;
    if (g.isIdentity()) return f;
    if (f.kind_ == Kind::Affine && g.kind_ == Kind::Affine) return affine(g.a_ * f.a_, g.a_ * f.b_ + g.b_);
    if (f.kind_ == Kind::Step) {
      std::vector<std::size_t> vals;
      for (auto v : f.values_) vals.push_back(g.apply(v));
      return step(f.domain_, g.codomain_, f.parts_, vals);
    }
    UPMap r(Kind::Composite, f.domain_, g.codomain_);
    r.first_ = std::make_shared<UPMap>(f);
    r.second_ = std::make_shared<UPMap>(g);
    return r;
  }

  Kind kind() const { return kind_; }
  const IndexSet& domain() const { return domain_; }
  const IndexSet& codomain() const { return codomain_; }
  std::size_t a() const { return a_; }
  std::size_t b() const { return b_; }
  const std::vector<UPSet>& parts() const { return parts_; }
  const std::vector<std::size_t>& values() const { return values_; }
  const UPMap& first() const { return *first_; }
  const UPMap& second() const { return *second_; }

  bool isIdentity() const {
    if (kind_ == Kind::Affine) return a_ == 1 && b_ == 0;
    if (kind_ == Kind::Quotient) return a_ == 1;
    if (kind_ == Kind::Step && domain_ == codomain_ && domain_.isFin()) {
      for (std::size_t i = 0; i < parts_.size(); ++i)
        if (parts_[i] != UPSet::singleton(values_[i])) return false;
      return true;
    }
    return false;
  }

  std::size_t apply(std::size_t k) const {
    require(domain_.hasPoint(k), ErrorKind::CarrierMismatch, "point outside " + domain_.str());
    switch (kind_) {
      case Kind::Step:
        for (std::size_t i = 0; i < parts_.size(); ++i)
          if (parts_[i].contains(k)) return values_[i];
        break;
      case Kind::Affine: return a_ * k + b_;
      case Kind::Quotient: return k / a_;
      case Kind::SumLift: return first_->apply(k / a_) * b_ + values_[k % a_];
      case Kind::Composite: return second_->apply(first_->apply(k));
    }
    fail(ErrorKind::TheoremMismatch, "map does not cover its domain");
  }

  UPSet preimage(const UPSet& q) const {
    codomain_.check(q);
    switch (kind_) {
      case Kind::Step: {
        UPSet out = UPSet::empty();
        for (std::size_t i = 0; i < parts_.size(); ++i)
          if (q.contains(values_[i])) out = out | parts_[i];
        return out;
      }
      case Kind::Affine: return q.affinePreimage(a_, b_);
      case Kind::Quotient: return q.quotientPreimage(a_);
      case Kind::SumLift: {
        UPSet out = UPSet::empty();
        for (std::size_t t = 0; t < a_; ++t) out = out | first_->preimage(q.affinePreimage(b_, values_[t])).spread(a_, t);
        return out;
      }
      case Kind::Composite: return first_->preimage(second_->preimage(q));
    }
    return UPSet::empty();
  }

  // Image of a finite subset of the domain.
  UPSet imageOfFinite(const UPSet& s) const {
    std::vector<std::size_t> out;
    for (auto k : s.elements()) out.push_back(apply(k));
    return UPSet::finite(out);
  }

  // The image is a finite set.
  bool finiteImage() const {
    switch (kind_) {
      case Kind::Step: return true;
      case Kind::Affine:
      case Kind::Quotient: return false;
      case Kind::SumLift: return first_->finiteImage();
      case Kind::Composite: return first_->finiteImage() || second_->finiteImage();
    }
    return false;
  }

  std::string str() const {
    switch (kind_) {
      case Kind::Affine: return "affine(" + std::to_string(a_) + "," + std::to_string(b_) + ")";
      case Kind::Quotient: return "quot(" + std::to_string(a_) + ")";
      case Kind::SumLift: {
        std::string s = "lift(" + first_->str() + "," + std::to_string(a_);
        if (plainLift()) return s + ")";
        s += "," + std::to_string(b_) + ",[";
        for (std::size_t t = 0; t < values_.size(); ++t) s += (t ? "," : "") + std::to_string(values_[t]);
        return s + "])";
      }
      case Kind::Composite: return "comp(" + second_->str() + "," + first_->str() + ")";
      case Kind::Step: {
        std::string s = "step(" + domain_.str() + "," + codomain_.str() + ",[";
        for (std::size_t i = 0; i < parts_.size(); ++i) {
          if (i) s += ",";
          s += parts_[i].str() + "=>" + std::to_string(values_[i]);
        }
        return s + "])";
      }
    }
    return "?";
  }

 private:
  UPMap(Kind k, IndexSet d, IndexSet c) : kind_(k), domain_(d), codomain_(c) {}

  Kind kind_;
  IndexSet domain_, codomain_;
  std::size_t a_ = 1, b_ = 0;
  std::vector<UPSet> parts_;
  std::vector<std::size_t> values_;
  std::shared_ptr<const UPMap> first_, second_;
};

}  // namespace ultrakit
