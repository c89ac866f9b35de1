#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "error.hpp"

namespace ultrakit {

using Bits = std::vector<bool>;

enum class UPClass { Empty, Finite, Cofinite, Full, Neither };

inline const char* to_string(UPClass c) {
  switch (c) {
    case UPClass::Empty: return "empty";
    case UPClass::Finite: return "finite";
    case UPClass::Cofinite: return "cofinite";
    case UPClass::Full: return "full";
    case UPClass::Neither: return "neither";
  }
  return "?";
}

// An ultimately periodic subset of N.  n < prefix.size() is decided by the
// prefix, larger n by period[(n - prefix.size()) % period.size()].
// Always stored in canonical form, so == is set equality.
class UPSet {
 public:
  UPSet() : period_{false} {}
  UPSet(Bits prefix, Bits period) : prefix_(std::move(prefix)), period_(std::move(period)) {
    require(!period_.empty(), ErrorKind::ParseError, "UPSet period must be nonempty");
    canonicalize();
  }

  static UPSet empty() { return UPSet({}, {false}); }
  static UPSet full() { return UPSet({}, {true}); }
  static UPSet singleton(std::size_t n) {
    Bits p(n + 1, false);
    p[n] = true;
    return UPSet(std::move(p), {false});
  }
  static UPSet range(std::size_t lo, std::size_t hi) {  // [lo, hi)
    Bits p(std::max(hi, lo), false);
    for (std::size_t i = lo; i < hi; ++i) p[i] = true;
    return UPSet(std::move(p), {false});
  }
  static UPSet from(std::size_t lo) {  // [lo, inf)
    return UPSet(Bits(lo, false), {true});
  }
  static UPSet residue(std::size_t r, std::size_t q) {
    Bits per(q, false);
    per[r % q] = true;
    return UPSet({}, std::move(per));
  }
  static UPSet finite(const std::vector<std::size_t>& elems) {
    std::size_t top = 0;
    for (auto e : elems) top = std::max(top, e + 1);
    Bits p(top, false);
    for (auto e : elems) p[e] = true;
    return UPSet(std::move(p), {false});
  }
  static UPSet evens() { return residue(0, 2); }
  static UPSet odds() { return residue(1, 2); }

  // Build from a predicate known to be periodic with `period` from `prefixLen` on.
  static UPSet tabulate(std::size_t prefixLen, std::size_t period, const std::function<bool(std::size_t)>& pred) {
    Bits pre(prefixLen), per(period);
    for (std::size_t i = 0; i < prefixLen; ++i) pre[i] = pred(i);
    for (std::size_t i = 0; i < period; ++i) per[i] = pred(prefixLen + i);
    return UPSet(std::move(pre), std::move(per));
  }

  const Bits& prefix() const { return prefix_; }
  const Bits& period() const { return period_; }
  std::size_t prefixLength() const { return prefix_.size(); }
  std::size_t periodLength() const { return period_.size(); }

  bool contains(std::size_t n) const {
    if (n < prefix_.size()) return prefix_[n];
    return period_[(n - prefix_.size()) % period_.size()];
  }

  // Membership of the tail residue class of b modulo the period.
  bool eventuallyContainsClassOf(std::size_t b) const {
    std::size_t q = period_.size(), L = prefix_.size();
    std::size_t idx = ((b % q) + q - (L % q)) % q;
    return period_[idx];
  }

  bool tailEmpty() const { return std::none_of(period_.begin(), period_.end(), [](bool b) { return b; }); }
  bool tailFull() const { return std::all_of(period_.begin(), period_.end(), [](bool b) { return b; }); }

  UPClass classify() const {
    bool anyPre = std::any_of(prefix_.begin(), prefix_.end(), [](bool b) { return b; });
    bool allPre = std::all_of(prefix_.begin(), prefix_.end(), [](bool b) { return b; });
    if (tailEmpty()) return anyPre ? UPClass::Finite : UPClass::Empty;
    if (tailFull()) return allPre ? UPClass::Full : UPClass::Cofinite;
    return UPClass::Neither;
  }
  bool isEmpty() const { return classify() == UPClass::Empty; }
  bool isFinite() const { auto c = classify(); return c == UPClass::Empty || c == UPClass::Finite; }

  // Finite sets only.
  std::vector<std::size_t> elements() const {
    require(tailEmpty(), ErrorKind::QueryOutsideAlgebra, "elements() of an infinite set");
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < prefix_.size(); ++i)
      if (prefix_[i]) out.push_back(i);
    return out;
  }
  // Smallest element, or npos when empty.
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::size_t minElement() const {
    for (std::size_t i = 0; i < prefix_.size() + period_.size(); ++i)
      if (contains(i)) return i;
    return npos;
  }
  // Every element lies below `bound`.
  bool boundedBy(std::size_t bound) const {
    if (!tailEmpty()) return false;
    for (std::size_t i = bound; i < prefix_.size(); ++i)
      if (prefix_[i]) return false;
    return true;
  }

  UPSet complement() const {
    Bits pre(prefix_.size()), per(period_.size());
    for (std::size_t i = 0; i < pre.size(); ++i) pre[i] = !prefix_[i];
    for (std::size_t i = 0; i < per.size(); ++i) per[i] = !period_[i];
    return UPSet(std::move(pre), std::move(per));
  }

  template <class Op>
  static UPSet combine(const UPSet& a, const UPSet& b, Op op) {
    std::size_t L = std::max(a.prefixLength(), b.prefixLength());
    std::size_t q = std::lcm(a.periodLength(), b.periodLength());
    return tabulate(L, q, [&](std::size_t n) { return op(a.contains(n), b.contains(n)); });
  }

  friend UPSet operator&(const UPSet& a, const UPSet& b) { return combine(a, b, [](bool x, bool y) { return x && y; }); }
  friend UPSet operator|(const UPSet& a, const UPSet& b) { return combine(a, b, [](bool x, bool y) { return x || y; }); }
  friend UPSet operator-(const UPSet& a, const UPSet& b) { return combine(a, b, [](bool x, bool y) { return x && !y; }); }
  friend UPSet operator^(const UPSet& a, const UPSet& b) { return combine(a, b, [](bool x, bool y) { return x != y; }); }
  UPSet operator~() const { return complement(); }

  bool subsetOf(const UPSet& o) const { return (*this - o).isEmpty(); }

  friend bool operator==(const UPSet& a, const UPSet& b) { return a.prefix_ == b.prefix_ && a.period_ == b.period_; }
  friend bool operator!=(const UPSet& a, const UPSet& b) { return !(a == b); }
  friend bool operator<(const UPSet& a, const UPSet& b) {
    if (a.prefix_ != b.prefix_) return a.prefix_ < b.prefix_;
    return a.period_ < b.period_;
  }

  // {k : a*k + b in this}
  UPSet affinePreimage(std::size_t a, std::size_t b) const {
    std::size_t L = prefix_.size();
    std::size_t start = L > b ? (L - b + a - 1) / a : 0;
    return tabulate(start, period_.size(), [&](std::size_t k) { return contains(a * k + b); });
  }
  // {k : k / a in this}
  UPSet quotientPreimage(std::size_t a) const {
    return tabulate(a * prefix_.size(), a * period_.size(), [&](std::size_t k) { return contains(k / a); });
  }
  // {s*m + t : s in this}
  UPSet spread(std::size_t m, std::size_t t) const {
    return tabulate(m * prefix_.size(), m * period_.size(),
                    [&](std::size_t n) { return n % m == t && contains(n / m); });
  }

  std::string str() const {
    std::string s = "prefix:";
    for (bool b : prefix_) s += b ? '1' : '0';
    s += ";period:";
    for (bool b : period_) s += b ? '1' : '0';
    return s;
  }

 private:
  void canonicalize() {
    std::size_t q = period_.size();
    for (std::size_t d = 1; d < q; ++d) {
      if (q % d) continue;
      bool ok = true;
      for (std::size_t i = d; i < q && ok; ++i) ok = period_[i] == period_[i - d];
      if (ok) {
        period_.resize(d);
        break;
      }
    }
    while (!prefix_.empty() && prefix_.back() == period_.back()) {
      prefix_.pop_back();
      std::rotate(period_.rbegin(), period_.rbegin() + 1, period_.rend());
    }
  }

  Bits prefix_;
  Bits period_;
};

// Fin(n) or N.  Subsets of Fin(n) are UPSets bounded by n.
struct IndexSet {
  bool nat = false;
  std::size_t n = 0;

  static IndexSet fin(std::size_t n) { return {false, n}; }
  static IndexSet natural() { return {true, 0}; }
  static IndexSet star() { return fin(1); }

  bool isFin() const { return !nat; }
  UPSet full() const { return nat ? UPSet::full() : UPSet::range(0, n); }
  bool admits(const UPSet& q) const { return nat || q.boundedBy(n); }
  bool hasPoint(std::size_t p) const { return nat || p < n; }
  UPSet complement(const UPSet& q) const { return full() - q; }
  void check(const UPSet& q, const char* what = "query") const {
    if (!admits(q)) fail(ErrorKind::QueryOutsideAlgebra, std::string(what) + " " + q.str() + " not inside " + str());
  }

  std::string str() const { return nat ? "nat" : "fin(" + std::to_string(n) + ")"; }
  friend bool operator==(const IndexSet& a, const IndexSet& b) { return a.nat == b.nat && a.n == b.n; }
  friend bool operator!=(const IndexSet& a, const IndexSet& b) { return !(a == b); }
};

}  // namespace ultrakit
