#pragma once

#include <algorithm>
#include <functional>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "upset.hpp"

namespace ultrakit {

// A finitely-valued function on an IndexSet whose level sets are UPSets.
// Equal values are merged and entries are ordered by the least element of
// their level set, so two families are == iff they are the same function.
template <class V>
class UPFamily {
 public:
  UPFamily() = default;
  UPFamily(IndexSet index, std::vector<std::pair<UPSet, V>> pieces) : index_(index) {
    for (auto& [set, value] : pieces) {
      index_.check(set, "level set");
      if (set.isEmpty()) continue;
      auto it = std::find(values_.begin(), values_.end(), value);
      if (it == values_.end()) {
        values_.push_back(std::move(value));
        levels_.push_back(set);
      } else {
        auto& lv = levels_[static_cast<std::size_t>(it - values_.begin())];
        lv = lv | set;
      }
    }
    UPSet cover = UPSet::empty();
    for (std::size_t i = 0; i < levels_.size(); ++i) {
      require((cover & levels_[i]).isEmpty(), ErrorKind::InvalidFamily, "level sets overlap");
      cover = cover | levels_[i];
    }
    require(cover == index_.full(), ErrorKind::InvalidFamily, "level sets do not cover " + index_.str());
    sortLevels();
  }

  static UPFamily constant(IndexSet index, V value) {
    return UPFamily(index, {{index.full(), std::move(value)}});
  }

  // f must be periodic with `period` from `prefixLen` on (Nat index).
  template <class F>
  static UPFamily tabulate(IndexSet index, std::size_t prefixLen, std::size_t period, F f) {
    std::size_t span = index.nat ? prefixLen + period : index.n;
    std::vector<V> vals;
    std::vector<std::size_t> label(span);
    for (std::size_t i = 0; i < span; ++i) {
      V v = f(i);
      auto it = std::find(vals.begin(), vals.end(), v);
      if (it == vals.end()) {
        label[i] = vals.size();
        vals.push_back(std::move(v));
      } else {
        label[i] = static_cast<std::size_t>(it - vals.begin());
      }
    }
    std::vector<std::pair<UPSet, V>> pieces;
    for (std::size_t j = 0; j < vals.size(); ++j) {
      UPSet s = index.nat ? UPSet::tabulate(prefixLen, period, [&](std::size_t k) { return label[k] == j; })
                          : UPSet::tabulate(span, 1, [&](std::size_t k) { return k < span && label[k] == j; });
      pieces.emplace_back(std::move(s), std::move(vals[j]));
    }
    return UPFamily(index, std::move(pieces));
  }

  const IndexSet& index() const { return index_; }
  std::size_t size() const { return values_.size(); }
  const std::vector<V>& values() const { return values_; }
  const std::vector<UPSet>& levels() const { return levels_; }
  const V& value(std::size_t i) const { return values_[i]; }
  const UPSet& level(std::size_t i) const { return levels_[i]; }

  const V& at(std::size_t k) const {
    for (std::size_t i = 0; i < levels_.size(); ++i)
      if (levels_[i].contains(k)) return values_[i];
    fail(ErrorKind::QueryOutsideAlgebra, "family evaluated outside " + index_.str() + " at " + std::to_string(k));
  }

  UPSet where(const std::function<bool(const V&)>& pred) const {
    UPSet out = UPSet::empty();
    for (std::size_t i = 0; i < values_.size(); ++i)
      if (pred(values_[i])) out = out | levels_[i];
    return out;
  }

  // Largest prefix and lcm of periods over all level sets.
  std::pair<std::size_t, std::size_t> periodicity() const {
    std::size_t L = 0, q = 1;
    for (auto& s : levels_) {
      L = std::max(L, s.prefixLength());
      q = std::lcm(q, s.periodLength());
    }
    return {L, q};
  }

  template <class F>
  auto map(F f) const -> UPFamily<std::decay_t<decltype(f(std::declval<const V&>()))>> {
    using W = std::decay_t<decltype(f(std::declval<const V&>()))>;
    std::vector<std::pair<UPSet, W>> pieces;
    for (std::size_t i = 0; i < values_.size(); ++i) pieces.emplace_back(levels_[i], f(values_[i]));
    return UPFamily<W>(index_, std::move(pieces));
  }

  friend bool operator==(const UPFamily& a, const UPFamily& b) {
    return a.index_ == b.index_ && a.values_ == b.values_ && a.levels_ == b.levels_;
  }
  friend bool operator!=(const UPFamily& a, const UPFamily& b) { return !(a == b); }

 private:
  void sortLevels() {
    std::vector<std::size_t> ord(values_.size());
    std::iota(ord.begin(), ord.end(), 0);
    std::sort(ord.begin(), ord.end(), [&](std::size_t x, std::size_t y) {
      return levels_[x].minElement() < levels_[y].minElement();
    });
    std::vector<V> v;
    std::vector<UPSet> l;
    for (auto i : ord) {
      v.push_back(std::move(values_[i]));
      l.push_back(std::move(levels_[i]));
    }
    values_ = std::move(v);
    levels_ = std::move(l);
  }

  IndexSet index_;
  std::vector<V> values_;
  std::vector<UPSet> levels_;
};

// Pairwise combination; both families share an index.
template <class A, class B, class F>
auto zipWith(const UPFamily<A>& x, const UPFamily<B>& y, F f)
    -> UPFamily<std::decay_t<decltype(f(std::declval<const A&>(), std::declval<const B&>()))>> {
  using W = std::decay_t<decltype(f(std::declval<const A&>(), std::declval<const B&>()))>;
  require(x.index() == y.index(), ErrorKind::CarrierMismatch, "zip over " + x.index().str() + " and " + y.index().str());
  std::vector<std::pair<UPSet, W>> pieces;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j) {
      UPSet s = x.level(i) & y.level(j);
      if (!s.isEmpty()) pieces.emplace_back(std::move(s), f(x.value(i), y.value(j)));
    }
  return UPFamily<W>(x.index(), std::move(pieces));
}

// The set where pred(x(s), y(s), ctx(s)) holds.
template <class A, class B, class C, class P>
UPSet agreementSet(const UPFamily<A>& x, const UPFamily<B>& y, const UPFamily<C>& ctx, P pred) {
  require(x.index() == y.index() && x.index() == ctx.index(), ErrorKind::CarrierMismatch, "families over different index sets");
  UPSet out = UPSet::empty();
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j) {
      UPSet xy = x.level(i) & y.level(j);
      if (xy.isEmpty()) continue;
      for (std::size_t k = 0; k < ctx.size(); ++k) {
        UPSet s = xy & ctx.level(k);
        if (!s.isEmpty() && pred(x.value(i), y.value(j), ctx.value(k))) out = out | s;
      }
    }
  return out;
}

template <class A>
UPSet agreementSet(const UPFamily<A>& x, const UPFamily<A>& y) {
  require(x.index() == y.index(), ErrorKind::CarrierMismatch, "families over different index sets");
  UPSet out = UPSet::empty();
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j)
      if (x.value(i) == y.value(j)) out = out | (x.level(i) & y.level(j));
  return out;
}

}  // namespace ultrakit
