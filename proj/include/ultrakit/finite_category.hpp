#pragma once

#include <algorithm>
#include <array>
#include <functional>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "finite_space.hpp"

namespace ultrakit {

constexpr std::size_t npos = static_cast<std::size_t>(-1);

// A finite category with arrows 0..A-1 and a full composition table.
class FiniteCategory {
 public:
  FiniteCategory() = default;

  // comp(g, f) = g o f, npos when t(f) != s(g).
  FiniteCategory(std::size_t objects, std::vector<std::size_t> src, std::vector<std::size_t> tgt,
                 std::vector<std::size_t> identities, std::vector<std::size_t> comp)
      : n_(objects), src_(std::move(src)), tgt_(std::move(tgt)), id_(std::move(identities)), comp_(std::move(comp)) {
    index();
  }

  std::size_t objects() const { return n_; }
  std::size_t arrows() const { return src_.size(); }
  std::size_t source(std::size_t f) const { return src_[f]; }
  std::size_t target(std::size_t f) const { return tgt_[f]; }
  std::size_t identity(std::size_t a) const { return id_[a]; }
  std::size_t compose(std::size_t g, std::size_t f) const { return comp_[g * arrows() + f]; }
  const std::vector<std::size_t>& hom(std::size_t a, std::size_t b) const { return homs_[a * n_ + b]; }
  const std::vector<std::size_t>& compositionTable() const { return comp_; }

  bool isIso(std::size_t f) const { return inverse(f) != npos; }
  std::size_t inverse(std::size_t f) const {
    for (auto g : hom(tgt_[f], src_[f]))
      if (compose(g, f) == id_[src_[f]] && compose(f, g) == id_[tgt_[f]]) return g;
    return npos;
  }

  // Checks closure, identities and associativity; throws InvalidCategory.
  void validate() const {
    std::size_t A = arrows();
    require(id_.size() == n_ && tgt_.size() == A && comp_.size() == A * A, ErrorKind::InvalidCategory, "table sizes");
    for (std::size_t f = 0; f < A; ++f)
      require(src_[f] < n_ && tgt_[f] < n_, ErrorKind::InvalidCategory, "arrow endpoint out of range");
    for (std::size_t a = 0; a < n_; ++a)
      require(id_[a] < A && src_[id_[a]] == a && tgt_[id_[a]] == a, ErrorKind::InvalidCategory, "identity of object " + std::to_string(a));
    for (std::size_t g = 0; g < A; ++g)
      for (std::size_t f = 0; f < A; ++f) {
        std::size_t h = compose(g, f);
        if (tgt_[f] != src_[g]) {
          require(h == npos, ErrorKind::InvalidCategory, "composite of non-composable arrows");
          continue;
        }
        require(h < A && src_[h] == src_[f] && tgt_[h] == tgt_[g], ErrorKind::InvalidCategory,
                "composite " + std::to_string(g) + "o" + std::to_string(f) + " has the wrong type");
      }
    for (std::size_t f = 0; f < A; ++f) {
      require(compose(id_[tgt_[f]], f) == f && compose(f, id_[src_[f]]) == f, ErrorKind::InvalidCategory,
              "identity law fails at arrow " + std::to_string(f));
    }
    for (std::size_t f = 0; f < A; ++f)
      for (std::size_t g : outOf(tgt_[f]))
        for (std::size_t h : outOf(tgt_[g]))
          require(compose(h, compose(g, f)) == compose(compose(h, g), f), ErrorKind::InvalidCategory,
                  "associativity fails at " + std::to_string(h) + "," + std::to_string(g) + "," + std::to_string(f));
  }

  std::vector<std::size_t> outOf(std::size_t a) const {
    std::vector<std::size_t> out;
    for (std::size_t f = 0; f < arrows(); ++f)
      if (src_[f] == a) out.push_back(f);
    return out;
  }

  static FiniteCategory fromPreorder(const FiniteSpace& T) {
    std::size_t n = T.size();
    std::vector<std::size_t> src, tgt, id(n);
    std::vector<std::size_t> arrowOf(n * n, npos);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        if (T.leq(a, b)) {
          arrowOf[a * n + b] = src.size();
          if (a == b) id[a] = src.size();
          src.push_back(a);
          tgt.push_back(b);
        }
    std::size_t A = src.size();
    std::vector<std::size_t> comp(A * A, npos);
    for (std::size_t g = 0; g < A; ++g)
      for (std::size_t f = 0; f < A; ++f)
        if (tgt[f] == src[g]) comp[g * A + f] = arrowOf[src[f] * n + tgt[g]];
    return FiniteCategory(n, src, tgt, id, comp);
  }

  static FiniteCategory terminal() { return FiniteCategory(1, {0}, {0}, {0}, {0}); }

  // The walking arrow 0 -> 1.
  static FiniteCategory arrow() {
    return FiniteCategory(2, {0, 1, 0}, {0, 1, 1}, {0, 1}, {0, npos, npos, npos, 1, 2, 2, npos, npos});
  }

  friend bool operator==(const FiniteCategory& a, const FiniteCategory& b) {
    return a.n_ == b.n_ && a.src_ == b.src_ && a.tgt_ == b.tgt_ && a.id_ == b.id_ && a.comp_ == b.comp_;
  }

  std::string str() const {
    std::string s = "objects " + std::to_string(n_) + " arrows [";
    for (std::size_t f = 0; f < arrows(); ++f) s += (f ? "," : "") + std::to_string(src_[f]) + "->" + std::to_string(tgt_[f]);
    return s + "]";
  }

 private:
  void index() {
    homs_.assign(n_ * n_, {});
    for (std::size_t f = 0; f < src_.size(); ++f) homs_[src_[f] * n_ + tgt_[f]].push_back(f);
  }

  std::size_t n_ = 0;
  std::vector<std::size_t> src_, tgt_, id_, comp_;
  std::vector<std::vector<std::size_t>> homs_;
};

struct CatFunctor {
  std::vector<std::size_t> obj, arr;
  friend bool operator==(const CatFunctor& a, const CatFunctor& b) { return a.obj == b.obj && a.arr == b.arr; }
  friend bool operator<(const CatFunctor& a, const CatFunctor& b) {
    return a.obj != b.obj ? a.obj < b.obj : a.arr < b.arr;
  }
};

inline bool isFunctor(const FiniteCategory& C, const FiniteCategory& D, const CatFunctor& F) {
  if (F.obj.size() != C.objects() || F.arr.size() != C.arrows()) return false;
  for (std::size_t f = 0; f < C.arrows(); ++f) {
    if (F.arr[f] >= D.arrows()) return false;
    if (D.source(F.arr[f]) != F.obj[C.source(f)] || D.target(F.arr[f]) != F.obj[C.target(f)]) return false;
  }
  for (std::size_t a = 0; a < C.objects(); ++a)
    if (F.arr[C.identity(a)] != D.identity(F.obj[a])) return false;
  for (std::size_t g = 0; g < C.arrows(); ++g)
    for (std::size_t f = 0; f < C.arrows(); ++f) {
      std::size_t h = C.compose(g, f);
      if (h != npos && D.compose(F.arr[g], F.arr[f]) != F.arr[h]) return false;
    }
  return true;
}

// Visits every functor C -> D; objects fixed by `fixedObj` where not npos.
// The visitor returns false to stop.
inline void enumerateFunctors(const FiniteCategory& C, const FiniteCategory& D,
                              const std::function<bool(const CatFunctor&)>& visit,
                              const std::vector<std::size_t>& fixedObj = {}) {
  std::size_t nc = C.objects(), A = C.arrows();
  // constraints[i]: (g, f, h) with max(g, f, h) == i
  std::vector<std::vector<std::array<std::size_t, 3>>> constraints(A);
  for (std::size_t g = 0; g < A; ++g)
    for (std::size_t f = 0; f < A; ++f) {
      std::size_t h = C.compose(g, f);
      if (h == npos) continue;
      constraints[std::max({g, f, h})].push_back({g, f, h});
    }
  CatFunctor F{std::vector<std::size_t>(nc, 0), std::vector<std::size_t>(A, npos)};
  bool stop = false;
  std::function<void(std::size_t)> arrows = [&](std::size_t i) {
    if (stop) return;
    if (i == A) {
      if (!visit(F)) stop = true;
      return;
    }
    std::size_t a = C.source(i), b = C.target(i);
    std::vector<std::size_t> cands;
    if (C.identity(a) == i) cands = {D.identity(F.obj[a])};
    else cands = D.hom(F.obj[a], F.obj[b]);
    for (auto c : cands) {
      F.arr[i] = c;
      bool ok = true;
      for (auto& [g, f, h] : constraints[i])
        if (D.compose(F.arr[g], F.arr[f]) != F.arr[h]) {
          ok = false;
          break;
        }
      if (ok) arrows(i + 1);
      if (stop) break;
    }
    F.arr[i] = npos;
  };
  std::function<void(std::size_t)> objects = [&](std::size_t i) {
    if (stop) return;
    if (i == nc) {
      arrows(0);
      return;
    }
    if (i < fixedObj.size() && fixedObj[i] != npos) {
      F.obj[i] = fixedObj[i];
      objects(i + 1);
      return;
    }
    for (std::size_t d = 0; d < D.objects() && !stop; ++d) {
      F.obj[i] = d;
      objects(i + 1);
    }
  };
  objects(0);
}

inline std::vector<CatFunctor> allFunctors(const FiniteCategory& C, const FiniteCategory& D) {
  std::vector<CatFunctor> out;
  enumerateFunctors(C, D, [&](const CatFunctor& F) {
    out.push_back(F);
    return true;
  });
  return out;
}

inline CatFunctor composeFunctors(const CatFunctor& G, const CatFunctor& F) {
  CatFunctor H;
  for (auto o : F.obj) H.obj.push_back(G.obj[o]);
  for (auto a : F.arr) H.arr.push_back(G.arr[a]);
  return H;
}

inline CatFunctor identityFunctor(const FiniteCategory& C) {
  CatFunctor F;
  for (std::size_t a = 0; a < C.objects(); ++a) F.obj.push_back(a);
  for (std::size_t f = 0; f < C.arrows(); ++f) F.arr.push_back(f);
  return F;
}

// Natural transformations F => G (components indexed by objects of C).
inline void enumerateNatTrans(const FiniteCategory& C, const FiniteCategory& D, const CatFunctor& F, const CatFunctor& G,
                              const std::function<bool(const std::vector<std::size_t>&)>& visit) {
  std::size_t n = C.objects();
  std::vector<std::size_t> alpha(n, npos);
  bool stop = false;
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (stop) return;
    if (i == n) {
      if (!visit(alpha)) stop = true;
      return;
    }
    for (auto c : D.hom(F.obj[i], G.obj[i])) {
      alpha[i] = c;
      bool ok = true;
      for (std::size_t f = 0; f < C.arrows() && ok; ++f) {
        std::size_t a = C.source(f), b = C.target(f);
        if (std::max(a, b) != i) continue;
        ok = D.compose(G.arr[f], alpha[a]) == D.compose(alpha[b], F.arr[f]);
      }
      if (ok) rec(i + 1);
      if (stop) break;
    }
    alpha[i] = npos;
  };
  rec(0);
}

inline std::size_t countNatTrans(const FiniteCategory& C, const FiniteCategory& D, const CatFunctor& F, const CatFunctor& G) {
  std::size_t count = 0;
  enumerateNatTrans(C, D, F, G, [&](const std::vector<std::size_t>&) {
    ++count;
    return true;
  });
  return count;
}

// Isomorphism of finite categories by brute force over object bijections.
inline bool categoriesIsomorphic(const FiniteCategory& C, const FiniteCategory& D) {
  if (C.objects() != D.objects() || C.arrows() != D.arrows()) return false;
  std::vector<std::size_t> perm(C.objects());
  std::iota(perm.begin(), perm.end(), 0);
  do {
    bool found = false;
    enumerateFunctors(
        C, D,
        [&](const CatFunctor& F) {
          std::vector<std::size_t> a = F.arr;
          std::sort(a.begin(), a.end());
          if (std::adjacent_find(a.begin(), a.end()) == a.end()) found = true;
          return !found;
        },
        perm);
    if (found) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

// All categories with at most maxObjects objects and at most maxParallel
// arrows between any ordered pair, up to isomorphism.
inline std::vector<FiniteCategory> enumerateSmallCategories(std::size_t maxObjects, std::size_t maxParallel);

namespace detail {

inline std::vector<std::size_t> categoryCode(const FiniteCategory& C, const std::vector<std::size_t>& objPerm,
                                             const std::vector<std::size_t>& arrowPerm) {
  // arrowPerm: old arrow -> new arrow
  std::size_t A = C.arrows();
  std::vector<std::size_t> code;
  code.push_back(C.objects());
  std::vector<std::size_t> inv(A);
  for (std::size_t f = 0; f < A; ++f) inv[arrowPerm[f]] = f;
  for (std::size_t nf = 0; nf < A; ++nf) {
    code.push_back(objPerm[C.source(inv[nf])]);
    code.push_back(objPerm[C.target(inv[nf])]);
  }
  for (std::size_t ng = 0; ng < A; ++ng)
    for (std::size_t nf = 0; nf < A; ++nf) {
      std::size_t h = C.compose(inv[ng], inv[nf]);
      code.push_back(h == npos ? npos : arrowPerm[h]);
    }
  return code;
}

}  // namespace detail

inline std::vector<FiniteCategory> enumerateSmallCategories(std::size_t maxObjects, std::size_t maxParallel) {
  require(maxObjects <= 3 && maxParallel <= 3, ErrorKind::BoundExceeded, "small category enumeration bound");
  std::vector<FiniteCategory> out;
  std::set<std::vector<std::size_t>> seen;
  for (std::size_t n = 1; n <= maxObjects; ++n) {
    std::size_t pairs = n * n;
    std::vector<std::size_t> h(pairs, 0);
    // hom sizes: diagonal >= 1
    std::function<void(std::size_t)> sizes = [&](std::size_t i) {
      if (i < pairs) {
        std::size_t a = i / n, b = i % n;
        for (std::size_t k = (a == b ? 1 : 0); k <= maxParallel; ++k) {
          h[i] = k;
          sizes(i + 1);
        }
        return;
      }
      // arrows ordered by (a, b), identity first on the diagonal
      std::vector<std::size_t> src, tgt, id(n);
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
          for (std::size_t k = 0; k < h[a * n + b]; ++k) {
            if (a == b && k == 0) id[a] = src.size();
            src.push_back(a);
            tgt.push_back(b);
          }
      std::size_t A = src.size();
      std::vector<std::size_t> comp(A * A, npos);
      std::vector<std::pair<std::size_t, std::size_t>> free;
      for (std::size_t g = 0; g < A; ++g)
        for (std::size_t f = 0; f < A; ++f) {
          if (tgt[f] != src[g]) continue;
          if (g == id[src[g]]) comp[g * A + f] = f;
          else if (f == id[tgt[f]]) comp[g * A + f] = g;
          else free.emplace_back(g, f);
        }
      std::vector<std::vector<std::size_t>> homs(n * n);
      for (std::size_t f = 0; f < A; ++f) homs[src[f] * n + tgt[f]].push_back(f);
      auto assocOk = [&]() {
        for (std::size_t f = 0; f < A; ++f)
          for (std::size_t g = 0; g < A; ++g) {
            if (tgt[f] != src[g]) continue;
            std::size_t gf = comp[g * A + f];
            if (gf == npos) continue;
            for (std::size_t k = 0; k < A; ++k) {
              if (tgt[g] != src[k]) continue;
              std::size_t kg = comp[k * A + g];
              if (kg == npos) continue;
              std::size_t l = comp[k * A + gf], r = comp[kg * A + f];
              if (l != npos && r != npos && l != r) return false;
            }
          }
        return true;
      };
      std::function<void(std::size_t)> fill = [&](std::size_t i) {
        if (!assocOk()) return;
        if (i == free.size()) {
          FiniteCategory C(n, src, tgt, id, comp);
          std::vector<std::size_t> best;
          std::vector<std::size_t> objPerm(n);
          std::iota(objPerm.begin(), objPerm.end(), 0);
          do {
            // canonical arrow order under the object relabelling, then all
            // permutations of non-identity arrows inside each hom set
            std::vector<std::vector<std::size_t>> groups;
            std::vector<std::size_t> arrowPerm(A);
            std::size_t next = 0;
            std::vector<std::size_t> inv(n);
            for (std::size_t a = 0; a < n; ++a) inv[objPerm[a]] = a;
            for (std::size_t na = 0; na < n; ++na)
              for (std::size_t nb = 0; nb < n; ++nb) {
                const auto& hs = homs[inv[na] * n + inv[nb]];
                std::vector<std::size_t> g;
                for (auto f : hs) {
                  if (f == id[src[f]] && src[f] == tgt[f]) arrowPerm[f] = next++;
                  else g.push_back(f);
                }
                std::size_t base = next;
                next += g.size();
                groups.push_back(g);
                for (std::size_t k = 0; k < g.size(); ++k) arrowPerm[g[k]] = base + k;
              }
            std::function<void(std::size_t)> perms = [&](std::size_t gi) {
              if (gi == groups.size()) {
                auto code = detail::categoryCode(C, objPerm, arrowPerm);
                if (best.empty() || code < best) best = code;
                return;
              }
              auto g = groups[gi];
              if (g.empty()) {
                perms(gi + 1);
                return;
              }
              std::vector<std::size_t> slots;
              for (auto f : g) slots.push_back(arrowPerm[f]);
              std::sort(slots.begin(), slots.end());
              std::sort(g.begin(), g.end());
              do {
                for (std::size_t k = 0; k < g.size(); ++k) arrowPerm[g[k]] = slots[k];
                perms(gi + 1);
              } while (std::next_permutation(g.begin(), g.end()));
            };
            perms(0);
          } while (std::next_permutation(objPerm.begin(), objPerm.end()));
          if (seen.insert(best).second) out.push_back(C);
          return;
        }
        auto [g, f] = free[i];
        for (auto c : homs[src[f] * n + tgt[g]]) {
          comp[g * A + f] = c;
          fill(i + 1);
        }
        comp[g * A + f] = npos;
      };
      fill(0);
    };
    sizes(0);
  }
  for (auto& C : out) C.validate();
  return out;
}

}  // namespace ultrakit
