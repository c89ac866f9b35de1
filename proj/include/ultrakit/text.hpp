#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "ultrafilter.hpp"

namespace ultrakit {

// Line and column (1-based) of a byte offset.
inline std::pair<std::size_t, std::size_t> lineColumn(std::string_view text, std::size_t offset) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

// Recursive-descent reader for the textual forms
//   upset: prefix:<bits>;period:<bits>
//   uf:    principal(<carrier>,<p>) | factorial | push(<uf>,<map>)
//          | sum(<uf>,[<uf>,...]) | sum(<uf>,[<upset>=><uf>,...]) | sum(<uf>,section(<map>))
//   map:   affine(a,b) | quot(a) | lift(<map>,m) | comp(<g>,<f>) | table(n,<carrier>,[i,...])
//          | step(<carrier>,<carrier>,[<upset>=>v,...]) | part(<carrier>,[<upset>,...])
//          | const(<carrier>,<carrier>,c)
class TextReader {
 public:
  explicit TextReader(std::string_view text) : text_(text) {}

  UPSet upset() {
    expect("prefix:");
    Bits pre = bits();
    expect(";period:");
    Bits per = bits();
    if (per.empty()) error("empty period");
    return UPSet(pre, per);
  }

  IndexSet carrier() {
    skip();
    if (accept("nat")) return IndexSet::natural();
    expect("fin(");
    std::size_t n = number();
    expect(")");
    return IndexSet::fin(n);
  }

  Ultrafilter ultrafilter() {
    skip();
    std::size_t at = pos_;
    try {
      if (accept("factorial")) return Ultrafilter::factorial();
      if (accept("principal(")) {
        IndexSet c = carrier();
        expect(",");
        std::size_t p = number();
        expect(")");
        return Ultrafilter::principal(c, p);
      }
      if (accept("push(")) {
        Ultrafilter mu = ultrafilter();
        expect(",");
        UPMap f = map();
        expect(")");
        return rawPushforward(mu, f);
      }
      if (accept("sum(")) {
        Ultrafilter mu = ultrafilter();
        expect(",");
        skip();
        if (accept("section(")) {
          UPMap g = map();
          expect(")");
          expect(")");
          return ufSumSection(mu, g);
        }
        expect("[");
        std::vector<std::pair<UPSet, Ultrafilter>> pieces;
        std::size_t i = 0;
        skip();
        if (!accept("]")) {
          do {
            skip();
            if (mu.carrier().nat) {
              UPSet s = upset();
              expect("=>");
              pieces.emplace_back(s, ultrafilter());
            } else {
              pieces.emplace_back(UPSet::singleton(i++), ultrafilter());
            }
            skip();
          } while (accept(","));
          expect("]");
        }
        expect(")");
        return ufSum(mu, UFFamily(mu.carrier(), std::move(pieces)));
      }
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::ParseError) throw;
      pos_ = at;
      error(e.what());
    }
    error("expected an ultrafilter");
  }

  UPMap map() {
    skip();
    std::size_t at = pos_;
    try {
      if (accept("affine(")) {
        std::size_t a = number();
        expect(",");
        std::size_t b = number();
        expect(")");
        return UPMap::affine(a, b);
      }
      if (accept("quot(")) {
        std::size_t a = number();
        expect(")");
        return UPMap::quotient(a);
      }
      if (accept("lift(")) {
        UPMap f = map();
        expect(",");
        std::size_t m = number();
        if (accept(")")) return UPMap::sumLift(f, m);
        expect(",");
        std::size_t n = number();
        expect(",[");
        std::vector<std::size_t> g;
        if (!accept("]")) {
          do g.push_back(number());
          while (accept(","));
          expect("]");
        }
        expect(")");
        return UPMap::blockLift(f, m, n, std::move(g));
      }
      if (accept("comp(")) {
        UPMap g = map();
        expect(",");
        UPMap f = map();
        expect(")");
        return UPMap::compose(g, f);
      }
      if (accept("table(")) {
        std::size_t n = number();
        expect(",");
        IndexSet c = carrier();
        expect(",");
        std::vector<std::size_t> img = numberList();
        expect(")");
        return UPMap::table(n, c, img);
      }
      if (accept("const(")) {
        IndexSet d = carrier();
        expect(",");
        IndexSet c = carrier();
        expect(",");
        std::size_t v = number();
        expect(")");
        return UPMap::constant(d, c, v);
      }
      if (accept("part(")) {
        IndexSet d = carrier();
        expect(",");
        expect("[");
        std::vector<UPSet> parts;
        skip();
        if (!accept("]")) {
          do parts.push_back(upset());
          while (accept(","));
          expect("]");
        }
        expect(")");
        return UPMap::partition(d, parts);
      }
      if (accept("step(")) {
        IndexSet d = carrier();
        expect(",");
        IndexSet c = carrier();
        expect(",");
        expect("[");
        std::vector<UPSet> parts;
        std::vector<std::size_t> vals;
        skip();
        if (!accept("]")) {
          do {
            parts.push_back(upset());
            expect("=>");
            vals.push_back(number());
          } while (accept(","));
          expect("]");
        }
        expect(")");
        return UPMap::step(d, c, parts, vals);
      }
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::ParseError) throw;
      pos_ = at;
      error(e.what());
    }
    error("expected a map");
  }

  void finish() {
    skip();
    if (pos_ != text_.size()) error("trailing input");
  }

  [[noreturn]] void error(const std::string& msg) const {
    auto [line, col] = lineColumn(text_, pos_);
    fail(ErrorKind::ParseError, "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + msg);
  }

 private:
  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool accept(std::string_view tok) {
    skip();
    if (text_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }
  void expect(std::string_view tok) {
    if (!accept(tok)) error("expected '" + std::string(tok) + "'");
  }
  Bits bits() {
    Bits b;
    while (pos_ < text_.size() && (text_[pos_] == '0' || text_[pos_] == '1')) b.push_back(text_[pos_++] == '1');
    return b;
  }
  std::size_t number() {
    skip();
    if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_]))) error("expected a number");
    std::size_t v = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      v = v * 10 + static_cast<std::size_t>(text_[pos_++] - '0');
      if (v > (std::size_t{1} << 40)) error("number too large");
    }
    return v;
  }
  std::vector<std::size_t> numberList() {
    expect("[");
    std::vector<std::size_t> out;
    skip();
    if (accept("]")) return out;
    do out.push_back(number());
    while (accept(","));
    expect("]");
    return out;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

inline UPSet parseUPSet(std::string_view s) {
  TextReader r(s);
  UPSet u = r.upset();
  r.finish();
  return u;
}
inline Ultrafilter parseUltrafilter(std::string_view s) {
  TextReader r(s);
  Ultrafilter u = r.ultrafilter();
  r.finish();
  return u;
}
inline UPMap parseMap(std::string_view s) {
  TextReader r(s);
  UPMap m = r.map();
  r.finish();
  return m;
}

}  // namespace ultrakit
