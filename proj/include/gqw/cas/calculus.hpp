#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "gqw/cas/expr.hpp"

namespace gqw {

/// Exact partial derivative of `e` with respect to the symbol `v`.
inline Expr differentiate(const Expr& e, const std::string& v) {
  switch (e.kind()) {
    case Kind::Number:
    case Kind::Constant:
      return Expr(0);
    case Kind::Symbol:
      return Expr(e.name() == v ? 1 : 0);
    case Kind::Add: {
      std::vector<Expr> terms;
      for (const auto& t : e.args()) terms.push_back(differentiate(t, v));
      return add(std::move(terms));
    }
    case Kind::Mul: {
      auto f = e.args();
      std::vector<Expr> terms;
      for (std::size_t i = 0; i < f.size(); ++i) {
        Expr di = differentiate(f[i], v);
        if (di.is_zero()) continue;
        std::vector<Expr> prod(f.begin(), f.end());
        prod[i] = di;
        terms.push_back(mul(std::move(prod)));
      }
      return add(std::move(terms));
    }
    case Kind::Pow: {
      Expr db = differentiate(e.base(), v);
      if (db.is_zero()) return Expr(0);
      const Rational& n = e.exponent();
      return mul({Expr(n), pow(e.base(), n - Rational(1)), db});
    }
    case Kind::Func: {
      Expr da = differentiate(e.arg(), v);
      if (da.is_zero()) return Expr(0);
      switch (e.func()) {
        case Func::Sin: return mul({cos(e.arg()), da});
        case Func::Cos: return mul({Expr(-1), sin(e.arg()), da});
        case Func::Exp: return mul({e, da});
      }
    }
  }
  return Expr(0);
}

inline Expr differentiate(const Expr& e, const Expr& v) { return differentiate(e, v.name()); }

/// Simultaneous substitution of symbols by expressions.
inline Expr substitute(const Expr& e, const std::map<std::string, Expr>& repl) {
  switch (e.kind()) {
    case Kind::Number:
    case Kind::Constant:
      return e;
    case Kind::Symbol: {
      auto it = repl.find(e.name());
      return it == repl.end() ? e : it->second;
    }
    case Kind::Func:
      return apply(e.func(), substitute(e.arg(), repl));
    case Kind::Pow:
      return pow(substitute(e.base(), repl), e.exponent());
    case Kind::Add:
    case Kind::Mul: {
      std::vector<Expr> a;
      for (const auto& x : e.args()) a.push_back(substitute(x, repl));
      return e.is(Kind::Add) ? add(std::move(a)) : mul(std::move(a));
    }
  }
  return e;
}

inline void collect_symbols(const Expr& e, std::set<std::string>& out) {
  if (e.is(Kind::Symbol)) {
    out.insert(e.name());
    return;
  }
  for (const auto& a : e.args()) collect_symbols(a, out);
}

inline std::set<std::string> free_symbols(const Expr& e) {
  std::set<std::string> s;
  collect_symbols(e, s);
  return s;
}

inline bool depends_on(const Expr& e, const std::string& v) {
  if (e.is(Kind::Symbol)) return e.name() == v;
  for (const auto& a : e.args())
    if (depends_on(a, v)) return true;
  return false;
}

inline bool contains_constant(const Expr& e, Constant c) {
  if (e.is(Kind::Constant)) return e.constant() == c;
  for (const auto& a : e.args())
    if (contains_constant(a, c)) return true;
  return false;
}

}  // namespace gqw
