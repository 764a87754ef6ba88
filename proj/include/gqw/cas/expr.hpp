#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gqw/cas/rational.hpp"

namespace gqw {

enum class Kind : std::uint8_t { Number, Constant, Symbol, Func, Pow, Mul, Add };
enum class Constant : std::uint8_t { Pi, I, Hbar };
enum class Func : std::uint8_t { Sin, Cos, Exp };

namespace detail {
struct Node;
}

/// Immutable symbolic expression in canonical form.
///
/// Every Expr is produced by the canonicalizing constructors below (number,
/// symbol, add, mul, pow, apply), so two mathematically equal polynomial
/// expressions in the same atoms are structurally identical. Sums and
/// products are flattened and sorted; products distribute over sums;
/// quotients are powers with negative exponent.
class Expr {
 public:
  Expr();
  Expr(Rational r);            // NOLINT(implicit)
  Expr(std::int64_t n);        // NOLINT(implicit)
  Expr(int n) : Expr(static_cast<std::int64_t>(n)) {}  // NOLINT(implicit)

  [[nodiscard]] Kind kind() const noexcept;
  [[nodiscard]] const Rational& value() const noexcept;     // Number
  [[nodiscard]] const Rational& exponent() const noexcept;  // Pow
  [[nodiscard]] Constant constant() const noexcept;
  [[nodiscard]] Func func() const noexcept;
  [[nodiscard]] const std::string& name() const noexcept;   // Symbol
  [[nodiscard]] std::span<const Expr> args() const noexcept;
  [[nodiscard]] const Expr& base() const noexcept { return args()[0]; }  // Pow
  [[nodiscard]] const Expr& arg() const noexcept { return args()[0]; }   // Func
  [[nodiscard]] std::size_t hash() const noexcept;

  [[nodiscard]] bool is(Kind k) const noexcept { return kind() == k; }
  [[nodiscard]] bool is_number() const noexcept { return kind() == Kind::Number; }
  [[nodiscard]] bool is_zero() const noexcept { return is_number() && value().is_zero(); }
  [[nodiscard]] bool is_one() const noexcept { return is_number() && value().is_one(); }

  explicit Expr(std::shared_ptr<const detail::Node> n) : node_(std::move(n)) {}

 private:
  std::shared_ptr<const detail::Node> node_;
};

namespace detail {

struct Node {
  Kind kind = Kind::Number;
  Rational rational;      // Number value or Pow exponent
  std::uint8_t tag = 0;   // Constant / Func id
  std::string name;       // Symbol
  std::vector<Expr> args;
  std::size_t hash = 0;
};

inline std::size_t mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

inline std::size_t rational_hash(const Rational& r) {
  return mix(std::hash<std::int64_t>{}(r.num()), std::hash<std::int64_t>{}(r.den()));
}

inline Expr make_node(Kind kind, std::vector<Expr> args, Rational rational = {},
                      std::uint8_t tag = 0, std::string name = {}) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->rational = rational;
  n->tag = tag;
  n->name = std::move(name);
  n->args = std::move(args);
  std::size_t h = mix(static_cast<std::size_t>(kind) * 1315423911u, rational_hash(rational));
  h = mix(h, tag);
  h = mix(h, std::hash<std::string>{}(n->name));
  for (const auto& a : n->args) h = mix(h, a.hash());
  n->hash = h;
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

inline const Expr& zero_expr() {
  static const Expr z = make_node(Kind::Number, {}, Rational(0));
  return z;
}

}  // namespace detail

inline Expr::Expr() : Expr(detail::zero_expr()) {}
inline Expr::Expr(Rational r) : Expr(detail::make_node(Kind::Number, {}, r)) {}
inline Expr::Expr(std::int64_t n) : Expr(Rational(n)) {}
inline Kind Expr::kind() const noexcept { return node_->kind; }
inline const Rational& Expr::value() const noexcept { return node_->rational; }
inline const Rational& Expr::exponent() const noexcept { return node_->rational; }
inline Constant Expr::constant() const noexcept { return static_cast<Constant>(node_->tag); }
inline Func Expr::func() const noexcept { return static_cast<Func>(node_->tag); }
inline const std::string& Expr::name() const noexcept { return node_->name; }
inline std::span<const Expr> Expr::args() const noexcept { return node_->args; }
inline std::size_t Expr::hash() const noexcept { return node_->hash; }

// ---------------------------------------------------------------------------
// Canonical term order.

namespace detail {

inline int kind_rank(Kind k) {
  switch (k) {
    case Kind::Number: return 0;
    case Kind::Constant: return 1;
    case Kind::Symbol: return 2;
    case Kind::Func: return 3;
    case Kind::Mul: return 5;
    case Kind::Add: return 6;
    case Kind::Pow: return 4;
  }
  return 7;
}

}  // namespace detail

/// Total order on canonical expressions. A power compares by (base, exponent)
/// so that p < p^2 < q.
inline int compare(const Expr& a, const Expr& b) {
  if (&a == &b) return 0;
  const bool ap = a.is(Kind::Pow);
  const bool bp = b.is(Kind::Pow);
  if (ap || bp) {
    const Expr& ab = ap ? a.base() : a;
    const Expr& bb = bp ? b.base() : b;
    if (int c = compare(ab, bb); c != 0) return c;
    Rational ae = ap ? a.exponent() : Rational(1);
    Rational be = bp ? b.exponent() : Rational(1);
    if (ae == be) return 0;
    return ae < be ? -1 : 1;
  }
  int ra = detail::kind_rank(a.kind());
  int rb = detail::kind_rank(b.kind());
  if (ra != rb) return ra < rb ? -1 : 1;
  switch (a.kind()) {
    case Kind::Number:
      if (a.value() == b.value()) return 0;
      return a.value() < b.value() ? -1 : 1;
    case Kind::Constant:
      if (a.constant() == b.constant()) return 0;
      return a.constant() < b.constant() ? -1 : 1;
    case Kind::Symbol: {
      int c = a.name().compare(b.name());
      return c < 0 ? -1 : (c > 0 ? 1 : 0);
    }
    case Kind::Func:
      if (a.func() != b.func()) return a.func() < b.func() ? -1 : 1;
      return compare(a.arg(), b.arg());
    case Kind::Mul:
    case Kind::Add: {
      auto xa = a.args();
      auto xb = b.args();
      // Compare from the most significant (last) factor down.
      std::size_t i = xa.size();
      std::size_t j = xb.size();
      while (i > 0 && j > 0) {
        if (int c = compare(xa[--i], xb[--j]); c != 0) return c;
      }
      if (i == j) return 0;
      return i < j ? -1 : 1;
    }
    case Kind::Pow:
      break;
  }
  return 0;
}

inline bool operator==(const Expr& a, const Expr& b) {
  return a.hash() == b.hash() && compare(a, b) == 0;
}

struct ExprLess {
  bool operator()(const Expr& a, const Expr& b) const { return compare(a, b) < 0; }
};

struct ExprHash {
  std::size_t operator()(const Expr& e) const noexcept { return e.hash(); }
};

// ---------------------------------------------------------------------------
// Leaf constructors.

inline Expr number(Rational r) { return Expr(r); }
inline Expr symbol(std::string name) {
  return detail::make_node(Kind::Symbol, {}, {}, 0, std::move(name));
}
inline Expr constant(Constant c) {
  return detail::make_node(Kind::Constant, {}, {}, static_cast<std::uint8_t>(c));
}
inline Expr pi() { return constant(Constant::Pi); }
inline Expr imag_unit() { return constant(Constant::I); }
inline Expr hbar() { return constant(Constant::Hbar); }

inline Expr add(std::vector<Expr> terms);
inline Expr mul(std::vector<Expr> factors);
inline Expr pow(const Expr& base, const Rational& e);
inline Expr apply(Func f, const Expr& a);

// ---------------------------------------------------------------------------
// Canonicalizing constructors.

namespace detail {

/// Splits a term into (numeric coefficient, remaining monomial).
inline std::pair<Rational, Expr> split_coeff(const Expr& t) {
  if (t.is_number()) return {t.value(), Expr(1)};
  if (t.is(Kind::Mul) && t.args()[0].is_number()) {
    auto a = t.args();
    if (a.size() == 2) return {a[0].value(), a[1]};
    return {a[0].value(), make_node(Kind::Mul, std::vector<Expr>(a.begin() + 1, a.end()))};
  }
  return {Rational(1), t};
}

/// Builds coeff * monomial where monomial is canonical and coefficient-free.
inline Expr make_term(const Rational& c, const Expr& m) {
  if (m.is_one()) return Expr(c);
  if (c.is_one()) return m;
  std::vector<Expr> f{Expr(c)};
  if (m.is(Kind::Mul)) {
    f.insert(f.end(), m.args().begin(), m.args().end());
  } else {
    f.push_back(m);
  }
  return make_node(Kind::Mul, std::move(f));
}

inline std::span<const Expr> terms_of(const Expr& e) {
  if (e.is(Kind::Add)) return e.args();
  return {&e, 1};
}

inline Expr expand_product(const Expr& a, const Expr& b) {
  std::vector<Expr> out;
  for (const auto& x : terms_of(a))
    for (const auto& y : terms_of(b)) out.push_back(mul({x, y}));
  return add(std::move(out));
}

inline bool leading_negative(const Expr& e) {
  switch (e.kind()) {
    case Kind::Number: return e.value().is_negative();
    case Kind::Mul: return e.args()[0].is_number() && e.args()[0].value().is_negative();
    case Kind::Add: return leading_negative(e.args()[0]);
    default: return false;
  }
}

inline std::int64_t gcd64(std::int64_t a, std::int64_t b) {
  a = a < 0 ? -a : a;
  b = b < 0 ? -b : b;
  while (b != 0) {
    auto t = a % b;
    a = b;
    b = t;
  }
  return a;
}

/// Rational content c of a sum S with S = c * S', S' primitive and with a
/// positive leading coefficient.
inline Rational content(const Expr& sum) {
  std::int64_t g = 0;
  std::int64_t l = 1;
  for (const auto& t : sum.args()) {
    auto [c, m] = split_coeff(t);
    g = gcd64(g, c.num());
    std::int64_t d = c.den();
    l = (Rational(l) * Rational(d / gcd64(l, d))).num();
  }
  Rational c(g, l);
  if (leading_negative(sum)) c = -c;
  return c;
}

/// Pythagorean rewrite: c*M*sin(x)^2 + c*M*cos(x)^2 -> c*M. Returns true and
/// fills `out` when a pair was found.
inline bool pythagorean_pass(const std::vector<std::pair<Expr, Rational>>& groups,
                             std::vector<Expr>& out) {
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const auto& [mono, coeff] = groups[i];
    std::span<const Expr> fs = mono.is(Kind::Mul) ? mono.args() : std::span<const Expr>(&mono, 1);
    for (std::size_t k = 0; k < fs.size(); ++k) {
      const Expr& f = fs[k];
      if (!(f.is(Kind::Pow) && f.exponent() == Rational(2) && f.base().is(Kind::Func) &&
            f.base().func() == Func::Sin))
        continue;
      std::vector<Expr> rest;
      for (std::size_t r = 0; r < fs.size(); ++r)
        if (r != k) rest.push_back(fs[r]);
      std::vector<Expr> partner_f = rest;
      partner_f.push_back(pow(apply(Func::Cos, f.base().arg()), Rational(2)));
      Expr partner = mul(std::move(partner_f));
      for (std::size_t j = 0; j < groups.size(); ++j) {
        if (j == i || !(groups[j].first == partner) || !(groups[j].second == coeff)) continue;
        for (std::size_t q = 0; q < groups.size(); ++q) {
          if (q == i || q == j) continue;
          out.push_back(make_term(groups[q].second, groups[q].first));
        }
        rest.insert(rest.begin(), Expr(coeff));
        out.push_back(mul(std::move(rest)));
        return true;
      }
    }
  }
  return false;
}

}  // namespace detail

inline Expr add(std::vector<Expr> terms) {
  Rational constant_part(0);
  std::vector<std::pair<Expr, Rational>> items;
  auto push = [&](const Expr& t) {
    if (t.is_number()) {
      constant_part += t.value();
    } else {
      auto [c, m] = detail::split_coeff(t);
      items.emplace_back(std::move(m), c);
    }
  };
  for (const auto& t : terms) {
    if (t.is(Kind::Add)) {
      for (const auto& s : t.args()) push(s);
    } else {
      push(t);
    }
  }
  std::sort(items.begin(), items.end(),
            [](const auto& x, const auto& y) { return compare(x.first, y.first) < 0; });
  std::vector<std::pair<Expr, Rational>> groups;
  for (auto& it : items) {
    if (!groups.empty() && groups.back().first == it.first) {
      groups.back().second += it.second;
    } else {
      groups.push_back(std::move(it));
    }
  }
  std::erase_if(groups, [](const auto& g) { return g.second.is_zero(); });

  std::vector<Expr> rewritten;
  if (detail::pythagorean_pass(groups, rewritten)) {
    rewritten.push_back(Expr(constant_part));
    return add(std::move(rewritten));
  }

  std::vector<Expr> out;
  if (!constant_part.is_zero()) out.push_back(Expr(constant_part));
  for (const auto& [m, c] : groups) out.push_back(detail::make_term(c, m));
  if (out.empty()) return Expr(0);
  if (out.size() == 1) return out[0];
  std::sort(out.begin(), out.end(), ExprLess{});
  return detail::make_node(Kind::Add, std::move(out));
}

inline Expr mul(std::vector<Expr> factors) {
  Rational coeff(1);
  std::vector<std::pair<Expr, Rational>> powers;
  auto push = [&](const Expr& f) {
    if (f.is_number()) {
      coeff *= f.value();
    } else if (f.is(Kind::Pow)) {
      powers.emplace_back(f.base(), f.exponent());
    } else {
      powers.emplace_back(f, Rational(1));
    }
  };
  for (const auto& f : factors) {
    if (f.is(Kind::Mul)) {
      for (const auto& g : f.args()) push(g);
    } else {
      push(f);
    }
  }
  if (coeff.is_zero()) return Expr(0);
  std::sort(powers.begin(), powers.end(),
            [](const auto& x, const auto& y) { return compare(x.first, y.first) < 0; });
  std::vector<std::pair<Expr, Rational>> merged;
  for (auto& p : powers) {
    if (!merged.empty() && merged.back().first == p.first) {
      merged.back().second += p.second;
    } else {
      merged.push_back(std::move(p));
    }
  }

  std::vector<Expr> out;
  bool renormalize = false;
  bool has_sum = false;
  for (const auto& [b, e] : merged) {
    if (e.is_zero()) continue;
    Expr p = e.is_one() ? b : pow(b, e);
    if (p.is_number()) {
      coeff *= p.value();
      continue;
    }
    if (p.is(Kind::Mul)) renormalize = true;
    if (p.is(Kind::Pow) && !(p.base() == b)) renormalize = true;
    if (p.is(Kind::Add)) has_sum = true;
    out.push_back(std::move(p));
  }
  if (coeff.is_zero()) return Expr(0);
  if (renormalize) {
    out.push_back(Expr(coeff));
    return mul(std::move(out));
  }
  if (has_sum) {
    Expr acc = Expr(coeff);
    std::vector<Expr> plain{acc};
    std::vector<Expr> sums;
    for (auto& f : out) (f.is(Kind::Add) ? sums : plain).push_back(f);
    acc = plain.size() == 1 ? plain[0] : mul(std::move(plain));
    for (const auto& s : sums) acc = detail::expand_product(acc, s);
    return acc;
  }
  if (out.empty()) return Expr(coeff);
  std::sort(out.begin(), out.end(), ExprLess{});
  if (out.size() == 1) {
    if (coeff.is_one()) return out[0];
    return detail::make_node(Kind::Mul, {Expr(coeff), out[0]});
  }
  if (!coeff.is_one()) out.insert(out.begin(), Expr(coeff));
  return detail::make_node(Kind::Mul, std::move(out));
}

inline Expr pow(const Expr& base, const Rational& e) {
  if (e.is_zero()) return Expr(1);
  if (e.is_one()) return base;
  const bool integral = e.is_integer();
  switch (base.kind()) {
    case Kind::Number: {
      const Rational& v = base.value();
      if (integral) return Expr(v.pow(e.num()));
      if (v.is_zero()) {
        if (e.is_negative()) throw EvalError("zero raised to a negative power");
        return Expr(0);
      }
      if (v.is_one()) return Expr(1);
      if (!v.is_negative()) {
        if (auto root = v.exact_root(e.den())) return Expr(root->pow(e.num()));
      }
      return detail::make_node(Kind::Pow, {base}, e);
    }
    case Kind::Constant:
      if (base.constant() == Constant::I && integral) {
        std::int64_t k = ((e.num() % 4) + 4) % 4;
        switch (k) {
          case 0: return Expr(1);
          case 1: return base;
          case 2: return Expr(-1);
          default: return detail::make_node(Kind::Mul, {Expr(-1), base});
        }
      }
      break;
    case Kind::Pow:
      if (integral) return pow(base.base(), base.exponent() * e);
      break;
    case Kind::Mul:
      if (integral) {
        std::vector<Expr> f;
        for (const auto& a : base.args()) f.push_back(pow(a, e));
        return mul(std::move(f));
      }
      break;
    case Kind::Add:
      if (integral) {
        Rational c = detail::content(base);
        if (!c.is_one()) {
          Expr primitive = mul({Expr(Rational(1) / c), base});
          return mul({Expr(c.pow(e.num())), pow(primitive, e)});
        }
        if (!e.is_negative() && e.num() <= 16) {
          Expr acc = base;
          for (std::int64_t k = 1; k < e.num(); ++k) acc = detail::expand_product(acc, base);
          return acc;
        }
      }
      break;
    default:
      break;
  }
  return detail::make_node(Kind::Pow, {base}, e);
}

inline Expr apply(Func f, const Expr& a) {
  const bool neg = detail::leading_negative(a);
  switch (f) {
    case Func::Sin:
      if (a.is_zero()) return Expr(0);
      if (neg) return mul({Expr(-1), apply(Func::Sin, mul({Expr(-1), a}))});
      break;
    case Func::Cos:
      if (a.is_zero()) return Expr(1);
      if (neg) return apply(Func::Cos, mul({Expr(-1), a}));
      break;
    case Func::Exp:
      if (a.is_zero()) return Expr(1);
      break;
  }
  return detail::make_node(Kind::Func, {a}, {}, static_cast<std::uint8_t>(f));
}

inline Expr sin(const Expr& a) { return apply(Func::Sin, a); }
inline Expr cos(const Expr& a) { return apply(Func::Cos, a); }
inline Expr exp(const Expr& a) { return apply(Func::Exp, a); }
inline Expr sqrt(const Expr& a) { return pow(a, Rational(1, 2)); }

inline Expr operator+(const Expr& a, const Expr& b) { return add({a, b}); }
inline Expr operator-(const Expr& a) { return mul({Expr(-1), a}); }
inline Expr operator-(const Expr& a, const Expr& b) { return add({a, mul({Expr(-1), b})}); }
inline Expr operator*(const Expr& a, const Expr& b) { return mul({a, b}); }
inline Expr operator/(const Expr& a, const Expr& b) { return mul({a, pow(b, Rational(-1))}); }
inline Expr& operator+=(Expr& a, const Expr& b) { return a = a + b; }
inline Expr& operator-=(Expr& a, const Expr& b) { return a = a - b; }
inline Expr& operator*=(Expr& a, const Expr& b) { return a = a * b; }

/// Rebuilds `e` bottom-up through the canonical constructors. Idempotent.
inline Expr simplify(const Expr& e) {
  switch (e.kind()) {
    case Kind::Number:
    case Kind::Constant:
    case Kind::Symbol:
      return e;
    case Kind::Func:
      return apply(e.func(), simplify(e.arg()));
    case Kind::Pow:
      return pow(simplify(e.base()), e.exponent());
    case Kind::Mul:
    case Kind::Add: {
      std::vector<Expr> a;
      for (const auto& x : e.args()) a.push_back(simplify(x));
      return e.is(Kind::Mul) ? mul(std::move(a)) : add(std::move(a));
    }
  }
  return e;
}

// ---------------------------------------------------------------------------
// Printing in the input grammar.

namespace detail {

inline const char* func_name(Func f) {
  switch (f) {
    case Func::Sin: return "sin";
    case Func::Cos: return "cos";
    case Func::Exp: return "exp";
  }
  return "?";
}

inline const char* constant_name(Constant c) {
  switch (c) {
    case Constant::Pi: return "pi";
    case Constant::I: return "i";
    case Constant::Hbar: return "hbar";
  }
  return "?";
}

// Precedence levels: 1 sum, 2 product, 4 power operand, 5 atom.
inline int print_level(const Expr& e) {
  switch (e.kind()) {
    case Kind::Add: return 1;
    case Kind::Mul: return 2;
    case Kind::Number:
      if (e.value().is_negative()) return 2;
      return e.value().is_integer() ? 5 : 2;
    case Kind::Pow:
      if (e.exponent() == Rational(1, 2)) return 5;
      return 4;
    default: return 5;
  }
}

inline std::string print(const Expr& e);

inline std::string print_at(const Expr& e, int level) {
  std::string s = print(e);
  return print_level(e) < level ? "(" + s + ")" : s;
}

inline std::string print(const Expr& e) {
  switch (e.kind()) {
    case Kind::Number:
      return e.value().str();
    case Kind::Constant:
      return constant_name(e.constant());
    case Kind::Symbol:
      return e.name();
    case Kind::Func:
      return std::string(func_name(e.func())) + "(" + print(e.arg()) + ")";
    case Kind::Pow: {
      if (e.exponent() == Rational(1, 2)) return "sqrt(" + print(e.base()) + ")";
      std::string b = print_at(e.base(), 5);
      if (e.exponent().is_integer() && !e.exponent().is_negative())
        return b + "^" + e.exponent().str();
      return b + "^(" + e.exponent().str() + ")";
    }
    case Kind::Mul: {
      auto a = e.args();
      std::string s;
      std::size_t start = 0;
      if (a[0].is_number()) {
        const Rational& c = a[0].value();
        if (c == Rational(-1)) {
          s = "-";
        } else {
          s = c.str() + "*";
        }
        start = 1;
      }
      for (std::size_t i = start; i < a.size(); ++i) {
        if (i > start) s += "*";
        s += print_at(a[i], 3);
      }
      return s;
    }
    case Kind::Add: {
      std::string s;
      bool first = true;
      for (const auto& t : e.args()) {
        if (first) {
          s = print(t);
          first = false;
        } else if (leading_negative(t)) {
          s += " - " + print(mul({Expr(-1), t}));
        } else {
          s += " + " + print(t);
        }
      }
      return s;
    }
  }
  return "?";
}

}  // namespace detail

inline std::string to_string(const Expr& e) { return detail::print(e); }

}  // namespace gqw
