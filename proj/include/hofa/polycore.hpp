// Exact multivariate polynomials in the binomial basis C(x, m) = prod_k C(x_k, m_k).
#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <deque>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace hofa {

using Int = mpz_class;
using Rat = mpq_class;
using MultiIndex = std::vector<unsigned>;

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct CostError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline unsigned total_degree(const MultiIndex& m) {
  return std::accumulate(m.begin(), m.end(), 0u);
}

// Graded order: lower total degree first, then larger leading exponent first,
// so x precedes y and C(x,2) precedes x*y precedes C(y,2).
struct GradedLex {
  bool operator()(const MultiIndex& a, const MultiIndex& b) const {
    unsigned da = total_degree(a), db = total_degree(b);
    if (da != db) return da < db;
    return a > b;
  }
};

using Terms = std::map<MultiIndex, Rat, GradedLex>;

inline std::string rat_string(const Rat& r) {
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

inline Rat parse_rat(const std::string& s) {
  Rat r;
  if (r.set_str(s, 10) != 0) throw ValidationError("bad rational literal: " + s);
  r.canonicalize();
  return r;
}

inline Int binom_int(unsigned n, unsigned k) {
  Int r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return r;
}

inline Int binom_at(const Int& n, unsigned k) {
  Int r;
  mpz_bin_ui(r.get_mpz_t(), n.get_mpz_t(), k);
  return r;
}

inline Int factorial(unsigned n) {
  Int r;
  mpz_fac_ui(r.get_mpz_t(), n);
  return r;
}

// C(x,a)*C(x,b) = sum_k C(a+b-k, b) C(b, k) C(x, a+b-k), k = 0..min(a,b)
inline const std::vector<std::pair<unsigned, Int>>& binomial_product_table(unsigned a, unsigned b) {
  thread_local std::map<std::pair<unsigned, unsigned>, std::vector<std::pair<unsigned, Int>>> cache;
  auto key = std::make_pair(a, b);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::vector<std::pair<unsigned, Int>> out;
  for (unsigned k = 0; k <= std::min(a, b); ++k)
    out.emplace_back(a + b - k, binom_int(a + b - k, b) * binom_int(b, k));
  return cache.emplace(key, std::move(out)).first->second;
}

class IntPoly {
 public:
  IntPoly() = default;
  explicit IntPoly(std::size_t nvars) : nvars_(nvars) {}

  static IntPoly constant(std::size_t nvars, const Rat& c) {
    IntPoly p(nvars);
    p.add_term(MultiIndex(nvars, 0), c);
    return p;
  }
  static IntPoly variable(std::size_t nvars, std::size_t k) {
    if (k >= nvars) throw ValidationError("variable index out of range");
    MultiIndex m(nvars, 0);
    m[k] = 1;
    IntPoly p(nvars);
    p.add_term(m, 1);
    return p;
  }
  static IntPoly atom(const MultiIndex& m, const Rat& c = 1) {
    IntPoly p(m.size());
    p.add_term(m, c);
    return p;
  }

  std::size_t nvars() const { return nvars_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  Rat coeff(const MultiIndex& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Rat(0) : it->second;
  }

  void add_term(const MultiIndex& m, const Rat& c) {
    if (m.size() != nvars_) throw ValidationError("multi-index arity mismatch");
    if (c == 0) return;
    auto [it, fresh] = terms_.emplace(m, c);
    if (!fresh) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  int degree() const {
    int d = -1;
    for (const auto& [m, c] : terms_) d = std::max<int>(d, static_cast<int>(total_degree(m)));
    return d;
  }
  int degree_in(std::size_t var) const {
    int d = -1;
    for (const auto& [m, c] : terms_) d = std::max<int>(d, static_cast<int>(m[var]));
    return d;
  }

  // integer-valued iff every binomial-basis coefficient is an integer
  bool is_integral() const {
    for (const auto& [m, c] : terms_)
      if (c.get_den() != 1) return false;
    return true;
  }

  Rat constant_term() const { return coeff(MultiIndex(nvars_, 0)); }

  IntPoly degree_part(unsigned j) const {
    IntPoly r(nvars_);
    for (const auto& [m, c] : terms_)
      if (total_degree(m) == j) r.terms_.emplace(m, c);
    return r;
  }

  IntPoly& operator+=(const IntPoly& o) {
    check_arity(o);
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  IntPoly& operator-=(const IntPoly& o) {
    check_arity(o);
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }
  IntPoly& operator*=(const Rat& s) {
    if (s == 0) {
      terms_.clear();
      return *this;
    }
    for (auto& [m, c] : terms_) c *= s;
    return *this;
  }
  friend IntPoly operator+(IntPoly a, const IntPoly& b) { return a += b; }
  friend IntPoly operator-(IntPoly a, const IntPoly& b) { return a -= b; }
  friend IntPoly operator*(IntPoly a, const Rat& s) { return a *= s; }
  friend IntPoly operator*(const Rat& s, IntPoly a) { return a *= s; }
  IntPoly operator-() const { return *this * Rat(-1); }

  friend IntPoly operator*(const IntPoly& a, const IntPoly& b) {
    a.check_arity(b);
    IntPoly r(a.nvars_);
    std::vector<const std::vector<std::pair<unsigned, Int>>*> tabs(a.nvars_);
    MultiIndex cur(a.nvars_);
    for (const auto& [ma, ca] : a.terms_) {
      for (const auto& [mb, cb] : b.terms_) {
        for (std::size_t k = 0; k < a.nvars_; ++k) tabs[k] = &binomial_product_table(ma[k], mb[k]);
        Rat base = ca * cb;
        expand_product(r, tabs, 0, cur, Int(1), base);
      }
    }
    return r;
  }

  bool operator==(const IntPoly& o) const { return nvars_ == o.nvars_ && terms_ == o.terms_; }

  Rat eval(const std::vector<Int>& pt) const {
    if (pt.size() != nvars_) throw ValidationError("evaluation point arity mismatch");
    Rat s = 0;
    for (const auto& [m, c] : terms_) {
      Int prod = 1;
      for (std::size_t k = 0; k < nvars_; ++k)
        if (m[k]) prod *= binom_at(pt[k], m[k]);
      s += c * prod;
    }
    return s;
  }

 private:
  void check_arity(const IntPoly& o) const {
    if (o.nvars_ != nvars_) throw ValidationError("polynomial arity mismatch");
  }
  static void expand_product(IntPoly& r, const std::vector<const std::vector<std::pair<unsigned, Int>>*>& tabs,
                             std::size_t k, MultiIndex& cur, const Int& acc, const Rat& base) {
    if (k == tabs.size()) {
      r.add_term(cur, base * acc);
      return;
    }
    for (const auto& [e, c] : *tabs[k]) {
      cur[k] = e;
      expand_product(r, tabs, k + 1, cur, acc * c, base);
    }
  }

  std::size_t nvars_ = 0;
  Terms terms_;
};

// C(P, l) via C(P,l) = C(P,l-1) * (P - (l-1)) / l
inline IntPoly binomial_of(const IntPoly& P, unsigned l) {
  IntPoly r = IntPoly::constant(P.nvars(), 1);
  for (unsigned k = 1; k <= l; ++k) {
    r = r * (P - IntPoly::constant(P.nvars(), k - 1));
    r *= Rat(1, k);
  }
  return r;
}

// all of C(P,1..lmax) in one pass
inline std::vector<IntPoly> binomial_powers(const IntPoly& P, unsigned lmax) {
  std::vector<IntPoly> out;
  IntPoly r = IntPoly::constant(P.nvars(), 1);
  for (unsigned k = 1; k <= lmax; ++k) {
    r = r * (P - IntPoly::constant(P.nvars(), k - 1));
    r *= Rat(1, k);
    out.push_back(r);
  }
  return out;
}

inline IntPoly power_of(const IntPoly& P, unsigned n) {
  IntPoly r = IntPoly::constant(P.nvars(), 1);
  for (unsigned k = 0; k < n; ++k) r = r * P;
  return r;
}

// Q o P for univariate Q = sum_k q_k C(y,k)
inline IntPoly compose(const IntPoly& Q, const IntPoly& P) {
  if (Q.nvars() != 1) throw ValidationError("compose: outer polynomial must be univariate");
  IntPoly r(P.nvars());
  int d = Q.degree();
  if (d < 0) return r;
  r += IntPoly::constant(P.nvars(), Q.coeff({0}));
  auto pw = binomial_powers(P, static_cast<unsigned>(d));
  for (int k = 1; k <= d; ++k) {
    Rat q = Q.coeff({static_cast<unsigned>(k)});
    if (q != 0) r += pw[k - 1] * q;
  }
  return r;
}

// ---- monomial <-> binomial basis ----

// x^n = sum_k S(n,k) k! C(x,k)
inline const std::vector<Int>& mono_to_binom_row(unsigned n) {
  thread_local std::deque<std::vector<Int>> rows;  // deque keeps earlier rows stable
  while (rows.size() <= n) {
    unsigned m = static_cast<unsigned>(rows.size());
    std::vector<Int> row(m + 1, 0);
    // Stirling numbers of the second kind via recurrence on a scratch table
    std::vector<std::vector<Int>> S(m + 1, std::vector<Int>(m + 1, 0));
    S[0][0] = 1;
    for (unsigned a = 1; a <= m; ++a)
      for (unsigned b = 1; b <= a; ++b) S[a][b] = S[a - 1][b - 1] + Int(b) * S[a - 1][b];
    for (unsigned k = 0; k <= m; ++k) row[k] = S[m][k] * factorial(k);
    rows.push_back(std::move(row));
  }
  return rows[n];
}

// C(x,k) = (1/k!) sum_n s(k,n) x^n with signed Stirling numbers of the first kind
inline const std::vector<Rat>& binom_to_mono_row(unsigned k) {
  thread_local std::deque<std::vector<Rat>> rows;
  while (rows.size() <= k) {
    unsigned m = static_cast<unsigned>(rows.size());
    std::vector<Int> falling(1, 1);  // coefficients of x(x-1)...(x-m+1)
    for (unsigned a = 0; a < m; ++a) {
      std::vector<Int> nxt(falling.size() + 1, 0);
      for (std::size_t n = 0; n < falling.size(); ++n) {
        nxt[n + 1] += falling[n];
        nxt[n] -= Int(a) * falling[n];
      }
      falling = std::move(nxt);
    }
    Int f = factorial(m);
    std::vector<Rat> row;
    for (auto& c : falling) {
      Rat q(c, f);
      q.canonicalize();
      row.push_back(q);
    }
    rows.push_back(std::move(row));
  }
  return rows[k];
}

namespace detail {
template <class Coef, class RowFn>
void change_basis(Terms& out, const MultiIndex& m, const Rat& c, std::size_t k, MultiIndex& cur,
                  const Rat& acc, RowFn&& row) {
  if (k == m.size()) {
    Rat v = c * acc;
    if (v == 0) return;
    auto [it, fresh] = out.emplace(cur, v);
    if (!fresh) {
      it->second += v;
      if (it->second == 0) out.erase(it);
    }
    return;
  }
  const auto& r = row(m[k]);
  for (unsigned e = 0; e < r.size(); ++e) {
    if (r[e] == 0) continue;
    cur[k] = e;
    change_basis<Coef>(out, m, c, k + 1, cur, acc * Rat(r[e]), row);
  }
}
}  // namespace detail

inline IntPoly to_binomial(std::size_t nvars, const Terms& mono) {
  Terms out;
  MultiIndex cur(nvars);
  for (const auto& [m, c] : mono) {
    if (m.size() != nvars) throw ValidationError("multi-index arity mismatch");
    detail::change_basis<Int>(out, m, c, 0, cur, Rat(1), [](unsigned n) -> const std::vector<Int>& {
      return mono_to_binom_row(n);
    });
  }
  IntPoly p(nvars);
  for (const auto& [m, c] : out) p.add_term(m, c);
  return p;
}

inline Terms from_binomial(const IntPoly& P) {
  Terms out;
  MultiIndex cur(P.nvars());
  for (const auto& [m, c] : P.terms())
    detail::change_basis<Rat>(out, m, c, 0, cur, Rat(1), [](unsigned k) -> const std::vector<Rat>& {
      return binom_to_mono_row(k);
    });
  return out;
}

// ---- text rendering ----

inline std::string render_binomial(const IntPoly& P, const std::vector<std::string>& names) {
  if (P.is_zero()) return "0";
  std::string s;
  bool first = true;
  for (const auto& [m, c] : P.terms()) {
    Rat a = abs(c);
    std::string sign = c < 0 ? "-" : "+";
    if (first) {
      if (c < 0) s += "-";
    } else {
      s += " " + sign + " ";
    }
    first = false;
    std::vector<std::string> factors;
    for (std::size_t k = 0; k < m.size(); ++k) {
      if (m[k] == 0) continue;
      if (m[k] == 1)
        factors.push_back(names[k]);
      else
        factors.push_back("C(" + names[k] + "," + std::to_string(m[k]) + ")");
    }
    std::string coef = a.get_den() == 1 ? a.get_num().get_str() : a.get_str();
    if (factors.empty()) {
      s += coef;
      continue;
    }
    if (a != 1) s += coef + "*";
    for (std::size_t f = 0; f < factors.size(); ++f) s += (f ? "*" : "") + factors[f];
  }
  return s;
}

inline std::string render_monomial(const Terms& T, const std::vector<std::string>& names) {
  if (T.empty()) return "0";
  std::string s;
  bool first = true;
  // highest degree first reads more naturally for monomials
  for (auto it = T.rbegin(); it != T.rend(); ++it) {
    const auto& [m, c] = *it;
    Rat a = abs(c);
    if (first) {
      if (c < 0) s += "-";
    } else {
      s += c < 0 ? " - " : " + ";
    }
    first = false;
    std::vector<std::string> factors;
    for (std::size_t k = 0; k < m.size(); ++k) {
      if (m[k] == 0) continue;
      factors.push_back(m[k] == 1 ? names[k] : names[k] + "^" + std::to_string(m[k]));
    }
    if (factors.empty()) {
      s += a.get_str();
      continue;
    }
    if (a.get_num() != 1) s += a.get_num().get_str() + "*";
    for (std::size_t f = 0; f < factors.size(); ++f) s += (f ? "*" : "") + factors[f];
    if (a.get_den() != 1) s += "/" + a.get_den().get_str();
  }
  return s;
}

inline nlohmann::json to_json(const IntPoly& P) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& [m, c] : P.terms()) arr.push_back({m, rat_string(c)});
  return arr;
}

inline IntPoly poly_from_json(std::size_t nvars, const nlohmann::json& j) {
  IntPoly p(nvars);
  for (const auto& t : j) p.add_term(t.at(0).get<MultiIndex>(), parse_rat(t.at(1).get<std::string>()));
  return p;
}

// ---- polynomial maps ----

struct PolyMap {
  std::size_t nvars = 0;
  std::vector<std::string> names;
  std::vector<IntPoly> comps;

  std::size_t t() const { return comps.size(); }
  int degree() const {
    int d = -1;
    for (const auto& c : comps) d = std::max(d, c.degree());
    return d;
  }
  bool is_integral() const {
    return std::all_of(comps.begin(), comps.end(), [](const IntPoly& c) { return c.is_integral(); });
  }
  bool zero_at_origin() const {
    return std::all_of(comps.begin(), comps.end(), [](const IntPoly& c) { return c.constant_term() == 0; });
  }
  bool is_linear() const { return degree() <= 1; }

  PolyMap degree_part(unsigned j) const {
    PolyMap r = *this;
    for (auto& c : r.comps) c = c.degree_part(j);
    return r;
  }
  PolyMap binom_power(unsigned l) const {
    if (l < 1) throw ValidationError("binom_power: exponent must be at least 1");
    PolyMap r = *this;
    for (auto& c : r.comps) c = binomial_of(c, l);
    return r;
  }
  std::string render() const {
    std::string s;
    for (std::size_t i = 0; i < comps.size(); ++i) s += (i ? ", " : "") + render_binomial(comps[i], names);
    return s;
  }
  nlohmann::json to_json() const {
    nlohmann::json j;
    j["vars"] = names;
    nlohmann::json cs = nlohmann::json::array();
    for (const auto& c : comps) cs.push_back(hofa::to_json(c));
    j["components"] = cs;
    return j;
  }
};

inline std::vector<std::string> default_var_names(std::size_t nvars) {
  static const char* base[] = {"x", "y", "z"};
  std::vector<std::string> n;
  for (std::size_t k = 0; k < nvars; ++k) n.push_back(k < 3 ? base[k] : "h" + std::to_string(k - 2));
  return n;
}

// components eps_w(x,y,h) = x + (y + sum w_i h_i)^d - sum (i-1) w_i h_i, w in {0,1}^m,
// variables ordered (x, y, h1..hm), w indexed with w_1 as the lowest bit
inline PolyMap cs_system(unsigned m, unsigned d) {
  if (m < 1 || d < 2) throw ValidationError("cs_system needs m >= 1 and d >= 2");
  if (m > 16) throw CostError("cs_system: 2^m exceeds 2^16 components");
  std::size_t D = m + 2;
  PolyMap P;
  P.nvars = D;
  P.names = {"x", "y"};
  for (unsigned i = 1; i <= m; ++i) P.names.push_back("h" + std::to_string(i));
  IntPoly x = IntPoly::variable(D, 0), y = IntPoly::variable(D, 1);
  for (unsigned w = 0; w < (1u << m); ++w) {
    IntPoly inner = y, lin(D);
    for (unsigned i = 1; i <= m; ++i) {
      if (!((w >> (i - 1)) & 1u)) continue;
      IntPoly h = IntPoly::variable(D, i + 1);
      inner += h;
      lin += h * Rat(i - 1);
    }
    P.comps.push_back(x + power_of(inner, d) - lin);
  }
  return P;
}

// ---- text syntax ----
//   expr   := term (('+'|'-') term)*
//   term   := unary (('*'|'/')? unary)*     juxtaposition multiplies, '/' only by integer literals
//   unary  := '-' unary | power
//   power  := primary ('^' uint)?
//   primary:= number | var | '(' expr ')' | 'C(' expr ',' uint ')'
// variables: x, y, z, h1, h2, ...

namespace detail {

inline int var_rank(const std::string& v) {
  if (v == "x") return 0;
  if (v == "y") return 1;
  if (v == "z") return 2;
  if (v.size() >= 2 && v[0] == 'h' && std::all_of(v.begin() + 1, v.end(), ::isdigit)) {
    int k = std::stoi(v.substr(1));
    if (k >= 1) return 2 + k;
  }
  return -1;
}

inline std::vector<std::string> scan_vars(const std::string& text) {
  std::vector<std::string> found;
  for (std::size_t i = 0; i < text.size();) {
    if (std::isalpha(static_cast<unsigned char>(text[i]))) {
      std::size_t j = i + 1;
      if (text[i] == 'h')
        while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      std::string tok = text.substr(i, j - i);
      if (tok != "C") {
        if (var_rank(tok) < 0) throw ValidationError("unknown variable '" + tok + "'");
        if (std::find(found.begin(), found.end(), tok) == found.end()) found.push_back(tok);
      }
      i = j;
    } else {
      ++i;
    }
  }
  std::sort(found.begin(), found.end(),
            [](const std::string& a, const std::string& b) { return var_rank(a) < var_rank(b); });
  return found;
}

class Parser {
 public:
  Parser(const std::string& s, const std::vector<std::string>& names) : s_(s), names_(names) {}

  IntPoly parse() {
    IntPoly r = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return r;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw ValidationError("parse error at offset " + std::to_string(pos_) + " in '" + s_ + "': " + why);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool peek(char c) {
    skip();
    return pos_ < s_.size() && s_[pos_] == c;
  }
  bool eat(char c) {
    if (peek(c)) {
      ++pos_;
      return true;
    }
    return false;
  }
  std::size_t D() const { return names_.size(); }

  IntPoly expr() {
    IntPoly r = term();
    for (;;) {
      if (eat('+'))
        r += term();
      else if (eat('-'))
        r -= term();
      else
        return r;
    }
  }
  bool starts_primary() {
    skip();
    if (pos_ >= s_.size()) return false;
    char c = s_[pos_];
    return std::isalpha(static_cast<unsigned char>(c)) || c == '(' || std::isdigit(static_cast<unsigned char>(c));
  }
  IntPoly term() {
    IntPoly r = unary();
    for (;;) {
      if (eat('*')) {
        r = r * unary();
      } else if (eat('/')) {
        skip();
        Int d = integer();
        if (d == 0) fail("division by zero");
        r *= Rat(1) / Rat(d);
      } else if (starts_primary()) {
        r = r * unary();
      } else {
        return r;
      }
    }
  }
  IntPoly unary() {
    if (eat('-')) return -unary();
    if (eat('+')) return unary();
    return power();
  }
  IntPoly power() {
    IntPoly b = primary();
    if (eat('^')) {
      skip();
      Int e = integer();
      if (e > 64) fail("exponent too large");
      return power_of(b, static_cast<unsigned>(e.get_ui()));
    }
    return b;
  }
  Int integer() {
    skip();
    std::size_t st = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (st == pos_) fail("expected integer");
    return Int(s_.substr(st, pos_ - st));
  }
  IntPoly primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      Int n = integer();
      return IntPoly::constant(D(), Rat(n));
    }
    if (c == '(') {
      ++pos_;
      IntPoly r = expr();
      if (!eat(')')) fail("expected ')'");
      return r;
    }
    if (c == 'C' && pos_ + 1 < s_.size()) {
      ++pos_;
      if (!eat('(')) fail("expected '(' after C");
      IntPoly inner = expr();
      if (!eat(',')) fail("expected ',' in C(expr,k)");
      Int k = integer();
      if (!eat(')')) fail("expected ')' closing C(expr,k)");
      if (k > 64) fail("binomial order too large");
      return k == 0 ? IntPoly::constant(D(), 1) : binomial_of(inner, static_cast<unsigned>(k.get_ui()));
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t j = pos_ + 1;
      if (c == 'h')
        while (j < s_.size() && std::isdigit(static_cast<unsigned char>(s_[j]))) ++j;
      std::string v = s_.substr(pos_, j - pos_);
      auto it = std::find(names_.begin(), names_.end(), v);
      if (it == names_.end()) fail("unknown variable '" + v + "'");
      pos_ = j;
      return IntPoly::variable(D(), static_cast<std::size_t>(it - names_.begin()));
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  std::string s_;
  std::vector<std::string> names_;
  std::size_t pos_ = 0;
};

inline std::vector<std::string> split_top_level(const std::string& text) {
  std::vector<std::string> parts;
  int depth = 0;
  std::string cur;
  for (char c : text) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

}  // namespace detail

inline IntPoly parse_poly(const std::string& text, const std::vector<std::string>& names) {
  return detail::Parser(text, names).parse();
}

// "x, x+y, x+y^2, x+y+y^2"; variables are the ones used, in canonical order x, y, z, h1, h2, ...
// unless names is given explicitly
inline PolyMap parse_polymap(std::string text, std::vector<std::string> names = {}) {
  // optional outer parentheses around the whole tuple
  auto b = text.find_first_not_of(" \t"), e = text.find_last_not_of(" \t");
  if (b != std::string::npos && text[b] == '(' && text[e] == ')') {
    int depth = 0;
    bool wraps = true;
    for (std::size_t k = b; k <= e; ++k) {
      if (text[k] == '(') ++depth;
      if (text[k] == ')' && --depth == 0 && k != e) wraps = false;
    }
    if (wraps) text = text.substr(b + 1, e - b - 1);
  }
  if (names.empty()) names = detail::scan_vars(text);
  if (names.empty()) throw ValidationError("progression uses no variables: '" + text + "'");
  PolyMap P;
  P.nvars = names.size();
  P.names = names;
  for (const auto& part : detail::split_top_level(text)) {
    if (part.find_first_not_of(" \t") == std::string::npos) throw ValidationError("empty component in '" + text + "'");
    P.comps.push_back(parse_poly(part, names));
  }
  return P;
}

}  // namespace hofa
