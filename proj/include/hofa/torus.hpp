// p-periodic polynomial sequences on tori (R/Z)^m: Taylor data, irrationality, lifting along a
// polynomial map, Weyl sums, and the failure example for (x, x+y, x+2y, x+y^2).
#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "hofa/counting.hpp"
#include "hofa/leibman.hpp"

namespace hofa {

inline constexpr double kIrrationalityCostLimit = 1e8;
inline constexpr double kWeylCostLimit = 1e10;

// g(n) = sum_i g_i C(n, i) mod 1 with g_i = num[i] / q
struct TorusSeq {
  std::uint64_t q = 0;
  std::size_t m = 0;
  std::vector<std::vector<std::int64_t>> num;  // (s+1) x m, reduced mod q
  std::vector<unsigned> level;                 // per coordinate; default s

  unsigned s() const { return static_cast<unsigned>(num.size()) - 1; }

  static TorusSeq make(std::uint64_t q, std::vector<std::vector<std::int64_t>> num,
                       std::vector<unsigned> level = {}) {
    if (q < 2) throw ValidationError("torus modulus must be at least 2");
    if (num.empty()) throw ValidationError("torus sequence needs at least g_0");
    TorusSeq g;
    g.q = q;
    g.m = num[0].size();
    if (g.m == 0) throw ValidationError("torus dimension must be positive");
    for (auto& row : num) {
      if (row.size() != g.m) throw ValidationError("Taylor coefficients have inconsistent dimension");
      for (auto& v : row) v = ((v % static_cast<std::int64_t>(q)) + static_cast<std::int64_t>(q)) % static_cast<std::int64_t>(q);
    }
    g.num = std::move(num);
    if (level.empty()) level.assign(g.m, g.s());
    if (level.size() != g.m) throw ValidationError("one filtration level per coordinate expected");
    for (auto l : level)
      if (l < 1 || l > g.s()) throw ValidationError("coordinate level outside 1..s");
    g.level = std::move(level);
    return g;
  }
};

// exact point in [0,1)^m
inline std::vector<Rat> eval_seq(const TorusSeq& g, const Int& n) {
  Int q(static_cast<unsigned long>(g.q));
  std::vector<Rat> out(g.m);
  for (std::size_t c = 0; c < g.m; ++c) {
    Int acc = 0;
    for (unsigned i = 0; i <= g.s(); ++i) acc += Int(static_cast<long>(g.num[i][c])) * binom_at(n, i);
    Int r = acc % q;
    if (r < 0) r += q;
    out[c] = Rat(r, q);
    out[c].canonicalize();
  }
  return out;
}

// ---- integer characters ----

inline std::int64_t modulus_of(const std::vector<std::int64_t>& k) {
  std::int64_t s = 0;
  for (auto v : k) s += v < 0 ? -v : v;
  return s;
}

// first nonzero entry positive; k and -k give conjugate character values
inline bool is_canonical_sign(const std::vector<std::int64_t>& k) {
  for (auto v : k)
    if (v != 0) return v > 0;
  return false;
}

// order: smaller modulus first, then lexicographically smaller -k
inline bool character_before(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b) {
  auto ma = modulus_of(a), mb = modulus_of(b);
  if (ma != mb) return ma < mb;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return -a[i] < -b[i];
  return false;
}

// every canonical nonzero k in Z^n with |k| <= K, in character_before order
inline std::vector<std::vector<std::int64_t>> enumerate_characters(std::size_t n, std::int64_t K) {
  std::vector<std::vector<std::int64_t>> out;
  std::vector<std::int64_t> k(n, 0);
  // recursive fill with remaining modulus budget
  auto rec = [&](auto&& self, std::size_t pos, std::int64_t budget) -> void {
    if (pos == n) {
      if (is_canonical_sign(k)) out.push_back(k);
      return;
    }
    for (std::int64_t v = -budget; v <= budget; ++v) {
      k[pos] = v;
      self(self, pos + 1, budget - (v < 0 ? -v : v));
    }
    k[pos] = 0;
  };
  if (n > 0) rec(rec, 0, K);
  std::stable_sort(out.begin(), out.end(), character_before);
  return out;
}

inline double count_characters_box(std::size_t n, std::int64_t K) {
  return std::pow(2.0 * static_cast<double>(K) + 1.0, static_cast<double>(n));
}

struct IrrationalityWitness {
  unsigned level = 0;
  std::vector<std::int64_t> k;  // full length m, zero off the level's coordinates
};

struct IrrationalityResult {
  bool pass = true;
  std::int64_t bound = 0;
  std::optional<IrrationalityWitness> witness;
};

// pass iff no k with 0 < |k| <= A on the level-i coordinates has k.g_i in Z, for every 1 <= i <= s
inline IrrationalityResult irrationality_check(const TorusSeq& g, std::int64_t A) {
  if (A < 1) throw ValidationError("irrationality bound must be at least 1");
  IrrationalityResult r;
  r.bound = A;
  for (unsigned i = 1; i <= g.s(); ++i) {
    std::vector<std::size_t> coords;
    for (std::size_t c = 0; c < g.m; ++c)
      if (g.level[c] == i) coords.push_back(c);
    if (coords.empty()) continue;
    if (count_characters_box(coords.size(), A) > kIrrationalityCostLimit)
      throw CostError("irrationality enumeration exceeds 1e8 characters");
    for (const auto& k : enumerate_characters(coords.size(), A)) {
      __int128 acc = 0;
      for (std::size_t j = 0; j < coords.size(); ++j) acc += static_cast<__int128>(k[j]) * g.num[i][coords[j]];
      if (acc % static_cast<__int128>(g.q) != 0) continue;
      IrrationalityWitness w;
      w.level = i;
      w.k.assign(g.m, 0);
      for (std::size_t j = 0; j < coords.size(); ++j) w.k[coords[j]] = k[j];
      r.pass = false;
      r.witness = w;
      return r;
    }
  }
  return r;
}

// ---- multiparameter sequences ----

// coordinate c at x is num[c](x) / q mod 1, num[c] integer-valued
struct MultiSeq {
  std::uint64_t q = 0;
  std::size_t nvars = 0;
  std::vector<IntPoly> num;
  std::vector<unsigned> level;
  std::vector<std::string> coord_names;

  std::size_t dim() const { return num.size(); }
  IntPoly pairing(const std::vector<std::int64_t>& k) const {
    if (k.size() != dim()) throw ValidationError("character length does not match sequence dimension");
    IntPoly s(nvars);
    for (std::size_t c = 0; c < dim(); ++c)
      if (k[c] != 0) s += num[c] * Rat(k[c]);
    return s;
  }
};

inline MultiSeq as_multi(const TorusSeq& g) {
  MultiSeq r;
  r.q = g.q;
  r.nvars = 1;
  r.level = g.level;
  for (std::size_t c = 0; c < g.m; ++c) {
    IntPoly p(1);
    for (unsigned i = 0; i <= g.s(); ++i)
      if (g.num[i][c] != 0) p.add_term({i}, Rat(g.num[i][c]));
    r.num.push_back(p);
    r.coord_names.push_back("g" + std::to_string(c + 1));
  }
  return r;
}

// g^P(x) = (g(P_1(x)), ..., g(P_t(x))), coordinates ordered component-major
inline MultiSeq lift_gP(const TorusSeq& g, const PolyMap& P) {
  MultiSeq r;
  r.q = g.q;
  r.nvars = P.nvars;
  for (std::size_t j = 0; j < P.t(); ++j) {
    auto pw = binomial_powers(P.comps[j], g.s());
    for (std::size_t c = 0; c < g.m; ++c) {
      IntPoly acc = IntPoly::constant(P.nvars, Rat(g.num[0][c]));
      for (unsigned i = 1; i <= g.s(); ++i)
        if (g.num[i][c] != 0) acc += pw[i - 1] * Rat(g.num[i][c]);
      r.num.push_back(acc);
      r.level.push_back(g.level[c]);
      r.coord_names.push_back("c" + std::to_string(j + 1) + "_" + std::to_string(c + 1));
    }
  }
  return r;
}

// an integer-valued polynomial is 0 mod q at every integer point iff all binomial-basis coefficients are
inline bool vanishes_mod(const IntPoly& P, std::uint64_t q) {
  Int Q(static_cast<unsigned long>(q));
  for (const auto& [m, c] : P.terms()) {
    if (c.get_den() != 1) return false;
    if (c.get_num() % Q != 0) return false;
  }
  return true;
}

// E_{x in [0,q)^D} e(k . seq(x)); D <= 2, q prime
inline cplx weyl_sum(const MultiSeq& seq, const std::vector<std::int64_t>& k, unsigned threads = 0) {
  if (seq.nvars == 0 || seq.nvars > 2) throw ValidationError("Weyl sums support 1 or 2 parameters");
  PrimeField F(seq.q);
  std::uint64_t q = seq.q;
  IntPoly N = seq.pairing(k);
  if (!N.is_integral()) throw ValidationError("sequence numerators must be integer-valued");
  auto tab = character_table(q);
  int deg = std::max(N.degree(), 0);
  if (static_cast<std::uint64_t>(deg) >= q) throw ValidationError("sequence degree must be below q");
  auto T = binomial_tables(F, static_cast<unsigned>(deg));
  std::size_t D = seq.nvars;
  if (D == 1) {
    std::vector<cplx> v(q);
    std::vector<std::pair<unsigned, std::uint64_t>> terms;
    for (const auto& [m, c] : N.terms()) terms.emplace_back(m[0], F.reduce(c));
    for (std::uint64_t x = 0; x < q; ++x) {
      std::uint64_t ph = 0;
      for (const auto& [a, c] : terms) ph = (ph + mulmod(c, T[a][x], q)) % q;
      v[x] = tab[ph];
    }
    return pairwise_sum(v) / static_cast<double>(q);
  }
  // group by the y-exponent: N = sum_b r_b(x) C(y, b)
  std::vector<std::vector<std::pair<unsigned, std::uint64_t>>> by_b(static_cast<std::size_t>(deg) + 1);
  for (const auto& [m, c] : N.terms()) by_b[m[1]].emplace_back(m[0], F.reduce(c));
  std::vector<cplx> per_row(q);
  parallel_chunks(q, resolve_threads(threads), [&](std::size_t lo, std::size_t hi) {
    std::vector<std::uint64_t> r(by_b.size());
    for (std::size_t x = lo; x < hi; ++x) {
      std::vector<unsigned> active;
      for (std::size_t b = 0; b < by_b.size(); ++b) {
        std::uint64_t acc = 0;
        for (const auto& [a, c] : by_b[b]) acc = (acc + mulmod(c, T[a][x], q)) % q;
        r[b] = acc;
        if (b > 0 && acc != 0) active.push_back(static_cast<unsigned>(b));
      }
      KahanC kc;
      cplx block = 0;
      unsigned cnt = 0;
      for (std::uint64_t y = 0; y < q; ++y) {
        std::uint64_t ph = r[0];
        for (auto b : active) ph += static_cast<std::uint64_t>(r[b]) * T[b][y] % q;
        block += tab[ph % q];
        if (++cnt == 64) {
          kc.add(block);
          block = 0;
          cnt = 0;
        }
      }
      kc.add(block);
      per_row[x] = kc.sum;
    }
  });
  return pairwise_sum(per_row) / (static_cast<double>(q) * static_cast<double>(q));
}

struct DefectResult {
  double value = 0;
  std::vector<std::int64_t> argmax;
  std::size_t characters = 0;
};

// max over nontrivial |k| <= K of |weyl_sum(seq, k)|; with level_respecting only characters supported
// on the coordinates of a single filtration level are enumerated
inline DefectResult weyl_defect(const MultiSeq& seq, std::int64_t K, bool level_respecting = false,
                                unsigned threads = 0) {
  if (K < 1) throw ValidationError("character bound must be at least 1");
  std::size_t n = seq.dim();
  std::vector<std::vector<std::int64_t>> chars;
  if (!level_respecting) {
    if (count_characters_box(n, K) > kWeylCostLimit) throw CostError("character enumeration too large");
    chars = enumerate_characters(n, K);
  } else {
    std::vector<unsigned> levels(seq.level.begin(), seq.level.end());
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    for (auto L : levels) {
      std::vector<std::size_t> coords;
      for (std::size_t c = 0; c < n; ++c)
        if (seq.level[c] == L) coords.push_back(c);
      if (count_characters_box(coords.size(), K) > kWeylCostLimit) throw CostError("character enumeration too large");
      for (const auto& k : enumerate_characters(coords.size(), K)) {
        std::vector<std::int64_t> full(n, 0);
        for (std::size_t j = 0; j < coords.size(); ++j) full[coords[j]] = k[j];
        chars.push_back(full);
      }
    }
    std::stable_sort(chars.begin(), chars.end(), character_before);
  }
  double cost = std::pow(static_cast<double>(seq.q), static_cast<double>(seq.nvars)) * static_cast<double>(chars.size());
  if (cost > kWeylCostLimit) throw CostError("Weyl defect cost exceeds 1e10");
  std::vector<double> vals(chars.size());
  parallel_chunks(chars.size(), resolve_threads(threads), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t c = lo; c < hi; ++c) vals[c] = std::abs(weyl_sum(seq, chars[c], 1));
  });
  DefectResult r;
  r.characters = chars.size();
  r.value = -1;
  for (std::size_t c = 0; c < chars.size(); ++c)
    if (vals[c] > r.value + 1e-12) {
      r.value = vals[c];
      r.argmax = chars[c];
    }
  if (chars.empty()) r.value = 0;
  return r;
}

// ---- nontriviality on the Leibman group ----

// eta = K (component-major over t x m) is nontrivial on G^P iff for some coordinate c the vector
// (K_{j,c})_j is not orthogonal to Q_{level(c),1}
inline bool character_nontrivial_on_leibman(const SpaceLadder& L, const std::vector<unsigned>& level,
                                            const std::vector<std::int64_t>& K) {
  std::size_t t = L.t(), m = level.size();
  if (K.size() != t * m) throw ValidationError("character length must be t*m");
  for (std::size_t c = 0; c < m; ++c) {
    const auto& Q = L.q(level[c], 1);
    for (const auto& row : Q.rows()) {
      Rat dot = 0;
      for (std::size_t j = 0; j < t; ++j) dot += row[j] * Rat(K[j * m + c]);
      if (dot != 0) return true;
    }
  }
  return false;
}

// first K in character_before order with K . g^P identically zero for symbolic unit coefficients
// and K nontrivial on G^P; numerators of g are replaced by 1 on their support so the identity is p-free
inline std::optional<std::vector<std::int64_t>> find_annihilator(const TorusSeq& g, const PolyMap& P,
                                                                 std::int64_t max_modulus = 8) {
  TorusSeq unit = g;
  unit.q = 0;
  for (auto& row : unit.num)
    for (auto& v : row) v = v != 0 ? 1 : 0;
  MultiSeq lifted = lift_gP(unit, P);
  SpaceLadder L = build_ladder(P, g.s(), 1);
  // coefficient vectors: column per lifted coordinate
  std::map<MultiIndex, std::vector<Rat>, GradedLex> rows;
  std::size_t n = lifted.dim();
  for (std::size_t c = 0; c < n; ++c)
    for (const auto& [mi, v] : lifted.num[c].terms()) {
      auto& row = rows[mi];
      row.resize(n, 0);
      row[c] = v;
    }
  for (const auto& K : enumerate_characters(n, max_modulus)) {
    bool zero = true;
    for (const auto& [mi, row] : rows) {
      Rat s = 0;
      for (std::size_t c = 0; c < n; ++c)
        if (K[c] != 0 && c < row.size()) s += row[c] * Rat(K[c]);
      if (s != 0) {
        zero = false;
        break;
      }
    }
    if (zero && character_nontrivial_on_leibman(L, g.level, K)) return K;
  }
  return std::nullopt;
}

// ---- the (x, x+y, x+2y, x+y^2) example ----

struct Section11Report {
  std::uint64_t p = 0;
  std::int64_t alpha_num = 0;
  IrrationalityResult irrationality;
  std::vector<std::int64_t> printed_character;
  bool printed_symbolic_zero = false;
  std::string printed_residual;
  std::vector<std::int64_t> character;
  std::int64_t character_modulus = 0;
  bool symbolic_zero = false;
  bool nontrivial = false;
  double defect = 0;  // |Weyl sum| at the annihilating character
  DefectResult unlifted;
  double unlifted_threshold = 0;
  bool pass = false;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["p"] = p;
    j["alpha_num"] = alpha_num;
    j["irrationality"] = {{"bound", irrationality.bound}, {"pass", irrationality.pass}};
    j["printed_character"] = {{"character", printed_character},
                              {"symbolic_zero", printed_symbolic_zero},
                              {"residual", printed_residual}};
    j["annihilator"] = {{"character", character},
                        {"modulus", character_modulus},
                        {"symbolic_zero", symbolic_zero},
                        {"nontrivial_on_leibman_group", nontrivial}};
    j["defect"] = defect;
    j["unlifted_defect"] = {{"value", unlifted.value},
                            {"argmax", unlifted.argmax},
                            {"characters", unlifted.characters},
                            {"threshold", unlifted_threshold}};
    j["pass"] = pass;
    return j;
  }
};

inline TorusSeq section11_sequence(std::uint64_t p) {
  std::int64_t a = static_cast<std::int64_t>(std::sqrt(static_cast<double>(p)));
  while ((a + 1) * (a + 1) <= static_cast<std::int64_t>(p)) ++a;
  while (a * a > static_cast<std::int64_t>(p)) --a;
  // g(n) = (a n / p, a C(n,2) / p); G_2 = 0 x R
  return TorusSeq::make(p, {{0, 0}, {a, 0}, {0, a}}, {1, 2});
}

inline PolyMap section11_progression() { return parse_polymap("x, x+y, x+2y, x+y^2"); }

// the character as printed: (x1 - y1 + u1 - z1) + (x2 - 2 y2 + u2), component-major (x1,x2,y1,y2,u1,u2,z1,z2)
inline std::vector<std::int64_t> section11_printed_character() { return {1, 1, -1, -2, 1, 1, -1, 0}; }

inline Section11Report verify_section11(std::uint64_t p, unsigned threads = 0) {
  if (p < 11) throw ValidationError("verify_section11 needs p >= 11");
  PrimeField F(p);
  Section11Report r;
  r.p = p;
  TorusSeq g = section11_sequence(p);
  r.alpha_num = g.num[1][0];
  r.irrationality = irrationality_check(g, r.alpha_num);
  PolyMap P = section11_progression();
  MultiSeq gP = lift_gP(g, P);

  r.printed_character = section11_printed_character();
  IntPoly printed = gP.pairing(r.printed_character);
  r.printed_symbolic_zero = vanishes_mod(printed, p);
  {
    IntPoly red(printed.nvars());
    Int Q(static_cast<unsigned long>(p));
    for (const auto& [m, c] : printed.terms()) {
      Int v = c.get_num() % Q;
      if (v != 0) red.add_term(m, Rat(v));
    }
    r.printed_residual = render_binomial(red, P.names) + " (numerator over " + std::to_string(p) + ")";
  }

  auto K = find_annihilator(g, P);
  if (K) {
    r.character = *K;
    r.character_modulus = modulus_of(*K);
    r.symbolic_zero = vanishes_mod(gP.pairing(*K), p);
    r.nontrivial = character_nontrivial_on_leibman(build_ladder(P, g.s(), 1), g.level, *K);
    r.defect = std::abs(weyl_sum(gP, *K, threads));
  }
  r.unlifted = weyl_defect(as_multi(g), r.alpha_num, true, threads);
  r.unlifted_threshold = std::pow(static_cast<double>(p), -0.25);
  r.pass = r.irrationality.pass && K.has_value() && r.symbolic_zero && r.nontrivial &&
           std::abs(r.defect - 1.0) <= 1e-9 && r.unlifted.value <= r.unlifted_threshold;
  return r;
}

}  // namespace hofa
