// Counting operators for polynomial progressions, set counts, additive energy
// and the linear-model comparison for complexity-one progressions.
#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "hofa/modring.hpp"

namespace hofa {

inline constexpr double kCountCostLimit = 1e10;

// ---- sets ----

class SetF {
 public:
  SetF(PrimeField F, std::vector<std::uint64_t> members, std::string spec = "explicit")
      : F_(F), m_(std::move(members)), spec_(std::move(spec)) {
    for (auto& a : m_)
      if (a >= F_.p()) throw ValidationError("set member " + std::to_string(a) + " is not a residue mod p");
    std::sort(m_.begin(), m_.end());
    if (std::adjacent_find(m_.begin(), m_.end()) != m_.end()) throw ValidationError("set members must be distinct");
  }
  const PrimeField& field() const { return F_; }
  const std::vector<std::uint64_t>& members() const { return m_; }
  std::size_t size() const { return m_.size(); }
  double density() const { return static_cast<double>(m_.size()) / static_cast<double>(F_.p()); }
  const std::string& spec() const { return spec_; }

  std::vector<std::uint8_t> mask() const {
    std::vector<std::uint8_t> b(F_.p(), 0);
    for (auto a : m_) b[a] = 1;
    return b;
  }
  FieldFn indicator() const {
    std::vector<cplx> v(F_.p(), 0.0);
    for (auto a : m_) v[a] = 1.0;
    return FieldFn(F_, std::move(v), true);
  }

 private:
  PrimeField F_;
  std::vector<std::uint64_t> m_;
  std::string spec_;
};

// x is included iff counter_uniform(seed, x) < density
inline SetF random_set(const PrimeField& F, std::uint64_t seed, double density) {
  if (!(density >= 0 && density <= 1)) throw ValidationError("density must lie in [0,1]");
  std::vector<std::uint64_t> m;
  for (std::uint64_t x = 0; x < F.p(); ++x)
    if (counter_uniform(seed, x) < density) m.push_back(x);
  std::ostringstream s;
  s << "random:" << seed << ":" << density;
  return SetF(F, std::move(m), s.str());
}

// {x^k : x in F_p}, zero included
inline SetF power_residues(const PrimeField& F, unsigned k) {
  if (k == 0) throw ValidationError("residues:k needs k >= 1");
  std::vector<std::uint8_t> seen(F.p(), 0);
  for (std::uint64_t x = 0; x < F.p(); ++x) seen[powmod(x, k, F.p())] = 1;
  std::vector<std::uint64_t> m;
  for (std::uint64_t x = 0; x < F.p(); ++x)
    if (seen[x]) m.push_back(x);
  return SetF(F, std::move(m), "residues:" + std::to_string(k));
}

inline SetF interval_set(const PrimeField& F, std::int64_t a, std::int64_t b) {
  if (b < a) throw ValidationError("interval:a:b needs a <= b");
  std::vector<std::uint8_t> seen(F.p(), 0);
  for (std::int64_t x = a; x <= b && x - a < static_cast<std::int64_t>(F.p()); ++x) seen[F.reduce(x)] = 1;
  std::vector<std::uint64_t> m;
  for (std::uint64_t x = 0; x < F.p(); ++x)
    if (seen[x]) m.push_back(x);
  return SetF(F, std::move(m), "interval:" + std::to_string(a) + ":" + std::to_string(b));
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

// generator specs: random:<seed>:<density>, residues:<k>, interval:<a>:<b>, full, empty;
// anything else is read as a file with one residue per line
inline SetF make_set(const std::string& spec, const PrimeField& F) {
  auto parts = split(spec, ':');
  try {
    if (!parts.empty() && parts[0] == "random" && parts.size() == 3)
      return random_set(F, std::stoull(parts[1]), std::stod(parts[2]));
    if (!parts.empty() && parts[0] == "residues" && parts.size() == 2)
      return power_residues(F, static_cast<unsigned>(std::stoul(parts[1])));
    if (!parts.empty() && parts[0] == "interval" && parts.size() == 3)
      return interval_set(F, std::stoll(parts[1]), std::stoll(parts[2]));
  } catch (const std::logic_error&) {
    throw ValidationError("bad set spec '" + spec + "'");
  }
  if (spec == "full") {
    std::vector<std::uint64_t> m(F.p());
    for (std::uint64_t x = 0; x < F.p(); ++x) m[x] = x;
    return SetF(F, std::move(m), "full");
  }
  if (spec == "empty") return SetF(F, {}, "empty");
  std::ifstream in(spec);
  if (!in) throw ValidationError("set spec '" + spec + "' is neither a generator nor a readable file");
  std::vector<std::uint8_t> seen(F.p(), 0);
  std::string line;
  while (std::getline(in, line)) {
    auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    try {
      seen[F.reduce(static_cast<std::int64_t>(std::stoll(line.substr(b))))] = 1;
    } catch (const std::logic_error&) {
      throw ValidationError("bad residue line '" + line + "' in " + spec);
    }
  }
  std::vector<std::uint64_t> m;
  for (std::uint64_t x = 0; x < F.p(); ++x)
    if (seen[x]) m.push_back(x);
  return SetF(F, std::move(m), spec);
}

// ---- compiled progression: evaluation of P_i mod p row by row ----
// One variable is chosen as the inner loop variable (the one in which the most components
// are affine); affine components are stepped incrementally, the rest use C(v,k) tables.

namespace detail {

struct CompiledMap {
  std::uint64_t p = 0;
  std::size_t D = 0, t = 0, inner = 0;
  std::vector<std::size_t> outer_vars;
  std::vector<std::vector<std::uint32_t>> T;  // C(v,k) mod p
  struct Term {
    MultiIndex m;
    std::uint64_t c;
  };
  std::vector<std::vector<Term>> terms;
  std::vector<unsigned> inner_deg;
  bool all_affine = true;

  CompiledMap(const PolyMap& P, const PrimeField& F) : p(F.p()), D(P.nvars), t(P.t()) {
    if (D < 1 || D > 3) throw ValidationError("counting supports 1 to 3 parameters, got " + std::to_string(D));
    int deg = std::max(P.degree(), 1);
    T = binomial_tables(F, static_cast<unsigned>(deg));
    std::size_t best = 0;
    int best_cnt = -1;
    for (std::size_t v = 0; v < D; ++v) {
      int cnt = 0;
      for (const auto& c : P.comps) cnt += c.degree_in(v) <= 1;
      if (cnt > best_cnt) {
        best_cnt = cnt;
        best = v;
      }
    }
    inner = best;
    for (std::size_t v = 0; v < D; ++v)
      if (v != inner) outer_vars.push_back(v);
    terms.resize(t);
    inner_deg.resize(t);
    for (std::size_t i = 0; i < t; ++i) {
      for (const auto& [m, c] : P.comps[i].terms()) terms[i].push_back({m, F.reduce(c)});
      inner_deg[i] = static_cast<unsigned>(std::max(P.comps[i].degree_in(inner), 0));
      if (inner_deg[i] > 1) all_affine = false;
    }
  }

  std::size_t rows() const {
    std::size_t r = 1;
    for (std::size_t k = 0; k + 1 < D; ++k) r *= p;
    return r;
  }

  // per-component coefficients of C(v,k), k <= inner_deg, for outer row index
  void row_coeffs(std::size_t row, std::vector<std::vector<std::uint64_t>>& coef) const {
    std::vector<std::uint64_t> xv(D, 0);
    std::size_t r = row;
    for (std::size_t k = 0; k < outer_vars.size(); ++k) {
      xv[outer_vars[k]] = r % p;
      r /= p;
    }
    coef.resize(t);
    for (std::size_t i = 0; i < t; ++i) {
      coef[i].assign(inner_deg[i] + 1, 0);
      for (const auto& tm : terms[i]) {
        std::uint64_t v = tm.c;
        for (std::size_t k : outer_vars)
          if (tm.m[k]) v = mulmod(v, T[tm.m[k]][xv[k]], p);
        auto& slot = coef[i][tm.m[inner]];
        slot = (slot + v) % p;
      }
    }
  }

  // calls visit(v, idx[]) for v = 0..p-1 with idx[i] = P_i(row, v) mod p
  template <class Visit>
  void for_row(std::size_t row, std::vector<std::vector<std::uint64_t>>& coef, std::vector<std::uint32_t>& idx,
               Visit&& visit) const {
    row_coeffs(row, coef);
    idx.assign(t, 0);
    std::vector<std::uint32_t> slope(t, 0);
    for (std::size_t i = 0; i < t; ++i) {
      idx[i] = static_cast<std::uint32_t>(coef[i][0]);
      slope[i] = inner_deg[i] >= 1 ? static_cast<std::uint32_t>(coef[i][1]) : 0;
    }
    std::uint32_t P32 = static_cast<std::uint32_t>(p);
    if (all_affine) {
      for (std::uint64_t v = 0; v < p; ++v) {
        visit(idx.data());
        for (std::size_t i = 0; i < t; ++i) {
          std::uint32_t n = idx[i] + slope[i];
          idx[i] = n >= P32 ? n - P32 : n;
        }
      }
      return;
    }
    for (std::uint64_t v = 0; v < p; ++v) {
      for (std::size_t i = 0; i < t; ++i) {
        if (inner_deg[i] <= 1) {
          idx[i] = static_cast<std::uint32_t>((coef[i][0] + (inner_deg[i] ? mulmod(coef[i][1], v, p) : 0)) % p);
        } else {
          std::uint64_t s = 0;
          for (unsigned k = 0; k <= inner_deg[i]; ++k) s += mulmod(coef[i][k], T[k][v], p);
          idx[i] = static_cast<std::uint32_t>(s % p);
        }
      }
      visit(idx.data());
    }
  }
};

inline void check_count_cost(std::uint64_t p, std::size_t D, std::size_t t) {
  double cost = std::pow(static_cast<double>(p), static_cast<double>(D)) * static_cast<double>(t);
  if (cost > kCountCostLimit)
    throw CostError("counting cost p^D*t = " + std::to_string(cost) + " exceeds the 1e10 bound");
}

}  // namespace detail

// E_{x in F_p^D} prod_i f_i(P_i(x))
inline cplx lambda_P(const PolyMap& P, const std::vector<FieldFn>& fs, unsigned threads = 0) {
  if (fs.size() != P.t()) throw ValidationError("lambda_P: need one function per component");
  if (P.t() == 0) throw ValidationError("lambda_P: empty progression");
  PrimeField F = fs[0].field();
  for (const auto& f : fs)
    if (!(f.field() == F)) throw ValidationError("lambda_P: functions over different fields");
  detail::check_count_cost(F.p(), P.nvars, P.t());
  detail::CompiledMap cm(P, F);
  std::size_t rows = cm.rows();
  std::vector<cplx> per_row(rows);
  std::vector<const cplx*> tab(P.t());
  for (std::size_t i = 0; i < P.t(); ++i) tab[i] = fs[i].values().data();
  std::size_t t = P.t();
  parallel_chunks(rows, resolve_threads(threads), [&](std::size_t lo, std::size_t hi) {
    std::vector<std::vector<std::uint64_t>> coef;
    std::vector<std::uint32_t> idx;
    for (std::size_t r = lo; r < hi; ++r) {
      KahanC acc;
      cplx block = 0;
      unsigned cnt = 0;
      cm.for_row(r, coef, idx, [&](const std::uint32_t* id) {
        cplx prod = tab[0][id[0]];
        for (std::size_t i = 1; i < t; ++i) prod *= tab[i][id[i]];
        block += prod;
        if (++cnt == 64) {
          acc.add(block);
          block = 0;
          cnt = 0;
        }
      });
      acc.add(block);
      per_row[r] = acc.sum;
    }
  });
  return pairwise_sum(per_row) / std::pow(static_cast<double>(F.p()), static_cast<double>(P.nvars));
}

// exact number of x in F_p^D with every P_i(x) in A
inline std::uint64_t count_in_set(const PolyMap& P, const SetF& A, unsigned threads = 0) {
  const PrimeField& F = A.field();
  detail::check_count_cost(F.p(), P.nvars, P.t());
  detail::CompiledMap cm(P, F);
  auto mask = A.mask();
  std::size_t rows = cm.rows(), t = P.t();
  std::vector<std::uint64_t> per_row(rows, 0);
  parallel_chunks(rows, resolve_threads(threads), [&](std::size_t lo, std::size_t hi) {
    std::vector<std::vector<std::uint64_t>> coef;
    std::vector<std::uint32_t> idx;
    for (std::size_t r = lo; r < hi; ++r) {
      std::uint64_t c = 0;
      cm.for_row(r, coef, idx, [&](const std::uint32_t* id) {
        std::uint8_t ok = 1;
        for (std::size_t i = 0; i < t; ++i) ok &= mask[id[i]];
        c += ok;
      });
      per_row[r] = c;
    }
  });
  std::uint64_t total = 0;
  for (auto c : per_row) total += c;
  return total;
}

// ---- additive energy ----

// sum_s r(s)^2 with r(s) = #{(a,b) in A^2 : a+b = s}
inline std::uint64_t additive_energy_brute(const SetF& A) {
  std::uint64_t p = A.field().p();
  std::vector<std::uint64_t> r(p, 0);
  for (auto a : A.members())
    for (auto b : A.members()) ++r[(a + b) % p];
  std::uint64_t e = 0;
  for (auto v : r) e += v * v;
  return e;
}

struct EnergyReport {
  std::uint64_t value = 0;
  double fourier_value = 0;
  bool recounted = false;
};

// p^3 * sum_xi |1_A^(xi)|^4, rounded; near half-integers fall back to an exact recount
inline EnergyReport additive_energy_report(const SetF& A) {
  double p = static_cast<double>(A.field().p());
  auto fh = dft(A.indicator());
  std::vector<double> q(fh.p());
  for (std::size_t k = 0; k < fh.p(); ++k) {
    double a = std::norm(fh[k]);
    q[k] = a * a;
  }
  EnergyReport r;
  r.fourier_value = p * p * p * pairwise_sum(q);
  double fl = std::floor(r.fourier_value);
  if (std::abs(r.fourier_value - fl - 0.5) < 1e-3) {
    r.value = additive_energy_brute(A);
    r.recounted = true;
  } else {
    r.value = static_cast<std::uint64_t>(std::llround(r.fourier_value));
  }
  return r;
}

inline std::uint64_t additive_energy(const SetF& A) { return additive_energy_report(A).value; }

// ---- linear systems ----

enum class LinearMethod { automatic, direct, fourier };

inline LinearMethod parse_linear_method(const std::string& s) {
  if (s == "auto" || s == "automatic") return LinearMethod::automatic;
  if (s == "direct" || s == "naive") return LinearMethod::direct;
  if (s == "fourier") return LinearMethod::fourier;
  throw ValidationError("unknown linear method '" + s + "'");
}

// integer coefficient matrix of a linear, homogeneous map (t x r)
inline std::vector<std::vector<Rat>> linear_matrix(const PolyMap& Psi) {
  if (!Psi.is_linear()) throw ValidationError("linear system expected, got a nonlinear component");
  std::vector<std::vector<Rat>> M(Psi.t(), std::vector<Rat>(Psi.nvars, 0));
  for (std::size_t i = 0; i < Psi.t(); ++i) {
    if (Psi.comps[i].constant_term() != 0) throw ValidationError("linear forms must have zero constant term");
    for (std::size_t k = 0; k < Psi.nvars; ++k) {
      MultiIndex m(Psi.nvars, 0);
      m[k] = 1;
      M[i][k] = Psi.comps[i].coeff(m);
    }
  }
  return M;
}

enum class LinearShape { other, cube, ap_pair };

inline LinearShape classify_linear(const PolyMap& Psi) {
  if (!Psi.is_linear() || Psi.nvars != 3) return LinearShape::other;
  auto M = linear_matrix(Psi);
  auto eq = [&](const std::vector<std::vector<int>>& W) {
    if (M.size() != W.size()) return false;
    for (std::size_t i = 0; i < W.size(); ++i)
      for (std::size_t k = 0; k < 3; ++k)
        if (M[i][k] != W[i][k]) return false;
    return true;
  };
  if (eq({{1, 0, 0}, {1, 1, 0}, {1, 0, 1}, {1, 1, 1}})) return LinearShape::cube;
  if (eq({{1, 0, 0}, {1, 1, 0}, {1, 2, 0}, {1, 0, 1}, {1, 0, 2}})) return LinearShape::ap_pair;
  return LinearShape::other;
}

namespace detail {

inline cplx at(const FieldFn& fh, std::int64_t k) {
  std::int64_t p = static_cast<std::int64_t>(fh.p());
  return fh[static_cast<std::size_t>(((k % p) + p) % p)];
}

// E f0(x) f1(x+y) f2(x+z) f3(x+y+z) = sum_xi f0^(xi) f1^(-xi) f2^(-xi) f3^(xi)
inline cplx cube_fourier(const std::vector<FieldFn>& fs) {
  std::vector<FieldFn> h;
  for (const auto& f : fs) h.push_back(dft(f));
  std::int64_t p = static_cast<std::int64_t>(fs[0].p());
  std::vector<cplx> terms(static_cast<std::size_t>(p));
  for (std::int64_t xi = 0; xi < p; ++xi) terms[xi] = at(h[0], xi) * at(h[1], -xi) * at(h[2], -xi) * at(h[3], xi);
  return pairwise_sum(terms);
}

// g(x) = E_y a(x+y) b(x+2y) has g^(xi) = a^(2 xi) b^(-xi)
inline FieldFn ap_average(const FieldFn& a, const FieldFn& b) {
  auto ah = dft(a), bh = dft(b);
  std::int64_t p = static_cast<std::int64_t>(a.p());
  std::vector<cplx> gh(static_cast<std::size_t>(p));
  for (std::int64_t xi = 0; xi < p; ++xi) gh[xi] = at(ah, 2 * xi) * at(bh, -xi);
  return idft(FieldFn(a.field(), std::move(gh)));
}

inline cplx ap_pair_fourier(const std::vector<FieldFn>& fs) {
  auto g1 = ap_average(fs[1], fs[2]);
  auto g2 = ap_average(fs[3], fs[4]);
  std::vector<cplx> terms(fs[0].p());
  for (std::size_t x = 0; x < terms.size(); ++x) terms[x] = fs[0][x] * g1[x] * g2[x];
  return pairwise_sum(terms) / static_cast<double>(fs[0].p());
}

}  // namespace detail

// E_{y in F_p^r} prod_i f_i(Psi_i(y))
inline cplx lambda_linear(const PolyMap& Psi, const std::vector<FieldFn>& fs,
                          LinearMethod method = LinearMethod::automatic, unsigned threads = 0) {
  if (!Psi.is_linear()) throw ValidationError("lambda_linear: nonlinear component");
  if (fs.size() != Psi.t()) throw ValidationError("lambda_linear: need one function per form");
  LinearShape shape = classify_linear(Psi);
  bool fourier = method == LinearMethod::fourier || (method == LinearMethod::automatic && shape != LinearShape::other);
  if (fourier) {
    if (shape == LinearShape::cube) return detail::cube_fourier(fs);
    if (shape == LinearShape::ap_pair) return detail::ap_pair_fourier(fs);
    throw ValidationError("fourier path covers only (x,x+y,x+z,x+y+z) and (x,x+y,x+2y,x+z,x+2z)");
  }
  if (Psi.nvars > 3) throw ValidationError("direct linear evaluation needs at most 3 variables");
  return lambda_P(Psi, fs, threads);
}

// p^r * Lambda_Psi(1_A,...,1_A) as an exact integer
inline std::uint64_t count_linear(const PolyMap& Psi, const SetF& A, LinearMethod method = LinearMethod::automatic,
                                  unsigned threads = 0) {
  LinearShape shape = classify_linear(Psi);
  if (method == LinearMethod::direct || (method == LinearMethod::automatic && shape == LinearShape::other))
    return count_in_set(Psi, A, threads);
  if (shape == LinearShape::cube) return additive_energy(A);
  std::vector<FieldFn> fs(Psi.t(), A.indicator());
  double v = lambda_linear(Psi, fs, LinearMethod::fourier).real() *
             std::pow(static_cast<double>(A.field().p()), static_cast<double>(Psi.nvars));
  double fl = std::floor(v);
  if (std::abs(v - fl - 0.5) < 1e-3) return count_in_set(Psi, A, threads);
  return static_cast<std::uint64_t>(std::llround(v));
}

// ---- asymptotic comparison ----

struct Decomposition {
  std::vector<IntPoly> Qs;  // P = sum_k v_k Q_k with v_k the k-th column of Psi
};

// solves P = Psi(Q_1..Q_r) exactly; rejects when no integer-valued solution exists
inline Decomposition decompose_through(const PolyMap& P, const PolyMap& Psi) {
  if (P.t() != Psi.t()) throw ValidationError("P and Psi must have the same number of components");
  auto M = linear_matrix(Psi);
  std::size_t t = P.t(), r = Psi.nvars;
  // reduce [M | I] to find a left inverse on the column space
  std::vector<std::vector<Rat>> A = M;
  std::vector<std::vector<Rat>> E(t, std::vector<Rat>(t, 0));
  for (std::size_t i = 0; i < t; ++i) E[i][i] = 1;
  std::size_t row = 0;
  std::vector<std::size_t> piv;
  for (std::size_t c = 0; c < r && row < t; ++c) {
    std::size_t s = row;
    while (s < t && A[s][c] == 0) ++s;
    if (s == t) continue;
    std::swap(A[s], A[row]);
    std::swap(E[s], E[row]);
    Rat iv = 1 / A[row][c];
    for (auto& v : A[row]) v *= iv;
    for (auto& v : E[row]) v *= iv;
    for (std::size_t o = 0; o < t; ++o) {
      if (o == row || A[o][c] == 0) continue;
      Rat f = A[o][c];
      for (std::size_t k = 0; k < r; ++k) A[o][k] -= f * A[row][k];
      for (std::size_t k = 0; k < t; ++k) E[o][k] -= f * E[row][k];
    }
    piv.push_back(c);
    ++row;
  }
  if (piv.size() != r) throw ValidationError("Psi has dependent columns; the decomposition is not unique");
  Decomposition d;
  d.Qs.assign(r, IntPoly(P.nvars));
  for (std::size_t k = 0; k < r; ++k)
    for (std::size_t i = 0; i < t; ++i)
      if (E[k][i] != 0) d.Qs[k] += P.comps[i] * E[k][i];
  for (std::size_t i = 0; i < t; ++i) {
    IntPoly back(P.nvars);
    for (std::size_t k = 0; k < r; ++k)
      if (M[i][k] != 0) back += d.Qs[k] * M[i][k];
    if (!(back == P.comps[i]))
      throw ValidationError("P is not of the form Psi(Q_1, ..., Q_r): component " + std::to_string(i) + " fails");
  }
  for (const auto& q : d.Qs)
    if (!q.is_integral()) throw ValidationError("decomposition needs integer-valued Q_k");
  return d;
}

struct CountReport {
  std::uint64_t lhs_count = 0, rhs_count = 0;
  double lhs = 0, rhs = 0, residual = 0;
  double normalizer = 0;  // p^D
  Decomposition decomposition;
};

inline CountReport verify_asymptotic(const PolyMap& P, const PolyMap& Psi, const SetF& A, unsigned threads = 0,
                                     LinearMethod method = LinearMethod::automatic) {
  CountReport r;
  r.decomposition = decompose_through(P, Psi);
  double p = static_cast<double>(A.field().p());
  r.normalizer = std::pow(p, static_cast<double>(P.nvars));
  r.lhs_count = count_in_set(P, A, threads);
  r.rhs_count = count_linear(Psi, A, method, threads);
  r.lhs = static_cast<double>(r.lhs_count) / r.normalizer;
  r.rhs = static_cast<double>(r.rhs_count) / std::pow(p, static_cast<double>(Psi.nvars));
  r.residual = r.lhs - r.rhs;
  return r;
}

}  // namespace hofa
