// Algebraic relations sum_i Q_i(P_i) = 0 up to a degree cap, independence degrees per index,
// and the Weyl-phase witnesses built from a relation.
#pragma once

#include <string>
#include <vector>

#include "hofa/counting.hpp"
#include "hofa/leibman.hpp"
#include "hofa/norms.hpp"

namespace hofa {

inline constexpr double kMaxRelationUnknowns = 1e6;

struct Relation {
  // coeffs[i][k-1] is the coefficient of y^k in Q_i
  std::vector<std::vector<Int>> coeffs;
  std::vector<IntPoly> Qs;  // univariate, binomial basis
  std::vector<int> degs;    // -1 for Q_i = 0

  bool is_zero() const {
    for (const auto& r : coeffs)
      for (const auto& c : r)
        if (c != 0) return false;
    return true;
  }
  std::string render(std::size_t i) const {
    Terms T;
    for (std::size_t k = 0; k < coeffs[i].size(); ++k)
      if (coeffs[i][k] != 0) T[{static_cast<unsigned>(k + 1)}] = Rat(coeffs[i][k]);
    return render_monomial(T, {"y"});
  }
};

inline Relation make_relation(std::vector<std::vector<Int>> coeffs) {
  Relation r;
  r.coeffs = std::move(coeffs);
  for (const auto& row : r.coeffs) {
    Terms T;
    int deg = -1;
    for (std::size_t k = 0; k < row.size(); ++k)
      if (row[k] != 0) {
        T[{static_cast<unsigned>(k + 1)}] = Rat(row[k]);
        deg = static_cast<int>(k + 1);
      }
    r.Qs.push_back(to_binomial(1, T));
    r.degs.push_back(deg);
  }
  return r;
}

// sum_i Q_i(P_i) as an exact polynomial
inline IntPoly relation_residual(const PolyMap& P, const Relation& r) {
  IntPoly s(P.nvars);
  for (std::size_t i = 0; i < P.t(); ++i)
    if (!r.Qs[i].is_zero()) s += compose(r.Qs[i], P.comps[i]);
  return s;
}

namespace detail {

// row echelon form by fraction-free elimination; returns pivot columns
inline std::vector<std::size_t> bareiss_echelon(std::vector<std::vector<Int>>& M, std::size_t ncols) {
  std::vector<std::size_t> piv;
  Int prev = 1;
  std::size_t r = 0, nrows = M.size();
  for (std::size_t c = 0; c < ncols && r < nrows; ++c) {
    std::size_t s = r;
    while (s < nrows && M[s][c] == 0) ++s;
    if (s == nrows) continue;
    std::swap(M[s], M[r]);
    for (std::size_t i = r + 1; i < nrows; ++i) {
      for (std::size_t k = c + 1; k < ncols; ++k) {
        Int v = M[r][c] * M[i][k] - M[i][c] * M[r][k];
        mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
        M[i][k] = v;
      }
      M[i][c] = 0;
    }
    prev = M[r][c];
    piv.push_back(c);
    ++r;
  }
  M.resize(r);
  return piv;
}

// null space basis of an integer matrix, canonical RREF over Q
inline RatSubspace integer_null_space(std::vector<std::vector<Int>> M, std::size_t ncols) {
  auto piv = bareiss_echelon(M, ncols);
  std::vector<bool> is_piv(ncols, false);
  for (auto c : piv) is_piv[c] = true;
  RatSubspace ns(ncols);
  for (std::size_t f = 0; f < ncols; ++f) {
    if (is_piv[f]) continue;
    RatVec x(ncols, 0);
    x[f] = 1;
    for (std::size_t r = piv.size(); r-- > 0;) {
      Rat acc = 0;
      for (std::size_t k = piv[r] + 1; k < ncols; ++k)
        if (x[k] != 0 && M[r][k] != 0) acc += Rat(M[r][k]) * x[k];
      x[piv[r]] = -acc / Rat(M[r][piv[r]]);
    }
    ns.insert(x);
  }
  return ns;
}

}  // namespace detail

struct RelationSystem {
  std::size_t rows = 0, cols = 0;
  std::vector<std::vector<Int>> matrix;  // integer rows after clearing denominators
};

// column (i, k) holds the binomial-basis coefficients of P_i^k; columns ordered i*cap + (k-1)
inline RelationSystem relation_matrix(const PolyMap& P, unsigned cap) {
  if (cap < 1) throw ValidationError("relation degree cap must be at least 1");
  double unknowns = static_cast<double>(P.t()) * cap;
  if (unknowns > kMaxRelationUnknowns) throw CostError("relation system has more than 1e6 unknowns");
  std::size_t t = P.t(), n = t * cap;
  std::vector<IntPoly> cols;
  cols.reserve(n);
  std::map<MultiIndex, std::size_t, GradedLex> row_of;
  for (std::size_t i = 0; i < t; ++i) {
    IntPoly pw = IntPoly::constant(P.nvars, 1);
    for (unsigned k = 1; k <= cap; ++k) {
      pw = pw * P.comps[i];
      for (const auto& [m, c] : pw.terms()) row_of.emplace(m, 0);
      cols.push_back(pw);
    }
  }
  std::size_t nr = 0;
  for (auto& [m, idx] : row_of) idx = nr++;
  std::vector<RatVec> rat(nr, RatVec(n, 0));
  for (std::size_t c = 0; c < n; ++c)
    for (const auto& [m, v] : cols[c].terms()) rat[row_of[m]][c] = v;
  RelationSystem S;
  S.rows = nr;
  S.cols = n;
  for (auto& row : rat) {
    auto ints = primitive_integer(row);
    S.matrix.push_back(std::move(ints));
  }
  return S;
}

// reduced basis of all relations with deg Q_i <= cap and zero constant terms
inline std::vector<Relation> find_relations(const PolyMap& P, unsigned cap) {
  auto S = relation_matrix(P, cap);
  auto ns = detail::integer_null_space(S.matrix, S.cols);
  std::vector<Relation> out;
  for (const auto& row : ns.rows()) {
    auto ints = primitive_integer(row);
    std::vector<std::vector<Int>> coeffs(P.t(), std::vector<Int>(cap));
    for (std::size_t i = 0; i < P.t(); ++i)
      for (unsigned k = 0; k < cap; ++k) coeffs[i][k] = ints[i * cap + k];
    Relation r = make_relation(std::move(coeffs));
    if (!relation_residual(P, r).is_zero())
      throw std::logic_error("extracted relation fails symbolic verification");
    out.push_back(std::move(r));
  }
  return out;
}

inline unsigned default_relation_cap(const PolyMap& P) { return 2u * static_cast<unsigned>(std::max(P.degree(), 1)); }

struct IndependenceReport {
  std::size_t index = 0;
  unsigned cap = 0;
  unsigned max_degree = 0;   // m_i; 0 when Q_i vanishes in every relation
  unsigned lower_bound = 0;  // complexity at i is at least this
};

// largest d <= cap such that some relation has deg Q_i = d
inline IndependenceReport independence_report(const std::vector<Relation>& basis, std::size_t i, unsigned cap) {
  IndependenceReport r;
  r.index = i;
  r.cap = cap;
  for (const auto& rel : basis) {
    if (i >= rel.degs.size()) throw ValidationError("index out of range");
    if (rel.degs[i] > 0) r.max_degree = std::max(r.max_degree, static_cast<unsigned>(rel.degs[i]));
  }
  r.lower_bound = r.max_degree;
  return r;
}

inline IndependenceReport independence_report(const PolyMap& P, std::size_t i, unsigned cap) {
  if (i >= P.t()) throw ValidationError("index out of range");
  return independence_report(find_relations(P, cap), i, cap);
}

struct WitnessReport {
  std::vector<FieldFn> fs;
  cplx lambda;
  std::size_t slot = 0;
  unsigned norm_degree = 0;
  double slot_norm = 0;
};

// f_j = e_p(Q_j); Lambda_P(f) = 1 because sum_j Q_j(P_j) vanishes identically.
// The slot defaults to the first index of largest deg Q_i; the norm is U^{deg Q_slot}.
inline WitnessReport weyl_witness(const PolyMap& P, const Relation& rel, const PrimeField& F, unsigned threads = 0,
                                  int slot = -1) {
  if (rel.is_zero()) throw ValidationError("the zero relation has no witness");
  if (rel.Qs.size() != P.t()) throw ValidationError("relation arity does not match the progression");
  WitnessReport w;
  for (const auto& Q : rel.Qs) w.fs.push_back(phase_fn(F, Q));
  w.lambda = lambda_P(P, w.fs, threads);
  if (std::abs(w.lambda - cplx(1, 0)) > 1e-9)
    throw std::logic_error("witness average differs from 1 by " + std::to_string(std::abs(w.lambda - cplx(1, 0))));
  if (slot < 0) {
    int best = 0;
    for (std::size_t i = 0; i < rel.degs.size(); ++i)
      if (rel.degs[i] > best) {
        best = rel.degs[i];
        slot = static_cast<int>(i);
      }
  }
  if (slot < 0 || static_cast<std::size_t>(slot) >= P.t()) throw ValidationError("witness slot out of range");
  w.slot = static_cast<std::size_t>(slot);
  w.norm_degree = static_cast<unsigned>(std::max(rel.degs[w.slot], 1));
  w.slot_norm = gowers_norm(w.fs[w.slot], w.norm_degree, NormMethod::recursive, threads).value;
  return w;
}

inline nlohmann::json relations_to_json(const PolyMap& P, const std::vector<Relation>& basis, unsigned cap) {
  nlohmann::json j;
  nlohmann::json rels = nlohmann::json::array();
  for (const auto& r : basis) {
    nlohmann::json q = nlohmann::json::array(), c = nlohmann::json::array();
    for (std::size_t i = 0; i < r.Qs.size(); ++i) {
      q.push_back(r.render(i));
      nlohmann::json row = nlohmann::json::array();
      for (const auto& v : r.coeffs[i]) row.push_back(v.get_str());
      c.push_back(row);
    }
    rels.push_back({{"Q", q}, {"coefficients", c}, {"degrees", r.degs}});
  }
  j["relations"] = rels;
  nlohmann::json deg = nlohmann::json::array();
  for (std::size_t i = 0; i < P.t(); ++i) deg.push_back(independence_report(basis, i, cap).max_degree);
  j["per_index_degrees"] = deg;
  j["cap"] = cap;
  auto S = relation_matrix(P, cap);
  j["matrix_dims"] = {S.rows, S.cols};
  return j;
}

}  // namespace hofa
