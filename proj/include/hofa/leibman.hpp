// Rational subspaces in canonical RREF, the ladders P_{i,j} / Q_{i,j} of a polynomial map,
// the filtration condition and the power spans of linear systems.
#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "hofa/polycore.hpp"

namespace hofa {

using RatVec = std::vector<Rat>;

inline RatVec hadamard(const RatVec& a, const RatVec& b) {
  RatVec r(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) r[k] = a[k] * b[k];
  return r;
}

inline bool is_zero_vec(const RatVec& v) {
  return std::all_of(v.begin(), v.end(), [](const Rat& x) { return x == 0; });
}

// smallest integer multiple with coprime entries and positive leading entry
inline std::vector<Int> primitive_integer(const RatVec& v) {
  Int l = 1;
  for (const auto& x : v)
    if (x != 0) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den().get_mpz_t());
  std::vector<Int> out(v.size());
  Int g = 0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    Rat s = v[k] * Rat(l);
    out[k] = s.get_num();
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), out[k].get_mpz_t());
  }
  if (g == 0) return out;
  int sign = 1;
  for (const auto& x : out)
    if (x != 0) {
      sign = x < 0 ? -1 : 1;
      break;
    }
  for (auto& x : out) x = x / g * sign;
  return out;
}

inline RatVec to_ratvec(const std::vector<long>& v) {
  RatVec r;
  for (long x : v) r.emplace_back(x);
  return r;
}

inline std::string vec_string(const RatVec& v) {
  std::string s = "(";
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + v[k].get_str();
  return s + ")";
}

class RatSubspace {
 public:
  RatSubspace() = default;
  explicit RatSubspace(std::size_t t) : t_(t) {}

  static RatSubspace span(std::size_t t, const std::vector<RatVec>& gens) {
    RatSubspace s(t);
    for (const auto& g : gens) s.insert(g);
    return s;
  }
  static RatSubspace full(std::size_t t) {
    RatSubspace s(t);
    for (std::size_t k = 0; k < t; ++k) {
      RatVec e(t, 0);
      e[k] = 1;
      s.insert(e);
    }
    return s;
  }

  std::size_t ambient() const { return t_; }
  std::size_t dim() const { return rows_.size(); }
  bool is_full() const { return rows_.size() == t_; }
  bool is_zero() const { return rows_.empty(); }
  const std::vector<RatVec>& rows() const { return rows_; }
  const std::vector<std::size_t>& pivots() const { return piv_; }

  RatVec reduce(RatVec v) const {
    check(v);
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      const Rat f = v[piv_[r]];
      if (f == 0) continue;
      for (std::size_t k = piv_[r]; k < t_; ++k) v[k] -= f * rows_[r][k];
    }
    return v;
  }

  bool contains(const RatVec& v) const { return is_zero_vec(reduce(v)); }

  // returns true when v enlarged the space
  bool insert(const RatVec& v) {
    if (is_full()) return false;
    RatVec w = reduce(v);
    std::size_t pc = 0;
    while (pc < t_ && w[pc] == 0) ++pc;
    if (pc == t_) return false;
    Rat inv = 1 / w[pc];
    for (std::size_t k = pc; k < t_; ++k) w[k] *= inv;
    for (auto& row : rows_) {
      const Rat f = row[pc];
      if (f == 0) continue;
      for (std::size_t k = pc; k < t_; ++k) row[k] -= f * w[k];
    }
    auto pos = std::lower_bound(piv_.begin(), piv_.end(), pc) - piv_.begin();
    piv_.insert(piv_.begin() + pos, pc);
    rows_.insert(rows_.begin() + pos, std::move(w));
    return true;
  }

  bool subset_of(const RatSubspace& o) const {
    return std::all_of(rows_.begin(), rows_.end(), [&](const RatVec& r) { return o.contains(r); });
  }
  bool operator==(const RatSubspace& o) const { return t_ == o.t_ && rows_ == o.rows_; }

  friend RatSubspace operator+(RatSubspace a, const RatSubspace& b) {
    for (const auto& r : b.rows_) a.insert(r);
    return a;
  }

  // span of coordinatewise products of basis vectors
  friend RatSubspace product(const RatSubspace& a, const RatSubspace& b) {
    RatSubspace s(a.t_);
    for (const auto& u : a.rows_)
      for (const auto& v : b.rows_) {
        s.insert(hadamard(u, v));
        if (s.is_full()) return s;
      }
    return s;
  }

  RatSubspace orthogonal_complement() const {
    RatSubspace s(t_);
    std::vector<bool> is_piv(t_, false);
    for (auto c : piv_) is_piv[c] = true;
    for (std::size_t f = 0; f < t_; ++f) {
      if (is_piv[f]) continue;
      RatVec v(t_, 0);
      v[f] = 1;
      for (std::size_t r = 0; r < rows_.size(); ++r) v[piv_[r]] = -rows_[r][f];
      s.insert(v);
    }
    return s;
  }

  nlohmann::json to_json() const {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : rows_) {
      nlohmann::json row = nlohmann::json::array();
      for (const auto& x : r) row.push_back(rat_string(x));
      rows.push_back(row);
    }
    return rows;
  }
  static RatSubspace from_json(std::size_t t, const nlohmann::json& rows) {
    RatSubspace s(t);
    for (const auto& row : rows) {
      RatVec v;
      for (const auto& x : row) v.push_back(parse_rat(x.get<std::string>()));
      s.insert(v);
    }
    return s;
  }
  std::string str() const {
    if (rows_.empty()) return "0";
    std::string s = "Span{";
    for (std::size_t r = 0; r < rows_.size(); ++r) s += (r ? ", " : "") + vec_string(rows_[r]);
    return s + "}";
  }

 private:
  void check(const RatVec& v) const {
    if (v.size() != t_) throw ValidationError("vector length does not match subspace ambient dimension");
  }
  std::size_t t_ = 0;
  std::vector<RatVec> rows_;
  std::vector<std::size_t> piv_;
};

// coefficient vectors of C(x,m) across the components of a polynomial map, grouped by |m|
inline std::vector<std::vector<RatVec>> coefficient_vectors_by_degree(const std::vector<IntPoly>& comps) {
  std::size_t t = comps.size();
  Terms all;
  for (const auto& c : comps)
    for (const auto& [m, v] : c.terms()) all.emplace(m, 0);
  int dmax = 0;
  for (const auto& [m, v] : all) dmax = std::max<int>(dmax, static_cast<int>(total_degree(m)));
  std::vector<std::vector<RatVec>> out(static_cast<std::size_t>(dmax) + 1);
  for (const auto& [m, v] : all) {
    RatVec vec(t);
    for (std::size_t i = 0; i < t; ++i) vec[i] = comps[i].coeff(m);
    if (!is_zero_vec(vec)) out[total_degree(m)].push_back(std::move(vec));
  }
  return out;
}

struct SpaceLadder {
  PolyMap P;
  unsigned imax = 0, jmax = 0;
  unsigned jtop = 0;  // internal height: beyond it every cell is zero
  std::vector<std::vector<RatSubspace>> Pt, Qt;

  std::size_t t() const { return P.t(); }
  const RatSubspace& p(unsigned i, unsigned j) const { return cell(Pt, i, j); }
  const RatSubspace& q(unsigned i, unsigned j) const { return cell(Qt, i, j); }

 private:
  const RatSubspace& cell(const std::vector<std::vector<RatSubspace>>& tab, unsigned i, unsigned j) const {
    if (i < 1 || i > imax || j < 1) throw ValidationError("ladder cell out of range");
    if (j > jtop) return zero_;
    return tab[i][j];
  }
  RatSubspace zero_;
  friend SpaceLadder build_ladder(const PolyMap&, unsigned, unsigned, bool);
};

// P_{i,j} = Span{ D_k C(P, l) : k >= j, 1 <= l <= i }
// Q_{i,j} = P_{i,j} + sum_{i1+i2=i, j1+j2=j} Q_{i1,j1} . Q_{i2,j2}
inline SpaceLadder build_ladder(const PolyMap& P, unsigned imax, unsigned jmax, bool with_q = true) {
  if (imax < 1 || jmax < 1) throw ValidationError("ladder bounds must be positive");
  SpaceLadder L;
  L.P = P;
  L.imax = imax;
  L.jmax = jmax;
  std::size_t t = P.t();
  L.zero_ = RatSubspace(t);
  int d = std::max(P.degree(), 0);
  L.jtop = std::max<unsigned>(jmax, imax * static_cast<unsigned>(d));
  unsigned J = L.jtop;

  std::vector<std::vector<IntPoly>> pw(t);
  for (std::size_t c = 0; c < t; ++c) pw[c] = binomial_powers(P.comps[c], imax);

  L.Pt.assign(imax + 1, std::vector<RatSubspace>(J + 2, RatSubspace(t)));
  for (unsigned i = 1; i <= imax; ++i) {
    std::vector<IntPoly> comps(t);
    for (std::size_t c = 0; c < t; ++c) comps[c] = pw[c][i - 1];
    auto byd = coefficient_vectors_by_degree(comps);
    for (unsigned j = J; j >= 1; --j) {
      RatSubspace s = L.Pt[i][j + 1] + L.Pt[i - 1][j];
      if (j < byd.size())
        for (const auto& v : byd[j]) s.insert(v);
      L.Pt[i][j] = std::move(s);
    }
  }
  if (with_q) {
    L.Qt.assign(imax + 1, std::vector<RatSubspace>(J + 2, RatSubspace(t)));
    for (unsigned i = 1; i <= imax; ++i)
      for (unsigned j = 1; j <= J; ++j) {
        RatSubspace s = L.Pt[i][j];
        for (unsigned i1 = 1; i1 < i && !s.is_full(); ++i1)
          for (unsigned j1 = 1; j1 < j && !s.is_full(); ++j1) {
            const auto& a = L.Qt[i1][j1];
            const auto& b = L.Qt[i - i1][j - j1];
            if (a.is_zero() || b.is_zero()) continue;
            s = s + product(a, b);
          }
        L.Qt[i][j] = std::move(s);
      }
  }
  return L;
}

inline RatSubspace p_space(const PolyMap& P, unsigned i, unsigned j) {
  if (i < 1 || j < 1) throw ValidationError("p_space needs i, j >= 1");
  return build_ladder(P, i, j, false).p(i, j);
}

inline RatSubspace q_space(const SpaceLadder& L, unsigned i, unsigned j) { return L.q(i, j); }

// default bounds: imax = s*d + 2, jmax = imax*d
inline std::pair<unsigned, unsigned> default_ladder_bounds(const PolyMap& P, unsigned s = 1) {
  unsigned d = static_cast<unsigned>(std::max(P.degree(), 1));
  unsigned imax = s * d + 2;
  return {imax, imax * d};
}

struct FiltrationWitness {
  unsigned i1, j1, i2, j2;
  RatVec v, w, vw;
};

struct FiltrationResult {
  bool pass = true;
  unsigned imax = 0, jmax = 0;
  std::optional<FiltrationWitness> witness;
  std::size_t failures = 0;  // number of failing basis products in the checked range
};

// checks P_{i1,j1} . P_{i2,j2} within P_{i1+i2, j1+j2} for all i1+i2 <= imax, j1+j2 <= jmax;
// canonical order: target cell (I, J) ascending, then (i1, j1), then basis rows
inline FiltrationResult filtration_condition(const SpaceLadder& L, unsigned imax, unsigned jmax) {
  if (imax > L.imax || jmax > L.jmax) throw ValidationError("filtration check exceeds ladder bounds");
  FiltrationResult res;
  res.imax = imax;
  res.jmax = jmax;
  for (unsigned I = 2; I <= imax; ++I)
    for (unsigned J = 2; J <= jmax; ++J) {
      const auto& target = L.p(I, J);
      for (unsigned i1 = 1; i1 < I; ++i1)
        for (unsigned j1 = 1; j1 < J; ++j1) {
          const auto& a = L.p(i1, j1);
          const auto& b = L.p(I - i1, J - j1);
          for (const auto& v : a.rows())
            for (const auto& w : b.rows()) {
              RatVec vw = hadamard(v, w);
              if (target.contains(vw)) continue;
              ++res.failures;
              if (!res.witness) res.witness = FiltrationWitness{i1, j1, I - i1, J - j1, v, w, vw};
              res.pass = false;
            }
        }
    }
  return res;
}

inline FiltrationResult filtration_condition(const PolyMap& P, unsigned imax, unsigned jmax) {
  return filtration_condition(build_ladder(P, imax, jmax, false), imax, jmax);
}

// P = Q on every cell up to the bounds
inline bool p_equals_q(const SpaceLadder& L) {
  for (unsigned i = 1; i <= L.imax; ++i)
    for (unsigned j = 1; j <= L.jmax; ++j)
      if (!(L.p(i, j) == L.q(i, j))) return false;
  return true;
}

// ---- linear systems ----

// Psi^{[i]} = span of i-th coordinatewise powers of values of Psi
inline RatSubspace psi_power_space(const PolyMap& Psi, unsigned i) {
  if (!Psi.is_linear()) throw ValidationError("linear system expected");
  if (i < 1) throw ValidationError("power index must be at least 1");
  std::vector<Terms> mono;
  Terms all;
  for (const auto& c : Psi.comps) {
    mono.push_back(from_binomial(power_of(c, i)));
    for (const auto& [m, v] : mono.back()) all.emplace(m, 0);
  }
  RatSubspace s(Psi.t());
  for (const auto& [m, z] : all) {
    RatVec v(Psi.t());
    for (std::size_t k = 0; k < Psi.t(); ++k) {
      auto it = mono[k].find(m);
      v[k] = it == mono[k].end() ? Rat(0) : it->second;
    }
    s.insert(v);
  }
  return s;
}

// Psi^{[j]} + ... + Psi^{[i]} for j <= i, zero otherwise
inline RatSubspace linear_psi_spaces(const PolyMap& Psi, unsigned i, unsigned j) {
  RatSubspace s(Psi.t());
  for (unsigned l = j; l <= i; ++l) s = s + psi_power_space(Psi, l);
  return s;
}

struct FlagResult {
  bool pass = true;
  unsigned failing_index = 0;  // first i with Psi^{[i]} not inside Psi^{[i+1]}
};

inline FlagResult flag_condition(const PolyMap& Psi, unsigned imax) {
  FlagResult r;
  RatSubspace prev = psi_power_space(Psi, 1);
  for (unsigned i = 1; i < imax; ++i) {
    RatSubspace next = psi_power_space(Psi, i + 1);
    if (!prev.subset_of(next)) {
      r.pass = false;
      r.failing_index = i;
      return r;
    }
    prev = std::move(next);
  }
  return r;
}

// ---- table dump and golden diff ----

inline nlohmann::json ladder_to_json(const SpaceLadder& L, const std::string& progression_text) {
  nlohmann::json j;
  j["progression"] = progression_text;
  j["imax"] = L.imax;
  j["jmax"] = L.jmax;
  nlohmann::json cells = nlohmann::json::array();
  for (unsigned i = 1; i <= L.imax; ++i)
    for (unsigned jj = 1; jj <= L.jmax; ++jj)
      cells.push_back({{"i", i}, {"j", jj}, {"basis_rows", L.p(i, jj).to_json()}});
  j["cells"] = cells;
  return j;
}

struct CellDiff {
  unsigned i, j;
  std::string expected, computed;
};

// compares every golden cell present in the file; cells outside the ladder are reported
inline std::vector<CellDiff> diff_against_golden(const SpaceLadder& L, const nlohmann::json& golden) {
  std::vector<CellDiff> out;
  for (const auto& c : golden.at("cells")) {
    unsigned i = c.at("i"), j = c.at("j");
    RatSubspace want = RatSubspace::from_json(L.t(), c.at("basis_rows"));
    if (i < 1 || i > L.imax || j < 1) {
      out.push_back({i, j, want.str(), "outside ladder bounds"});
      continue;
    }
    const auto& got = L.p(i, j);
    if (!(got == want)) out.push_back({i, j, want.str(), got.str()});
  }
  return out;
}

}  // namespace hofa
