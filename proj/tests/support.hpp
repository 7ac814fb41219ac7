// Brute-force oracles shared by the unit tests. Kept deliberately naive.
#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "hofa/modring.hpp"
#include "hofa/polycore.hpp"

namespace oracle {

using hofa::cplx;

inline cplx expi(double num, double den) {
  double a = 2.0 * std::numbers::pi * num / den;
  return {std::cos(a), std::sin(a)};
}

inline bool trial_division_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

// literal 2^s-fold Gowers average, long double accumulation
inline double gowers_literal(const std::vector<cplx>& f, unsigned s) {
  std::size_t p = f.size();
  std::size_t tuples = 1;
  for (unsigned k = 0; k <= s; ++k) tuples *= p;
  std::complex<long double> acc = 0;
  std::vector<std::size_t> t(s + 1, 0);
  for (std::size_t n = 0; n < tuples; ++n) {
    std::size_t r = n;
    for (unsigned k = 0; k <= s; ++k) {
      t[k] = r % p;
      r /= p;
    }
    std::complex<long double> prod = 1;
    for (std::size_t w = 0; w < (std::size_t{1} << s); ++w) {
      std::size_t pt = t[0];
      for (unsigned k = 0; k < s; ++k)
        if ((w >> k) & 1) pt += t[k + 1];
      cplx v = f[pt % p];
      if (__builtin_popcountll(w) & 1) v = std::conj(v);
      prod *= std::complex<long double>(v.real(), v.imag());
    }
    acc += prod;
  }
  long double avg = acc.real() / static_cast<long double>(tuples);
  if (avg < 0) avg = 0;
  return static_cast<double>(std::pow(avg, 1.0L / static_cast<long double>(1u << s)));
}

// max over (a_{s-1},...,a_1) of |E f(x) e_p(sum a_k x^k)| with the first maximizer in lex order
inline std::pair<double, std::vector<std::uint64_t>> bias_literal(const std::vector<cplx>& f, unsigned s) {
  std::size_t p = f.size();
  std::size_t n = 1;
  for (unsigned k = 1; k < s; ++k) n *= p;
  double best = -1;
  std::vector<std::uint64_t> arg;
  for (std::size_t code = 0; code < n; ++code) {
    std::vector<std::uint64_t> a(s - 1);  // a[0] = alpha_{s-1}
    std::size_t r = code;
    for (std::size_t k = s - 1; k-- > 0;) {
      a[k] = r % p;
      r /= p;
    }
    std::complex<long double> acc = 0;
    for (std::size_t x = 0; x < p; ++x) {
      std::uint64_t ph = 0, xp = 1;
      for (std::size_t deg = 1; deg < s; ++deg) {
        xp = xp * x % p;
        ph = (ph + a[s - 1 - deg] * xp) % p;
      }
      cplx v = f[x] * expi(static_cast<double>(ph), static_cast<double>(p));
      acc += std::complex<long double>(v.real(), v.imag());
    }
    double val = static_cast<double>(std::abs(acc) / static_cast<long double>(p));
    if (val > best + 1e-12) {
      best = val;
      arg = a;
    }
  }
  return {best, arg};
}

inline std::vector<hofa::Int> grid_point(std::initializer_list<long> v) {
  std::vector<hofa::Int> r;
  for (long x : v) r.emplace_back(x);
  return r;
}

// integer polynomial evaluation from an explicit lambda, for pointwise comparison on a grid
template <class Fn>
bool agrees_on_grid(const hofa::IntPoly& P, Fn&& fn, long lo, long hi) {
  std::size_t D = P.nvars();
  std::vector<long> pt(D, lo);
  while (true) {
    std::vector<hofa::Int> z;
    for (long v : pt) z.emplace_back(v);
    if (P.eval(z) != hofa::Rat(fn(pt))) return false;
    std::size_t k = 0;
    while (k < D && ++pt[k] > hi) pt[k++] = lo;
    if (k == D) return true;
  }
}

// Lambda_P by exact rational evaluation at every point of F_p^D
inline cplx lambda_literal(const hofa::PolyMap& P, const std::vector<std::vector<cplx>>& fs, std::uint64_t p) {
  std::size_t D = P.nvars;
  std::vector<long> pt(D, 0);
  std::complex<long double> acc = 0;
  std::size_t n = 0;
  while (true) {
    std::vector<hofa::Int> z;
    for (long v : pt) z.emplace_back(v);
    std::complex<long double> prod = 1;
    for (std::size_t i = 0; i < P.t(); ++i) {
      hofa::Rat q = P.comps[i].eval(z);
      hofa::Int r = q.get_num() % hofa::Int(static_cast<unsigned long>(p));
      if (r < 0) r += static_cast<unsigned long>(p);
      cplx v = fs[i][r.get_ui()];
      prod *= std::complex<long double>(v.real(), v.imag());
    }
    acc += prod;
    ++n;
    std::size_t k = 0;
    while (k < D && ++pt[k] >= static_cast<long>(p)) pt[k++] = 0;
    if (k == D) break;
  }
  acc /= static_cast<long double>(n);
  return {static_cast<double>(acc.real()), static_cast<double>(acc.imag())};
}

inline std::uint64_t energy_literal(const std::vector<std::uint64_t>& A, std::uint64_t p) {
  std::uint64_t c = 0;
  for (auto a : A)
    for (auto b : A)
      for (auto x : A)
        for (auto y : A)
          if ((a + b + 2 * p - x - y) % p == 0) ++c;
  return c;
}

}  // namespace oracle
