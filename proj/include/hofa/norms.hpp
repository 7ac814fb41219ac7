// Gowers uniformity norms U^s and polynomial bias norms u^s on F_p.
#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "hofa/modring.hpp"

namespace hofa {

enum class NormMethod { naive, recursive, fourier };

inline std::string to_string(NormMethod m) {
  switch (m) {
    case NormMethod::naive: return "naive";
    case NormMethod::recursive: return "recursive";
    case NormMethod::fourier: return "fourier";
  }
  return "?";
}

inline NormMethod parse_norm_method(const std::string& s) {
  if (s == "naive") return NormMethod::naive;
  if (s == "recursive") return NormMethod::recursive;
  if (s == "fourier") return NormMethod::fourier;
  throw ValidationError("unknown norm method '" + s + "'");
}

struct NormReport {
  double value = 0;
  NormMethod method = NormMethod::naive;
  unsigned degree = 0;
  double cost_ops = 0;
  std::vector<std::uint64_t> argmax;  // bias norm only: (alpha_{s-1}, ..., alpha_1)
};

inline constexpr double kNaiveCostLimit = 1e9;

namespace detail {

// the 2^s-fold average is real and nonnegative up to rounding
inline double root_of_average(cplx avg, unsigned s) {
  double re = avg.real();
  if (re < -1e-9) throw std::runtime_error("Gowers average is negative beyond rounding: " + std::to_string(re));
  if (re < 0) re = 0;
  return std::pow(re, 1.0 / std::ldexp(1.0, static_cast<int>(s)));
}

// E_{x,h_1..h_s} prod_w C^{|w|} f(x + w.h), summed literally over all tuples
inline cplx naive_average(const FieldFn& f, unsigned s) {
  std::size_t p = f.p();
  const auto& v = f.values();
  std::size_t W = std::size_t{1} << s;
  std::vector<std::size_t> h(s, 0), off(W, 0);
  std::vector<unsigned> parity(W);
  for (std::size_t w = 0; w < W; ++w) parity[w] = static_cast<unsigned>(__builtin_popcountll(w) & 1);
  std::size_t tuples = 1;
  for (unsigned k = 0; k < s; ++k) tuples *= p;
  std::vector<cplx> per_h(tuples);
  for (std::size_t t = 0; t < tuples; ++t) {
    for (std::size_t w = 0; w < W; ++w) {
      std::size_t o = 0;
      for (unsigned k = 0; k < s; ++k)
        if ((w >> k) & 1) o += h[k];
      off[w] = o % p;
    }
    KahanC acc;
    for (std::size_t x = 0; x < p; ++x) {
      cplx prod = 1.0;
      for (std::size_t w = 0; w < W; ++w) {
        std::size_t idx = x + off[w];
        if (idx >= p) idx -= p;
        prod *= parity[w] ? std::conj(v[idx]) : v[idx];
      }
      acc.add(prod);
    }
    per_h[t] = acc.sum;
    for (unsigned k = 0; k < s; ++k) {
      if (++h[k] < p) break;
      h[k] = 0;
    }
  }
  return pairwise_sum(per_h) / std::pow(static_cast<double>(p), static_cast<double>(s + 1));
}

inline double u2_fourth_moment(const FieldFn& f) {
  auto fh = dft(f);
  std::vector<double> q(f.p());
  for (std::size_t k = 0; k < f.p(); ++k) {
    double a = std::norm(fh[k]);
    q[k] = a * a;
  }
  return pairwise_sum(q);
}

// ||f||_{U^s}^{2^s}
inline double recursive_power(const FieldFn& f, unsigned s, unsigned threads) {
  if (s == 1) return std::norm(f.mean());
  if (s == 2) return u2_fourth_moment(f);
  std::size_t p = f.p();
  std::vector<double> per_h(p);
  parallel_chunks(p, threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t h = lo; h < hi; ++h) {
      double v = recursive_power(f.derivative(h), s - 1, 1);
      per_h[h] = v;
    }
  });
  return pairwise_sum(per_h) / static_cast<double>(p);
}

}  // namespace detail

inline NormReport gowers_norm(const FieldFn& f, unsigned s, NormMethod method, unsigned threads = 0) {
  if (s == 0) throw ValidationError("Gowers norm degree must be at least 1");
  NormReport r;
  r.method = method;
  r.degree = s;
  double p = static_cast<double>(f.p());
  switch (method) {
    case NormMethod::naive: {
      r.cost_ops = std::pow(p, s + 1.0) * std::ldexp(1.0, static_cast<int>(s));
      if (std::pow(p, s + 1.0) > kNaiveCostLimit)
        throw CostError("naive Gowers norm needs " + std::to_string(std::pow(p, s + 1.0)) +
                        " inner evaluations (limit 1e9)");
      r.value = detail::root_of_average(detail::naive_average(f, s), s);
      break;
    }
    case NormMethod::fourier: {
      if (s > 2) throw ValidationError("fourier method computes U^1 and U^2 only; use recursive for s >= 3");
      r.cost_ops = p * std::log2(p);
      double pw = s == 1 ? std::norm(f.mean()) : detail::u2_fourth_moment(f);
      r.value = detail::root_of_average(cplx(pw, 0), s);
      break;
    }
    case NormMethod::recursive: {
      r.cost_ops = (s <= 2 ? 1.0 : std::pow(p, s - 2.0)) * p * std::log2(p);
      double pw = detail::recursive_power(f, s, resolve_threads(threads));
      r.value = detail::root_of_average(cplx(pw, 0), s);
      break;
    }
  }
  return r;
}

inline NormReport u2_via_fourier(const FieldFn& f) { return gowers_norm(f, 2, NormMethod::fourier); }

// max over alpha in F_p^{s-1} of |E_x f(x) e_p(alpha_{s-1} x^{s-1} + ... + alpha_1 x)|,
// ties resolved to the lexicographically smallest (alpha_{s-1}, ..., alpha_1)
inline NormReport bias_norm(const FieldFn& f, unsigned s, unsigned threads = 0) {
  if (s == 0) throw ValidationError("bias norm degree must be at least 1");
  NormReport r;
  r.method = NormMethod::fourier;
  r.degree = s;
  std::uint64_t p = f.p();
  double pd = static_cast<double>(p);
  if (s == 1) {
    r.value = std::abs(f.mean());
    r.cost_ops = pd;
    return r;
  }
  double outer_d = std::pow(pd, s - 2.0);
  r.cost_ops = outer_d * pd;
  if (r.cost_ops > kNaiveCostLimit) throw CostError("bias norm cost exceeds 1e9 evaluations");
  std::size_t outer = static_cast<std::size_t>(outer_d + 0.5);
  unsigned hi_deg = s - 1;  // alpha indices 2..s-1 enumerated, alpha_1 through the DFT
  PrimeField F = f.field();
  auto tab = character_table(p);
  // x^k mod p tables
  std::vector<std::vector<std::uint64_t>> xp(hi_deg + 1, std::vector<std::uint64_t>(p));
  for (std::uint64_t x = 0; x < p; ++x) {
    std::uint64_t v = 1;
    for (unsigned k = 0; k <= hi_deg; ++k) {
      xp[k][x] = v;
      v = mulmod(v, x, p);
    }
  }
  struct Best {
    double val = -1;
    std::vector<std::uint64_t> arg;
  };
  unsigned nt = resolve_threads(threads);
  std::vector<Best> bests(nt);
  // chunks are contiguous in enumeration order, so reducing chunk winners in order keeps lex ties
  std::size_t step = (outer + nt - 1) / nt;
  parallel_chunks(nt, nt, [&](std::size_t tlo, std::size_t thi) {
    for (std::size_t t = tlo; t < thi; ++t) {
      std::size_t lo = t * step, hi = std::min(outer, lo + step);
      Best b;
      for (std::size_t o = lo; o < hi; ++o) {
        // o encodes (alpha_{s-1}, ..., alpha_2) with alpha_{s-1} most significant
        std::vector<std::uint64_t> alpha(hi_deg + 1, 0);
        std::size_t rem = o;
        for (unsigned k = 2; k <= hi_deg; ++k) {
          alpha[k] = rem % p;
          rem /= p;
        }
        std::vector<cplx> g(p);
        for (std::uint64_t x = 0; x < p; ++x) {
          std::uint64_t ph = 0;
          for (unsigned k = 2; k <= hi_deg; ++k) ph = (ph + mulmod(alpha[k], xp[k][x], p)) % p;
          g[x] = f[x] * tab[ph];
        }
        auto gh = dft(FieldFn(F, std::move(g)));
        // E g e_p(alpha_1 x) = gh(-alpha_1)
        for (std::uint64_t a1 = 0; a1 < p; ++a1) {
          double v = std::abs(gh[(p - a1) % p]);
          if (v > b.val + 1e-12) {
            b.val = v;
            b.arg.assign(hi_deg, 0);
            for (unsigned k = hi_deg; k >= 2; --k) b.arg[hi_deg - k] = alpha[k];
            b.arg[hi_deg - 1] = a1;
          }
        }
      }
      bests[t] = std::move(b);
    }
  });
  Best win;
  for (auto& b : bests) {
    if (b.val < 0) continue;
    if (b.val > win.val + 1e-12 || (std::abs(b.val - win.val) <= 1e-12 && b.arg < win.arg)) win = b;
  }
  r.value = win.val;
  r.argmax = win.arg;
  return r;
}

}  // namespace hofa
