// Prime fields, complex function tables on F_p, additive characters and the DFT.
#pragma once

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "hofa/polycore.hpp"

namespace hofa {

using cplx = std::complex<double>;

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

inline std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

// deterministic Miller-Rabin for 64-bit inputs
inline bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t q : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % q == 0) return n == q;
  }
  std::uint64_t d = n - 1;
  int r = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++r;
  }
  for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    std::uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < r; ++i) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

class PrimeField {
 public:
  explicit PrimeField(std::uint64_t p) : p_(p) {
    if (p < 3 || !is_prime_u64(p)) throw ValidationError("modulus " + std::to_string(p) + " is not a prime >= 3");
  }
  std::uint64_t p() const { return p_; }
  std::uint64_t reduce(std::int64_t x) const {
    std::int64_t r = x % static_cast<std::int64_t>(p_);
    return static_cast<std::uint64_t>(r < 0 ? r + static_cast<std::int64_t>(p_) : r);
  }
  std::uint64_t reduce(const Int& x) const {
    Int r;
    mpz_fdiv_r_ui(r.get_mpz_t(), x.get_mpz_t(), p_);
    return r.get_ui();
  }
  std::uint64_t reduce(const Rat& q) const {
    std::uint64_t d = reduce(q.get_den());
    if (d == 0) throw ValidationError("denominator " + q.get_den().get_str() + " is divisible by p");
    return mulmod(reduce(q.get_num()), inv(d), p_);
  }
  std::uint64_t inv(std::uint64_t a) const { return powmod(a, p_ - 2, p_); }
  bool operator==(const PrimeField& o) const { return p_ == o.p_; }

 private:
  std::uint64_t p_;
};

inline cplx e_q(std::uint64_t x, std::uint64_t q) {
  double a = 2.0 * std::numbers::pi * static_cast<double>(x % q) / static_cast<double>(q);
  return {std::cos(a), std::sin(a)};
}

inline cplx e_p(const PrimeField& F, std::uint64_t x) { return e_q(x, F.p()); }

// table of e_p(k) for k = 0..p-1
inline std::vector<cplx> character_table(std::uint64_t q) {
  std::vector<cplx> t(q);
  for (std::uint64_t k = 0; k < q; ++k) t[k] = e_q(k, q);
  return t;
}

// ---- deterministic summation ----

template <class T>
T pairwise_sum(std::span<const T> v) {
  if (v.size() <= 32) {
    T s{};
    for (const auto& a : v) s += a;
    return s;
  }
  std::size_t h = v.size() / 2;
  return pairwise_sum(v.subspan(0, h)) + pairwise_sum(v.subspan(h));
}

template <class T>
T pairwise_sum(const std::vector<T>& v) {
  return pairwise_sum(std::span<const T>(v.data(), v.size()));
}

struct KahanC {
  cplx sum{0, 0}, comp{0, 0};
  void add(cplx x) {
    double yr = x.real() - comp.real(), yi = x.imag() - comp.imag();
    double tr = sum.real() + yr, ti = sum.imag() + yi;
    comp = {(tr - sum.real()) - yr, (ti - sum.imag()) - yi};
    sum = {tr, ti};
  }
};

// thread count from an explicit request, else GF_THREADS, else hardware
inline unsigned resolve_threads(unsigned requested = 0) {
  if (requested) return requested;
  if (const char* env = std::getenv("GF_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return static_cast<unsigned>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

// runs body(lo, hi) on contiguous chunks of [0, n); chunking does not affect results
template <class Body>
void parallel_chunks(std::size_t n, unsigned threads, Body&& body) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (threads == 1) {
    body(std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  std::size_t step = (n + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    std::size_t lo = t * step, hi = std::min(n, lo + step);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] { body(lo, hi); });
  }
  for (auto& th : pool) th.join();
}

// ---- function tables ----

class FieldFn {
 public:
  FieldFn(PrimeField F, std::vector<cplx> values, bool bounded = false)
      : F_(F), v_(std::make_shared<const std::vector<cplx>>(std::move(values))), bounded_(bounded) {
    if (v_->size() != F_.p()) throw ValidationError("FieldFn needs exactly p values");
    if (bounded_)
      for (const auto& z : *v_)
        if (std::abs(z) > 1.0 + 1e-12) throw ValidationError("FieldFn marked 1-bounded has |value| > 1");
  }
  static FieldFn constant(PrimeField F, cplx c = 1.0) {
    return FieldFn(F, std::vector<cplx>(F.p(), c), std::abs(c) <= 1.0);
  }

  const PrimeField& field() const { return F_; }
  std::uint64_t p() const { return F_.p(); }
  const std::vector<cplx>& values() const { return *v_; }
  cplx operator[](std::size_t x) const { return (*v_)[x]; }
  bool bounded_hint() const { return bounded_; }

  cplx mean() const { return pairwise_sum(*v_) / static_cast<double>(p()); }

  FieldFn conj() const {
    std::vector<cplx> w(v_->begin(), v_->end());
    for (auto& z : w) z = std::conj(z);
    return FieldFn(F_, std::move(w), bounded_);
  }
  FieldFn operator*(const FieldFn& o) const {
    std::vector<cplx> w(p());
    for (std::size_t x = 0; x < p(); ++x) w[x] = (*v_)[x] * o[x];
    return FieldFn(F_, std::move(w), bounded_ && o.bounded_);
  }
  // x -> f(x + h) * conj(f(x))
  FieldFn derivative(std::uint64_t h) const {
    std::vector<cplx> w(p());
    std::size_t n = p();
    h %= n;
    for (std::size_t x = 0; x < n; ++x) {
      std::size_t y = x + h;
      if (y >= n) y -= n;
      w[x] = (*v_)[y] * std::conj((*v_)[x]);
    }
    return FieldFn(F_, std::move(w), bounded_);
  }

 private:
  PrimeField F_;
  std::shared_ptr<const std::vector<cplx>> v_;
  bool bounded_;
};

// ---- DFT ----
// f^(xi) = E_x f(x) e_p(-xi x).  Prime lengths go through FFTW, which reduces them
// internally (Rader / generic codelets); the O(p^2) sum below stays as the oracle.

namespace detail {

struct FftwPlans {
  fftw_plan fwd, bwd;
};

inline std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}

inline const FftwPlans& plans_for(std::size_t n) {
  static std::map<std::size_t, FftwPlans> cache;
  std::lock_guard<std::mutex> lock(fftw_mutex());
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  auto* a = fftw_alloc_complex(n);
  auto* b = fftw_alloc_complex(n);
  FftwPlans pl{fftw_plan_dft_1d(static_cast<int>(n), a, b, FFTW_FORWARD, FFTW_ESTIMATE),
               fftw_plan_dft_1d(static_cast<int>(n), a, b, FFTW_BACKWARD, FFTW_ESTIMATE)};
  fftw_free(a);
  fftw_free(b);
  return cache.emplace(n, pl).first->second;
}

struct FftwBuf {
  explicit FftwBuf(std::size_t n) : n(n), p(fftw_alloc_complex(n)) {}
  ~FftwBuf() { fftw_free(p); }
  FftwBuf(const FftwBuf&) = delete;
  FftwBuf& operator=(const FftwBuf&) = delete;
  std::size_t n;
  fftw_complex* p;
};

inline std::vector<cplx> fft_raw(const std::vector<cplx>& in, bool forward) {
  std::size_t n = in.size();
  const auto& pl = plans_for(n);
  FftwBuf a(n), b(n);
  for (std::size_t k = 0; k < n; ++k) {
    a.p[k][0] = in[k].real();
    a.p[k][1] = in[k].imag();
  }
  fftw_execute_dft(forward ? pl.fwd : pl.bwd, a.p, b.p);
  std::vector<cplx> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = {b.p[k][0], b.p[k][1]};
  return out;
}

}  // namespace detail

inline FieldFn dft(const FieldFn& f) {
  auto out = detail::fft_raw(f.values(), true);
  double inv = 1.0 / static_cast<double>(f.p());
  for (auto& z : out) z *= inv;
  return FieldFn(f.field(), std::move(out));
}

// inverse: f(x) = sum_xi f^(xi) e_p(xi x)
inline FieldFn idft(const FieldFn& fh) { return FieldFn(fh.field(), detail::fft_raw(fh.values(), false)); }

inline FieldFn naive_dft(const FieldFn& f) {
  std::uint64_t p = f.p();
  auto tab = character_table(p);
  std::vector<cplx> out(p);
  for (std::uint64_t xi = 0; xi < p; ++xi) {
    KahanC acc;
    for (std::uint64_t x = 0; x < p; ++x) acc.add(f[x] * tab[(p - mulmod(xi, x, p)) % p]);
    out[xi] = acc.sum / static_cast<double>(p);
  }
  return FieldFn(f.field(), std::move(out));
}

// ---- evaluation of binomial-basis polynomials mod p ----

// C(v, k) mod p for v = 0..p-1, k = 0..kmax (requires kmax < p)
inline std::vector<std::vector<std::uint32_t>> binomial_tables(const PrimeField& F, unsigned kmax) {
  std::uint64_t p = F.p();
  if (kmax >= p) throw ValidationError("polynomial degree must be below p for residue tables");
  std::vector<std::vector<std::uint32_t>> T(kmax + 1, std::vector<std::uint32_t>(p));
  for (std::uint64_t v = 0; v < p; ++v) T[0][v] = 1;
  for (unsigned k = 1; k <= kmax; ++k) {
    std::uint64_t ik = F.inv(k);
    for (std::uint64_t v = 0; v < p; ++v) {
      // C(v,k) = C(v,k-1) * (v-k+1) / k
      std::uint64_t f = (v + p - (k - 1) % p) % p;
      T[k][v] = static_cast<std::uint32_t>(mulmod(mulmod(T[k - 1][v], f, p), ik, p));
    }
  }
  return T;
}

// P(x) mod p for every x in F_p, univariate P
inline std::vector<std::uint32_t> residue_values(const IntPoly& P, const PrimeField& F) {
  if (P.nvars() != 1) throw ValidationError("residue_values: univariate polynomial expected");
  std::uint64_t p = F.p();
  std::vector<std::uint32_t> out(p, 0);
  int d = P.degree();
  if (d < 0) return out;
  if (static_cast<std::uint64_t>(d) < p) {
    auto T = binomial_tables(F, static_cast<unsigned>(d));
    for (const auto& [m, c] : P.terms()) {
      std::uint64_t cm = F.reduce(c);
      for (std::uint64_t x = 0; x < p; ++x) out[x] = static_cast<std::uint32_t>((out[x] + mulmod(cm, T[m[0]][x], p)) % p);
    }
  } else {
    for (std::uint64_t x = 0; x < p; ++x) out[x] = static_cast<std::uint32_t>(F.reduce(P.eval({Int(static_cast<unsigned long>(x))})));
  }
  return out;
}

// x -> e_p(Q(x))
inline FieldFn phase_fn(const PrimeField& F, const IntPoly& Q) {
  if (Q.nvars() != 1) throw ValidationError("phase_fn: univariate polynomial expected");
  if (!Q.is_integral()) throw ValidationError("phase_fn: polynomial is not integer-valued");
  auto r = residue_values(Q, F);
  auto tab = character_table(F.p());
  std::vector<cplx> v(F.p());
  for (std::uint64_t x = 0; x < F.p(); ++x) v[x] = tab[r[x]];
  return FieldFn(F, std::move(v), true);
}

// ---- counter-based randomness (reproducible across languages) ----

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// uniform in [0,1) for (seed, stream, counter)
inline double counter_uniform(std::uint64_t seed, std::uint64_t counter, std::uint64_t stream = 0) {
  std::uint64_t z = seed * 0x9E3779B97F4A7C15ull + counter + stream * 0xD1B54A32D192ED03ull;
  return static_cast<double>(splitmix64(z) >> 11) * 0x1.0p-53;
}

// 1-bounded random function: uniform phase times uniform modulus in [0,1]
inline FieldFn random_bounded_fn(const PrimeField& F, std::uint64_t seed, std::uint64_t stream = 0) {
  std::vector<cplx> v(F.p());
  for (std::uint64_t x = 0; x < F.p(); ++x) {
    double r = counter_uniform(seed, 2 * x, stream + 1);
    double th = 2.0 * std::numbers::pi * counter_uniform(seed, 2 * x + 1, stream + 1);
    v[x] = std::polar(r, th);
  }
  return FieldFn(F, std::move(v), true);
}

}  // namespace hofa
