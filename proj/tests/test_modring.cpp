#include <cmath>
#include <numbers>

#include "catch_amalgamated.hpp"
#include "hofa/modring.hpp"
#include "support.hpp"

using namespace hofa;
using Catch::Matchers::WithinAbs;

TEST_CASE("prime field construction") {
  CHECK_NOTHROW(PrimeField(7));
  CHECK_THROWS_AS(PrimeField(4), ValidationError);
  CHECK_THROWS_AS(PrimeField(2), ValidationError);
  CHECK_THROWS_AS(PrimeField(1), ValidationError);
  CHECK_THROWS_AS(PrimeField(561), ValidationError);  // Carmichael
  CHECK_NOTHROW(PrimeField(2305843009213693951ull));   // 2^61 - 1
  CHECK_THROWS_AS(PrimeField(3215031751ull), ValidationError);  // strong pseudoprime to 2,3,5,7
}

TEST_CASE("Miller-Rabin agrees with trial division") {
  for (std::uint64_t n = 0; n < 20000; ++n) REQUIRE(is_prime_u64(n) == oracle::trial_division_prime(n));
}

TEST_CASE("field reduction of integers and rationals") {
  PrimeField F(7);
  CHECK(F.reduce(std::int64_t{-1}) == 6);
  CHECK(F.reduce(Int(-15)) == 6);
  CHECK(F.reduce(Rat(1, 2)) == 4);
  CHECK_THROWS_AS(F.reduce(Rat(1, 14)), ValidationError);
  for (std::uint64_t a = 1; a < 7; ++a) CHECK(mulmod(a, F.inv(a), 7) == 1);
}

TEST_CASE("additive character values") {
  PrimeField F7(7), F5(5);
  CHECK(e_p(F7, 0) == cplx(1, 0));
  cplx z = e_p(F5, 1);
  CHECK_THAT(z.real(), WithinAbs(0.30901699437494745, 1e-15));
  CHECK_THAT(z.imag(), WithinAbs(0.95105651629515353, 1e-15));
  for (std::uint64_t x = 0; x < 5; ++x) CHECK_THAT(std::abs(e_p(F5, x)), WithinAbs(1.0, 1e-15));
}

TEST_CASE("character orthogonality") {
  for (std::uint64_t p : {3ull, 5ull, 31ull, 61ull, 101ull}) {
    PrimeField F(p);
    for (std::uint64_t a = 0; a < p; ++a) {
      std::vector<cplx> v(p);
      for (std::uint64_t x = 0; x < p; ++x) v[x] = e_p(F, mulmod(a, x, p));
      cplx m = FieldFn(F, v).mean();
      CHECK_THAT(std::abs(m - cplx(a == 0 ? 1.0 : 0.0, 0)), WithinAbs(0.0, 1e-12));
    }
  }
}

TEST_CASE("1-bounded hint is enforced") {
  PrimeField F(5);
  CHECK_THROWS_AS(FieldFn(F, std::vector<cplx>(5, 1.5), true), ValidationError);
  CHECK_NOTHROW(FieldFn(F, std::vector<cplx>(5, 1.5), false));
  CHECK_THROWS_AS(FieldFn(F, std::vector<cplx>(4, 0.0)), ValidationError);
}

TEST_CASE("dft of constants and characters") {
  PrimeField F(13);
  auto one = dft(FieldFn::constant(F));
  for (std::uint64_t k = 0; k < 13; ++k) CHECK_THAT(std::abs(one[k] - cplx(k == 0, 0)), WithinAbs(0, 1e-12));
  std::vector<cplx> v(13);
  for (std::uint64_t x = 0; x < 13; ++x) v[x] = e_p(F, 3 * x % 13);
  auto h = dft(FieldFn(F, v));
  for (std::uint64_t k = 0; k < 13; ++k) CHECK_THAT(std::abs(h[k] - cplx(k == 3, 0)), WithinAbs(0, 1e-12));
}

TEST_CASE("fft matches the naive transform") {
  for (std::uint64_t p : {3ull, 31ull, 61ull, 101ull, 499ull}) {
    PrimeField F(p);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      auto f = random_bounded_fn(F, seed);
      auto a = dft(f), b = naive_dft(f);
      for (std::uint64_t k = 0; k < p; ++k) REQUIRE(std::abs(a[k] - b[k]) < 1e-9);
    }
  }
}

TEST_CASE("inverse transform and Parseval") {
  for (std::uint64_t p = 3; p <= 101; ++p) {
    if (!is_prime_u64(p)) continue;
    PrimeField F(p);
    auto f = random_bounded_fn(F, p);
    auto h = dft(f);
    auto g = idft(h);
    double e2 = 0, s2 = 0;
    for (std::uint64_t x = 0; x < p; ++x) {
      REQUIRE(std::abs(g[x] - f[x]) < 1e-9);
      e2 += std::norm(f[x]) / static_cast<double>(p);
      s2 += std::norm(h[x]);
    }
    REQUIRE(std::abs(e2 - s2) <= 1e-9 * std::max(1.0, e2));
  }
}

TEST_CASE("phase functions") {
  PrimeField F5(5), F7(7);
  auto zero = phase_fn(F5, IntPoly(1));
  for (std::uint64_t x = 0; x < 5; ++x) CHECK(zero[x] == cplx(1, 0));
  auto lin = phase_fn(F5, parse_poly("x", {"x"}));
  for (std::uint64_t x = 0; x < 5; ++x) CHECK_THAT(std::abs(lin[x] - e_p(F5, x)), WithinAbs(0, 1e-15));
  CHECK(lin.bounded_hint());
  auto sq = phase_fn(F7, parse_poly("x^2", {"x"}));
  CHECK_THAT(std::abs(sq.mean()), WithinAbs(1.0 / std::sqrt(7.0), 1e-12));
  CHECK_THROWS_AS(phase_fn(F7, parse_poly("x+y", {"x", "y"})), ValidationError);
  CHECK_THROWS_AS(phase_fn(F7, parse_poly("x/2", {"x"})), ValidationError);
}

TEST_CASE("phase functions only see residues") {
  PrimeField F(11);
  auto Q = parse_poly("3x^3 + C(x,2) + 5", {"x"});
  auto R = parse_poly("x^4 + 2C(x,3)", {"x"});
  auto a = phase_fn(F, Q), b = phase_fn(F, Q + R * Rat(11));
  for (std::uint64_t x = 0; x < 11; ++x) CHECK(a[x] == b[x]);
}

TEST_CASE("residue evaluation above the degree threshold") {
  PrimeField F(5);
  auto Q = parse_poly("C(x,7) + x^6", {"x"});
  auto r = residue_values(Q, F);
  for (long x = 0; x < 5; ++x) CHECK(r[x] == F.reduce(Q.eval({Int(x)})));
}

TEST_CASE("counter based randomness is reproducible") {
  CHECK(splitmix64(0) == 0xE220A8397B1DCDAFull);
  CHECK(counter_uniform(3, 17) == counter_uniform(3, 17));
  CHECK(counter_uniform(3, 17) != counter_uniform(4, 17));
  PrimeField F(31);
  auto a = random_bounded_fn(F, 9), b = random_bounded_fn(F, 9);
  for (std::uint64_t x = 0; x < 31; ++x) CHECK(a[x] == b[x]);
}

TEST_CASE("pairwise sums do not depend on chunking") {
  std::vector<double> v(10007);
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = counter_uniform(1, k) - 0.5;
  double ref = pairwise_sum(v);
  for (unsigned t : {1u, 2u, 3u, 8u}) {
    std::vector<double> part(v.size());
    parallel_chunks(v.size(), t, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t k = lo; k < hi; ++k) part[k] = v[k];
    });
    CHECK(pairwise_sum(part) == ref);
  }
}

TEST_CASE("thread resolution") {
  CHECK(resolve_threads(3) == 3);
  CHECK(resolve_threads(0) >= 1);
}
