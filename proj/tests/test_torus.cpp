#include <random>

#include "catch_amalgamated.hpp"
#include "hofa/torus.hpp"
#include "support.hpp"

using namespace hofa;
using Catch::Matchers::WithinAbs;

namespace {

using K = std::vector<std::int64_t>;

Rat R(long a, long b) {
  Rat r(a, b);
  r.canonicalize();
  return r;
}

// E_x e(k . g^P(x)) from pointwise evaluation of g at the integers P_j(x)
cplx weyl_literal(const TorusSeq& g, const PolyMap& P, const K& k) {
  std::uint64_t q = g.q;
  std::size_t D = P.nvars;
  std::vector<long> pt(D, 0);
  cplx acc = 0;
  std::size_t n = 0;
  while (true) {
    std::vector<Int> z;
    for (long v : pt) z.emplace_back(v);
    Rat phase = 0;
    for (std::size_t j = 0; j < P.t(); ++j) {
      Rat v = P.comps[j].eval(z);
      auto pt_g = eval_seq(g, v.get_num());
      for (std::size_t c = 0; c < g.m; ++c) phase += pt_g[c] * Rat(k[j * g.m + c]);
    }
    // phase has denominator dividing q
    Int num = phase.get_num() * (Int(static_cast<unsigned long>(q)) / phase.get_den());
    Int r = num % Int(static_cast<unsigned long>(q));
    if (r < 0) r += static_cast<unsigned long>(q);
    acc += oracle::expi(static_cast<double>(r.get_ui()), static_cast<double>(q));
    ++n;
    std::size_t i = 0;
    while (i < D && ++pt[i] >= static_cast<long>(q)) pt[i++] = 0;
    if (i == D) break;
  }
  return acc / static_cast<double>(n);
}

}  // namespace

TEST_CASE("evaluating torus sequences") {
  auto g = TorusSeq::make(7, {{0, 0}, {1, 1}});
  CHECK(eval_seq(g, Int(3)) == std::vector<Rat>{R(3, 7), R(3, 7)});
  CHECK(eval_seq(g, Int(-1)) == std::vector<Rat>{R(6, 7), R(6, 7)});
  auto s = section11_sequence(101);
  CHECK(s.num[1][0] == 10);
  CHECK(s.level == std::vector<unsigned>{1, 2});
  // g(3) = (10*3, 10*C(3,2)) / 101
  CHECK(eval_seq(s, Int(3)) == std::vector<Rat>{R(30, 101), R(30, 101)});
  CHECK(eval_seq(s, Int(5)) == std::vector<Rat>{R(50, 101), R(100, 101)});
  for (long n : {0L, 1L, 17L, 250L, -40L}) {
    CHECK(eval_seq(s, Int(n)) == eval_seq(s, Int(n + 101)));
    CHECK(eval_seq(g, Int(n)) == eval_seq(g, Int(n + 7)));
  }
  CHECK(section11_sequence(9973).num[1][0] == 99);
}

TEST_CASE("torus sequence validation") {
  CHECK_THROWS_AS(TorusSeq::make(1, {{0}}), ValidationError);
  CHECK_THROWS_AS(TorusSeq::make(5, {}), ValidationError);
  CHECK_THROWS_AS(TorusSeq::make(5, {{0, 0}, {1}}), ValidationError);
  CHECK_THROWS_AS(TorusSeq::make(5, {{0}, {1}}, {2}), ValidationError);
  CHECK(TorusSeq::make(5, {{0}, {-1}}).num[1][0] == 4);
}

TEST_CASE("character enumeration order") {
  auto ks = enumerate_characters(2, 2);
  CHECK(ks.size() == 6);
  CHECK(ks[0] == K{1, 0});
  CHECK(ks[1] == K{0, 1});
  CHECK(ks[2] == K{2, 0});
  CHECK(ks[3] == K{1, 1});
  CHECK(ks[4] == K{1, -1});
  CHECK(ks[5] == K{0, 2});
  for (const auto& k : ks) CHECK(is_canonical_sign(k));
  CHECK(modulus_of(K{1, -3, 0}) == 4);
  CHECK_FALSE(is_canonical_sign(K{0, -1}));
}

TEST_CASE("irrationality checks") {
  auto s = section11_sequence(101);
  auto r = irrationality_check(s, 10);
  CHECK(r.pass);
  CHECK(r.bound == 10);
  // 101 is prime so no multiple below 101 helps
  CHECK(irrationality_check(s, 100).pass);
  CHECK_FALSE(irrationality_check(s, 101).pass);

  auto half = TorusSeq::make(2, {{0, 0}, {1, 0}}, {1, 1});
  auto h = irrationality_check(half, 2);
  REQUIRE_FALSE(h.pass);
  // (0,1) pairs with g_1 = (1/2, 0) to 0 and comes first in the order
  CHECK(h.witness->k == K{0, 1});
  CHECK(h.witness->level == 1);

  auto zero = TorusSeq::make(7, {{0}, {0}});
  auto z = irrationality_check(zero, 3);
  REQUIRE_FALSE(z.pass);
  CHECK(modulus_of(z.witness->k) == 1);
  CHECK_THROWS_AS(irrationality_check(s, 0), ValidationError);
  auto wide = TorusSeq::make(101, {std::vector<std::int64_t>(8, 0), std::vector<std::int64_t>(8, 1)});
  CHECK_THROWS_AS(irrationality_check(wide, 10), CostError);
}

TEST_CASE("lifting through a progression") {
  auto g = TorusSeq::make(11, {{0, 0}, {3, 1}, {0, 5}});
  auto id = lift_gP(g, parse_polymap("x"));
  auto m = as_multi(g);
  REQUIRE(id.dim() == 2);
  for (std::size_t c = 0; c < 2; ++c) CHECK(id.num[c] == m.num[c]);

  auto P = parse_polymap("x, x+y, x+y^2+y^3");
  auto L = lift_gP(g, P);
  CHECK(L.dim() == 6);
  for (const auto& c : L.num) CHECK(c.degree() <= 2 * 3);
  for (long x = -3; x <= 3; ++x)
    for (long y = -3; y <= 3; ++y) {
      auto z = oracle::grid_point({x, y});
      for (std::size_t j = 0; j < 3; ++j) {
        auto want = eval_seq(g, P.comps[j].eval(z).get_num());
        for (std::size_t c = 0; c < 2; ++c) {
          Int v = L.num[j * 2 + c].eval(z).get_num() % 11;
          if (v < 0) v += 11;
          CHECK(R(v.get_si(), 11) == want[c]);
        }
      }
    }
}

TEST_CASE("section 11 lift: coefficient of C(y,2)") {
  auto g = section11_sequence(101);
  auto gP = lift_gP(g, section11_progression());
  // level-one coordinates carry a (0,0,0,2), level-two coordinates a (0,1,4,6)
  std::vector<Rat> one, two;
  for (std::size_t j = 0; j < 4; ++j) {
    one.push_back(gP.num[j * 2].coeff({0, 2}));
    two.push_back(gP.num[j * 2 + 1].coeff({0, 2}));
  }
  CHECK(one == std::vector<Rat>{0, 0, 0, 20});
  CHECK(two == std::vector<Rat>{0, 10, 40, 60});
}

TEST_CASE("coefficient transfer for the annihilating character") {
  std::uint64_t p = 101;
  auto P = section11_progression();
  auto onlyg1 = TorusSeq::make(p, {{0, 0}, {10, 0}, {0, 0}}, {1, 2});
  auto onlyg2 = TorusSeq::make(p, {{0, 0}, {0, 0}, {0, 10}}, {1, 2});
  K eta{1, 1, 0, -2, 0, 1, -1, 0};
  Rat a = lift_gP(onlyg1, P).pairing(eta).coeff({0, 2});
  Rat b = lift_gP(onlyg2, P).pairing(eta).coeff({0, 2});
  CHECK(a == -20);
  CHECK(b == 20);
  CHECK(a.get_num() % 101 != 0);
  CHECK(b.get_num() % 101 != 0);
  Rat sum = a + b;
  CHECK(sum.get_num() % 101 == 0);
}

TEST_CASE("Weyl sums and defects") {
  PrimeField F(31);
  auto lin = TorusSeq::make(31, {{0}, {1}});
  auto d = weyl_defect(as_multi(lin), 5);
  CHECK_THAT(d.value, WithinAbs(0, 1e-12));
  auto con = TorusSeq::make(31, {{4}, {0}});
  MultiSeq c = as_multi(con);
  auto e = weyl_defect(c, 3);
  CHECK_THAT(e.value, WithinAbs(1, 1e-12));
  CHECK(e.argmax == K{1});
  CHECK_THROWS_AS(weyl_defect(c, 0), ValidationError);
  CHECK_THROWS_AS(weyl_defect(lift_gP(TorusSeq::make(101, {std::vector<std::int64_t>(4, 0),
                                                          std::vector<std::int64_t>(4, 1)}),
                                      parse_polymap("x, x+y, x+2y, x+y^2")),
                              20),
                  CostError);
}

TEST_CASE("Weyl sums agree with pointwise evaluation") {
  std::mt19937_64 gen(7);
  std::uniform_int_distribution<std::int64_t> kd(-1, 1);
  for (std::uint64_t p : {11, 31}) {
    auto g = TorusSeq::make(p, {{0, 0}, {3, 0}, {1, 5}}, {1, 2});
    auto P = parse_polymap("x, x+y, x+2y, x+y^2");
    auto gP = lift_gP(g, P);
    for (int trial = 0; trial < 40; ++trial) {
      K k(8);
      for (auto& v : k) v = kd(gen);
      if (modulus_of(k) == 0 || modulus_of(k) > 5) continue;
      CHECK_THAT(std::abs(weyl_sum(gP, k) - weyl_literal(g, P, k)), WithinAbs(0, 1e-9));
    }
  }
  // one-parameter sequence, every character up to modulus 5
  auto h = TorusSeq::make(199, {{0, 0}, {14, 3}, {0, 14}}, {1, 2});
  auto P1 = parse_polymap("x");
  for (const auto& k : enumerate_characters(2, 5))
    CHECK_THAT(std::abs(weyl_sum(as_multi(h), k) - weyl_literal(h, P1, k)), WithinAbs(0, 1e-9));
}

TEST_CASE("section 11 annihilator") {
  auto g = section11_sequence(101);
  auto P = section11_progression();
  auto K1 = find_annihilator(g, P);
  REQUIRE(K1.has_value());
  CHECK(*K1 == K{1, 1, 0, -2, 0, 1, -1, 0});
  CHECK(modulus_of(*K1) == 6);
  auto gP = lift_gP(g, P);
  CHECK(vanishes_mod(gP.pairing(*K1), 101));
  CHECK_THAT(std::abs(weyl_sum(gP, *K1)), WithinAbs(1, 1e-12));
  // flipping any single sign breaks the identity
  for (std::size_t c = 0; c < 8; ++c) {
    if ((*K1)[c] == 0) continue;
    K flip = *K1;
    flip[c] = -flip[c];
    CHECK_FALSE(vanishes_mod(gP.pairing(flip), 101));
  }
  // a character vanishing on G^P is excluded: x2 - 2 y2 + u2 restricted to the first level is trivial
  auto L = build_ladder(P, 2, 1);
  CHECK(character_nontrivial_on_leibman(L, g.level, *K1));
  CHECK_FALSE(character_nontrivial_on_leibman(L, g.level, K{0, 0, 0, 0, 0, 0, 0, 0}));
}

TEST_CASE("printed character leaves a residual") {
  auto gP = lift_gP(section11_sequence(101), section11_progression());
  auto printed = gP.pairing(section11_printed_character());
  CHECK_FALSE(vanishes_mod(printed, 101));
  CHECK(printed == parse_poly("10y", {"x", "y"}));
}

TEST_CASE("verify_section11 end to end") {
  for (std::uint64_t p : {101, 9973}) {
    auto r = verify_section11(p);
    CHECK(r.pass);
    CHECK(r.irrationality.pass);
    CHECK(r.symbolic_zero);
    CHECK(r.nontrivial);
    CHECK_THAT(r.defect, WithinAbs(1, 1e-9));
    CHECK(r.unlifted.value <= r.unlifted_threshold);
    CHECK_FALSE(r.printed_symbolic_zero);
    auto j = r.to_json();
    CHECK(j["p"] == p);
    CHECK(j["annihilator"]["symbolic_zero"] == true);
  }
  CHECK_THROWS_AS(verify_section11(7), ValidationError);
}
