#include <random>

#include "catch_amalgamated.hpp"
#include "hofa/relations.hpp"

using namespace hofa;
using Catch::Matchers::WithinAbs;

namespace {

PolyMap pm(const char* s) { return parse_polymap(s); }

// span of the flattened coefficient vectors of a relation basis
RatSubspace relation_span(const std::vector<Relation>& rels, std::size_t t, unsigned cap) {
  RatSubspace s(t * cap);
  for (const auto& r : rels) {
    RatVec v;
    for (const auto& row : r.coeffs)
      for (const auto& c : row) v.emplace_back(c);
    s.insert(v);
  }
  return s;
}

Relation rel(std::vector<std::vector<long>> c) {
  std::vector<std::vector<Int>> out;
  for (auto& row : c) {
    out.emplace_back();
    for (long v : row) out.back().emplace_back(v);
  }
  return make_relation(out);
}

// nullity of c -> (sum c_{ik} P_i(pt)^k)_pt over the full grid {0..n}^D, n = total degree bound
std::size_t grid_nullity(const PolyMap& P, unsigned cap) {
  std::size_t t = P.t(), n = t * cap, D = P.nvars;
  long top = static_cast<long>(cap) * std::max(P.degree(), 1);
  RatSubspace rows(n);
  std::vector<long> pt(D, 0);
  while (true) {
    std::vector<Int> z;
    for (long v : pt) z.emplace_back(v);
    RatVec row;
    for (std::size_t i = 0; i < t; ++i) {
      Rat val = P.comps[i].eval(z), acc = 1;
      for (unsigned k = 1; k <= cap; ++k) {
        acc *= val;
        row.push_back(acc);
      }
    }
    rows.insert(row);
    std::size_t k = 0;
    while (k < D && ++pt[k] > top) pt[k++] = 0;
    if (k == D) break;
  }
  return n - rows.dim();
}

}  // namespace

TEST_CASE("the Sidon relation") {
  auto P = pm("x, x+y, x+y^2, x+y+y^2");
  auto rs = find_relations(P, 1);
  REQUIRE(rs.size() == 1);
  CHECK(rs[0].render(0) == "y");
  CHECK(rs[0].render(1) == "-y");
  CHECK(rs[0].render(2) == "-y");
  CHECK(rs[0].render(3) == "y");
  CHECK(rs[0].degs == std::vector<int>{1, 1, 1, 1});
  CHECK(relation_residual(P, rs[0]).is_zero());
}

TEST_CASE("relations of (x, x+y, x+2y, x+y^2)") {
  auto P = pm("x, x+y, x+2y, x+y^2");
  auto rs = find_relations(P, 2);
  CHECK(rs.size() == 2);
  auto span = relation_span(rs, 4, 2);
  // x - 2(x+y) + (x+2y) = 0
  CHECK(span.contains(relation_span({rel({{1, 0}, {-2, 0}, {1, 0}, {0, 0}})}, 4, 2).rows()[0]));
  // (x^2 + 2x) - 2(x+y)^2 + (x+2y)^2 - 2(x+y^2) = 0, twice the quadratic display
  auto eq8 = rel({{2, 1}, {0, -2}, {0, 1}, {-2, 0}});
  CHECK(relation_residual(P, eq8).is_zero());
  CHECK(span.contains(relation_span({eq8}, 4, 2).rows()[0]));
}

TEST_CASE("no relation for (x, x+y, x+y^2) up to degree 2") {
  CHECK(find_relations(pm("x, x+y, x+y^2"), 2).empty());
  CHECK(find_relations(pm("x, x+y, x+y^2"), 1).empty());
  CHECK(grid_nullity(pm("x, x+y, x+y^2"), 2) == 0);
}

TEST_CASE("the two linear relations of (x, x+y, x+2y, x+y^3, x+2y^3)") {
  auto P = pm("x, x+y, x+2y, x+y^3, x+2y^3");
  auto rs = find_relations(P, 2);
  REQUIRE(rs.size() == 2);
  for (const auto& r : rs)
    for (int d : r.degs) CHECK(d <= 1);
  for (std::size_t i = 0; i < 5; ++i) CHECK(independence_report(rs, i, 2).max_degree == 1);
  auto span = relation_span(rs, 5, 2);
  auto good = rel({{1, 0}, {0, 0}, {0, 0}, {-2, 0}, {1, 0}});
  CHECK(relation_residual(P, good).is_zero());
  CHECK(span.contains(relation_span({good}, 5, 2).rows()[0]));
  // with the other sign the sum is -2x - 4y^3
  auto printed = rel({{1, 0}, {0, 0}, {0, 0}, {-2, 0}, {-1, 0}});
  CHECK(relation_residual(P, printed) == parse_poly("-2x - 4y^3", {"x", "y"}));
  CHECK_FALSE(span.contains(relation_span({printed}, 5, 2).rows()[0]));
}

TEST_CASE("independence degrees") {
  auto P = pm("x, x+y, x+2y, x+y^2");
  CHECK(independence_report(P, 3, 3).max_degree == 1);
  CHECK(independence_report(P, 1, 3).max_degree == 2);
  CHECK(independence_report(P, 1, 3).lower_bound == 2);
  CHECK(independence_report(P, 1, 1).max_degree == 1);
  CHECK_THROWS_AS(independence_report(P, 4, 2), ValidationError);
  // monotone in the cap
  for (std::size_t i = 0; i < 4; ++i) {
    unsigned prev = 0;
    for (unsigned cap = 1; cap <= 4; ++cap) {
      auto m = independence_report(P, i, cap).max_degree;
      CHECK(m <= cap);
      CHECK(m >= prev);
      prev = m;
    }
  }
  CHECK(independence_report(pm("x, x+y, x+y^2"), 0, 2).max_degree == 0);
}

TEST_CASE("basis dimension matches a grid evaluation rank") {
  std::mt19937_64 gen(20240611);
  std::uniform_int_distribution<int> coef(-2, 2), deg(1, 3), terms(2, 4), capd(1, 3);
  for (int trial = 0; trial < 25; ++trial) {
    std::size_t t = static_cast<std::size_t>(terms(gen));
    std::string text = "x";
    for (std::size_t i = 1; i < t; ++i) {
      text += ", x";
      int d = deg(gen);
      for (int k = 1; k <= d; ++k) {
        int c = coef(gen);
        if (k == d && c == 0) c = 1;
        if (c != 0) text += (c > 0 ? "+" : "") + std::to_string(c) + "y^" + std::to_string(k);
      }
    }
    auto P = parse_polymap(text, {"x", "y"});
    unsigned cap = static_cast<unsigned>(capd(gen));
    INFO(text << " cap " << cap);
    auto rs = find_relations(P, cap);
    CHECK(rs.size() == grid_nullity(P, cap));
    for (const auto& r : rs) CHECK(relation_residual(P, r).is_zero());
  }
}

TEST_CASE("permuting components permutes the relations") {
  auto P = pm("x, x+y, x+2y, x+y^2");
  auto Q = pm("x+y^2, x+2y, x, x+y");  // Q_k = P_perm[k]
  std::vector<std::size_t> perm{3, 2, 0, 1};
  unsigned cap = 2;
  auto a = find_relations(P, cap), b = find_relations(Q, cap);
  REQUIRE(a.size() == b.size());
  RatSubspace moved(4 * cap);
  for (const auto& r : a) {
    RatVec v;
    for (std::size_t k = 0; k < 4; ++k)
      for (const auto& c : r.coeffs[perm[k]]) v.emplace_back(c);
    moved.insert(v);
  }
  CHECK(moved == relation_span(b, 4, cap));
}

TEST_CASE("witnesses average to one") {
  for (std::uint64_t p : {101, 199}) {
    PrimeField F(p);
    for (const char* s : {"x, x+y, x+y^2, x+y+y^2", "x, x+y, x+2y, x+y^2"}) {
      auto P = pm(s);
      for (const auto& r : find_relations(P, 2)) {
        auto w = weyl_witness(P, r, F);
        CHECK_THAT(std::abs(w.lambda - cplx(1, 0)), WithinAbs(0, 1e-9));
      }
    }
  }
}

TEST_CASE("witness norms") {
  PrimeField F(101);
  auto S = pm("x, x+y, x+y^2, x+y+y^2");
  auto w = weyl_witness(S, find_relations(S, 1)[0], F);
  CHECK(w.slot == 0);
  CHECK(w.norm_degree == 1);
  CHECK_THAT(w.slot_norm, WithinAbs(0, 1e-9));

  auto P = pm("x, x+y, x+2y, x+y^2");
  auto eq8 = rel({{2, 1}, {0, -2}, {0, 1}, {-2, 0}});
  auto q = weyl_witness(P, eq8, F, 0, 1);
  CHECK(q.norm_degree == 2);
  CHECK_THAT(q.slot_norm, WithinAbs(std::pow(101.0, -0.25), 1e-9));
  CHECK_THAT(q.lambda.real(), WithinAbs(1, 1e-9));
  auto d = weyl_witness(P, eq8, F);
  CHECK(d.slot == 0);
  CHECK(d.norm_degree == 2);
}

TEST_CASE("bad relation inputs") {
  PrimeField F(101);
  auto P = pm("x, x+y");
  CHECK_THROWS_AS(weyl_witness(P, rel({{0}, {0}}), F), ValidationError);
  CHECK_THROWS_AS(weyl_witness(P, rel({{1}}), F), ValidationError);
  CHECK_THROWS_AS(find_relations(P, 0), ValidationError);
  CHECK_THROWS_AS(relation_matrix(P, 600000), CostError);
  // a non-relation gives a witness average far from 1
  CHECK_THROWS_AS(weyl_witness(P, rel({{1}, {1}}), F), std::logic_error);
}

TEST_CASE("relation report") {
  auto P = pm("x, x+y, x+y^2, x+y+y^2");
  auto rs = find_relations(P, 1);
  auto j = relations_to_json(P, rs, 1);
  CHECK(j["cap"] == 1);
  CHECK(j["relations"].size() == 1);
  CHECK(j["relations"][0]["Q"] == nlohmann::json({"y", "-y", "-y", "y"}));
  CHECK(j["relations"][0]["coefficients"][1][0] == "-1");
  CHECK(j["per_index_degrees"] == nlohmann::json({1, 1, 1, 1}));
  CHECK(j["matrix_dims"][1] == 4);
}
