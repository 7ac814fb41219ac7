// Command-line surface: one subcommand per module, JSON or CSV reports on stdout, progress on stderr.
// Exit codes: 0 success, 1 golden mismatch or internal failure, 2 validation error, 3 cost rejection.
#pragma once

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hofa/counting.hpp"
#include "hofa/leibman.hpp"
#include "hofa/norms.hpp"
#include "hofa/relations.hpp"
#include "hofa/torus.hpp"

namespace hofa {

struct RunConfig {
  std::string command;
  std::uint64_t p = 101;
  std::vector<std::uint64_t> p_list;
  std::string progression;
  std::string linear;  // asymptotic: explicit linear model, derived from the progression when empty
  std::string set_spec;
  std::uint64_t seed = 1;
  unsigned cap = 0;          // relations: degree cap; torus: character bound
  unsigned norm_degree = 2;  // norm: s; leibman: s for default ladder bounds
  std::string method;
  std::string function = "indicator";
  std::string format = "json";
  unsigned threads = 0;
  std::string golden;
  unsigned imax = 0, jmax = 0;
  std::string coeffs, levels;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["command"] = command;
    j["p"] = p;
    j["p_list"] = p_list;
    j["progression"] = progression;
    j["linear"] = linear;
    j["set"] = set_spec;
    j["seed"] = seed;
    j["cap"] = cap;
    j["norm_degree"] = norm_degree;
    j["method"] = method;
    j["function"] = function;
    j["format"] = format;
    j["threads"] = threads;
    j["golden"] = golden;
    j["imax"] = imax;
    j["jmax"] = jmax;
    j["coeffs"] = coeffs;
    j["levels"] = levels;
    return j;
  }
};

// a report is a config header plus either a JSON result or CSV rows
struct Report {
  nlohmann::json result;
  std::vector<std::string> csv_header;
  std::vector<std::vector<std::string>> csv_rows;
  int exit_code = 0;
};

inline std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string o = "\"";
  for (char c : s) {
    if (c == '"') o += '"';
    o += c;
  }
  return o + "\"";
}

// "cs:m,d" selects the Cauchy-Schwarz system, anything else is parsed as a progression
inline PolyMap parse_progression(const std::string& text) {
  if (text.empty()) throw ValidationError("--progression is required");
  if (text.rfind("cs:", 0) == 0) {
    auto parts = split(text.substr(3), ',');
    if (parts.size() != 2) throw ValidationError("cs:m,d expected");
    try {
      return cs_system(static_cast<unsigned>(std::stoul(parts[0])), static_cast<unsigned>(std::stoul(parts[1])));
    } catch (const std::logic_error&) {
      throw ValidationError("cs:m,d expected");
    }
  }
  return parse_polymap(text);
}

// Psi(x, y_1..y_r) = (x + sum_k c_ik y_k) where P_i - P_0 = sum_k c_ik R_k and the R_k form
// the reduced echelon basis (monomial coordinates) of the differences
inline std::pair<PolyMap, std::vector<IntPoly>> derive_linear_model(const PolyMap& P) {
  if (P.t() < 2) throw ValidationError("linear model needs at least two components");
  std::vector<Terms> diffs;
  std::map<MultiIndex, std::size_t, GradedLex> col;
  for (std::size_t i = 1; i < P.t(); ++i) {
    diffs.push_back(from_binomial(P.comps[i] - P.comps[0]));
    for (const auto& [m, c] : diffs.back()) col.emplace(m, 0);
  }
  std::vector<MultiIndex> mons;
  for (auto& [m, k] : col) {
    k = mons.size();
    mons.push_back(m);
  }
  std::size_t n = mons.size();
  RatSubspace S(n);
  std::vector<RatVec> vecs;
  for (const auto& d : diffs) {
    RatVec v(n, 0);
    for (const auto& [m, c] : d) v[col[m]] = c;
    S.insert(v);
    vecs.push_back(v);
  }
  std::size_t r = S.dim();
  PolyMap Psi;
  Psi.nvars = r + 1;
  Psi.names = default_var_names(r + 1);
  IntPoly x0 = IntPoly::variable(r + 1, 0);
  Psi.comps.push_back(x0);
  for (const auto& v : vecs) {
    IntPoly c = x0;
    for (std::size_t k = 0; k < r; ++k) {
      const Rat& a = v[S.pivots()[k]];
      if (a != 0) c += IntPoly::variable(r + 1, k + 1) * a;
    }
    Psi.comps.push_back(c);
  }
  std::vector<IntPoly> basis;
  for (const auto& row : S.rows()) {
    Terms T;
    for (std::size_t k = 0; k < n; ++k)
      if (row[k] != 0) T[mons[k]] = row[k];
    basis.push_back(to_binomial(P.nvars, T));
  }
  return {Psi, basis};
}

inline FieldFn make_function(const RunConfig& c, const PrimeField& F) {
  const std::string& f = c.function;
  if (f == "indicator") return make_set(c.set_spec, F).indicator();
  if (f == "balanced") {
    SetF A = make_set(c.set_spec, F);
    auto v = A.indicator().values();
    double d = A.density();
    for (auto& x : v) x -= d;
    return FieldFn(F, std::move(v), true);
  }
  if (f == "random") return random_bounded_fn(F, c.seed);
  if (f.rfind("phase:", 0) == 0) {
    auto Q = parse_poly(f.substr(6), {"x"});
    return phase_fn(F, Q);
  }
  throw ValidationError("unknown --function '" + f + "' (indicator, balanced, random, phase:<poly in x>)");
}

inline std::vector<std::uint64_t> primes_of(const RunConfig& c) {
  if (!c.p_list.empty()) return c.p_list;
  return {c.p};
}

// ---- commands ----

inline Report cmd_norm(const RunConfig& c) {
  Report r;
  r.csv_header = {"p", "function", "degree", "method", "value", "argmax"};
  nlohmann::json rows = nlohmann::json::array();
  for (auto p : primes_of(c)) {
    PrimeField F(p);
    FieldFn f = make_function(c, F);
    NormReport n;
    std::string m = c.method.empty() ? "recursive" : c.method;
    if (m == "bias") {
      n = bias_norm(f, c.norm_degree, c.threads);
    } else {
      n = gowers_norm(f, c.norm_degree, parse_norm_method(m), c.threads);
    }
    std::string arg;
    for (std::size_t k = 0; k < n.argmax.size(); ++k) arg += (k ? " " : "") + std::to_string(n.argmax[k]);
    rows.push_back({{"p", p}, {"degree", n.degree}, {"method", m}, {"value", n.value}, {"cost_ops", n.cost_ops},
                    {"argmax", n.argmax}});
    r.csv_rows.push_back({std::to_string(p), c.function, std::to_string(n.degree), m, fmt_double(n.value), arg});
  }
  r.result["norms"] = rows;
  return r;
}

inline Report cmd_count(const RunConfig& c) {
  Report r;
  PolyMap P = parse_progression(c.progression);
  r.csv_header = {"p", "progression", "set_spec", "count", "normalized"};
  nlohmann::json rows = nlohmann::json::array();
  for (auto p : primes_of(c)) {
    PrimeField F(p);
    nlohmann::json row{{"p", p}};
    if (c.function == "indicator") {
      SetF A = make_set(c.set_spec, F);
      std::uint64_t n = count_in_set(P, A, c.threads);
      double norm = static_cast<double>(n) / std::pow(static_cast<double>(p), static_cast<double>(P.nvars));
      row["set"] = A.spec();
      row["count"] = n;
      row["normalized"] = norm;
      r.csv_rows.push_back({std::to_string(p), c.progression, A.spec(), std::to_string(n), fmt_double(norm)});
    } else {
      FieldFn f = make_function(c, F);
      cplx v = lambda_P(P, std::vector<FieldFn>(P.t(), f), c.threads);
      row["lambda"] = {v.real(), v.imag()};
      r.csv_rows.push_back({std::to_string(p), c.progression, c.function, "", fmt_double(v.real())});
    }
    rows.push_back(row);
  }
  r.result["progression"] = P.to_json();
  r.result["counts"] = rows;
  return r;
}

inline Report cmd_energy(const RunConfig& c) {
  Report r;
  r.csv_header = {"p", "set_spec", "size", "energy", "normalized"};
  nlohmann::json rows = nlohmann::json::array();
  for (auto p : primes_of(c)) {
    PrimeField F(p);
    SetF A = make_set(c.set_spec, F);
    EnergyReport e = additive_energy_report(A);
    nlohmann::json row{{"p", p}, {"set", A.spec()}, {"size", A.size()}, {"energy", e.value},
                       {"fourier_value", e.fourier_value}, {"recounted", e.recounted}};
    if (c.method == "brute") row["brute"] = additive_energy_brute(A);
    rows.push_back(row);
    double norm = static_cast<double>(e.value) / std::pow(static_cast<double>(p), 3.0);
    r.csv_rows.push_back({std::to_string(p), A.spec(), std::to_string(A.size()), std::to_string(e.value), fmt_double(norm)});
  }
  r.result["energies"] = rows;
  return r;
}

inline Report cmd_asymptotic(const RunConfig& c, std::ostream& progress = std::cerr) {
  Report r;
  PolyMap P = parse_progression(c.progression);
  PolyMap Psi;
  if (c.linear.empty()) {
    Psi = derive_linear_model(P).first;
  } else {
    Psi = parse_polymap(c.linear);
  }
  LinearMethod lm = c.method.empty() ? LinearMethod::automatic : parse_linear_method(c.method);
  r.csv_header = {"p", "progression", "set_spec", "lhs", "rhs", "residual"};
  nlohmann::json rows = nlohmann::json::array();
  for (auto p : primes_of(c)) {
    progress << "asymptotic: p=" << p << std::endl;
    PrimeField F(p);
    SetF A = make_set(c.set_spec, F);
    CountReport cr = verify_asymptotic(P, Psi, A, c.threads, lm);
    rows.push_back({{"p", p}, {"set", A.spec()}, {"lhs_count", cr.lhs_count}, {"rhs_count", cr.rhs_count},
                    {"lhs", cr.lhs}, {"rhs", cr.rhs}, {"residual", cr.residual}});
    r.csv_rows.push_back({std::to_string(p), c.progression, A.spec(), fmt_double(cr.lhs), fmt_double(cr.rhs),
                          fmt_double(cr.residual)});
  }
  r.result["progression"] = P.to_json();
  r.result["linear_model"] = Psi.render();
  r.result["rows"] = rows;
  return r;
}

inline Report cmd_relations(const RunConfig& c) {
  Report r;
  PolyMap P = parse_progression(c.progression);
  unsigned cap = c.cap ? c.cap : default_relation_cap(P);
  auto basis = find_relations(P, cap);
  r.result = relations_to_json(P, basis, cap);
  r.result["progression"] = P.to_json();
  PrimeField F(c.p);
  nlohmann::json wit = nlohmann::json::array();
  r.csv_header = {"relation", "index", "Q", "degree"};
  for (std::size_t k = 0; k < basis.size(); ++k) {
    auto w = weyl_witness(P, basis[k], F, c.threads);
    wit.push_back({{"lambda", {w.lambda.real(), w.lambda.imag()}}, {"slot", w.slot}, {"norm_degree", w.norm_degree},
                   {"slot_norm", w.slot_norm}});
    for (std::size_t i = 0; i < P.t(); ++i)
      r.csv_rows.push_back({std::to_string(k), std::to_string(i), basis[k].render(i), std::to_string(basis[k].degs[i])});
  }
  r.result["witnesses"] = wit;
  r.result["witness_p"] = c.p;
  return r;
}

inline Report cmd_leibman(const RunConfig& c) {
  Report r;
  PolyMap P = parse_progression(c.progression);
  auto [di, dj] = default_ladder_bounds(P, c.norm_degree);
  unsigned imax = c.imax ? c.imax : di, jmax = c.jmax ? c.jmax : dj;
  SpaceLadder L = build_ladder(P, imax, jmax);
  r.result["table"] = ladder_to_json(L, c.progression);
  auto F = filtration_condition(L, imax, jmax);
  nlohmann::json fj{{"pass", F.pass}, {"verified_range", {{"imax", imax}, {"jmax", jmax}}}, {"failures", F.failures}};
  if (F.witness) {
    auto to_strs = [](const RatVec& v) {
      std::vector<std::string> s;
      for (const auto& x : v) s.push_back(rat_string(x));
      return s;
    };
    const auto& w = *F.witness;
    fj["witness"] = {{"i1", w.i1}, {"j1", w.j1}, {"i2", w.i2}, {"j2", w.j2},
                     {"v", to_strs(w.v)}, {"w", to_strs(w.w)}, {"vw", to_strs(w.vw)}};
  }
  r.result["filtration"] = fj;
  r.result["p_equals_q"] = p_equals_q(L);
  r.csv_header = {"i", "j", "dim", "basis"};
  for (unsigned i = 1; i <= imax; ++i)
    for (unsigned j = 1; j <= jmax; ++j)
      r.csv_rows.push_back({std::to_string(i), std::to_string(j), std::to_string(L.p(i, j).dim()), L.p(i, j).str()});
  if (!c.golden.empty()) {
    std::ifstream in(c.golden);
    if (!in) throw ValidationError("cannot read golden file '" + c.golden + "'");
    nlohmann::json g;
    try {
      in >> g;
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(std::string("golden file is not valid JSON: ") + e.what());
    }
    auto diffs = diff_against_golden(L, g);
    nlohmann::json dj = nlohmann::json::array();
    for (const auto& d : diffs) dj.push_back({{"i", d.i}, {"j", d.j}, {"expected", d.expected}, {"computed", d.computed}});
    r.result["golden"] = {{"file", c.golden}, {"match", diffs.empty()}, {"mismatches", dj}};
    if (!diffs.empty()) r.exit_code = 1;
  }
  return r;
}

inline std::vector<std::vector<std::int64_t>> parse_int_rows(const std::string& text) {
  std::vector<std::vector<std::int64_t>> rows;
  for (const auto& part : split(text, ';')) {
    std::vector<std::int64_t> row;
    for (const auto& x : split(part, ',')) {
      try {
        row.push_back(std::stoll(x));
      } catch (const std::logic_error&) {
        throw ValidationError("bad integer '" + x + "' in --coeffs/--levels");
      }
    }
    rows.push_back(row);
  }
  return rows;
}

inline Report cmd_torus(const RunConfig& c) {
  Report r;
  if (c.coeffs.empty()) {
    r.csv_header = {"p", "alpha_num", "irrational", "symbolic_zero", "defect", "unlifted_defect", "pass"};
    for (auto p : primes_of(c)) {
      auto s = verify_section11(p, c.threads);
      r.result["section11"].push_back(s.to_json());
      r.csv_rows.push_back({std::to_string(p), std::to_string(s.alpha_num), s.irrationality.pass ? "1" : "0",
                            s.symbolic_zero ? "1" : "0", fmt_double(s.defect), fmt_double(s.unlifted.value),
                            s.pass ? "1" : "0"});
    }
    return r;
  }
  // generic: numerators "g0;g1;...;gs" each comma separated, levels "l1,...,lm"
  std::vector<unsigned> lv;
  if (!c.levels.empty())
    for (auto v : parse_int_rows(c.levels).at(0)) lv.push_back(static_cast<unsigned>(v));
  r.csv_header = {"p", "bound", "irrational", "defect", "argmax"};
  for (auto p : primes_of(c)) {
    TorusSeq g = TorusSeq::make(p, parse_int_rows(c.coeffs), lv);
    std::int64_t K = c.cap ? c.cap : static_cast<std::int64_t>(std::sqrt(static_cast<double>(p)));
    auto irr = irrationality_check(g, K);
    MultiSeq seq = c.progression.empty() ? as_multi(g) : lift_gP(g, parse_progression(c.progression));
    auto d = weyl_defect(seq, K, false, c.threads);
    nlohmann::json row{{"p", p}, {"bound", K}, {"irrational", irr.pass}, {"defect", d.value}, {"argmax", d.argmax}};
    if (irr.witness) row["irrationality_witness"] = {{"level", irr.witness->level}, {"k", irr.witness->k}};
    r.result["sequences"].push_back(row);
    std::string arg;
    for (std::size_t k = 0; k < d.argmax.size(); ++k) arg += (k ? " " : "") + std::to_string(d.argmax[k]);
    r.csv_rows.push_back({std::to_string(p), std::to_string(K), irr.pass ? "1" : "0", fmt_double(d.value), arg});
  }
  return r;
}

// ---- driver ----

inline void write_report(const RunConfig& c, const Report& r, std::ostream& out) {
  if (c.format == "csv") {
    const nlohmann::json header = c.to_json();
    for (auto it = header.begin(); it != header.end(); ++it)
      out << "# " << it.key() << "=" << (it->is_string() ? it->get<std::string>() : it->dump()) << "\n";
    for (std::size_t k = 0; k < r.csv_header.size(); ++k) out << (k ? "," : "") << r.csv_header[k];
    out << "\n";
    for (const auto& row : r.csv_rows) {
      for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << csv_field(row[k]);
      out << "\n";
    }
    return;
  }
  nlohmann::json j;
  j["config"] = c.to_json();
  j["result"] = r.result;
  out << j.dump(2) << "\n";
}

inline Report dispatch(const RunConfig& c, std::ostream& progress = std::cerr) {
  if (c.command == "norm") return cmd_norm(c);
  if (c.command == "count") return cmd_count(c);
  if (c.command == "energy") return cmd_energy(c);
  if (c.command == "asymptotic") return cmd_asymptotic(c, progress);
  if (c.command == "relations") return cmd_relations(c);
  if (c.command == "leibman") return cmd_leibman(c);
  if (c.command == "torus") return cmd_torus(c);
  throw ValidationError("unknown command '" + c.command + "'");
}

// fills defaults that depend on other options so the header shows what actually ran
inline void resolve(RunConfig& c) {
  if (c.format != "json" && c.format != "csv") throw ValidationError("--format must be csv or json");
  if (c.set_spec.empty()) {
    std::ostringstream s;
    s << "random:" << c.seed << ":0.5";
    c.set_spec = s.str();
  }
  c.threads = resolve_threads(c.threads);
}

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"higher-order Fourier analysis toolkit"};
  app.require_subcommand(1);
  auto add_common = [&](CLI::App* s) {
    s->add_option("--p", c.p, "prime modulus");
    s->add_option("--p-list", c.p_list, "several primes, comma separated")->delimiter(',');
    s->add_option("--progression", c.progression, "comma-separated polynomials, or cs:m,d");
    s->add_option("--set", c.set_spec, "random:<seed>:<density> | residues:<k> | interval:<a>:<b> | full | empty | <file>");
    s->add_option("--seed", c.seed, "seed for random sets and functions");
    s->add_option("--cap", c.cap, "relation degree cap / character bound");
    s->add_option("--norm-degree", c.norm_degree, "norm degree s (leibman: s in the default ladder bounds)");
    s->add_option("--method", c.method, "norm: naive|recursive|fourier|bias; asymptotic: auto|direct|fourier; energy: brute");
    s->add_option("--format", c.format, "csv or json");
    s->add_option("--threads", c.threads, "worker cap (0: GF_THREADS or hardware)");
    s->add_option("--golden", c.golden, "golden ladder table to diff against");
  };
  std::vector<std::pair<std::string, std::string>> cmds = {
      {"norm", "Gowers U^s or bias u^s norm of a function on F_p"},
      {"count", "count progressions inside a set"},
      {"energy", "additive energy of a set"},
      {"asymptotic", "compare polynomial and linear counts over a list of primes"},
      {"relations", "algebraic relations up to a degree cap and their Weyl witnesses"},
      {"leibman", "P_{i,j} ladder, filtration condition and golden diff"},
      {"torus", "torus sequences, irrationality and Weyl defects"}};
  for (const auto& [name, desc] : cmds) {
    auto* s = app.add_subcommand(name, desc);
    add_common(s);
    s->callback([&c, n = name] { c.command = n; });
    if (name == "norm" || name == "count")
      s->add_option("--function", c.function, "indicator | balanced | random | phase:<poly in x>");
    if (name == "asymptotic") s->add_option("--linear", c.linear, "linear model; derived from the progression if omitted");
    if (name == "leibman") {
      s->add_option("--imax", c.imax, "ladder height in i");
      s->add_option("--jmax", c.jmax, "ladder height in j");
    }
    if (name == "torus") {
      s->add_option("--coeffs", c.coeffs, "Taylor numerators g0;g1;...;gs, each comma separated");
      s->add_option("--levels", c.levels, "filtration level per coordinate, comma separated");
    }
  }
  std::vector<const char*> argv;
  argv.push_back("hofa");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }
  try {
    resolve(c);
    Report r = dispatch(c, err);
    write_report(c, r, out);
    return r.exit_code;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const CostError& e) {
    err << "cost rejected: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace hofa
