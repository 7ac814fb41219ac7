// Finds the polynomial relations of a progression and builds the phase functions
// that make the counting average equal to one.
//   demo_sidon [progression] [p]
#include <cstdlib>
#include <iostream>

#include "hofa/relations.hpp"

int main(int argc, char** argv) {
  using namespace hofa;
  std::string text = argc > 1 ? argv[1] : "x, x+y, x+y^2, x+y+y^2";
  std::uint64_t p = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 101;
  try {
    auto P = parse_polymap(text);
    PrimeField F(p);
    unsigned cap = default_relation_cap(P);
    auto rels = find_relations(P, cap);
    std::cout << "progression (" << text << "), degree cap " << cap << ": " << rels.size() << " relation(s)\n";
    for (std::size_t k = 0; k < rels.size(); ++k) {
      const auto& r = rels[k];
      std::cout << "  [" << k << "]";
      for (std::size_t i = 0; i < P.t(); ++i) std::cout << "  Q" << i << " = " << r.render(i);
      std::cout << "\n";
      auto w = weyl_witness(P, r, F);
      std::cout << "      Lambda(e_p(Q_i)) = " << w.lambda.real() << (w.lambda.imag() < 0 ? " - " : " + ")
                << std::abs(w.lambda.imag()) << "i,  U^" << w.norm_degree << " of slot " << w.slot << " = "
                << w.slot_norm << "\n";
    }
    for (std::size_t i = 0; i < P.t(); ++i) {
      auto rep = independence_report(rels, i, cap);
      std::cout << "  index " << i << ": largest deg Q_i = " << rep.max_degree << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
