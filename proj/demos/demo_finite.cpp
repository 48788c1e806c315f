// Analyzes a structure over a six-leaf finite space: enumerates the acting
// group, checks the factorial product formula, and decomposes one equalizing
// member into identity and separating pieces.
#include <locsim/locsim.hpp>

#include <iostream>

using namespace locsim;

int main() {
  Space sp = Space::finite("((..)(..))");
  SimStructure s = SimStructure::finite_enumerated(
      sp,
      {Similarity(Ball(sp, "00"), Ball(sp, "01"),
                  std::map<std::string, std::string>{{"00", "01"}}),
       Similarity(Ball(sp, "01"), Ball(sp, "10"),
                  std::map<std::string, std::string>{{"01", "10"}})},
      4096, "demo");

  FiniteAnalysis fa = finite_analyze(s);
  std::cout << "structure " << s.id() << " on " << sp.id() << "\n";
  std::cout << "group order " << fa.gamma_order << "\n";
  std::cout << "point classes of sizes";
  for (std::size_t d : fa.class_sizes) std::cout << " " << d;
  std::cout << "\n";
  std::cout << "product formula " << (fa.product_formula_holds ? "holds" : "fails") << "\n";
  std::cout << "separating members below the root: " << fa.separating_count << "\n";
  std::cout << "finiteness conditions " << (fa.conditions_agree() ? "agree" : "disagree")
            << "\n\n";

  std::cout << "the acting group, one leaf map per line:\n";
  for (const auto& sigma : fa.gamma_maps) {
    std::cout << " ";
    for (const auto& [from, to] : sigma) std::cout << " " << from << ">" << to;
    std::cout << "\n";
  }

  // a second structure whose root similarity set holds a genuine swap;
  // equalizing members split into identity and separating pieces
  SimStructure t = SimStructure::finite_enumerated(
      sp,
      {Similarity(Ball(sp, "0"), Ball(sp, "0"),
                  std::map<std::string, std::string>{{"00", "01"}, {"01", "00"}}),
       Similarity(Ball(sp, ""), Ball(sp, ""),
                  std::map<std::string, std::string>{
                      {"00", "10"}, {"01", "11"}, {"10", "00"}, {"11", "01"}})},
      4096, "swapdemo");
  for (const Similarity& g : t.sim_set(Ball(sp, ""), Ball(sp, ""))) {
    if (g.is_identity()) continue;
    std::cout << "\nan equalizing member of " << t.id() << ":\n  " << format_entry(g) << "\n";
    std::cout << "decomposes into:\n";
    for (const auto& piece : decompose_equalizing(t, g)) {
      if (piece.separating)
        std::cout << "  " << format_entry(*piece.separating) << "\n";
      else
        std::cout << "  \"" << piece.ball.addr << "\" -> \"" << piece.ball.addr << "\" : id\n";
    }
    break;
  }
  return 0;
}
