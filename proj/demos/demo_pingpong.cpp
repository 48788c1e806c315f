// Walks through the free-product certificate for the binary structure:
// builds the standard witness, prints the balls it plays on, checks the
// orders and containments, and finishes with the reduced-word sweep.
#include <locsim/locsim.hpp>

#include <iostream>

using namespace locsim;

int main() {
  SimStructure s = *builtin_structure("vd2");
  PingPongWitness w = pingpong_witness(s);

  auto set_text = [](const ClopenSet& set) {
    std::string out = "{";
    bool first = true;
    for (const auto& a : set.balls()) {
      if (!first) out += ",";
      out += "\"" + a + "\"";
      first = false;
    }
    return out + "}";
  };
  std::cout << "witness balls:\n";
  std::cout << "  A1=\"" << w.A1.addr << "\" A2=\"" << w.A2.addr << "\"\n";
  std::cout << "  B2=\"" << w.B2.addr << "\" B3=\"" << w.B3.addr << "\" B4=\"" << w.B4.addr
            << "\"\n";
  std::cout << "  X1=" << set_text(w.X1) << " X2=" << set_text(w.X2) << "\n\n";

  std::cout << "a1 =\n" << format_element(w.a1) << "\n";
  std::cout << "a2 =\n" << format_element(w.a2) << "\n";

  auto o1 = order(w.a1);
  auto o2 = order(w.a2);
  std::cout << "order(a1) = " << *o1.finite << ", order(a2) = " << *o2.finite << "\n\n";

  PingPongTranscript t = verify_pingpong(w);
  for (const auto& [name, ok] : t.checks)
    std::cout << (ok ? "  ok   " : "  FAIL ") << name << "\n";

  ReducedWordReport words = reduced_word_check(w, 6);
  std::cout << "  swept " << words.words_checked << " reduced words, "
            << (words.pass ? "none" : "'" + words.counterexample + "'")
            << (words.pass ? " collapse to the identity\n" : " collapses\n");

  std::cout << "\nconclusion: the two elements generate Z3 * Z2 — "
            << (t.conclusion && words.pass ? "established" : "not established") << "\n";
  return t.conclusion && words.pass ? 0 : 1;
}
