#pragma once

// Command-line driver.  Every subcommand prints canonical text (sorted
// containers only, no addresses or pointers), so identical invocations are
// byte-identical.  Exit codes: 0 success, 1 domain-negative result or
// validation failure, 2 usage error.

#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "locsim/error.hpp"
#include "locsim/finite_analysis.hpp"
#include "locsim/group_element.hpp"
#include "locsim/partition_poset.hpp"
#include "locsim/pingpong.hpp"
#include "locsim/sim_structure.hpp"
#include "locsim/text_format.hpp"

namespace locsim::cli {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::invalid_argument, "cannot read file", path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Built-in alias or path to a descriptor file.
inline SimStructure load_structure(const std::string& arg) {
  if (auto s = builtin_structure(arg)) return *s;
  return parse_descriptor(read_file(arg));
}

inline GroupElement load_element(const SimStructure& s, const std::string& path) {
  return parse_element(s, read_file(path));
}

// Chains read as partition literals joined by '<', coarsest first.
inline PartitionChain parse_chain(const Space& space, const std::string& text) {
  std::vector<Partition> vs;
  for (const auto& part : detail::split(text, '<')) vs.push_back(parse_partition(space, part));
  return PartitionChain(std::move(vs));
}

// ---------------------------------------------------------------------------
// Hierarchy rendering

inline void hierarchy_walk(const Space& space, const std::string& addr, int depth_left,
                           const std::function<void(const std::string&, const std::string&)>& edge,
                           const std::function<void(const std::string&)>& node) {
  node(addr);
  if (depth_left == 0) return;
  int n = space.child_count(addr);
  for (int k = 0; k < n; ++k) {
    std::string child = addr + static_cast<char>('0' + k);
    edge(addr, child);
    hierarchy_walk(space, child, depth_left - 1, edge, node);
  }
}

inline std::string hierarchy_dot(const Space& space, int depth) {
  std::string out = "digraph hierarchy {\n";
  hierarchy_walk(
      space, "", depth,
      [&](const std::string& a, const std::string& b) { out += "  n" + a + " -> n" + b + ";\n"; },
      [&](const std::string& a) {
        out += "  n" + a + " [label=\"\\\"" + a + "\\\" d" + std::to_string(a.size()) + "\"];\n";
      });
  out += "}\n";
  return out;
}

inline std::string hierarchy_text(const Space& space, int depth) {
  std::string out;
  hierarchy_walk(
      space, "", depth, [](const std::string&, const std::string&) {},
      [&](const std::string& a) {
        out += std::string(2 * a.size(), ' ') + "\"" + a + "\" d" + std::to_string(a.size()) + "\n";
      });
  return out;
}

// ---------------------------------------------------------------------------

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"exact arithmetic for local similarity groups on compact ultrametric spaces"};
  app.require_subcommand(1);

  std::string group, lhs, rhs, elem, point_text, entry_text, partition_text, chain_text;
  std::string p_text, q_text, format = "dot";
  std::vector<std::string> gen_files;
  int bound = 100, levels = 3, depth = 6, blocks = 2, max_syllables = 6;
  int export_depth = 3, hasse_depth = 2;
  std::size_t budget = 10000;
  bool dot = false;

  auto* mul = app.add_subcommand("mul", "compose two elements (right factor applies first)");
  mul->add_option("--group,-g", group)->required();
  mul->add_option("lhs", lhs)->required();
  mul->add_option("rhs", rhs)->required();

  auto* inv = app.add_subcommand("inv", "invert an element");
  inv->add_option("--group,-g", group)->required();
  inv->add_option("elem", elem)->required();

  auto* ord = app.add_subcommand("order", "order of an element, up to a bound");
  ord->add_option("--group,-g", group)->required();
  ord->add_option("elem", elem)->required();
  ord->add_option("--bound", bound);

  auto* ev = app.add_subcommand("eval", "apply an element to a point");
  ev->add_option("--group,-g", group)->required();
  ev->add_option("elem", elem)->required();
  ev->add_option("--point", point_text)->required();

  auto* cls = app.add_subcommand("classify", "classify a similarity entry");
  cls->add_option("--group,-g", group)->required();
  cls->add_option("--entry", entry_text)->required();

  auto* dc = app.add_subcommand("dual-contraction", "similarities onto two disjoint subballs");
  dc->add_option("--group,-g", group)->required();

  auto* pp = app.add_subcommand("pingpong", "free-product certificate checks");
  pp->add_option("--group,-g", group)->required();
  pp->add_flag("--dot", dot);
  pp->add_option("--max-syllables", max_syllables);

  auto* bs = app.add_subcommand("ball-seq", "disjoint witnessed ball levels");
  bs->add_option("--group,-g", group)->required();
  bs->add_option("--levels", levels);

  auto* cen = app.add_subcommand("census", "count or refute finiteness of separating elements");
  cen->add_option("--group,-g", group)->required();
  cen->add_option("--depth", depth);

  auto* clo = app.add_subcommand("closure", "generated subgroup, up to a size budget");
  clo->add_option("--group,-g", group)->required();
  clo->add_option("gens", gen_files)->required()->expected(-1);
  clo->add_option("--budget", budget);

  auto* fa = app.add_subcommand("finite-analyze", "full group of a finite-space structure");
  fa->add_option("--group,-g", group)->required();

  auto* ex = app.add_subcommand("export-dot", "ball hierarchy diagram");
  ex->add_option("--group,-g", group)->required();
  ex->add_option("--depth", export_depth);
  ex->add_option("--format", format)->check(CLI::IsMember({"dot", "text"}));

  auto* poset = app.add_subcommand("poset", "partition poset queries");
  poset->require_subcommand(1);
  auto* pmem = poset->add_subcommand("member", "membership with marked-block count");
  pmem->add_option("--group,-g", group)->required();
  pmem->add_option("--partition", partition_text)->required();
  pmem->add_option("-n", blocks);
  pmem->add_option("--budget", depth);
  auto* pref = poset->add_subcommand("refines", "does the second partition refine the first");
  pref->add_option("--group,-g", group)->required();
  pref->add_option("--p", p_text)->required();
  pref->add_option("--q", q_text)->required();
  auto* pmeet = poset->add_subcommand("meet", "common refinement staying in the poset");
  pmeet->add_option("--group,-g", group)->required();
  pmeet->add_option("--p", p_text)->required();
  pmeet->add_option("--q", q_text)->required();
  pmeet->add_option("-n", blocks);
  pmeet->add_option("--budget", depth);
  auto* pact = poset->add_subcommand("act", "apply an element block-wise");
  pact->add_option("--group,-g", group)->required();
  pact->add_option("--elem", elem)->required();
  pact->add_option("--partition", partition_text)->required();
  auto* piso = poset->add_subcommand("isotropy", "does the element stabilize the chain");
  piso->add_option("--group,-g", group)->required();
  piso->add_option("--elem", elem)->required();
  piso->add_option("--chain", chain_text)->required();
  auto* padm = poset->add_subcommand("admissible", "chain-compatible block permutations");
  padm->add_option("--group,-g", group)->required();
  padm->add_option("--chain", chain_text)->required();
  auto* phasse = poset->add_subcommand("hasse", "DOT diagram of the refinement order");
  phasse->add_option("--group,-g", group)->required();
  phasse->add_option("--depth", hasse_depth);

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    SimStructure s = load_structure(group);

    if (*mul) {
      out << format_element(compose(load_element(s, lhs), load_element(s, rhs)));
      return 0;
    }
    if (*inv) {
      out << format_element(inverse(load_element(s, elem)));
      return 0;
    }
    if (*ord) {
      auto r = order(load_element(s, elem), bound);
      if (!r.is_finite()) {
        out << "exceeds " << bound << "\n";
        return 1;
      }
      out << *r.finite << "\n";
      return 0;
    }
    if (*ev) {
      out << format_point(evaluate(load_element(s, elem), parse_point(s.space(), point_text)))
          << "\n";
      return 0;
    }
    if (*cls) {
      out << similarity_class_name(classify(detail::parse_entry(s.space(), entry_text, 1)))
          << "\n";
      return 0;
    }
    if (*dc) {
      auto w = dual_contraction(s);
      if (!w) {
        out << "none\n";
        return 1;
      }
      out << format_entry(w->g1) << "\n" << format_entry(w->g2) << "\n";
      return 0;
    }
    if (*pp) {
      PingPongWitness w = pingpong_witness(s);
      PingPongTranscript t = verify_pingpong(w);
      ReducedWordReport words = reduced_word_check(w, max_syllables);
      if (dot) {
        out << pingpong_dot(w);
      } else {
        for (const auto& [name, ok] : t.checks)
          out << "CHECK " << name << ": " << (ok ? "PASS" : "FAIL") << "\n";
        out << "CHECK reduced-words-" << max_syllables << ": " << (words.pass ? "PASS" : "FAIL")
            << "\n";
        out << "CONCLUSION: free product Z3 * Z2 "
            << (t.conclusion && words.pass ? "established" : "not established") << "\n";
      }
      return t.conclusion && words.pass ? 0 : 1;
    }
    if (*bs) {
      BallSequence seq = ball_sequence(s, levels);
      for (std::size_t i = 0; i < seq.levels.size(); ++i) {
        out << "S" << i + 1 << ":";
        for (const auto& [b, wit] : seq.levels[i]) out << " \"" << b.addr << "\"";
        out << "\n";
      }
      return 0;
    }
    if (*cen) {
      SeparatingCensus c = separating_census(s, depth);
      if (c.is_finite()) {
        out << "finite " << *c.finite_count << "\n";
      } else {
        out << "infinite\n";
        for (const auto& g : c.infinite_witness) out << format_entry(g) << "\n";
      }
      return 0;
    }
    if (*clo) {
      std::vector<GroupElement> gens;
      for (const auto& f : gen_files) gens.push_back(load_element(s, f));
      ClosureResult r = closure(s, gens, budget);
      if (!r.is_finite()) {
        out << "exceeds " << budget << "\n";
        return 1;
      }
      out << "finite " << r.elements->size() << "\n";
      return 0;
    }
    if (*fa) {
      FiniteAnalysis r = finite_analyze(s);
      out << "order " << r.gamma_order << "\n";
      out << "classes ";
      for (std::size_t i = 0; i < r.class_sizes.size(); ++i)
        out << (i ? "," : "") << r.class_sizes[i];
      out << "\n";
      out << "product-formula " << (r.product_formula_holds ? "ok" : "mismatch") << "\n";
      out << "separating " << r.separating_count << "\n";
      out << "non-identity " << r.nonidentity_count << "\n";
      out << "conditions " << (r.conditions_agree() ? "agree" : "disagree") << "\n";
      return r.product_formula_holds && r.conditions_agree() ? 0 : 1;
    }
    if (*ex) {
      out << (format == "dot" ? hierarchy_dot(s.space(), export_depth)
                              : hierarchy_text(s.space(), export_depth));
      return 0;
    }
    if (*pmem) {
      auto v = poset_member(s, parse_partition(s.space(), partition_text), blocks, depth);
      if (!v) {
        out << "not-member\n";
        return 1;
      }
      out << "member " << v->marked.size() << "\n";
      return 0;
    }
    if (*pref) {
      bool r = refines(parse_partition(s.space(), p_text), parse_partition(s.space(), q_text));
      out << (r ? "true" : "false") << "\n";
      return r ? 0 : 1;
    }
    if (*pmeet) {
      Partition p = parse_partition(s.space(), p_text), q = parse_partition(s.space(), q_text);
      auto vp = poset_member(s, p, blocks, depth), vq = poset_member(s, q, blocks, depth);
      if (!vp || !vq) {
        out << "not-member\n";
        return 1;
      }
      out << format_partition(common_refinement(s, *vp, *vq, blocks, depth).partition) << "\n";
      return 0;
    }
    if (*pact) {
      out << format_partition(
                 act(load_element(s, elem), parse_partition(s.space(), partition_text)))
          << "\n";
      return 0;
    }
    if (*piso) {
      auto pi = isotropy_membership(load_element(s, elem), parse_chain(s.space(), chain_text));
      if (!pi) {
        out << "not-in\n";
        return 1;
      }
      out << "in ";
      for (std::size_t i = 0; i < pi->size(); ++i) out << (i ? "," : "") << (*pi)[i];
      out << "\n";
      return 0;
    }
    if (*padm) {
      AdmissibleGroup g = admissible_group(parse_chain(s.space(), chain_text));
      out << "order " << g.elements.size() << "\n";
      for (const auto& pi : g.elements) {
        for (std::size_t i = 0; i < pi.size(); ++i) out << (i ? "," : "") << pi[i];
        out << "\n";
      }
      return 0;
    }
    if (*phasse) {
      out << hasse_dot(s.space(), hasse_depth);
      return 0;
    }
  } catch (const Error& e) {
    err << "error[" << errc_name(e.code()) << (e.where().empty() ? "" : "@" + e.where()) << "] "
        << e.what() << "\n";
    return 1;
  }
  err << "usage error: no subcommand handled\n";
  return 2;
}

}  // namespace locsim::cli
