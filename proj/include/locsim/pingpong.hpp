#pragma once

// Freeness apparatus for dually contracting structures.
//
// From a dual contraction (g1: X -> A1, g2: X -> A2 with A1, A2 disjoint)
// the level sets S_1 = {A1, A2}, S_{i+1} = {g1(B), g2(B) : B in S_i} supply
// arbitrarily many disjoint balls with explicit similarities from X, and a
// standard ping-pong pair: a1 of order 3 cycling B2 -> B3 -> B4 inside
// A1 u A2, a2 of order 2 swapping B2 with A2.  Verifying the finite orders,
// the three cycle identities and three containments establishes that a1 and
// a2 generate a free product Z/3 * Z/2; a bounded reduced-word enumeration
// cross-checks it.

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "locsim/error.hpp"
#include "locsim/group_element.hpp"
#include "locsim/sim_structure.hpp"

namespace locsim {

struct BallSequence {
  Similarity gamma1, gamma2;  // X -> A1, X -> A2
  // levels[i] holds S_{i+1}; each ball carries a structure similarity from
  // X onto it, obtained by composing restrictions of gamma1/gamma2.
  std::vector<std::vector<std::pair<Ball, Similarity>>> levels;
};

inline BallSequence ball_sequence(const SimStructure& s, int levels) {
  auto dc = dual_contraction(s);
  if (!dc) fail(Errc::not_dually_contracting, "structure admits no dual contraction");
  if (levels < 1) fail(Errc::invalid_argument, "need at least one level");
  BallSequence seq{dc->g1, dc->g2, {}};
  std::vector<std::pair<Ball, Similarity>> cur;
  cur.emplace_back(dc->b1, dc->g1);
  cur.emplace_back(dc->b2, dc->g2);
  seq.levels.push_back(cur);
  for (int i = 1; i < levels; ++i) {
    std::vector<std::pair<Ball, Similarity>> next;
    for (const auto& g : {dc->g1, dc->g2})
      for (const auto& [ball, wit] : cur) {
        // g maps X into A_j; its restriction to `ball` continues the witness.
        Similarity step = restrict_to(g, ball);
        next.emplace_back(step.cod(), compose(step, wit));
      }
    seq.levels.push_back(next);
    cur = std::move(next);
  }
  return seq;
}

// Minimum depth over a level.
inline int level_depth(const std::vector<std::pair<Ball, Similarity>>& level) {
  int d = depth(level.front().first);
  for (const auto& [b, w] : level) d = std::min(d, depth(b));
  return d;
}

// Refine p so that at least n blocks are balls carrying a similarity from
// the whole space: take the first level whose balls are deep enough to sit
// inside single blocks (and numerous enough), then carve each one out of
// its block.  n = 0 returns p unchanged.
inline Partition split_inside(const SimStructure& s, const Partition& p, int n) {
  if (n == 0) return p;
  int bound = partition_depth_bound(p);
  BallSequence seq = ball_sequence(s, 1);
  int i = 0;
  while (level_depth(seq.levels.back()) < bound ||
         seq.levels.back().size() < static_cast<std::size_t>(n)) {
    seq = ball_sequence(s, ++i + 1);
    if (i > 64) fail(Errc::budget_exceeded, "split level grew unreasonably");
  }
  const auto& level = seq.levels.back();
  std::vector<ClopenSet> blocks;
  for (const auto& [b, w] : level) blocks.push_back(ClopenSet::from_balls(s.space(), {b.addr}));
  ClopenSet carved = blocks.front();
  for (const auto& c : blocks) carved = unite(carved, c);
  for (const auto& blk : p.blocks) {
    auto rest = subtract(blk, carved);
    if (!rest.empty()) blocks.push_back(ClopenSet::from_balls(s.space(), std::move(rest)));
  }
  return Partition::from_blocks(s.space(), std::move(blocks));
}

// ---------------------------------------------------------------------------
// Ping-pong witness

struct PingPongWitness {
  SimStructure structure;
  Ball A1, A2, B1, B2, B3, B4;
  Similarity gamma1, gamma2;
  Similarity d2, d3, d4;  // B2 -> B3 -> B4 -> B2
  GroupElement a1, a2;
  ClopenSet X1, X2;  // ping-pong sets A2 and B2
};

// Builds the witness from the canonical dual contraction.
inline PingPongWitness pingpong_witness(const SimStructure& s) {
  auto dc = dual_contraction(s);
  if (!dc) fail(Errc::not_dually_contracting, "structure admits no dual contraction");
  const Similarity &g1 = dc->g1, &g2 = dc->g2;
  Ball A1 = dc->b1, A2 = dc->b2;
  Ball B1 = apply(g1, A1), B2 = apply(g1, A2), B3 = apply(g2, A1), B4 = apply(g2, A2);
  // d2 = g2|A1 . g1 . g2^-1 . g1^-1|B2 and cyclically, as in the free
  // product construction.
  Similarity d2 = compose(restrict_to(g2, A1),
                          compose(g1, compose(inverse(g2), restrict_to(inverse(g1), B2))));
  Similarity d3 = compose(restrict_to(g2, A2),
                          compose(g2, compose(inverse(g1), restrict_to(inverse(g2), B3))));
  Similarity d4 = compose(restrict_to(g1, A2), restrict_to(inverse(g2), B4));
  // a1: identity off B2 u B3 u B4, where it runs the d-cycle.
  std::vector<Similarity> t1{d2, d3, d4};
  ClopenSet moved = ClopenSet::from_balls(s.space(), {B2.addr, B3.addr, B4.addr});
  for (const auto& addr : subtract(s.carrier(), moved))
    t1.push_back(Similarity::identity_on(Ball(s.space(), addr)));
  GroupElement a1 = GroupElement::from_table(s, std::move(t1));
  // a2: identity except for swapping B2 and A2 through g1.
  std::vector<Similarity> t2{restrict_to(inverse(g1), B2), restrict_to(g1, A2)};
  ClopenSet swapped = ClopenSet::from_balls(s.space(), {B2.addr, A2.addr});
  for (const auto& addr : subtract(s.carrier(), swapped))
    t2.push_back(Similarity::identity_on(Ball(s.space(), addr)));
  GroupElement a2 = GroupElement::from_table(s, std::move(t2));
  return PingPongWitness{s,
                         A1,
                         A2,
                         B1,
                         B2,
                         B3,
                         B4,
                         g1,
                         g2,
                         d2,
                         d3,
                         d4,
                         std::move(a1),
                         std::move(a2),
                         ClopenSet::from_balls(s.space(), {A2.addr}),
                         ClopenSet::from_balls(s.space(), {B2.addr})};
}

struct PingPongTranscript {
  std::vector<std::pair<std::string, bool>> checks;
  bool conclusion = false;
};

namespace detail {

inline void structural_check(bool ok, const char* what) {
  if (!ok) fail(Errc::malformed_witness, std::string("witness is malformed: ") + what);
}

}  // namespace detail

// Runs every ping-pong check and returns the transcript; the conclusion
// holds only if every single check passed.  Structural defects (wrong
// domains, non-members) are errors rather than failed checks.
inline PingPongTranscript verify_pingpong(const PingPongWitness& w, int order_bound = 8) {
  const SimStructure& s = w.structure;
  detail::structural_check(disjoint(w.A1, w.A2), "A1 and A2 must be disjoint");
  detail::structural_check(s.member(w.gamma1) && w.gamma1.cod() == w.A1, "gamma1: X -> A1");
  detail::structural_check(s.member(w.gamma2) && w.gamma2.cod() == w.A2, "gamma2: X -> A2");
  detail::structural_check(w.d2.dom() == w.B2 && w.d2.cod() == w.B3, "d2: B2 -> B3");
  detail::structural_check(w.d3.dom() == w.B3 && w.d3.cod() == w.B4, "d3: B3 -> B4");
  detail::structural_check(w.d4.dom() == w.B4 && w.d4.cod() == w.B2, "d4: B4 -> B2");
  detail::structural_check(s.member(w.d2) && s.member(w.d3) && s.member(w.d4),
                           "d-maps must be structure elements");
  PingPongTranscript t;
  auto check = [&t](const std::string& name, bool ok) { t.checks.emplace_back(name, ok); };

  auto o1 = order(w.a1, order_bound);
  check("a1-order-3", o1.is_finite() && *o1.finite == 3);
  auto o2 = order(w.a2, order_bound);
  check("a2-order-2", o2.is_finite() && *o2.finite == 2);

  check("delta-cycle-B2", compose(w.d4, compose(w.d3, w.d2)) == Similarity::identity_on(w.B2));
  check("delta-cycle-B3", compose(w.d2, compose(w.d4, w.d3)) == Similarity::identity_on(w.B3));
  check("delta-cycle-B4", compose(w.d3, compose(w.d2, w.d4)) == Similarity::identity_on(w.B4));

  GroupElement a1a1 = compose(w.a1, w.a1);
  check("containment-a1X2-X1", w.X1.contains(image(w.a1, w.X2)));
  check("containment-a1a1X2-X1", w.X1.contains(image(a1a1, w.X2)));
  check("containment-a2X1-X2", w.X2.contains(image(w.a2, w.X1)));

  t.conclusion = std::all_of(t.checks.begin(), t.checks.end(),
                             [](const auto& c) { return c.second; });
  return t;
}

struct ReducedWordReport {
  bool pass = false;
  std::size_t words_checked = 0;
  std::string counterexample;  // empty when pass
};

// Evaluates every nonempty reduced alternating word in {a1, a1^2} and {a2}
// with at most `max_syllables` syllables; all must differ from the
// identity.
inline ReducedWordReport reduced_word_check(const PingPongWitness& w, int max_syllables = 6) {
  GroupElement a1a1 = compose(w.a1, w.a1);
  ReducedWordReport rep;
  // Words are built syllable by syllable; parity of the position decides
  // which alphabet the syllable comes from.
  struct Item {
    GroupElement value;
    int syllables;
    bool last_was_a1;
    std::string name;
  };
  std::vector<Item> queue;
  queue.push_back({w.a1, 1, true, "a1"});
  queue.push_back({a1a1, 1, true, "a1^2"});
  queue.push_back({w.a2, 1, false, "a2"});
  while (!queue.empty()) {
    Item it = queue.back();
    queue.pop_back();
    ++rep.words_checked;
    if (it.value.is_identity()) {
      rep.counterexample = it.name;
      return rep;
    }
    if (it.syllables == max_syllables) continue;
    if (it.last_was_a1) {
      queue.push_back({compose(w.a2, it.value), it.syllables + 1, false, it.name + " a2"});
    } else {
      queue.push_back({compose(w.a1, it.value), it.syllables + 1, true, it.name + " a1"});
      queue.push_back({compose(a1a1, it.value), it.syllables + 1, true, it.name + " a1^2"});
    }
  }
  rep.pass = true;
  return rep;
}

// DOT drawing of the witness balls and maps.
inline std::string pingpong_dot(const PingPongWitness& w) {
  auto node = [](const std::string& name, const Ball& b) {
    return "  " + name + " [label=\"" + name + " = \\\"" + b.addr + "\\\"\"];\n";
  };
  std::string out = "digraph pingpong {\n  rankdir=TB;\n";
  out += "  X [label=\"X\"];\n";
  out += node("A1", w.A1) + node("A2", w.A2);
  out += node("B1", w.B1) + node("B2", w.B2) + node("B3", w.B3) + node("B4", w.B4);
  out += "  X -> A1 [label=\"g1\"];\n  X -> A2 [label=\"g2\"];\n";
  out += "  A1 -> B1 [style=dotted];\n  A1 -> B2 [style=dotted];\n";
  out += "  A2 -> B3 [style=dotted];\n  A2 -> B4 [style=dotted];\n";
  out += "  B2 -> B3 [label=\"d2\"];\n  B3 -> B4 [label=\"d3\"];\n  B4 -> B2 [label=\"d4\"];\n";
  out += "}\n";
  return out;
}

}  // namespace locsim
