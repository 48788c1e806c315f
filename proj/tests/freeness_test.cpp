// Ping-pong freeness machinery: contracting ball sequences, the witness
// builder, the check transcript, and the reduced-word sweep.
#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

#include <set>

using namespace locsim;

namespace {

SimStructure vd2() { return *builtin_structure("vd2"); }
SimStructure vd3() { return *builtin_structure("vd3"); }
SimStructure vd2s2() { return *builtin_structure("vd2s2"); }
SimStructure mirror() { return *builtin_structure("mirror"); }

auto code_is(Errc c) {
  return Catch::Matchers::Predicate<Error>([c](const Error& e) { return e.code() == c; });
}

bool transcript_check(const PingPongTranscript& t, const std::string& name) {
  for (const auto& [n, ok] : t.checks)
    if (n == name) return ok;
  FAIL("no check named " << name);
  return false;
}

}  // namespace

TEST_CASE("ball sequences double, nest deeper, and stay certified", "[freeness]") {
  for (const SimStructure& s : {vd2(), vd3(), vd2s2()}) {
    INFO("structure " << s.name());
    BallSequence seq = ball_sequence(s, 10);
    REQUIRE(seq.levels.size() == 10);
    Ball root(s.space(), "");
    int prev_depth = 0;
    for (std::size_t i = 0; i < seq.levels.size(); ++i) {
      const auto& level = seq.levels[i];
      REQUIRE(level.size() == (std::size_t{1} << (i + 1)));
      // strictly increasing minimum depth
      int d = level_depth(level);
      REQUIRE(d > prev_depth);
      prev_depth = d;
      // pairwise disjoint, all pairs
      bool all_disjoint = true;
      for (std::size_t a = 0; a < level.size(); ++a)
        for (std::size_t b = a + 1; b < level.size(); ++b)
          all_disjoint = all_disjoint && disjoint(level[a].first, level[b].first);
      REQUIRE(all_disjoint);
      // every ball arrives with a structure similarity from the whole space
      bool all_certified = true;
      for (const auto& [ball, wit] : level)
        all_certified = all_certified && wit.dom() == root && wit.cod() == ball && s.member(wit);
      REQUIRE(all_certified);
    }
  }
}

TEST_CASE("the first two levels for the binary structure", "[freeness]") {
  BallSequence seq = ball_sequence(vd2(), 2);
  auto addrs = [](const std::vector<std::pair<Ball, Similarity>>& level) {
    std::set<std::string> out;
    for (const auto& [b, w] : level) out.insert(b.addr);
    return out;
  };
  CHECK(addrs(seq.levels[0]) == std::set<std::string>{"0", "1"});
  CHECK(addrs(seq.levels[1]) == std::set<std::string>{"00", "01", "10", "11"});
}

TEST_CASE("structures with no dual contraction are rejected", "[freeness]") {
  REQUIRE_THROWS_MATCHES(ball_sequence(mirror(), 3), Error,
                         code_is(Errc::not_dually_contracting));
  REQUIRE_THROWS_MATCHES(pingpong_witness(mirror()), Error,
                         code_is(Errc::not_dually_contracting));
}

TEST_CASE("the witness over the binary structure lands on pinned balls", "[freeness]") {
  auto w = pingpong_witness(vd2());
  CHECK(w.A1.addr == "0");
  CHECK(w.A2.addr == "1");
  CHECK(w.B1.addr == "00");
  CHECK(w.B2.addr == "01");
  CHECK(w.B3.addr == "10");
  CHECK(w.B4.addr == "11");
  CHECK(w.X1 == ClopenSet::from_balls(vd2().space(), {"1"}));
  CHECK(w.X2 == ClopenSet::from_balls(vd2().space(), {"01"}));
}

TEST_CASE("delta cycles close up exactly", "[freeness]") {
  for (const SimStructure& s : {vd2(), vd3(), vd2s2()}) {
    INFO("structure " << s.name());
    auto w = pingpong_witness(s);
    CHECK(compose(w.d4, compose(w.d3, w.d2)) == Similarity::identity_on(w.B2));
    CHECK(compose(w.d2, compose(w.d4, w.d3)) == Similarity::identity_on(w.B3));
    CHECK(compose(w.d3, compose(w.d2, w.d4)) == Similarity::identity_on(w.B4));
    // and the assembled elements have the right exact orders
    CHECK(compose(w.a1, compose(w.a1, w.a1)).is_identity());
    CHECK_FALSE(w.a1.is_identity());
    CHECK_FALSE(compose(w.a1, w.a1).is_identity());
    CHECK(compose(w.a2, w.a2).is_identity());
    CHECK_FALSE(w.a2.is_identity());
  }
}

TEST_CASE("ping-pong containments are set-exact", "[freeness]") {
  auto w = pingpong_witness(vd2());
  Space sp = vd2().space();
  CHECK(image(w.a1, w.X2) == ClopenSet::from_balls(sp, {"10"}));
  CHECK(image(compose(w.a1, w.a1), w.X2) == ClopenSet::from_balls(sp, {"11"}));
  CHECK(image(w.a2, w.X1) == w.X2);
  CHECK(w.X1.contains(image(w.a1, w.X2)));
  CHECK(w.X1.contains(image(compose(w.a1, w.a1), w.X2)));
  CHECK(w.X2.contains(image(w.a2, w.X1)));
}

TEST_CASE("the full transcript passes for the three dually contracting structures",
          "[freeness]") {
  for (const SimStructure& s : {vd2(), vd3(), vd2s2()}) {
    INFO("structure " << s.name());
    auto t = verify_pingpong(pingpong_witness(s));
    REQUIRE(t.checks.size() == 8);
    for (const auto& [name, ok] : t.checks) {
      INFO("check " << name);
      REQUIRE(ok);
    }
    REQUIRE(t.conclusion);
  }
}

TEST_CASE("the conclusion is monotone in the checks", "[freeness]") {
  auto w = pingpong_witness(vd2());
  SECTION("breaking an order check") {
    w.a2 = GroupElement::identity(vd2());
    auto t = verify_pingpong(w);
    CHECK_FALSE(transcript_check(t, "a2-order-2"));
    CHECK(transcript_check(t, "a1-order-3"));
    CHECK_FALSE(t.conclusion);
  }
  SECTION("breaking a containment check") {
    // swap the ping-pong sets; a1 X1 is nowhere near X2
    std::swap(w.X1, w.X2);
    auto t = verify_pingpong(w);
    CHECK_FALSE(t.conclusion);
  }
  SECTION("tampering with a delta map's domain is a structural error") {
    w.d3 = Similarity::identity_on(w.B2);
    REQUIRE_THROWS_MATCHES(verify_pingpong(w), Error, code_is(Errc::malformed_witness));
  }
  SECTION("a gamma that misses its target ball is a structural error") {
    std::swap(w.gamma1, w.gamma2);
    REQUIRE_THROWS_MATCHES(verify_pingpong(w), Error, code_is(Errc::malformed_witness));
  }
}

TEST_CASE("no reduced alternating word collapses to the identity", "[freeness]") {
  for (const SimStructure& s : {vd2(), vd3(), vd2s2()}) {
    INFO("structure " << s.name());
    auto rep = reduced_word_check(pingpong_witness(s), 6);
    CHECK(rep.pass);
    CHECK(rep.counterexample.empty());
    // syllable counts 1..6 contribute 3+4+6+8+12+16 words
    CHECK(rep.words_checked == 49);
  }
}

TEST_CASE("a sham witness fails the reduced-word sweep", "[freeness]") {
  // r and s generate a copy of S3 inside the depth-2 table permutations:
  // orders are right (3 and 2) but an alternating word of four syllables
  // already collapses to the identity.
  auto w = pingpong_witness(vd2());
  Space sp = vd2().space();
  Perm id(2);
  w.a1 = GroupElement::from_table(
      vd2(), {Similarity(Ball(sp, "00"), Ball(sp, "01"), id),
              Similarity(Ball(sp, "01"), Ball(sp, "10"), id),
              Similarity(Ball(sp, "10"), Ball(sp, "00"), id),
              Similarity::identity_on(Ball(sp, "11"))});
  w.a2 = GroupElement::from_table(
      vd2(), {Similarity(Ball(sp, "00"), Ball(sp, "01"), id),
              Similarity(Ball(sp, "01"), Ball(sp, "00"), id),
              Similarity::identity_on(Ball(sp, "1"))});
  REQUIRE(*order(w.a1).finite == 3);
  REQUIRE(*order(w.a2).finite == 2);
  auto rep = reduced_word_check(w, 6);
  CHECK_FALSE(rep.pass);
  CHECK_FALSE(rep.counterexample.empty());
  // the genuine containment checks catch the same sham
  CHECK_FALSE(verify_pingpong(w).conclusion);
}

TEST_CASE("splitting a partition along the ball sequence", "[freeness]") {
  Space sp = vd2().space();
  Partition whole = Partition::from_blocks(sp, {ClopenSet::whole(sp)});
  SECTION("zero requested blocks returns the partition unchanged") {
    CHECK(split_inside(vd2(), whole, 0) == whole);
  }
  SECTION("the root splits into the two depth-1 balls") {
    Partition r = split_inside(vd2(), whole, 2);
    REQUIRE(r.blocks.size() == 2);
    CHECK(r.blocks[0] == ClopenSet::from_balls(sp, {"0"}));
    CHECK(r.blocks[1] == ClopenSet::from_balls(sp, {"1"}));
  }
  SECTION("a depth-1 partition splits into the four depth-2 balls") {
    Partition p = Partition::from_blocks(
        sp, {ClopenSet::from_balls(sp, {"0"}), ClopenSet::from_balls(sp, {"1"})});
    Partition r = split_inside(vd2(), p, 4);
    REQUIRE(r.blocks.size() == 4);
    for (const auto& a : {"00", "01", "10", "11"}) {
      bool found = false;
      for (const auto& blk : r.blocks) found = found || blk == ClopenSet::from_balls(sp, {a});
      CHECK(found);
    }
    CHECK(refines(p, r));
  }
  SECTION("the result always refines the input and carves enough balls") {
    Partition p = Partition::from_blocks(
        sp, {ClopenSet::from_balls(sp, {"00", "1"}), ClopenSet::from_balls(sp, {"01"})});
    for (int n : {1, 3, 6}) {
      Partition r = split_inside(vd2(), p, n);
      CHECK(refines(p, r));
      int single_balls = 0;
      for (const auto& blk : r.blocks)
        if (blk.balls().size() == 1) ++single_balls;
      CHECK(single_balls >= n);
    }
  }
}
