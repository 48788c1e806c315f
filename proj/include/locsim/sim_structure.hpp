#pragma once

// Similarity structures: for every ordered pair of balls a finite set
// Sim(B1,B2) of similarities B1 -> B2, closed under identities, inverses,
// compositions and restrictions.
//
// Rules provided:
//   * permutational(H): all prefix rewrites with tail permutation in a
//     subgroup H of the letter permutations (H trivial gives the classical
//     V_d groups);
//   * mirror: on the binary word space, the unique order-preserving map
//     from x... to x̄... (first letter flipped) for every non-empty x, plus
//     identities;
//   * finite_enumerated: an explicit set on a finite space, closed under
//     the axioms by a worklist at construction;
//   * minus(base): base with every element between the whole space and a
//     proper ball removed;
//   * restricted(base, Y): elements supported inside the clopen carrier Y,
//     plus identities of balls inside Y.

#include <algorithm>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "locsim/error.hpp"
#include "locsim/similarity.hpp"
#include "locsim/space.hpp"

namespace locsim {

class SimStructure {
 public:
  enum class Rule { permutational, mirror, finite_enumerated, minus, restricted };

  static SimStructure permutational(const Space& space, const std::vector<Perm>& generators,
                                    std::string name = {}) {
    if (!space.is_word())
      fail(Errc::invalid_argument, "permutational structures live on word spaces");
    auto impl = std::make_shared<Impl>();
    impl->space = space;
    impl->rule = Rule::permutational;
    impl->name = std::move(name);
    impl->tails = close_perm_group(space.branching(), generators);
    return SimStructure(std::move(impl));
  }

  static SimStructure mirror(const Space& space, std::string name = {}) {
    if (!space.is_word() || space.branching() != 2)
      fail(Errc::invalid_argument, "the mirror structure lives on the binary word space");
    auto impl = std::make_shared<Impl>();
    impl->space = space;
    impl->rule = Rule::mirror;
    impl->name = std::move(name);
    return SimStructure(std::move(impl));
  }

  // Explicit structure on a finite space.  `generators` seeds the set; the
  // closure under the four axioms is computed here and construction fails
  // if it outgrows `closure_budget`.
  static SimStructure finite_enumerated(const Space& space, std::vector<Similarity> generators,
                                        std::size_t closure_budget = 4096, std::string name = {}) {
    if (!space.is_finite())
      fail(Errc::not_finite_space, "enumerated structures require a finite space");
    auto impl = std::make_shared<Impl>();
    impl->space = space;
    impl->rule = Rule::finite_enumerated;
    impl->name = std::move(name);
    impl->elements = close_finite(space, std::move(generators), closure_budget);
    return SimStructure(std::move(impl));
  }

  static SimStructure minus(const SimStructure& base, std::string name = {}) {
    auto impl = std::make_shared<Impl>();
    impl->space = base.space();
    impl->rule = Rule::minus;
    impl->name = std::move(name);
    impl->base = base.impl_;
    return SimStructure(std::move(impl));
  }

  static SimStructure restricted(const SimStructure& base, const ClopenSet& carrier) {
    require_same_space(base.space(), carrier.space(), "restricted");
    if (!base.carrier().contains(carrier))
      fail(Errc::carrier_mismatch, "carrier must sit inside the base carrier");
    // Restricting a restriction flattens: only the innermost carrier matters.
    auto impl = std::make_shared<Impl>();
    impl->space = base.space();
    impl->rule = Rule::restricted;
    impl->base = base.rule() == Rule::restricted ? base.impl_->base : base.impl_;
    impl->carrier = carrier;
    return SimStructure(std::move(impl));
  }

  const Space& space() const { return impl_->space; }
  Rule rule() const { return impl_->rule; }
  const std::string& name() const { return impl_->name; }

  SimStructure base() const {
    if (!impl_->base) fail(Errc::invalid_argument, "structure has no base");
    return SimStructure(impl_->base);
  }

  ClopenSet carrier() const {
    return impl_->carrier ? *impl_->carrier : ClopenSet::whole(impl_->space);
  }

  const std::vector<Perm>& tail_group() const {
    if (impl_->rule != Rule::permutational)
      fail(Errc::invalid_argument, "tail_group() on a non-permutational structure");
    return impl_->tails;
  }

  const std::vector<Similarity>& enumerated() const {
    if (impl_->rule != Rule::finite_enumerated)
      fail(Errc::invalid_argument, "enumerated() on a non-enumerated structure");
    return impl_->elements;
  }

  // Canonical identifier; an explicit name overrides the derived form.
  std::string id() const { return impl_->name.empty() ? space().id() + "/" + rule_id() : impl_->name; }

  std::string rule_id() const {
    switch (impl_->rule) {
      case Rule::permutational: {
        std::string s = "perm[";
        bool first = true;
        for (const auto& p : impl_->tails) {
          if (p.is_identity()) continue;
          if (!first) s += ',';
          s += p.image_string();
          first = false;
        }
        return s + "]";
      }
      case Rule::mirror:
        return "mirror";
      case Rule::finite_enumerated: {
        // Content hash keeps ids short while still distinguishing sets.
        unsigned long long h = 1469598103934665603ull;
        auto mix = [&h](const std::string& s) {
          for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ull;
          }
        };
        for (const auto& g : impl_->elements) {
          mix(g.dom().addr);
          mix("|" + g.cod().addr);
          for (const auto& [k, v] : g.pointmap()) mix(k + ">" + v);
        }
        char buf[32];
        std::snprintf(buf, sizeof buf, "enum[%zu:%llx]", impl_->elements.size(), h);
        return buf;
      }
      case Rule::minus:
        return "minus(" + SimStructure(impl_->base).rule_id() + ")";
      case Rule::restricted: {
        std::string s = "restrict(" + SimStructure(impl_->base).rule_id() + ";Y=";
        const auto& balls = impl_->carrier->balls();
        for (std::size_t i = 0; i < balls.size(); ++i) {
          if (i) s += '+';
          s += '"' + balls[i] + '"';
        }
        return s + ")";
      }
    }
    return "?";
  }

  bool member(const Similarity& g) const {
    if (g.space() != space()) return false;
    switch (impl_->rule) {
      case Rule::permutational:
        return std::binary_search(impl_->tails.begin(), impl_->tails.end(), g.tail());
      case Rule::mirror:
        if (!g.tail().is_identity()) return false;
        return g.dom() == g.cod() ||
               (!g.dom().addr.empty() && g.cod().addr == mirrored(g.dom().addr));
      case Rule::finite_enumerated:
        return std::find(impl_->elements.begin(), impl_->elements.end(), g) !=
               impl_->elements.end();
      case Rule::minus: {
        bool dom_root = g.dom().is_root();
        bool cod_root = g.cod().is_root();
        if (dom_root != cod_root) return false;
        return SimStructure(impl_->base).member(g);
      }
      case Rule::restricted: {
        if (!impl_->carrier->contains_ball(g.dom()) || !impl_->carrier->contains_ball(g.cod()))
          return false;
        return g.is_identity() || SimStructure(impl_->base).member(g);
      }
    }
    return false;
  }

  // The full (finite) set Sim(b1,b2).
  std::vector<Similarity> sim_set(const Ball& b1, const Ball& b2) const {
    require_same_space(b1.space, space(), "sim_set");
    require_same_space(b2.space, space(), "sim_set");
    switch (impl_->rule) {
      case Rule::permutational: {
        std::vector<Similarity> out;
        out.reserve(impl_->tails.size());
        for (const auto& p : impl_->tails) out.emplace_back(b1, b2, p);
        return out;
      }
      case Rule::mirror: {
        std::vector<Similarity> out;
        if (b1 == b2) out.push_back(Similarity::identity_on(b1));
        else if (!b1.addr.empty() && b2.addr == mirrored(b1.addr))
          out.emplace_back(b1, b2, Perm(2));
        return out;
      }
      case Rule::finite_enumerated: {
        std::vector<Similarity> out;
        for (const auto& g : impl_->elements)
          if (g.dom() == b1 && g.cod() == b2) out.push_back(g);
        return out;
      }
      case Rule::minus: {
        if (b1.is_root() != b2.is_root()) return {};
        return SimStructure(impl_->base).sim_set(b1, b2);
      }
      case Rule::restricted: {
        if (!impl_->carrier->contains_ball(b1) || !impl_->carrier->contains_ball(b2)) return {};
        auto out = SimStructure(impl_->base).sim_set(b1, b2);
        if (b1 == b2) {
          auto id = Similarity::identity_on(b1);
          if (std::find(out.begin(), out.end(), id) == out.end()) out.push_back(id);
        }
        return out;
      }
    }
    return {};
  }

  static std::string mirrored(const std::string& addr) {
    std::string m = addr;
    m[0] = m[0] == '0' ? '1' : '0';
    return m;
  }

  friend bool operator==(const SimStructure& a, const SimStructure& b) {
    return a.space() == b.space() && a.rule_id() == b.rule_id();
  }
  friend bool operator!=(const SimStructure& a, const SimStructure& b) { return !(a == b); }

 private:
  struct Impl {
    Space space = Space::word(2);
    Rule rule = Rule::permutational;
    std::string name;
    std::vector<Perm> tails;             // permutational: the closed subgroup, sorted
    std::shared_ptr<const Impl> base;    // minus / restricted
    std::optional<ClopenSet> carrier;    // restricted
    std::vector<Similarity> elements;    // finite_enumerated: closed set incl. identities
  };

  explicit SimStructure(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

  static std::vector<Perm> close_perm_group(int degree, const std::vector<Perm>& gens) {
    std::set<Perm> group;
    group.insert(Perm(degree));
    for (const auto& g : gens) {
      if (g.degree() != degree)
        fail(Errc::invalid_argument, "generator degree differs from alphabet size");
      group.insert(g);
    }
    bool grew = true;
    while (grew) {
      grew = false;
      std::vector<Perm> cur(group.begin(), group.end());
      for (const auto& a : cur)
        for (const auto& b : cur)
          if (group.insert(a.then(b)).second) grew = true;
    }
    return {group.begin(), group.end()};
  }

  static std::vector<Similarity> close_finite(const Space& space, std::vector<Similarity> gens,
                                              std::size_t budget) {
    std::vector<Similarity> set;
    auto add = [&set, budget](const Similarity& g) {
      if (std::find(set.begin(), set.end(), g) != set.end()) return false;
      if (set.size() >= budget)
        fail(Errc::budget_exceeded, "axiom closure outgrew the configured budget");
      set.push_back(g);
      return true;
    };
    // Identities on every ball, then the seed.
    std::vector<std::string> all_balls;
    collect_balls(space, "", all_balls);
    for (const auto& a : all_balls) add(Similarity::identity_on(Ball(space, a)));
    for (auto& g : gens) {
      require_same_space(g.space(), space, "finite_enumerated");
      add(g);
    }
    // Worklist closure under inverse, composition and child restriction;
    // restriction to arbitrary subballs follows by iterating children.
    std::size_t done = 0;
    while (done < set.size()) {
      Similarity g = set[done++];
      add(inverse(g));
      if (space.child_count(g.dom().addr) > 0)
        for (const auto& c : maximal_proper_subballs(g.dom())) add(restrict_to(g, c));
      for (std::size_t i = 0; i < set.size(); ++i) {
        Similarity h = set[i];
        if (h.dom() == g.cod()) add(compose(h, g));
        if (g.dom() == h.cod()) add(compose(g, h));
      }
    }
    return set;
  }

  static void collect_balls(const Space& space, const std::string& addr,
                            std::vector<std::string>& out) {
    out.push_back(addr);
    int n = space.child_count(addr);
    for (int k = 0; k < n; ++k) collect_balls(space, addr + static_cast<char>('0' + k), out);
  }

  std::shared_ptr<const Impl> impl_;
};

// ---------------------------------------------------------------------------
// Dual contractions

struct DualContractionWitness {
  Ball b1, b2;        // disjoint proper subballs
  Similarity g1, g2;  // members of Sim(X, b1) and Sim(X, b2)
};

namespace detail {

inline std::optional<Similarity> least_member(const SimStructure& s, const Ball& a,
                                              const Ball& b) {
  auto set = s.sim_set(a, b);
  if (set.empty()) return std::nullopt;
  return set.front();
}

}  // namespace detail

// A structure is dually contracting when the whole space maps into each of
// two disjoint proper subballs.  The rules decide this exactly:
// permutational structures always do (children "0" and "1"); mirror maps
// never leave a ball except to its first-letter flip, and the minus
// construction removes exactly the required elements, so both yield none;
// enumerated structures are searched outright.
inline std::optional<DualContractionWitness> dual_contraction(const SimStructure& s) {
  ClopenSet carrier = s.carrier();
  if (carrier.balls().size() != 1) return std::nullopt;  // the carrier is not a ball
  Ball X(s.space(), carrier.balls().front());
  std::vector<Ball> candidates;
  if (s.space().is_word()) {
    switch (s.rule()) {
      case SimStructure::Rule::mirror:
      case SimStructure::Rule::minus:
        return std::nullopt;
      default:
        candidates = maximal_proper_subballs(X);
    }
  } else {
    // A finite space has fewer points in any proper subball, so the search
    // over the enumerated set below is exact and comes back empty.
    std::vector<std::string> addrs;
    addrs.push_back(X.addr);
    for (std::size_t i = 0; i < addrs.size(); ++i) {
      int n = s.space().child_count(addrs[i]);
      for (int k = 0; k < n; ++k) addrs.push_back(addrs[i] + static_cast<char>('0' + k));
    }
    for (std::size_t i = 1; i < addrs.size(); ++i) candidates.emplace_back(s.space(), addrs[i]);
  }
  for (std::size_t i = 0; i < candidates.size(); ++i)
    for (std::size_t j = i + 1; j < candidates.size(); ++j) {
      if (!disjoint(candidates[i], candidates[j])) continue;
      auto g1 = detail::least_member(s, X, candidates[i]);
      if (!g1) continue;
      auto g2 = detail::least_member(s, X, candidates[j]);
      if (!g2) continue;
      return DualContractionWitness{candidates[i], candidates[j], *g1, *g2};
    }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Separating census

// Either an exact count or three distinct separating elements at strictly
// increasing depth, produced by iterating a contracting element on a ball
// missed by its image (or by restricting a separating element).
struct SeparatingCensus {
  std::optional<std::size_t> finite_count;
  std::vector<Similarity> infinite_witness;
  bool is_finite() const { return finite_count.has_value(); }
};

namespace detail {

// Descends through minus/restricted layers; engaged iff the underlying
// structure is a finite enumeration, in which case the derived structure's
// elements are exactly the root's elements surviving member().
inline std::optional<SimStructure> enumerated_root(const SimStructure& s) {
  SimStructure cur = s;
  while (cur.rule() == SimStructure::Rule::minus || cur.rule() == SimStructure::Rule::restricted)
    cur = cur.base();
  if (cur.rule() == SimStructure::Rule::finite_enumerated) return cur;
  return std::nullopt;
}

inline std::vector<Ball> balls_within(const SimStructure& s, int max_depth) {
  std::vector<Ball> out;
  ClopenSet carrier = s.carrier();
  for (const auto& root : carrier.balls()) {
    std::vector<std::string> stack{root};
    while (!stack.empty()) {
      std::string a = stack.back();
      stack.pop_back();
      out.emplace_back(s.space(), a);
      if (static_cast<int>(a.size()) >= max_depth) continue;
      int n = s.space().child_count(a);
      for (int k = 0; k < n; ++k) stack.push_back(a + static_cast<char>('0' + k));
    }
  }
  std::sort(out.begin(), out.end(), [](const Ball& x, const Ball& y) { return x.addr < y.addr; });
  return out;
}

}  // namespace detail

inline SeparatingCensus separating_census(const SimStructure& s, int depth_bound = 6) {
  if (auto root = detail::enumerated_root(s)) {
    std::size_t count = 0;
    for (const auto& g : root->enumerated())
      if (s.member(g) && classify(g) == SimilarityClass::separating) ++count;
    return SeparatingCensus{count, {}};
  }
  auto balls = detail::balls_within(s, depth_bound);
  // Contracting element first: iterate it as in the infinite-orbit
  // construction C_i = g^i(C) with C a ball missed by the image.
  for (const auto& a : balls)
    for (const auto& b : balls) {
      if (compare(a, b) != BallRelation::second_inside_first) continue;  // need b strictly in a
      auto g = detail::least_member(s, a, b);
      if (!g) continue;
      for (const auto& c : maximal_proper_subballs(a)) {
        if (!disjoint(c, b)) continue;
        std::vector<Similarity> witness;
        Ball cur = c;
        for (int i = 0; i < 3; ++i) {
          Similarity piece = restrict_to(*g, cur);
          witness.push_back(piece);
          cur = piece.cod();
        }
        return SeparatingCensus{std::nullopt, std::move(witness)};
      }
    }
  // Otherwise one separating element already gives infinitely many: its
  // restrictions to nested subballs stay separating.
  for (const auto& a : balls)
    for (const auto& b : balls) {
      if (!disjoint(a, b)) continue;
      auto g = detail::least_member(s, a, b);
      if (!g) continue;
      std::vector<Similarity> witness;
      Ball cur = a;
      for (int i = 0; i < 3; ++i) {
        witness.push_back(restrict_to(*g, cur));
        cur = maximal_proper_subballs(cur).front();
      }
      return SeparatingCensus{std::nullopt, std::move(witness)};
    }
  // Nothing within the exploration depth.
  return SeparatingCensus{static_cast<std::size_t>(0), {}};
}

// ---------------------------------------------------------------------------
// Local equivalence of clopen subsets

// Witness for "y and z are locally Sim-equivalent": a finite table of
// structure similarities whose domains partition y and codomains partition z.
struct LocalSimWitness {
  ClopenSet from, to;
  std::vector<Similarity> pieces;
};

enum class LseStatus { witness, none, budget_exceeded };

struct LseResult {
  LseStatus status;
  std::optional<LocalSimWitness> witness;
};

namespace detail {

// Structures whose similarity supply between any two carrier balls is the
// whole tail group: witness existence reduces to a ball-counting congruence.
inline bool counting_rule_applies(const SimStructure& s) {
  switch (s.rule()) {
    case SimStructure::Rule::permutational: return true;
    case SimStructure::Rule::minus:
    case SimStructure::Rule::restricted: return counting_rule_applies(s.base());
    default: return false;
  }
}

inline void validate_witness(const SimStructure& s, const LocalSimWitness& w) {
  std::vector<std::string> doms, cods;
  for (const auto& g : w.pieces) {
    if (!s.member(g)) fail(Errc::witness_invalid, "witness piece is not a structure element");
    doms.push_back(g.dom().addr);
    cods.push_back(g.cod().addr);
  }
  auto check = [&](std::vector<std::string> addrs, const ClopenSet& target, const char* side) {
    std::sort(addrs.begin(), addrs.end());
    for (std::size_t i = 0; i + 1 < addrs.size(); ++i)
      if (is_prefix(addrs[i], addrs[i + 1]))
        fail(Errc::witness_invalid, std::string(side) + " pieces overlap");
    if (ClopenSet::from_balls(s.space(), addrs) != target)
      fail(Errc::witness_invalid, std::string(side) + " pieces do not cover the set");
  };
  check(doms, w.from, "domain");
  check(cods, w.to, "codomain");
}

// Split the shallowest ball of the shorter list until the lengths agree;
// splitting replaces a ball by its full sibling family, which changes list
// length by (children - 1).
inline void equalize_by_splitting(const Space& space, std::vector<std::string>& shorter,
                                  std::size_t target) {
  while (shorter.size() < target) {
    std::size_t pick = 0;
    for (std::size_t i = 1; i < shorter.size(); ++i)
      if (shorter[i].size() < shorter[pick].size()) pick = i;
    std::string a = shorter[pick];
    shorter.erase(shorter.begin() + static_cast<long>(pick));
    int n = space.child_count(a);
    for (int k = 0; k < n; ++k) shorter.push_back(a + static_cast<char>('0' + k));
    std::sort(shorter.begin(), shorter.end());
  }
}

// Mirror pieces either fix their ball or flip the first address letter
// while keeping the rest, so the two halves of the space can only trade
// same-tail regions.  Equivalence is therefore exact: expand both halves of
// each set to a common tail depth and compare how often every tail is
// covered.  When the multiplicities agree, pieces at that uniform depth
// realize the witness.
inline LseResult mirror_rule(const SimStructure& s, const ClopenSet& y, const ClopenSet& z) {
  std::size_t len = 1;
  for (const ClopenSet* set : {&y, &z})
    for (const auto& a : set->balls()) len = std::max(len, a.size());
  const std::size_t tail_len = len - 1;
  auto half_tails = [&](const ClopenSet& set, char half) {
    std::set<std::string> out;
    for (const auto& a : set.balls()) {
      if (!a.empty() && a[0] != half) continue;
      std::vector<std::string> stack{a.empty() ? std::string() : a.substr(1)};
      while (!stack.empty()) {
        std::string t = std::move(stack.back());
        stack.pop_back();
        if (t.size() == tail_len) {
          out.insert(std::move(t));
          continue;
        }
        stack.push_back(t + '0');
        stack.push_back(t + '1');
      }
    }
    return out;
  };
  std::set<std::string> y0 = half_tails(y, '0'), y1 = half_tails(y, '1');
  std::set<std::string> z0 = half_tails(z, '0'), z1 = half_tails(z, '1');
  std::set<std::string> tails;
  for (const auto* side : {&y0, &y1, &z0, &z1}) tails.insert(side->begin(), side->end());
  for (const auto& t : tails)
    if (y0.count(t) + y1.count(t) != z0.count(t) + z1.count(t))
      return LseResult{LseStatus::none, std::nullopt};
  LocalSimWitness w{y, z, {}};
  for (const auto& t : tails) {
    if (y0.count(t))
      w.pieces.push_back(z0.count(t)
                             ? Similarity::identity_on(Ball(s.space(), "0" + t))
                             : Similarity(Ball(s.space(), "0" + t), Ball(s.space(), "1" + t),
                                          Perm(2)));
    if (y1.count(t))
      w.pieces.push_back(z1.count(t)
                             ? Similarity::identity_on(Ball(s.space(), "1" + t))
                             : Similarity(Ball(s.space(), "1" + t), Ball(s.space(), "0" + t),
                                          Perm(2)));
  }
  validate_witness(s, w);
  return LseResult{LseStatus::witness, std::move(w)};
}

// Backtracking witness search with all pieces at depth <= limit, giving up
// after a fixed number of nodes.  An exhausted search (nodes to spare) is
// conclusive on finite spaces; on infinite spaces deeper witnesses remain
// possible.
inline bool search_witness(const SimStructure& s, std::vector<std::string> rem_y,
                           std::vector<std::string> rem_z, int limit, long& nodes,
                           std::vector<Similarity>& acc) {
  if (--nodes < 0) return false;
  if (rem_y.empty() && rem_z.empty()) return true;
  if (rem_y.empty() || rem_z.empty()) return false;
  std::sort(rem_y.begin(), rem_y.end());
  // The piece covering the least point of the remainder must sit on the
  // leftmost descent from its least ball.
  std::string base = rem_y.front();
  std::vector<std::string> dom_candidates{base};
  while (static_cast<int>(dom_candidates.back().size()) < limit &&
         s.space().child_count(dom_candidates.back()) > 0)
    dom_candidates.push_back(dom_candidates.back() + '0');
  std::vector<std::string> cod_candidates;
  for (const auto& root : rem_z) {
    std::vector<std::string> stack{root};
    while (!stack.empty()) {
      std::string a = stack.back();
      stack.pop_back();
      cod_candidates.push_back(a);
      if (static_cast<int>(a.size()) >= limit) continue;
      int n = s.space().child_count(a);
      for (int k = 0; k < n; ++k) stack.push_back(a + static_cast<char>('0' + k));
    }
  }
  std::sort(cod_candidates.begin(), cod_candidates.end());
  for (const auto& d : dom_candidates) {
    Ball dom(s.space(), d);
    auto rest_y = subtract(ClopenSet::from_balls(s.space(), rem_y),
                           ClopenSet::from_balls(s.space(), {d}));
    for (const auto& c : cod_candidates) {
      Ball cod(s.space(), c);
      auto set = s.sim_set(dom, cod);
      if (set.empty()) continue;
      auto rest_z = subtract(ClopenSet::from_balls(s.space(), rem_z),
                             ClopenSet::from_balls(s.space(), {c}));
      acc.push_back(set.front());
      if (search_witness(s, rest_y, rest_z, limit, nodes, acc)) return true;
      acc.pop_back();
    }
  }
  return false;
}

}  // namespace detail

// Decides whether two clopen sets are locally Sim-equivalent.  For
// permutational-style structures this is exact: a witness exists precisely
// when the canonical ball counts agree modulo (d - 1), and one is built by
// splitting the shorter side.  The mirror structure is decided exactly by
// the half-trace rule.  Other structures fall back to a bounded piece
// search: a full miss is conclusive on finite spaces; running out of depth
// or nodes reports budget_exceeded.
inline LseResult locally_sim_equivalent(const SimStructure& s, const ClopenSet& y,
                                        const ClopenSet& z, int depth_budget = 6) {
  require_same_space(y.space(), s.space(), "locally_sim_equivalent");
  require_same_space(z.space(), s.space(), "locally_sim_equivalent");
  if (!s.carrier().contains(y) || !s.carrier().contains(z))
    fail(Errc::invalid_argument, "sets must sit inside the structure carrier");
  if (y == z) {
    LocalSimWitness w{y, z, {}};
    for (const auto& a : y.balls()) w.pieces.push_back(Similarity::identity_on(Ball(s.space(), a)));
    detail::validate_witness(s, w);
    return LseResult{LseStatus::witness, std::move(w)};
  }
  if (detail::counting_rule_applies(s) && s.space().is_word()) {
    int d = s.space().branching();
    std::vector<std::string> ylist = y.balls();
    std::vector<std::string> zlist = z.balls();
    auto diff = static_cast<long>(ylist.size()) - static_cast<long>(zlist.size());
    if (d > 2 && ((diff % (d - 1)) + (d - 1)) % (d - 1) != 0)
      return LseResult{LseStatus::none, std::nullopt};
    if (ylist.size() < zlist.size())
      detail::equalize_by_splitting(s.space(), ylist, zlist.size());
    else
      detail::equalize_by_splitting(s.space(), zlist, ylist.size());
    LocalSimWitness w{y, z, {}};
    Perm id(d);
    for (std::size_t i = 0; i < ylist.size(); ++i) {
      Similarity piece(Ball(s.space(), ylist[i]), Ball(s.space(), zlist[i]), id);
      if (s.member(piece)) {
        w.pieces.push_back(std::move(piece));
        continue;
      }
      // A minus structure rejects whole-space pieces; one split repairs it.
      for (int k = 0; k < d; ++k)
        w.pieces.emplace_back(Ball(s.space(), ylist[i] + static_cast<char>('0' + k)),
                              Ball(s.space(), zlist[i] + static_cast<char>('0' + k)), id);
    }
    detail::validate_witness(s, w);
    return LseResult{LseStatus::witness, std::move(w)};
  }
  if (s.rule() == SimStructure::Rule::mirror) return detail::mirror_rule(s, y, z);
  std::vector<Similarity> acc;
  long nodes = 200000;
  if (detail::search_witness(s, y.balls(), z.balls(), depth_budget, nodes, acc)) {
    LocalSimWitness w{y, z, std::move(acc)};
    detail::validate_witness(s, w);
    return LseResult{LseStatus::witness, std::move(w)};
  }
  if (s.space().is_finite() && nodes >= 0) return LseResult{LseStatus::none, std::nullopt};
  return LseResult{LseStatus::budget_exceeded, std::nullopt};
}

// ---------------------------------------------------------------------------
// Decomposition of equalizing elements (finite spaces)

// One piece of the decomposition: a ball together with either nothing (the
// element is the identity there) or the separating restriction to it.
struct EqualizingPiece {
  Ball ball;
  std::optional<Similarity> separating;  // empty: identity piece
};

namespace detail {

inline void decompose_equalizing_rec(const Similarity& g, const Ball& b,
                                     std::vector<EqualizingPiece>& out) {
  Similarity r = restrict_to(g, b);
  if (r.is_identity()) {
    out.push_back(EqualizingPiece{b, std::nullopt});
    return;
  }
  if (disjoint(r.dom(), r.cod())) {
    out.push_back(EqualizingPiece{b, std::move(r)});
    return;
  }
  // An equalizing map preserves depth, so the image of b meets b only by
  // equaling it; recurse into the children.
  for (const auto& c : maximal_proper_subballs(b)) decompose_equalizing_rec(g, c, out);
}

}  // namespace detail

// Splits the domain of an equalizing element of an enumerated structure
// into balls on which it is the identity or separating.
inline std::vector<EqualizingPiece> decompose_equalizing(const SimStructure& s,
                                                         const Similarity& g) {
  if (s.rule() != SimStructure::Rule::finite_enumerated)
    fail(Errc::not_finite_space, "decomposition is defined for enumerated structures");
  if (!s.member(g)) fail(Errc::entry_not_in_sim, "element does not belong to the structure");
  if (classify(g) != SimilarityClass::equalizing)
    fail(Errc::not_equalizing, "element is not equalizing");
  std::vector<EqualizingPiece> out;
  detail::decompose_equalizing_rec(g, g.dom(), out);
  return out;
}

}  // namespace locsim
