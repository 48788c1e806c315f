#pragma once

// Elements of the local similarity group of a structure: finite tables of
// similarities whose domains partition the carrier and whose codomains
// partition the carrier.  Tables are kept in normal form: full sibling
// families that are restrictions of one structure similarity are merged, so
// the regions are maximal and the representation is canonical.

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "locsim/error.hpp"
#include "locsim/sim_structure.hpp"
#include "locsim/similarity.hpp"
#include "locsim/space.hpp"

namespace locsim {

namespace detail {

inline void require_partition(const Space& space, std::vector<std::string> addrs,
                              const ClopenSet& target, Errc code, const char* what) {
  std::sort(addrs.begin(), addrs.end());
  for (std::size_t i = 0; i + 1 < addrs.size(); ++i)
    if (is_prefix(addrs[i], addrs[i + 1]))
      fail(code, std::string(what) + " overlap at \"" + addrs[i + 1] + "\"");
  if (ClopenSet::from_balls(space, std::move(addrs)) != target)
    fail(code, std::string(what) + " do not cover the carrier");
}

// Attempt to merge a full sibling family of table entries into one entry on
// the parent ball; returns nothing when the entries are not the restrictions
// of a single structure similarity.
inline std::optional<Similarity> merge_family(const SimStructure& s, const std::string& parent,
                                              const std::vector<const Similarity*>& children) {
  const Space& space = s.space();
  if (space.is_word()) {
    const Perm& t0 = children[0]->tail();
    const std::string& c0 = children[0]->cod().addr;
    if (c0.empty() || c0.back() != t0.apply_char('0')) return std::nullopt;
    std::string parent_cod = c0.substr(0, c0.size() - 1);
    for (std::size_t k = 0; k < children.size(); ++k) {
      if (children[k]->tail() != t0) return std::nullopt;
      if (children[k]->cod().addr != parent_cod + t0.apply_char(static_cast<char>('0' + k)))
        return std::nullopt;
    }
    Similarity candidate(Ball(space, parent), Ball(space, parent_cod), t0);
    if (!s.member(candidate)) return std::nullopt;
    return candidate;
  }
  std::map<std::string, std::string> pm;
  for (const Similarity* c : children) pm.insert(c->pointmap().begin(), c->pointmap().end());
  // The union must land exactly on one ball and scale uniformly; Similarity
  // construction checks both, so probe it.
  std::string lcp = pm.begin()->second;
  for (const auto& [k, v] : pm) {
    std::size_t i = 0;
    while (i < lcp.size() && i < v.size() && lcp[i] == v[i]) ++i;
    lcp.resize(i);
  }
  if (!space.valid_address(lcp) || space.leaves_below(lcp).size() != pm.size())
    return std::nullopt;
  try {
    Similarity candidate(Ball(space, parent), Ball(space, lcp), std::move(pm));
    if (!s.member(candidate)) return std::nullopt;
    return candidate;
  } catch (const Error&) {
    return std::nullopt;
  }
}

inline void sort_table(std::vector<Similarity>& table) {
  std::sort(table.begin(), table.end(), [](const Similarity& a, const Similarity& b) {
    return a.dom().addr < b.dom().addr;
  });
}

// Merge full sibling families bottom-up until stable; with the table sorted
// by domain, a family occupies consecutive slots.
inline void normalize_table(const SimStructure& s, std::vector<Similarity>& table) {
  const Space& space = s.space();
  sort_table(table);
  bool changed = true;
  while (changed) {
    changed = false;
    // Deepest parents first keeps merging confluent.
    std::vector<std::size_t> order(table.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::size_t best = table.size();
    std::size_t best_depth = 0;
    std::optional<Similarity> best_merge;
    for (std::size_t i = 0; i < table.size(); ++i) {
      const std::string& a = table[i].dom().addr;
      if (a.empty() || a.back() != '0') continue;
      std::string parent = a.substr(0, a.size() - 1);
      std::size_t fam = static_cast<std::size_t>(space.child_count(parent));
      if (fam < 2 || i + fam > table.size()) continue;
      std::vector<const Similarity*> children;
      bool full = true;
      for (std::size_t k = 0; k < fam; ++k) {
        if (table[i + k].dom().addr != parent + static_cast<char>('0' + k)) {
          full = false;
          break;
        }
        children.push_back(&table[i + k]);
      }
      if (!full) continue;
      if (best_merge && parent.size() <= best_depth) continue;
      if (auto merged = merge_family(s, parent, children)) {
        best = i;
        best_depth = parent.size();
        best_merge = std::move(merged);
      }
    }
    if (best_merge) {
      std::size_t fam = static_cast<std::size_t>(
          space.child_count(table[best].dom().addr.substr(0, table[best].dom().addr.size() - 1)));
      table.erase(table.begin() + static_cast<long>(best),
                  table.begin() + static_cast<long>(best) + static_cast<long>(fam));
      table.insert(table.begin() + static_cast<long>(best), std::move(*best_merge));
      sort_table(table);
      changed = true;
    }
  }
}

// Composition of piece tables: the codomains of `first` and the domains of
// `second` cover the same set; every overlapping pair contributes one piece
// on the common refinement.
inline std::vector<Similarity> compose_tables(const std::vector<Similarity>& second,
                                              const std::vector<Similarity>& first) {
  std::vector<Similarity> out;
  for (const auto& f : first)
    for (const auto& g : second) {
      switch (compare(f.cod(), g.dom())) {
        case BallRelation::equal_balls:
          out.push_back(compose(g, f));
          break;
        case BallRelation::first_inside_second:  // f.cod inside g.dom
          out.push_back(compose(restrict_to(g, f.cod()), f));
          break;
        case BallRelation::second_inside_first: {  // g.dom strictly inside f.cod
          Ball pre = apply(inverse(f), g.dom());
          out.push_back(compose(g, restrict_to(f, pre)));
          break;
        }
        case BallRelation::disjoint:
          break;
      }
    }
  return out;
}

inline std::vector<Similarity> invert_table(const std::vector<Similarity>& table) {
  std::vector<Similarity> out;
  out.reserve(table.size());
  for (const auto& g : table) out.push_back(inverse(g));
  return out;
}

}  // namespace detail

class GroupElement {
 public:
  static GroupElement identity(const SimStructure& s) {
    std::vector<Similarity> table;
    ClopenSet carrier = s.carrier();
    for (const auto& a : carrier.balls())
      table.push_back(Similarity::identity_on(Ball(s.space(), a)));
    return GroupElement(s, std::move(table));
  }

  // Validates and normalizes.  Membership is checked entry by entry first,
  // then the domain and codomain partitions.
  static GroupElement from_table(const SimStructure& s, std::vector<Similarity> table) {
    if (table.empty()) fail(Errc::domains_not_partition, "empty table");
    for (const auto& g : table) {
      require_same_space(g.space(), s.space(), "from_table");
      if (!s.member(g))
        fail(Errc::entry_not_in_sim,
             "entry \"" + g.dom().addr + "\" -> \"" + g.cod().addr + "\" is not in the structure");
    }
    std::vector<std::string> doms, cods;
    for (const auto& g : table) {
      doms.push_back(g.dom().addr);
      cods.push_back(g.cod().addr);
    }
    detail::require_partition(s.space(), doms, s.carrier(), Errc::domains_not_partition,
                              "table domains");
    detail::require_partition(s.space(), cods, s.carrier(), Errc::codomains_not_partition,
                              "table codomains");
    detail::normalize_table(s, table);
    return GroupElement(s, std::move(table));
  }

  const SimStructure& structure() const { return structure_; }
  const std::vector<Similarity>& table() const { return table_; }

  bool is_identity() const {
    for (const auto& g : table_)
      if (!g.is_identity()) return false;
    return true;
  }

  // Maximum region depth of the canonical table.
  friend int depth_of(const GroupElement& a) {
    int n = 0;
    for (const auto& g : a.table_) n = std::max(n, depth(g.dom()));
    return n;
  }

  // Stable one-line key for dedup and sorting.
  std::string key() const {
    std::string s;
    for (const auto& g : table_) {
      s += g.dom().addr;
      s += '>';
      s += g.cod().addr;
      s += ':';
      if (g.is_word_map()) s += g.tail().image_string();
      else
        for (const auto& [k, v] : g.pointmap()) {
          s += k;
          s += '>';
          s += v;
          s += ',';
        }
      s += '|';
    }
    return s;
  }

 private:
  GroupElement(SimStructure s, std::vector<Similarity> table)
      : structure_(std::move(s)), table_(std::move(table)) {
    detail::sort_table(table_);
  }

  SimStructure structure_;
  std::vector<Similarity> table_;

  friend GroupElement compose(const GroupElement&, const GroupElement&);
  friend GroupElement inverse(const GroupElement&);
};

inline void require_same_structure(const GroupElement& a, const GroupElement& b) {
  if (a.structure() != b.structure())
    fail(Errc::space_mismatch, "elements belong to different structures");
}

// after ∘ first (apply `first`, then `after`).
inline GroupElement compose(const GroupElement& after, const GroupElement& first) {
  require_same_structure(after, first);
  return GroupElement::from_table(first.structure(),
                                  detail::compose_tables(after.table(), first.table()));
}

inline GroupElement inverse(const GroupElement& a) {
  return GroupElement::from_table(a.structure(), detail::invert_table(a.table()));
}

// Tables are constructed normalized, so this is the identity; it exists so
// callers can state intent.
inline GroupElement normalize(const GroupElement& a) { return a; }

inline bool equals(const GroupElement& a, const GroupElement& b) {
  require_same_structure(a, b);
  return a.table() == b.table();
}

inline Point evaluate(const GroupElement& a, const Point& x) {
  for (const auto& g : a.table())
    if (ball_contains_point(g.dom(), x)) return apply(g, x);
  fail(Errc::invalid_argument, "point lies outside the element carrier");
}

struct OrderResult {
  std::optional<int> finite;
  int bound;
  bool is_finite() const { return finite.has_value(); }
};

inline OrderResult order(const GroupElement& a, int bound = 100) {
  GroupElement p = a;
  for (int k = 1; k <= bound; ++k) {
    if (p.is_identity()) return OrderResult{k, bound};
    p = compose(a, p);
  }
  return OrderResult{std::nullopt, bound};
}

// Image of a clopen set under the element, as a clopen set.
inline ClopenSet image(const GroupElement& a, const ClopenSet& c) {
  require_same_space(a.structure().space(), c.space(), "image");
  std::vector<std::string> out;
  for (const auto& addr : c.balls()) {
    Ball b(c.space(), addr);
    for (const auto& g : a.table()) {
      switch (compare(g.dom(), b)) {
        case BallRelation::equal_balls:
        case BallRelation::first_inside_second:  // dom inside b
          out.push_back(g.cod().addr);
          break;
        case BallRelation::second_inside_first:  // b strictly inside dom
          out.push_back(apply(g, b).addr);
          break;
        case BallRelation::disjoint:
          break;
      }
    }
  }
  return ClopenSet::from_balls(c.space(), std::move(out));
}

// ---------------------------------------------------------------------------
// Subgroup closure

struct ClosureResult {
  std::optional<std::vector<GroupElement>> elements;  // sorted by key when finite
  std::size_t size_budget;
  std::size_t reached;
  bool is_finite() const { return elements.has_value(); }
};

// Worklist closure of the subgroup generated by `gens`; stops and reports
// when the element count would exceed `size_budget`.
inline ClosureResult closure(const SimStructure& s, const std::vector<GroupElement>& gens,
                             std::size_t size_budget = 10000) {
  std::vector<GroupElement> step;
  for (const auto& g : gens) {
    if (g.structure() != s) fail(Errc::carrier_mismatch, "generator over a different structure");
    step.push_back(g);
    step.push_back(inverse(g));
  }
  std::map<std::string, GroupElement> seen;
  std::vector<GroupElement> queue{GroupElement::identity(s)};
  seen.emplace(queue.front().key(), queue.front());
  while (!queue.empty()) {
    GroupElement x = queue.back();
    queue.pop_back();
    for (const auto& g : step) {
      GroupElement y = compose(g, x);
      auto [it, fresh] = seen.emplace(y.key(), y);
      if (!fresh) continue;
      if (seen.size() > size_budget) return ClosureResult{std::nullopt, size_budget, seen.size()};
      queue.push_back(y);
    }
  }
  std::vector<GroupElement> out;
  out.reserve(seen.size());
  for (auto& [k, v] : seen) out.push_back(std::move(v));
  return ClosureResult{std::move(out), size_budget, out.size()};
}

// ---------------------------------------------------------------------------
// Restricted carriers

// Extend an element of the restricted structure on y by the identity on the
// complement, giving an element over the ambient structure.
inline GroupElement embed_restricted(const SimStructure& s, const ClopenSet& y,
                                     const GroupElement& inner) {
  SimStructure expected = SimStructure::restricted(s, y);
  if (inner.structure() != expected)
    fail(Errc::carrier_mismatch, "element does not live over the restriction to the given set");
  std::vector<Similarity> table = inner.table();
  for (const auto& addr : subtract(s.carrier(), y))
    table.push_back(Similarity::identity_on(Ball(s.space(), addr)));
  return GroupElement::from_table(s, std::move(table));
}

// Conjugation by a local-equivalence witness w : y -> z carries the group
// over y onto the group over z block by block.
inline GroupElement restricted_iso(const SimStructure& s, const ClopenSet& y, const ClopenSet& z,
                                   const LocalSimWitness& w, const GroupElement& a) {
  if (w.from != y || w.to != z)
    fail(Errc::witness_invalid, "witness endpoints do not match the given sets");
  detail::validate_witness(s, w);
  SimStructure from = SimStructure::restricted(s, y);
  if (a.structure() != from)
    fail(Errc::carrier_mismatch, "element does not live over the restriction to the source set");
  auto conj = detail::compose_tables(w.pieces, detail::compose_tables(a.table(),
                                                                      detail::invert_table(w.pieces)));
  return GroupElement::from_table(SimStructure::restricted(s, z), std::move(conj));
}

}  // namespace locsim
