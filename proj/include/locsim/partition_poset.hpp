#pragma once

// The poset of clopen partitions with at least n blocks locally
// Sim-equivalent to the whole space, the group action on it, and the
// isotropy-group bookkeeping: refinement functions, admissible block
// permutations, and the product-of-restrictions decomposition.

#include <algorithm>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "locsim/error.hpp"
#include "locsim/group_element.hpp"
#include "locsim/pingpong.hpp"
#include "locsim/sim_structure.hpp"

namespace locsim {

// A partition together with the blocks certified locally Sim-equivalent to
// the carrier.  Witnesses are kept so membership stays certificate-backed.
struct PosetVertex {
  Partition partition;
  std::vector<std::pair<std::size_t, LocalSimWitness>> marked;  // block index -> certificate
};

// Marks every block that locally_sim_equivalent certifies against the
// carrier; a vertex results iff at least n blocks are marked.  Budget
// misses leave a block unmarked rather than failing the query.
inline std::optional<PosetVertex> poset_member(const SimStructure& s, const Partition& p, int n,
                                               int depth_budget = 6) {
  if (n < 0) fail(Errc::invalid_argument, "block count must be nonnegative");
  ClopenSet carrier = s.carrier();
  PosetVertex v{p, {}};
  for (std::size_t i = 0; i < p.blocks.size(); ++i) {
    LseResult r = locally_sim_equivalent(s, p.blocks[i], carrier, depth_budget);
    if (r.status == LseStatus::witness) v.marked.emplace_back(i, *r.witness);
  }
  if (v.marked.size() < static_cast<std::size_t>(n)) return std::nullopt;
  return v;
}

// True iff every block of q lies inside a block of p (q refines p).
inline bool refines(const Partition& p, const Partition& q) {
  if (!(p.space == q.space)) fail(Errc::space_mismatch, "partitions live in different spaces");
  for (const auto& qb : q.blocks) {
    bool placed = false;
    for (const auto& pb : p.blocks)
      if (pb.contains(qb)) {
        placed = true;
        break;
      }
    if (!placed) return false;
  }
  return true;
}

// f: blocks of q -> blocks of p, sending each fine block to the coarse
// block containing it.
inline std::vector<std::size_t> refinement_function(const Partition& p, const Partition& q) {
  if (!refines(p, q)) fail(Errc::not_refinement, "second partition does not refine the first");
  std::vector<std::size_t> f(q.blocks.size());
  for (std::size_t j = 0; j < q.blocks.size(); ++j)
    for (std::size_t i = 0; i < p.blocks.size(); ++i)
      if (p.blocks[i].contains(q.blocks[j])) {
        f[j] = i;
        break;
      }
  return f;
}

// Block-wise intersection of two partitions.
inline Partition intersect_partitions(const Partition& p, const Partition& q) {
  if (!(p.space == q.space)) fail(Errc::space_mismatch, "partitions live in different spaces");
  std::vector<ClopenSet> blocks;
  for (const auto& pb : p.blocks)
    for (const auto& qb : q.blocks) {
      auto addrs = intersect_balls(pb, qb);
      if (!addrs.empty()) blocks.push_back(ClopenSet::from_balls(p.space, std::move(addrs)));
    }
  return Partition::from_blocks(p.space, std::move(blocks));
}

// Directedness: a vertex refining both inputs.  The block-wise intersection
// usually already qualifies; if marking falls short, split_inside carves in
// enough witnessed balls.
inline PosetVertex common_refinement(const SimStructure& s, const PosetVertex& p,
                                     const PosetVertex& q, int n, int depth_budget = 6) {
  Partition r = intersect_partitions(p.partition, q.partition);
  auto v = poset_member(s, r, n, depth_budget);
  if (!v) {
    r = split_inside(s, r, n);
    v = poset_member(s, r, n, depth_budget);
  }
  if (!v) fail(Errc::budget_exceeded, "could not certify the common refinement");
  return *v;
}

// g applied block-wise: {P_1,...,P_k} -> {g(P_1),...,g(P_k)}.
inline Partition act(const GroupElement& g, const Partition& p) {
  if (!(g.structure().space() == p.space))
    fail(Errc::space_mismatch, "element and partition live in different spaces");
  std::vector<ClopenSet> blocks;
  blocks.reserve(p.blocks.size());
  for (const auto& b : p.blocks) blocks.push_back(image(g, b));
  return Partition::from_blocks(p.space, std::move(blocks));
}

// ---------------------------------------------------------------------------
// Chains and admissible permutations

// Strictly increasing run of partitions under refinement; the last entry is
// the finest.
struct PartitionChain {
  std::vector<Partition> vertices;

  explicit PartitionChain(std::vector<Partition> vs) : vertices(std::move(vs)) {
    if (vertices.empty()) fail(Errc::invalid_argument, "chain needs at least one partition");
    for (std::size_t i = 0; i + 1 < vertices.size(); ++i) {
      if (vertices[i] == vertices[i + 1])
        fail(Errc::invalid_argument, "chain entries must be strictly increasing");
      if (!refines(vertices[i], vertices[i + 1]))
        fail(Errc::not_refinement, "chain entries must be increasingly fine");
    }
  }

  const Partition& finest() const { return vertices.back(); }
};

// Permutations of the finest vertex's blocks that descend to a permutation
// of every coarser vertex, listed explicitly (images by block index).
struct AdmissibleGroup {
  PartitionChain chain;
  std::vector<std::vector<std::size_t>> elements;  // lexicographically sorted

  bool contains(const std::vector<std::size_t>& pi) const {
    return std::binary_search(elements.begin(), elements.end(), pi);
  }
};

constexpr std::size_t kAdmissibleBlockCap = 8;

// Brute force over the symmetric group of the finest vertex: pi survives
// iff, for every coarser vertex with refinement function f, f(pi(Q))
// depends only on f(Q).
inline AdmissibleGroup admissible_group(const PartitionChain& chain,
                                        std::size_t block_cap = kAdmissibleBlockCap) {
  std::size_t m = chain.finest().blocks.size();
  if (m > block_cap)
    fail(Errc::too_many_blocks, "finest vertex exceeds the brute-force cap of " +
                                    std::to_string(block_cap) + " blocks");
  std::vector<std::vector<std::size_t>> fs;
  for (std::size_t i = 0; i + 1 < chain.vertices.size(); ++i)
    fs.push_back(refinement_function(chain.vertices[i], chain.finest()));
  std::vector<std::size_t> pi(m);
  std::iota(pi.begin(), pi.end(), 0);
  AdmissibleGroup g{chain, {}};
  do {
    bool ok = true;
    for (const auto& f : fs) {
      // well-defined rho: equal f-fibres must stay equal after pi
      for (std::size_t a = 0; a < m && ok; ++a)
        for (std::size_t b = a + 1; b < m && ok; ++b)
          if (f[a] == f[b] && f[pi[a]] != f[pi[b]]) ok = false;
      if (!ok) break;
    }
    if (ok) g.elements.push_back(pi);
  } while (std::next_permutation(pi.begin(), pi.end()));
  return g;
}

// If g maps every finest block onto a finest block and the induced block
// permutation is admissible for the chain, returns that permutation.
inline std::optional<std::vector<std::size_t>> isotropy_membership(
    const GroupElement& g, const PartitionChain& chain,
    std::size_t block_cap = kAdmissibleBlockCap) {
  const Partition& fine = chain.finest();
  std::size_t m = fine.blocks.size();
  std::vector<std::size_t> pi(m, m);
  std::vector<bool> hit(m, false);
  for (std::size_t j = 0; j < m; ++j) {
    ClopenSet img = image(g, fine.blocks[j]);
    bool found = false;
    for (std::size_t k = 0; k < m; ++k)
      if (img == fine.blocks[k]) {
        pi[j] = k;
        hit[k] = true;
        found = true;
        break;
      }
    if (!found) return std::nullopt;
  }
  if (std::find(hit.begin(), hit.end(), false) != hit.end()) return std::nullopt;
  if (!admissible_group(chain, block_cap).contains(pi)) return std::nullopt;
  return pi;
}

// The product decomposition of the isotropy group: one restricted structure
// per finest block, with the admissible group bounding the quotient.
struct IsotropySummary {
  PartitionChain chain;
  std::vector<SimStructure> lambda_factors;
  AdmissibleGroup admissible;

  std::size_t index_bound() const { return admissible.elements.size(); }
};

inline IsotropySummary lambda_summary(const SimStructure& s, const PartitionChain& chain,
                                      std::size_t block_cap = kAdmissibleBlockCap) {
  std::vector<SimStructure> factors;
  for (const auto& b : chain.finest().blocks) factors.push_back(SimStructure::restricted(s, b));
  AdmissibleGroup adm = admissible_group(chain, block_cap);
  return IsotropySummary{chain, std::move(factors), std::move(adm)};
}

// ---------------------------------------------------------------------------
// Exhaustive partition enumeration (word spaces, small depth)

namespace detail {

// Partitions of the ball at `prefix` into balls of relative depth <= k,
// each partition a sorted list of addresses.
inline std::vector<std::vector<std::string>> ball_partitions(const Space& space,
                                                             const std::string& prefix, int k) {
  std::vector<std::vector<std::string>> out{{prefix}};
  if (k == 0) return out;
  std::vector<std::vector<std::vector<std::string>>> per_child;
  for (int c = 0; c < space.branching(); ++c)
    per_child.push_back(ball_partitions(space, prefix + static_cast<char>('0' + c), k - 1));
  // cartesian product over children, children concatenated in order
  std::vector<std::vector<std::string>> combos{{}};
  for (const auto& choices : per_child) {
    std::vector<std::vector<std::string>> next;
    for (const auto& partial : combos)
      for (const auto& choice : choices) {
        auto row = partial;
        row.insert(row.end(), choice.begin(), choice.end());
        next.push_back(std::move(row));
      }
    combos = std::move(next);
  }
  out.insert(out.end(), combos.begin(), combos.end());
  return out;
}

}  // namespace detail

constexpr std::size_t kEnumeratePartitionBudget = 100000;

// Every partition of a word space into balls of depth <= depth_bound, in
// canonical (lexicographic ball-list) order.  The count grows doubly
// exponentially, hence the budget guard.
inline std::vector<Partition> enumerate_partitions(
    const Space& space, int depth_bound, std::size_t budget = kEnumeratePartitionBudget) {
  if (!space.is_word()) fail(Errc::invalid_argument, "partition enumeration needs a word space");
  if (depth_bound < 0) fail(Errc::invalid_argument, "depth bound must be nonnegative");
  // c(k) = 1 + c(k-1)^d, checked before generating anything
  double count = 1;
  for (int k = 1; k <= depth_bound; ++k) {
    double power = 1;
    for (int i = 0; i < space.branching(); ++i) power *= count;
    count = 1 + power;
    if (count > static_cast<double>(budget))
      fail(Errc::budget_exceeded, "enumeration would exceed " + std::to_string(budget) +
                                      " partitions at depth " + std::to_string(k));
  }
  auto raw = detail::ball_partitions(space, "", depth_bound);
  std::sort(raw.begin(), raw.end());
  std::vector<Partition> out;
  out.reserve(raw.size());
  for (const auto& balls : raw) {
    std::vector<ClopenSet> blocks;
    blocks.reserve(balls.size());
    for (const auto& a : balls) blocks.push_back(ClopenSet::from_balls(space, {a}));
    out.push_back(Partition::from_blocks(space, std::move(blocks)));
  }
  return out;
}

// Hasse diagram of the enumerated poset in DOT form (edges are covering
// relations, drawn coarse -> fine).
inline std::string hasse_dot(const Space& space, int depth_bound,
                             std::size_t budget = kEnumeratePartitionBudget) {
  auto parts = enumerate_partitions(space, depth_bound, budget);
  std::size_t n = parts.size();
  std::vector<std::vector<bool>> less(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) less[i][j] = refines(parts[i], parts[j]);
  auto label = [](const Partition& p) {
    std::string s = "{";
    for (std::size_t b = 0; b < p.blocks.size(); ++b) {
      if (b) s += ",";
      s += "\\\"" + p.blocks[b].balls().front() + "\\\"";
    }
    return s + "}";
  };
  std::string out = "digraph hasse {\n  rankdir=BT;\n";
  for (std::size_t i = 0; i < n; ++i)
    out += "  p" + std::to_string(i) + " [label=\"" + label(parts[i]) + "\"];\n";
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (!less[i][j]) continue;
      bool covering = true;
      for (std::size_t k = 0; k < n && covering; ++k)
        if (less[i][k] && less[k][j]) covering = false;
      if (covering) out += "  p" + std::to_string(i) + " -> p" + std::to_string(j) + ";\n";
    }
  out += "}\n";
  return out;
}

}  // namespace locsim
