// Shared test support: deterministic generators and reference oracles.
//
// The oracles here are deliberately primitive re-implementations (string
// surgery, brute-force enumeration, dynamic programming over size sets) so
// library results are always checked against code that shares none of the
// library's logic.  Membership queries s.member() are the one shared
// primitive; those are pinned against hand-computed cases separately.
#pragma once

#include <locsim/locsim.hpp>

#include <algorithm>
#include <bitset>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace support {

using namespace locsim;

// ---------------------------------------------------------------------------
// Random generators (all take an explicit engine; tests seed locally)

inline void random_partition_rec(const Space& sp, const std::string& a, int max_depth,
                                 double split_p, std::mt19937& r,
                                 std::vector<std::string>& out) {
  std::bernoulli_distribution split(split_p);
  if (static_cast<int>(a.size()) < max_depth && split(r)) {
    for (int k = 0; k < sp.branching(); ++k)
      random_partition_rec(sp, a + static_cast<char>('0' + k), max_depth, split_p, r, out);
  } else {
    out.push_back(a);
  }
}

// Random ball partition of a word space with all balls at depth <= max_depth.
inline std::vector<std::string> random_partition_addrs(const Space& sp, int max_depth,
                                                       std::mt19937& r, double split_p = 0.6) {
  std::vector<std::string> out;
  random_partition_rec(sp, "", max_depth, split_p, r, out);
  std::sort(out.begin(), out.end());
  return out;
}

// One table entry in raw form; the oracle below consumes exactly this.
struct RawEntry {
  std::string dom, cod;
  std::vector<int> tail_images;
};

// Raw table of a random word-space element: two independent partitions,
// equalized by splitting the shallowest ball (every partition of a d-ary
// space has size 1 mod (d-1), so the difference is always bridgeable),
// then randomly paired.  Unnormalized on purpose.
inline std::vector<RawEntry> random_word_table(const Space& sp, int max_depth, std::mt19937& r,
                                               bool shuffle_tails = false) {
  auto doms = random_partition_addrs(sp, max_depth, r);
  auto cods = random_partition_addrs(sp, max_depth, r);
  auto grow = [&](std::vector<std::string>& v, std::size_t want) {
    while (v.size() < want) {
      std::size_t pick = 0;
      for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i].size() < v[pick].size()) pick = i;
      std::string a = v[pick];
      v.erase(v.begin() + static_cast<long>(pick));
      for (int k = 0; k < sp.branching(); ++k)
        v.push_back(a + static_cast<char>('0' + k));
    }
  };
  grow(doms, cods.size());
  grow(cods, doms.size());
  std::shuffle(cods.begin(), cods.end(), r);
  std::vector<RawEntry> table;
  for (std::size_t i = 0; i < doms.size(); ++i) {
    std::vector<int> imgs(static_cast<std::size_t>(sp.branching()));
    std::iota(imgs.begin(), imgs.end(), 0);
    if (shuffle_tails) std::shuffle(imgs.begin(), imgs.end(), r);
    table.push_back(RawEntry{doms[i], cods[i], imgs});
  }
  return table;
}

inline GroupElement element_from_raw(const SimStructure& s, const std::vector<RawEntry>& raw) {
  std::vector<Similarity> table;
  for (const auto& e : raw)
    table.emplace_back(Ball(s.space(), e.dom), Ball(s.space(), e.cod),
                       Perm::from_images(e.tail_images));
  return GroupElement::from_table(s, std::move(table));
}

// First-letter flip; the global involution generating the mirror structure.
inline std::string flipped(std::string a) {
  a[0] = a[0] == '0' ? '1' : '0';
  return a;
}

// Swap the balls w and flipped(w), identity everywhere else.
inline GroupElement mirror_involution(const SimStructure& s, const std::string& w) {
  Space sp = s.space();
  Ball bw(sp, w), bv(sp, flipped(w));
  Perm id(sp.branching());
  std::vector<Similarity> table{Similarity(bw, bv, id), Similarity(bv, bw, id)};
  for (const auto& a : subtract(ClopenSet::whole(sp), ClopenSet::from_balls(sp, {bw.addr, bv.addr})))
    table.push_back(Similarity::identity_on(Ball(sp, a)));
  return GroupElement::from_table(s, std::move(table));
}

// Product of 1..3 basic involutions at random addresses of length <= max_depth.
inline GroupElement random_mirror_element(const SimStructure& s, int max_depth, std::mt19937& r) {
  std::uniform_int_distribution<int> nfac(1, 3), len(1, max_depth), letter(0, 1);
  GroupElement g = GroupElement::identity(s);
  int n = nfac(r);
  for (int i = 0; i < n; ++i) {
    std::string w;
    int l = len(r);
    for (int k = 0; k < l; ++k) w += static_cast<char>('0' + letter(r));
    g = compose(mirror_involution(s, w), g);
  }
  return g;
}

// ---------------------------------------------------------------------------
// Evaluation oracle (word spaces)
//
// Points are plain expanded strings; a raw entry (dom, cod, tail) sends
// dom+s to cod+tail(s) letter by letter.  No canonical forms involved.

inline std::string expand_point(const Point& p, std::size_t len) {
  std::string s = p.prefix;
  while (s.size() < len) s += p.tail;
  return s;
}

inline std::string oracle_apply_raw(const std::vector<RawEntry>& table, const std::string& s) {
  for (const auto& e : table) {
    if (s.size() < e.dom.size() || s.compare(0, e.dom.size(), e.dom) != 0) continue;
    std::string out = e.cod;
    for (std::size_t i = e.dom.size(); i < s.size(); ++i)
      out += static_cast<char>('0' + e.tail_images[static_cast<std::size_t>(s[i] - '0')]);
    return out;
  }
  throw std::runtime_error("oracle: no table entry matches \"" + s + "\"");
}

// All points w . tail tail tail ... with |w| = len, as canonical Points.
inline std::vector<Point> eventually_points(const Space& sp, int len, char tail = '0') {
  int d = sp.branching();
  std::vector<Point> out;
  std::string cur(static_cast<std::size_t>(len), '0');
  for (;;) {
    out.push_back(Point::word_point(sp, cur, tail));
    int i = len - 1;
    while (i >= 0 && cur[static_cast<std::size_t>(i)] == static_cast<char>('0' + d - 1))
      cur[static_cast<std::size_t>(i--)] = '0';
    if (i < 0) break;
    ++cur[static_cast<std::size_t>(i)];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Canonical decomposition oracle
//
// Fixpoint of two obviously-correct rewrites: drop any ball nested in
// another, collapse any complete sibling family to its parent.

inline std::vector<std::string> oracle_canonical(const Space& sp, std::vector<std::string> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < v.size() && !changed; ++i)
      for (std::size_t j = 0; j < v.size(); ++j) {
        if (i == j) continue;
        if (v[j].size() > v[i].size() && v[j].compare(0, v[i].size(), v[i]) == 0) {
          v.erase(v.begin() + static_cast<long>(j));
          changed = true;
          break;
        }
      }
    if (changed) continue;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (v[i].empty()) continue;
      std::string parent = v[i].substr(0, v[i].size() - 1);
      int n = sp.child_count(parent);
      int found = 0;
      for (int k = 0; k < n; ++k)
        if (std::find(v.begin(), v.end(), parent + static_cast<char>('0' + k)) != v.end())
          ++found;
      if (n > 0 && found == n) {
        std::vector<std::string> next;
        for (const auto& a : v)
          if (!(a.size() == parent.size() + 1 && a.compare(0, parent.size(), parent) == 0))
            next.push_back(a);
        next.push_back(parent);
        v = std::move(next);
        changed = true;
        break;
      }
    }
  }
  std::sort(v.begin(), v.end());
  return v;
}

// ---------------------------------------------------------------------------
// Refinement-size oracle
//
// All ball counts over refinements of a clopen set into balls of depth <=
// budget, by DP over the ball tree (bit i set = a refinement into i balls
// exists).  For structures supplying a similarity between any two balls, a
// local-equivalence witness exists exactly when two refinements of equal
// size exist, so intersecting these sets decides equivalence with no
// congruence shortcut.  Counts beyond the bitset width fall off the end;
// the width is far above anything reachable at the budgets used here.

using SizeSet = std::bitset<4096>;

inline SizeSet sumset_with(const SizeSet& acc, const SizeSet& add) {
  SizeSet next;
  for (std::size_t y = 0; y < add.size(); ++y)
    if (add[y]) next |= acc << y;
  return next;
}

inline const SizeSet& subtree_sizes(int d, int levels) {
  static std::map<std::pair<int, int>, SizeSet> memo;
  auto key = std::make_pair(d, levels);
  auto it = memo.find(key);
  if (it != memo.end()) return it->second;
  SizeSet out;
  out.set(1);
  if (levels > 0) {
    const SizeSet& child = subtree_sizes(d, levels - 1);
    SizeSet acc;
    acc.set(0);
    for (int k = 0; k < d; ++k) acc = sumset_with(acc, child);
    out |= acc;
  }
  return memo.emplace(key, out).first->second;
}

inline SizeSet refinement_sizes(int d, const std::vector<int>& ball_depths, int budget) {
  SizeSet acc;
  acc.set(0);
  for (int dep : ball_depths) acc = sumset_with(acc, subtree_sizes(d, budget - dep));
  return acc;
}

inline bool sizes_intersect(const SizeSet& a, const SizeSet& b) { return (a & b).any(); }

// ---------------------------------------------------------------------------
// Admissible-permutation oracle
//
// Literal definition: a permutation of the finest blocks is admissible when
// it induces a well-defined bijection on every coarser vertex of the chain.

inline std::vector<std::vector<std::size_t>> oracle_admissible(
    const std::vector<Partition>& chain) {
  const Partition& fine = chain.back();
  std::size_t m = fine.blocks.size();
  std::vector<std::vector<std::size_t>> fibres;
  for (std::size_t v = 0; v + 1 < chain.size(); ++v) {
    std::vector<std::size_t> f(m, m);
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t i = 0; i < chain[v].blocks.size(); ++i)
        if (chain[v].blocks[i].contains(fine.blocks[j])) {
          f[j] = i;
          break;
        }
      if (f[j] == m) throw std::runtime_error("oracle_admissible: chain not nested");
    }
    fibres.push_back(std::move(f));
  }
  std::vector<std::size_t> pi(m);
  std::iota(pi.begin(), pi.end(), 0);
  std::vector<std::vector<std::size_t>> out;
  do {
    bool ok = true;
    for (const auto& f : fibres) {
      std::map<std::size_t, std::size_t> induced;
      for (std::size_t j = 0; j < m && ok; ++j) {
        auto [it, fresh] = induced.emplace(f[j], f[pi[j]]);
        if (!fresh && it->second != f[pi[j]]) ok = false;
      }
      if (!ok) break;
      std::set<std::size_t> img;
      for (const auto& [src, dst] : induced) img.insert(dst);
      if (img.size() != induced.size()) ok = false;
      if (!ok) break;
    }
    if (ok) out.push_back(pi);
  } while (std::next_permutation(pi.begin(), pi.end()));
  return out;
}

// ---------------------------------------------------------------------------
// Finite-space brute force
//
// Group membership straight from the definition: a leaf permutation belongs
// to the group when SOME ball partition splits it into structure members.
// Exponential; fine for <= 6 leaves.

inline std::vector<std::vector<std::string>> all_ball_partitions(const Space& sp,
                                                                 const std::string& a) {
  std::vector<std::vector<std::string>> out{{a}};
  int n = sp.child_count(a);
  if (n == 0) return out;
  std::vector<std::vector<std::string>> combos{{}};
  for (int k = 0; k < n; ++k) {
    auto options = all_ball_partitions(sp, a + static_cast<char>('0' + k));
    std::vector<std::vector<std::string>> next;
    for (const auto& base : combos)
      for (const auto& opt : options) {
        auto merged = base;
        merged.insert(merged.end(), opt.begin(), opt.end());
        next.push_back(std::move(merged));
      }
    combos = std::move(next);
  }
  out.insert(out.end(), combos.begin(), combos.end());
  return out;
}

// Do these leaves form exactly the leaf set of some ball?  Returns it.
inline std::optional<std::string> leaves_ball(const Space& sp, std::vector<std::string> leaves) {
  std::sort(leaves.begin(), leaves.end());
  std::string lcp = leaves.front();
  for (const auto& l : leaves) {
    std::size_t k = 0;
    while (k < lcp.size() && k < l.size() && lcp[k] == l[k]) ++k;
    lcp.resize(k);
  }
  auto below = sp.leaves_below(lcp);
  std::sort(below.begin(), below.end());
  if (below == leaves) return lcp;
  return std::nullopt;
}

inline bool oracle_locally_determined(const SimStructure& s,
                                      const std::map<std::string, std::string>& sigma) {
  Space sp = s.space();
  for (const auto& part : all_ball_partitions(sp, "")) {
    bool all_ok = true;
    for (const auto& b : part) {
      auto below = sp.leaves_below(b);
      std::vector<std::string> img;
      std::map<std::string, std::string> pm;
      for (const auto& l : below) {
        img.push_back(sigma.at(l));
        pm[l] = sigma.at(l);
      }
      auto ballimg = leaves_ball(sp, img);
      bool member = false;
      if (ballimg) {
        try {
          Similarity piece(Ball(sp, b), Ball(sp, *ballimg), pm);
          member = s.member(piece);
        } catch (const Error&) {
          member = false;
        }
      }
      if (!member) {
        all_ok = false;
        break;
      }
    }
    if (all_ok) return true;
  }
  return false;
}

inline std::size_t oracle_finite_group_order(const SimStructure& s) {
  Space sp = s.space();
  std::vector<std::string> leaves = sp.leaves_below("");
  std::sort(leaves.begin(), leaves.end());
  std::vector<std::size_t> idx(leaves.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::size_t count = 0;
  do {
    std::map<std::string, std::string> sigma;
    for (std::size_t i = 0; i < leaves.size(); ++i) sigma[leaves[i]] = leaves[idx[i]];
    if (oracle_locally_determined(s, sigma)) ++count;
  } while (std::next_permutation(idx.begin(), idx.end()));
  return count;
}

// ---------------------------------------------------------------------------
// Finite-structure generator (classes chosen first, so expectations are
// known by construction)

struct FiniteCase {
  SimStructure structure;
  std::vector<std::size_t> expected_class_sizes;  // ordered by least leaf
};

// Enumerated structure on `spec` whose singleton classes equal a random
// partition of the leaves: consecutive leaves of each class are linked by
// singleton generators.  When a class contains a full sibling leaf pair, an
// equalizing swap of their parent ball is thrown in half the time (it links
// nothing new, so classes stay as chosen).
inline FiniteCase random_finite_case(const std::string& spec, std::mt19937& r) {
  Space sp = Space::finite(spec);
  std::vector<std::string> leaves = sp.leaves_below("");
  std::shuffle(leaves.begin(), leaves.end(), r);
  std::vector<std::vector<std::string>> classes;
  std::size_t i = 0;
  std::uniform_int_distribution<std::size_t> width(1, 3);
  while (i < leaves.size()) {
    std::size_t w = std::min(width(r), leaves.size() - i);
    classes.emplace_back(leaves.begin() + static_cast<long>(i),
                         leaves.begin() + static_cast<long>(i + w));
    i += w;
  }
  std::vector<Similarity> gens;
  for (auto& cls : classes)
    for (std::size_t k = 0; k + 1 < cls.size(); ++k)
      gens.emplace_back(Ball(sp, cls[k]), Ball(sp, cls[k + 1]),
                        std::map<std::string, std::string>{{cls[k], cls[k + 1]}});
  std::bernoulli_distribution coin(0.5);
  for (auto& cls : classes) {
    std::vector<std::string> sorted = cls;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t a = 0; a < sorted.size(); ++a)
      for (std::size_t b = a + 1; b < sorted.size(); ++b) {
        const std::string &x = sorted[a], &y = sorted[b];
        if (x.size() != y.size() || x.size() < 1) continue;
        std::string parent = x.substr(0, x.size() - 1);
        if (y.compare(0, parent.size(), parent) != 0) continue;
        if (sp.child_count(parent) != 2) continue;
        if (!coin(r)) continue;
        // equalizing self-map of the parent swapping its two leaf children
        gens.emplace_back(Ball(sp, parent), Ball(sp, parent),
                          std::map<std::string, std::string>{{x, y}, {y, x}});
      }
  }
  // expectations ordered by the least leaf of each class
  std::sort(classes.begin(), classes.end(), [](auto& a, auto& b) {
    return *std::min_element(a.begin(), a.end()) < *std::min_element(b.begin(), b.end());
  });
  std::vector<std::size_t> sizes;
  for (const auto& cls : classes) sizes.push_back(cls.size());
  return FiniteCase{SimStructure::finite_enumerated(sp, std::move(gens)), std::move(sizes)};
}

inline std::size_t factorial(std::size_t n) {
  std::size_t f = 1;
  for (std::size_t k = 2; k <= n; ++k) f *= k;
  return f;
}

}  // namespace support
