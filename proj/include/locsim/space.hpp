#pragma once

// Compact ultrametric spaces presented through their ball hierarchy.
//
// Two families are supported:
//   * word spaces: infinite words over an alphabet {0,...,d-1}, d >= 2;
//   * finite spaces: leaves of a finite rooted tree in which every internal
//     node has at least two children.
//
// In both cases a ball is a node of the hierarchy and is addressed by the
// digit string leading to it from the root ("" is the whole space).  The
// distance between two distinct points is exp(1-n) where n-1 is the length
// of their longest common address prefix; the library stores the integer n
// and never converts to floating point.

#include <algorithm>
#include <memory>
#include <string>
#include <vector>

#include "locsim/error.hpp"

namespace locsim {

// Addresses are digit strings, which caps usable fanout at ten children per
// node.  That bound comes from the external ball-literal syntax, not from
// the mathematics.
constexpr int kMaxFanout = 10;

namespace detail {

struct TreeNode {
  std::vector<int> children;  // node indices; empty means leaf
};

// Finite rooted tree built from a nested-parenthesis spec such as
// "((..)(...))": '.' is a leaf, "(...)" an internal node.
class FiniteTree {
 public:
  explicit FiniteTree(const std::string& spec) : spec_(spec) {
    std::size_t pos = 0;
    parse_node(spec, pos);
    if (pos != spec.size())
      fail(Errc::syntax_error, "trailing characters in tree spec: " + spec);
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const auto& ch = nodes_[i].children;
      if (!ch.empty() && ch.size() < 2)
        fail(Errc::validation_error, "internal tree node with a single child");
      if (ch.size() > static_cast<std::size_t>(kMaxFanout))
        fail(Errc::validation_error, "tree node fanout exceeds 10");
    }
  }

  const std::string& spec() const { return spec_; }

  // Node index for an address, or -1 if the address leaves the tree.
  int node_at(const std::string& addr) const {
    int cur = 0;
    for (char c : addr) {
      if (c < '0' || c > '9') return -1;
      std::size_t k = static_cast<std::size_t>(c - '0');
      const auto& ch = nodes_[static_cast<std::size_t>(cur)].children;
      if (k >= ch.size()) return -1;
      cur = ch[k];
    }
    return cur;
  }

  int child_count(int node) const {
    return static_cast<int>(nodes_[static_cast<std::size_t>(node)].children.size());
  }

  void leaves_below(const std::string& addr, int node, std::vector<std::string>& out) const {
    const auto& ch = nodes_[static_cast<std::size_t>(node)].children;
    if (ch.empty()) {
      out.push_back(addr);
      return;
    }
    for (std::size_t k = 0; k < ch.size(); ++k)
      leaves_below(addr + static_cast<char>('0' + k), ch[k], out);
  }

 private:
  int parse_node(const std::string& s, std::size_t& pos) {
    if (pos >= s.size()) fail(Errc::syntax_error, "unexpected end of tree spec");
    int idx = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    if (s[pos] == '.') {
      ++pos;
      return idx;
    }
    if (s[pos] != '(') fail(Errc::syntax_error, "expected '(' or '.' in tree spec");
    ++pos;
    std::vector<int> children;
    while (pos < s.size() && s[pos] != ')') children.push_back(parse_node(s, pos));
    if (pos >= s.size()) fail(Errc::syntax_error, "unbalanced '(' in tree spec");
    ++pos;  // ')'
    nodes_[static_cast<std::size_t>(idx)].children = std::move(children);
    return idx;
  }

  std::string spec_;
  std::vector<TreeNode> nodes_;
};

}  // namespace detail

class Space {
 public:
  static Space word(int d) {
    if (d < 2) fail(Errc::invalid_argument, "word space needs alphabet size >= 2");
    if (d > kMaxFanout) fail(Errc::invalid_argument, "word space alphabet capped at 10");
    Space s;
    s.d_ = d;
    return s;
  }

  static Space finite(const std::string& paren_spec) {
    Space s;
    s.tree_ = std::make_shared<detail::FiniteTree>(paren_spec);
    return s;
  }

  bool is_word() const { return tree_ == nullptr; }
  bool is_finite() const { return tree_ != nullptr; }

  // Alphabet size of a word space.
  int branching() const {
    if (!is_word()) fail(Errc::invalid_argument, "branching() is a word-space query");
    return d_;
  }

  const detail::FiniteTree& tree() const {
    if (!is_finite()) fail(Errc::not_finite_space, "tree() on a word space");
    return *tree_;
  }

  bool valid_address(const std::string& addr) const {
    if (is_word()) {
      for (char c : addr)
        if (c < '0' || c >= '0' + d_) return false;
      return true;
    }
    return tree_->node_at(addr) >= 0;
  }

  // Children per hierarchy node; 0 marks a finite-space leaf (a point).
  int child_count(const std::string& addr) const {
    if (is_word()) return d_;
    int n = tree_->node_at(addr);
    if (n < 0) fail(Errc::invalid_argument, "address outside tree: \"" + addr + "\"");
    return tree_->child_count(n);
  }

  bool is_point_ball(const std::string& addr) const { return child_count(addr) == 0; }

  std::vector<std::string> leaves_below(const std::string& addr) const {
    int n = tree().node_at(addr);
    if (n < 0) fail(Errc::invalid_argument, "address outside tree: \"" + addr + "\"");
    std::vector<std::string> out;
    tree_->leaves_below(addr, n, out);
    return out;
  }

  std::string id() const {
    return is_word() ? "word:" + std::to_string(d_) : "finite:" + tree_->spec();
  }

  friend bool operator==(const Space& a, const Space& b) { return a.id() == b.id(); }
  friend bool operator!=(const Space& a, const Space& b) { return !(a == b); }

 private:
  Space() = default;
  int d_ = 0;
  std::shared_ptr<const detail::FiniteTree> tree_;
};

// ---------------------------------------------------------------------------
// Balls

struct Ball {
  Space space;
  std::string addr;

  Ball(Space s, std::string a) : space(std::move(s)), addr(std::move(a)) {
    if (!space.valid_address(addr))
      fail(Errc::invalid_argument, "invalid ball address \"" + addr + "\"");
  }

  bool is_root() const { return addr.empty(); }

  friend bool operator==(const Ball& a, const Ball& b) {
    return a.space == b.space && a.addr == b.addr;
  }
  friend bool operator!=(const Ball& a, const Ball& b) { return !(a == b); }
};

inline void require_same_space(const Space& a, const Space& b, const char* where) {
  if (a != b) fail(Errc::space_mismatch, "operands live in different spaces", where);
}

enum class BallRelation { equal_balls, disjoint, first_inside_second, second_inside_first };

inline bool is_prefix(const std::string& p, const std::string& s) {
  return p.size() <= s.size() && std::equal(p.begin(), p.end(), s.begin());
}

// Trichotomy: two balls are equal, disjoint, or strictly nested.
inline BallRelation compare(const Ball& a, const Ball& b) {
  require_same_space(a.space, b.space, "compare");
  if (a.addr == b.addr) return BallRelation::equal_balls;
  if (is_prefix(a.addr, b.addr)) return BallRelation::second_inside_first;
  if (is_prefix(b.addr, a.addr)) return BallRelation::first_inside_second;
  return BallRelation::disjoint;
}

inline bool disjoint(const Ball& a, const Ball& b) {
  return compare(a, b) == BallRelation::disjoint;
}

inline bool contains(const Ball& outer, const Ball& inner) {
  auto r = compare(outer, inner);
  return r == BallRelation::equal_balls || r == BallRelation::second_inside_first;
}

// Hierarchy depth: number of edges from the root node.
inline int depth(const Ball& b) { return static_cast<int>(b.addr.size()); }

inline std::vector<Ball> maximal_proper_subballs(const Ball& b) {
  int n = b.space.child_count(b.addr);
  if (n == 0) fail(Errc::no_subballs, "point ball \"" + b.addr + "\" has no proper subballs");
  std::vector<Ball> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) out.emplace_back(b.space, b.addr + static_cast<char>('0' + k));
  return out;
}

// ---------------------------------------------------------------------------
// Points

// A point of a word space is an eventually constant word, stored as a finite
// prefix plus the repeated tail letter; the stored prefix never ends in the
// tail letter, which makes the representation canonical.  A point of a
// finite space is a leaf address (tail unused).
struct Point {
  Space space;
  std::string prefix;
  char tail = 0;

  static Point word_point(Space s, std::string prefix, char tail) {
    if (!s.is_word()) fail(Errc::invalid_argument, "word_point on a finite space");
    Point p(std::move(s));
    if (tail < '0' || tail >= '0' + p.space.branching())
      fail(Errc::invalid_argument, "tail letter outside alphabet");
    if (!p.space.valid_address(prefix))
      fail(Errc::invalid_argument, "point prefix outside alphabet");
    while (!prefix.empty() && prefix.back() == tail) prefix.pop_back();
    p.prefix = std::move(prefix);
    p.tail = tail;
    return p;
  }

  static Point leaf(Space s, std::string addr) {
    if (!s.is_finite()) fail(Errc::invalid_argument, "leaf() on a word space");
    if (!s.valid_address(addr) || !s.is_point_ball(addr))
      fail(Errc::invalid_argument, "not a leaf address: \"" + addr + "\"");
    Point p(std::move(s));
    p.prefix = std::move(addr);
    return p;
  }

  // Letter at 1-based position k of the (expanded) word.
  char letter(std::size_t k) const {
    return k <= prefix.size() ? prefix[k - 1] : tail;
  }

  friend bool operator==(const Point& a, const Point& b) {
    return a.space == b.space && a.prefix == b.prefix && a.tail == b.tail;
  }
  friend bool operator!=(const Point& a, const Point& b) { return !(a == b); }

 private:
  explicit Point(Space s) : space(std::move(s)) {}
};

// Distance exp(1-n) kept as the integer n; equal points get the formal
// value "negative infinity" (distance zero).
class LogDistance {
 public:
  static LogDistance equal_points() { return LogDistance(0); }
  static LogDistance at(int n) {
    if (n < 1) fail(Errc::invalid_argument, "distance index must be >= 1");
    return LogDistance(n);
  }

  bool is_zero() const { return n_ == 0; }
  int index() const {
    if (is_zero()) fail(Errc::invalid_argument, "no finite index for equal points");
    return n_;
  }

  friend bool operator==(const LogDistance& a, const LogDistance& b) { return a.n_ == b.n_; }
  friend bool operator!=(const LogDistance& a, const LogDistance& b) { return !(a == b); }

 private:
  explicit LogDistance(int n) : n_(n) {}
  int n_;  // 0 encodes equal points, else the n of exp(1-n)
};

// Metric comparison: distance(a) <= distance(b).  Larger index means a
// smaller distance.
inline bool distance_leq(const LogDistance& a, const LogDistance& b) {
  if (a.is_zero()) return true;
  if (b.is_zero()) return false;
  return a.index() >= b.index();
}

inline LogDistance distance(const Point& x, const Point& y) {
  require_same_space(x.space, y.space, "distance");
  if (x.space.is_word()) {
    if (x == y) return LogDistance::equal_points();
    std::size_t scan = std::max(x.prefix.size(), y.prefix.size()) + 1;
    for (std::size_t k = 1; k <= scan; ++k)
      if (x.letter(k) != y.letter(k)) return LogDistance::at(static_cast<int>(k));
    // Identical through both prefixes with equal tails would mean x == y.
    fail(Errc::invalid_argument, "unreachable: points compare equal but are distinct");
  }
  if (x.prefix == y.prefix) return LogDistance::equal_points();
  std::size_t k = 0;
  while (k < x.prefix.size() && k < y.prefix.size() && x.prefix[k] == y.prefix[k]) ++k;
  return LogDistance::at(static_cast<int>(k) + 1);
}

inline bool ball_contains_point(const Ball& b, const Point& x) {
  require_same_space(b.space, x.space, "ball_contains_point");
  if (b.space.is_finite()) return is_prefix(b.addr, x.prefix);
  for (std::size_t k = 1; k <= b.addr.size(); ++k)
    if (x.letter(k) != b.addr[k - 1]) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Clopen sets and partitions

// A clopen subset stored as its canonical maximal-ball decomposition: no
// ball contains another, no full sibling family survives unmerged, and the
// list is sorted lexicographically.
class ClopenSet {
 public:
  // `balls` must be pairwise disjoint or nested; nested duplicates collapse.
  static ClopenSet from_balls(const Space& space, std::vector<std::string> balls) {
    if (balls.empty()) fail(Errc::empty_set, "clopen set needs at least one ball");
    for (const auto& a : balls)
      if (!space.valid_address(a)) fail(Errc::invalid_argument, "invalid ball \"" + a + "\"");
    std::sort(balls.begin(), balls.end());
    balls.erase(std::unique(balls.begin(), balls.end()), balls.end());
    // Drop balls contained in an earlier one (prefix ranges are contiguous
    // after sorting), rejecting overlap is unnecessary: distinct balls only
    // relate by containment or disjointness.
    std::vector<std::string> kept;
    for (auto& a : balls) {
      if (!kept.empty() && is_prefix(kept.back(), a)) continue;
      kept.push_back(std::move(a));
    }
    // Merge full sibling families bottom-up until stable.
    bool merged = true;
    while (merged) {
      merged = false;
      for (std::size_t i = 0; i < kept.size(); ++i) {
        const std::string& a = kept[i];
        if (a.empty()) continue;
        std::string parent = a.substr(0, a.size() - 1);
        int fam = space.child_count(parent);
        if (a.back() != '0' || fam == 0) continue;
        if (i + static_cast<std::size_t>(fam) > kept.size()) continue;
        bool full = true;
        for (int k = 0; k < fam; ++k)
          if (kept[i + static_cast<std::size_t>(k)] != parent + static_cast<char>('0' + k)) {
            full = false;
            break;
          }
        if (!full) continue;
        kept[i] = parent;
        kept.erase(kept.begin() + static_cast<long>(i) + 1,
                   kept.begin() + static_cast<long>(i) + fam);
        std::sort(kept.begin(), kept.end());
        merged = true;
        break;
      }
    }
    ClopenSet c(space);
    c.balls_ = std::move(kept);
    return c;
  }

  static ClopenSet whole(const Space& space) { return from_balls(space, {""}); }

  const Space& space() const { return space_; }
  const std::vector<std::string>& balls() const { return balls_; }
  bool is_whole() const { return balls_.size() == 1 && balls_[0].empty(); }

  bool contains_ball(const Ball& b) const {
    require_same_space(space_, b.space, "contains_ball");
    for (const auto& a : balls_)
      if (is_prefix(a, b.addr)) return true;
    return false;
  }

  bool contains(const ClopenSet& other) const {
    require_same_space(space_, other.space_, "contains");
    for (const auto& a : other.balls_)
      if (!contains_ball(Ball(space_, a))) return false;
    return true;
  }

  friend bool operator==(const ClopenSet& a, const ClopenSet& b) {
    return a.space_ == b.space_ && a.balls_ == b.balls_;
  }
  friend bool operator!=(const ClopenSet& a, const ClopenSet& b) { return !(a == b); }

 private:
  explicit ClopenSet(Space s) : space_(std::move(s)) {}
  Space space_;
  std::vector<std::string> balls_;
};

inline ClopenSet canonicalize(const Space& space, std::vector<std::string> balls) {
  return ClopenSet::from_balls(space, std::move(balls));
}

// Intersection; empty result is reported via std::nullopt-style bool+set by
// returning an empty optional vector of balls would be clumsier, so the
// helper returns the raw ball list (possibly empty).
inline std::vector<std::string> intersect_balls(const ClopenSet& a, const ClopenSet& b) {
  require_same_space(a.space(), b.space(), "intersect");
  std::vector<std::string> out;
  for (const auto& x : a.balls())
    for (const auto& y : b.balls()) {
      if (is_prefix(x, y)) out.push_back(y);
      else if (is_prefix(y, x)) out.push_back(x);
    }
  return out;
}

inline bool meets(const ClopenSet& a, const ClopenSet& b) {
  return !intersect_balls(a, b).empty();
}

namespace detail {

// a \ b for single balls; b of finite depth, so the recursion terminates.
inline void subtract_ball(const Space& space, const std::string& a, const std::string& b,
                          std::vector<std::string>& out) {
  if (is_prefix(b, a)) return;  // a inside b: nothing survives
  if (!is_prefix(a, b)) {       // disjoint
    out.push_back(a);
    return;
  }
  int fam = space.child_count(a);
  for (int k = 0; k < fam; ++k) subtract_ball(space, a + static_cast<char>('0' + k), b, out);
}

}  // namespace detail

// Set difference a \ b as a raw ball list (possibly empty).
inline std::vector<std::string> subtract(const ClopenSet& a, const ClopenSet& b) {
  require_same_space(a.space(), b.space(), "subtract");
  std::vector<std::string> cur = a.balls();
  for (const auto& y : b.balls()) {
    std::vector<std::string> next;
    for (const auto& x : cur) detail::subtract_ball(a.space(), x, y, next);
    cur = std::move(next);
  }
  return cur;
}

inline ClopenSet unite(const ClopenSet& a, const ClopenSet& b) {
  require_same_space(a.space(), b.space(), "unite");
  std::vector<std::string> all = a.balls();
  all.insert(all.end(), b.balls().begin(), b.balls().end());
  return ClopenSet::from_balls(a.space(), std::move(all));
}

// Partition of the whole space into clopen blocks, blocks sorted by their
// least ball.
struct Partition {
  Space space;
  std::vector<ClopenSet> blocks;

  static Partition from_blocks(const Space& space, std::vector<ClopenSet> blocks) {
    if (blocks.empty()) fail(Errc::empty_set, "partition needs at least one block");
    std::vector<std::string> all;
    for (const auto& blk : blocks) {
      require_same_space(space, blk.space(), "Partition");
      all.insert(all.end(), blk.balls().begin(), blk.balls().end());
    }
    std::sort(all.begin(), all.end());
    for (std::size_t i = 0; i + 1 < all.size(); ++i)
      if (is_prefix(all[i], all[i + 1]))
        fail(Errc::validation_error, "partition blocks overlap at \"" + all[i + 1] + "\"");
    if (ClopenSet::from_balls(space, all) != ClopenSet::whole(space))
      fail(Errc::validation_error, "partition blocks do not cover the space");
    std::sort(blocks.begin(), blocks.end(), [](const ClopenSet& a, const ClopenSet& b) {
      return a.balls().front() < b.balls().front();
    });
    Partition p(space);
    p.blocks = std::move(blocks);
    return p;
  }

  friend bool operator==(const Partition& a, const Partition& b) {
    return a.space == b.space && a.blocks == b.blocks;
  }
  friend bool operator!=(const Partition& a, const Partition& b) { return !(a == b); }

 private:
  explicit Partition(Space s) : space(std::move(s)) {}
};

// Depth bound N of a partition: the maximum ball depth over the canonical
// block decompositions.  Every ball of depth >= N lies inside exactly one
// block (tested property).
inline int partition_depth_bound(const Partition& p) {
  int n = 0;
  for (const auto& blk : p.blocks)
    for (const auto& a : blk.balls()) n = std::max(n, static_cast<int>(a.size()));
  return n;
}

}  // namespace locsim
