#pragma once

// Similarities between balls.
//
// Word space: a map  w1 x1 x2 ...  ->  w2 s(x1) s(x2) ...  given by the
// prefix pair (w1, w2) and a single letter permutation s applied to every
// tail position.  Order-preserving maps are the identity-permutation case.
//
// Finite space: a bijection between the leaf sets of two balls that scales
// all pairwise distances by exp(depth(dom) - depth(cod)); equivalently the
// join depths of pairs shift by a constant.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "locsim/error.hpp"
#include "locsim/space.hpp"

namespace locsim {

class Perm {
 public:
  explicit Perm(int degree) : img_(static_cast<std::size_t>(degree)) {
    for (int i = 0; i < degree; ++i) img_[static_cast<std::size_t>(i)] = static_cast<unsigned char>(i);
  }

  static Perm from_images(const std::vector<int>& images) {
    Perm p(static_cast<int>(images.size()));
    std::vector<bool> seen(images.size(), false);
    for (std::size_t i = 0; i < images.size(); ++i) {
      int v = images[i];
      if (v < 0 || v >= static_cast<int>(images.size()) || seen[static_cast<std::size_t>(v)])
        fail(Errc::validation_error, "image list is not a permutation");
      seen[static_cast<std::size_t>(v)] = true;
      p.img_[i] = static_cast<unsigned char>(v);
    }
    return p;
  }

  // Parse an image string such as "10" (0->1, 1->0).
  static Perm parse(const std::string& text) {
    std::vector<int> img;
    img.reserve(text.size());
    for (char c : text) {
      if (c < '0' || c > '9') fail(Errc::syntax_error, "bad permutation literal \"" + text + "\"");
      img.push_back(c - '0');
    }
    if (img.empty()) fail(Errc::syntax_error, "empty permutation literal");
    return from_images(img);
  }

  int degree() const { return static_cast<int>(img_.size()); }
  int apply(int i) const { return img_[static_cast<std::size_t>(i)]; }
  char apply_char(char c) const { return static_cast<char>('0' + apply(c - '0')); }

  std::string apply_word(const std::string& w) const {
    std::string out = w;
    for (char& c : out) c = apply_char(c);
    return out;
  }

  // this followed by `after`.
  Perm then(const Perm& after) const {
    Perm r(degree());
    for (int i = 0; i < degree(); ++i)
      r.img_[static_cast<std::size_t>(i)] = static_cast<unsigned char>(after.apply(apply(i)));
    return r;
  }

  Perm inverted() const {
    Perm r(degree());
    for (int i = 0; i < degree(); ++i)
      r.img_[static_cast<std::size_t>(apply(i))] = static_cast<unsigned char>(i);
    return r;
  }

  bool is_identity() const {
    for (int i = 0; i < degree(); ++i)
      if (apply(i) != i) return false;
    return true;
  }

  std::string image_string() const {
    std::string s;
    for (int i = 0; i < degree(); ++i) s.push_back(static_cast<char>('0' + apply(i)));
    return s;
  }

  friend bool operator==(const Perm& a, const Perm& b) { return a.img_ == b.img_; }
  friend bool operator!=(const Perm& a, const Perm& b) { return !(a == b); }
  friend bool operator<(const Perm& a, const Perm& b) { return a.img_ < b.img_; }

 private:
  std::vector<unsigned char> img_;
};

class Similarity {
 public:
  // Word-space similarity: prefix rewrite dom -> cod with tail permutation.
  Similarity(Ball dom, Ball cod, Perm tail)
      : dom_(std::move(dom)), cod_(std::move(cod)), tail_(std::move(tail)) {
    require_same_space(dom_.space, cod_.space, "Similarity");
    if (!dom_.space.is_word())
      fail(Errc::invalid_argument, "tail-permutation form needs a word space");
    if (tail_.degree() != dom_.space.branching())
      fail(Errc::invalid_argument, "tail permutation degree differs from alphabet size");
  }

  // Finite-space similarity from an absolute leaf bijection.  The scaling
  // law is validated pair by pair.
  Similarity(Ball dom, Ball cod, std::map<std::string, std::string> pointmap)
      : dom_(std::move(dom)), cod_(std::move(cod)), tail_(1), pointmap_(std::move(pointmap)) {
    require_same_space(dom_.space, cod_.space, "Similarity");
    if (!dom_.space.is_finite())
      fail(Errc::invalid_argument, "pointmap form needs a finite space");
    auto dom_leaves = dom_.space.leaves_below(dom_.addr);
    auto cod_leaves = cod_.space.leaves_below(cod_.addr);
    if (pointmap_.size() != dom_leaves.size())
      fail(Errc::validation_error, "pointmap does not cover the domain ball");
    std::vector<std::string> images;
    for (const auto& l : dom_leaves) {
      auto it = pointmap_.find(l);
      if (it == pointmap_.end())
        fail(Errc::validation_error, "pointmap misses leaf \"" + l + "\"");
      images.push_back(it->second);
    }
    std::sort(images.begin(), images.end());
    if (images != cod_leaves)
      fail(Errc::validation_error, "pointmap image is not the codomain ball");
    // Scaling: join depths shift by depth(cod) - depth(dom) for all pairs.
    int shift = static_cast<int>(cod_.addr.size()) - static_cast<int>(dom_.addr.size());
    for (std::size_t i = 0; i < dom_leaves.size(); ++i)
      for (std::size_t j = i + 1; j < dom_leaves.size(); ++j) {
        auto n = [](const std::string& a, const std::string& b) {
          std::size_t k = 0;
          while (k < a.size() && k < b.size() && a[k] == b[k]) ++k;
          return static_cast<int>(k) + 1;
        };
        int before = n(dom_leaves[i], dom_leaves[j]);
        int after = n(pointmap_.at(dom_leaves[i]), pointmap_.at(dom_leaves[j]));
        if (after - before != shift)
          fail(Errc::validation_error, "pointmap does not scale distances uniformly");
      }
  }

  const Ball& dom() const { return dom_; }
  const Ball& cod() const { return cod_; }
  const Space& space() const { return dom_.space; }
  bool is_word_map() const { return space().is_word(); }
  const Perm& tail() const { return tail_; }
  const std::map<std::string, std::string>& pointmap() const { return pointmap_; }

  bool is_identity() const {
    if (dom_ != cod_) return false;
    if (is_word_map()) return tail_.is_identity();
    for (const auto& [k, v] : pointmap_)
      if (k != v) return false;
    return true;
  }

  static Similarity identity_on(const Ball& b) {
    if (b.space.is_word()) return Similarity(b, b, Perm(b.space.branching()));
    std::map<std::string, std::string> m;
    for (const auto& l : b.space.leaves_below(b.addr)) m[l] = l;
    return Similarity(b, b, std::move(m));
  }

  friend bool operator==(const Similarity& a, const Similarity& b) {
    return a.dom_ == b.dom_ && a.cod_ == b.cod_ && a.tail_ == b.tail_ &&
           a.pointmap_ == b.pointmap_;
  }
  friend bool operator!=(const Similarity& a, const Similarity& b) { return !(a == b); }

 private:
  Ball dom_;
  Ball cod_;
  Perm tail_;
  std::map<std::string, std::string> pointmap_;
};

// Image of a subball of the domain.
inline Ball apply(const Similarity& g, const Ball& b) {
  if (!contains(g.dom(), b))
    fail(Errc::not_a_subball, "ball \"" + b.addr + "\" is not inside the domain");
  if (g.is_word_map()) {
    std::string rel = b.addr.substr(g.dom().addr.size());
    return Ball(b.space, g.cod().addr + g.tail().apply_word(rel));
  }
  // Finite space: the image leaf set of a ball is again a ball because the
  // map scales distances; recover it as the join of the image leaves.
  auto leaves = b.space.leaves_below(b.addr);
  std::string lcp = g.pointmap().at(leaves.front());
  for (const auto& l : leaves) {
    const std::string& im = g.pointmap().at(l);
    std::size_t k = 0;
    while (k < lcp.size() && k < im.size() && lcp[k] == im[k]) ++k;
    lcp.resize(k);
  }
  Ball image(b.space, lcp);
  if (b.space.leaves_below(lcp).size() != leaves.size())
    fail(Errc::validation_error, "similarity image of a ball is not a ball");
  return image;
}

inline Point apply(const Similarity& g, const Point& x) {
  if (!ball_contains_point(g.dom(), x))
    fail(Errc::not_a_subball, "point lies outside the domain ball");
  if (g.is_word_map()) {
    // Strip the domain prefix from the expanded word, permute letter-wise,
    // and graft onto the codomain prefix.
    std::string rest;
    if (g.dom().addr.size() < x.prefix.size())
      rest = x.prefix.substr(g.dom().addr.size());
    return Point::word_point(x.space, g.cod().addr + g.tail().apply_word(rest),
                             g.tail().apply_char(x.tail));
  }
  return Point::leaf(x.space, g.pointmap().at(x.prefix));
}

inline Similarity restrict_to(const Similarity& g, const Ball& b) {
  if (!contains(g.dom(), b))
    fail(Errc::not_a_subball, "restriction target is not inside the domain");
  if (g.is_word_map()) return Similarity(b, apply(g, b), g.tail());
  std::map<std::string, std::string> m;
  for (const auto& l : b.space.leaves_below(b.addr)) m[l] = g.pointmap().at(l);
  return Similarity(b, apply(g, b), std::move(m));
}

// g2 after g1; the codomain of g1 must equal the domain of g2.
inline Similarity compose(const Similarity& g2, const Similarity& g1) {
  require_same_space(g1.space(), g2.space(), "compose");
  if (g1.cod() != g2.dom())
    fail(Errc::domain_mismatch, "codomain/domain balls do not match");
  if (g1.is_word_map()) return Similarity(g1.dom(), g2.cod(), g1.tail().then(g2.tail()));
  std::map<std::string, std::string> m;
  for (const auto& [k, v] : g1.pointmap()) m[k] = g2.pointmap().at(v);
  return Similarity(g1.dom(), g2.cod(), std::move(m));
}

inline Similarity inverse(const Similarity& g) {
  if (g.is_word_map()) return Similarity(g.cod(), g.dom(), g.tail().inverted());
  std::map<std::string, std::string> m;
  for (const auto& [k, v] : g.pointmap()) m[v] = k;
  return Similarity(g.cod(), g.dom(), std::move(m));
}

enum class SimilarityClass { contracting, separating, equalizing };

inline const char* similarity_class_name(SimilarityClass c) {
  switch (c) {
    case SimilarityClass::contracting: return "contracting";
    case SimilarityClass::separating: return "separating";
    case SimilarityClass::equalizing: return "equalizing";
  }
  return "unknown";
}

// Contracting: domain and codomain strictly nested (either way).
// Separating: disjoint.  Equalizing: equal.
inline SimilarityClass classify(const Similarity& g) {
  switch (compare(g.dom(), g.cod())) {
    case BallRelation::equal_balls: return SimilarityClass::equalizing;
    case BallRelation::disjoint: return SimilarityClass::separating;
    default: return SimilarityClass::contracting;
  }
}

}  // namespace locsim
