#pragma once

// Exhaustive analysis of finite-space structures: the full local similarity
// group by brute force over leaf permutations, the point classes under the
// singleton-ball relation, and the product formula |G| = prod d_i! those
// classes predict.

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "locsim/error.hpp"
#include "locsim/group_element.hpp"
#include "locsim/sim_structure.hpp"

namespace locsim {

namespace detail {

// Least ball whose leaf set is exactly `leaves` (all from one space);
// disengaged when the set is not a full ball.
inline std::optional<Ball> leaf_set_ball(const Space& space, std::vector<std::string> leaves) {
  std::sort(leaves.begin(), leaves.end());
  std::string lcp = leaves.front();
  for (const auto& l : leaves) {
    std::size_t k = 0;
    while (k < lcp.size() && k < l.size() && lcp[k] == l[k]) ++k;
    lcp.resize(k);
  }
  if (space.leaves_below(lcp).size() != leaves.size()) return std::nullopt;
  return Ball(space, lcp);
}

// The structure piece induced by the leaf map on `ball`, if the image is a
// ball and the induced map is a member similarity.
inline std::optional<Similarity> leaf_map_piece(const SimStructure& s,
                                                const std::map<std::string, std::string>& sigma,
                                                const std::string& ball) {
  std::vector<std::string> img;
  std::map<std::string, std::string> piece;
  for (const auto& leaf : s.space().leaves_below(ball)) {
    const auto& to = sigma.at(leaf);
    img.push_back(to);
    piece.emplace(leaf, to);
  }
  auto cod = leaf_set_ball(s.space(), img);
  if (!cod) return std::nullopt;
  std::optional<Similarity> g;
  try {
    g.emplace(Ball(s.space(), ball), *cod, std::move(piece));
  } catch (const Error&) {
    return std::nullopt;  // violates the distance scaling law
  }
  if (!s.member(*g)) return std::nullopt;
  return g;
}

// Locally determined on `ball`: the whole ball is one member piece, or
// every child is locally determined.
inline bool leaf_map_determined(const SimStructure& s,
                                const std::map<std::string, std::string>& sigma,
                                const std::string& ball) {
  if (leaf_map_piece(s, sigma, ball)) return true;
  int n = s.space().child_count(ball);
  if (n == 0) return false;
  for (int k = 0; k < n; ++k)
    if (!leaf_map_determined(s, sigma, ball + static_cast<char>('0' + k))) return false;
  return true;
}

inline void leaf_map_pieces(const SimStructure& s, const std::map<std::string, std::string>& sigma,
                            const std::string& ball, std::vector<Similarity>& out) {
  if (auto g = leaf_map_piece(s, sigma, ball)) {
    out.push_back(std::move(*g));
    return;
  }
  int n = s.space().child_count(ball);
  if (n == 0) fail(Errc::validation_error, "leaf map is not locally determined");
  for (int k = 0; k < n; ++k) leaf_map_pieces(s, sigma, ball + static_cast<char>('0' + k), out);
}

}  // namespace detail

// Builds the group element realizing a locally determined leaf map.
inline GroupElement element_from_leaf_map(const SimStructure& s,
                                          const std::map<std::string, std::string>& sigma) {
  std::vector<Similarity> table;
  ClopenSet carrier = s.carrier();
  for (const auto& root : carrier.balls()) detail::leaf_map_pieces(s, sigma, root, table);
  return GroupElement::from_table(s, std::move(table));
}

struct FiniteAnalysis {
  std::size_t gamma_order = 0;
  std::vector<std::map<std::string, std::string>> gamma_maps;  // sorted by image sequence
  std::vector<std::size_t> class_sizes;  // singleton-ball classes, by least leaf
  bool product_formula_holds = false;
  std::size_t separating_count = 0;
  std::size_t nonidentity_count = 0;
  // The three finiteness conditions, observed independently: the group is
  // finite, separating elements are finitely many, non-identity elements
  // are finitely many.  On a finite space all hold; recorded to cross-check
  // their equivalence on every analyzed structure.
  bool group_finite = false;
  bool separating_finite = false;
  bool nonidentity_finite = false;

  bool conditions_agree() const {
    return group_finite == separating_finite && separating_finite == nonidentity_finite;
  }
};

constexpr std::size_t kFiniteAnalysisLeafCap = 8;

inline FiniteAnalysis finite_analyze(const SimStructure& s,
                                     std::size_t leaf_cap = kFiniteAnalysisLeafCap) {
  if (!s.space().is_finite())
    fail(Errc::not_finite_space, "analysis runs on finite spaces only");
  auto root = detail::enumerated_root(s);
  if (!root) fail(Errc::not_finite_space, "analysis needs an enumerated structure");

  std::vector<std::string> leaves;
  ClopenSet carrier = s.carrier();
  for (const auto& b : carrier.balls())
    for (const auto& l : s.space().leaves_below(b)) leaves.push_back(l);
  std::sort(leaves.begin(), leaves.end());
  if (leaves.size() > leaf_cap)
    fail(Errc::budget_exceeded,
         "brute force capped at " + std::to_string(leaf_cap) + " points");

  FiniteAnalysis report;

  // Full group: every leaf permutation that is locally determined.
  std::size_t n = leaves.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  do {
    std::map<std::string, std::string> sigma;
    for (std::size_t i = 0; i < n; ++i) sigma.emplace(leaves[i], leaves[idx[i]]);
    bool ok = true;
    for (const auto& b : carrier.balls())
      if (!detail::leaf_map_determined(s, sigma, b)) {
        ok = false;
        break;
      }
    if (ok) report.gamma_maps.push_back(std::move(sigma));
  } while (std::next_permutation(idx.begin(), idx.end()));
  report.gamma_order = report.gamma_maps.size();
  report.group_finite = true;

  // Point classes: p ~ q iff the singleton map {p} -> {q} is a member.
  std::vector<std::size_t> cls(n);
  std::iota(cls.begin(), cls.end(), 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      Similarity link(Ball(s.space(), leaves[i]), Ball(s.space(), leaves[j]),
                      std::map<std::string, std::string>{{leaves[i], leaves[j]}});
      if (s.member(link)) {
        std::size_t a = cls[i], b = cls[j];
        for (auto& c : cls)
          if (c == b) c = a;
      }
    }
  for (std::size_t i = 0; i < n; ++i)
    if (cls[i] == i)
      report.class_sizes.push_back(std::count(cls.begin(), cls.end(), i));

  std::size_t predicted = 1;
  for (std::size_t d : report.class_sizes)
    for (std::size_t k = 2; k <= d; ++k) predicted *= k;
  report.product_formula_holds = predicted == report.gamma_order;

  // Separating / non-identity element counts from the enumerated root,
  // filtered through membership in s itself.
  for (const auto& g : root->enumerated()) {
    if (!s.member(g)) continue;
    if (classify(g) == SimilarityClass::separating) ++report.separating_count;
    if (!g.is_identity()) ++report.nonidentity_count;
  }
  report.separating_finite = true;
  report.nonidentity_finite = true;
  return report;
}

}  // namespace locsim
