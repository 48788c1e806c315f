#pragma once

// Plain-text formats: ball / clopen / partition / point literals, element
// tables, and structure descriptors.  Formatting always emits the canonical
// form; parsers accept flexible whitespace, blank lines and '#' comments,
// so format-then-parse is the identity on every canonical text.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "locsim/error.hpp"
#include "locsim/group_element.hpp"
#include "locsim/sim_structure.hpp"
#include "locsim/space.hpp"

namespace locsim {

namespace detail {

inline std::string strip(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

[[noreturn]] inline void bad_syntax(const std::string& what, std::size_t line = 0) {
  fail(Errc::syntax_error, what, line ? "line " + std::to_string(line) : "");
}

// Reads a double-quoted digit string starting at pos; advances pos past it.
inline std::string read_quoted(const std::string& s, std::size_t& pos, std::size_t line) {
  while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
  if (pos >= s.size() || s[pos] != '"') bad_syntax("expected a quoted ball address", line);
  std::size_t end = s.find('"', pos + 1);
  if (end == std::string::npos) bad_syntax("unterminated ball address", line);
  std::string out = s.substr(pos + 1, end - pos - 1);
  pos = end + 1;
  return out;
}

inline void expect_token(const std::string& s, std::size_t& pos, const std::string& tok,
                         std::size_t line) {
  while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
  if (s.compare(pos, tok.size(), tok) != 0)
    bad_syntax("expected '" + tok + "'", line);
  pos += tok.size();
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i)
    if (i == s.size() || s[i] == sep) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Balls, clopen sets, partitions, points

inline std::string format_ball(const Ball& b) { return "\"" + b.addr + "\""; }

inline std::string format_clopen(const ClopenSet& c) {
  std::string out = "{";
  const auto& balls = c.balls();
  for (std::size_t i = 0; i < balls.size(); ++i) {
    if (i) out += ",";
    out += "\"" + balls[i] + "\"";
  }
  return out + "}";
}

inline std::string format_partition(const Partition& p) {
  std::string out = "{";
  for (std::size_t i = 0; i < p.blocks.size(); ++i) {
    if (i) out += " | ";
    const auto& balls = p.blocks[i].balls();
    for (std::size_t j = 0; j < balls.size(); ++j) {
      if (j) out += ",";
      out += "\"" + balls[j] + "\"";
    }
  }
  return out + "}";
}

namespace detail {

// The comma-separated quoted addresses of one partition block.
inline std::vector<std::string> parse_ball_list(const Space& space, const std::string& text) {
  std::vector<std::string> addrs;
  std::size_t pos = 0;
  for (;;) {
    addrs.push_back(read_quoted(text, pos, 0));
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
    if (pos >= text.size()) break;
    if (text[pos] != ',') bad_syntax("expected ',' between ball addresses");
    ++pos;
  }
  for (const auto& a : addrs)
    if (!space.valid_address(a)) fail(Errc::validation_error, "no ball at address \"" + a + "\"");
  return addrs;
}

inline std::string strip_braces(const std::string& text) {
  std::string t = strip(text);
  if (t.size() < 2 || t.front() != '{' || t.back() != '}')
    bad_syntax("expected a brace-enclosed literal");
  return t.substr(1, t.size() - 2);
}

}  // namespace detail

inline ClopenSet parse_clopen(const Space& space, const std::string& text) {
  return ClopenSet::from_balls(space, detail::parse_ball_list(space, detail::strip_braces(text)));
}

inline Partition parse_partition(const Space& space, const std::string& text) {
  std::vector<ClopenSet> blocks;
  for (const auto& part : detail::split(detail::strip_braces(text), '|'))
    blocks.push_back(ClopenSet::from_balls(space, detail::parse_ball_list(space, part)));
  return Partition::from_blocks(space, std::move(blocks));
}

// Word points read "prefix:tail" (eventually-constant word), finite points
// are bare leaf addresses.
inline std::string format_point(const Point& p) {
  if (p.space.is_word()) return p.prefix + ":" + std::string(1, p.tail);
  return p.prefix;
}

inline Point parse_point(const Space& space, const std::string& text) {
  std::string t = detail::strip(text);
  if (space.is_word()) {
    std::size_t colon = t.find(':');
    if (colon == std::string::npos || colon + 2 != t.size())
      detail::bad_syntax("word points read prefix:tail with a single tail letter");
    return Point::word_point(space, t.substr(0, colon), t[colon + 1]);
  }
  return Point::leaf(space, t);
}

// ---------------------------------------------------------------------------
// Similarity entries

namespace detail {

inline std::string format_tail(const Similarity& g) {
  if (g.is_word_map()) return g.tail().is_identity() ? "id" : g.tail().image_string();
  std::string out = "(";
  bool first = true;
  for (const auto& [from, to] : g.pointmap()) {
    if (!first) out += ",";
    first = false;
    out += from + ">" + to;
  }
  return out + ")";
}

inline Similarity parse_entry(const Space& space, const std::string& line, std::size_t lineno) {
  std::size_t pos = 0;
  std::string dom = read_quoted(line, pos, lineno);
  expect_token(line, pos, "->", lineno);
  std::string cod = read_quoted(line, pos, lineno);
  expect_token(line, pos, ":", lineno);
  std::string tail = strip(line.substr(pos));
  if (tail.empty()) bad_syntax("missing tail after ':'", lineno);
  if (!space.valid_address(dom)) fail(Errc::validation_error, "no ball at address \"" + dom + "\"");
  if (!space.valid_address(cod)) fail(Errc::validation_error, "no ball at address \"" + cod + "\"");
  Ball bdom(space, dom), bcod(space, cod);
  if (space.is_word()) {
    if (tail == "id") return Similarity(bdom, bcod, Perm(space.branching()));
    for (char c : tail)
      if (c < '0' || c >= '0' + space.branching())
        bad_syntax("tail '" + tail + "' is not a letter permutation for this space", lineno);
    if (static_cast<int>(tail.size()) != space.branching())
      bad_syntax("tail '" + tail + "' is not a letter permutation for this space", lineno);
    return Similarity(bdom, bcod, Perm::parse(tail));
  }
  std::map<std::string, std::string> pm;
  if (tail == "id") {
    if (dom != cod) bad_syntax("finite tail 'id' needs equal domain and codomain", lineno);
    for (const auto& leaf : space.leaves_below(dom)) pm.emplace(leaf, leaf);
    return Similarity(bdom, bcod, std::move(pm));
  }
  if (tail.front() != '(' || tail.back() != ')')
    bad_syntax("finite tails read (leaf>leaf,...)", lineno);
  for (const auto& pair : split(tail.substr(1, tail.size() - 2), ',')) {
    std::size_t gt = pair.find('>');
    if (gt == std::string::npos) bad_syntax("finite tails read (leaf>leaf,...)", lineno);
    std::string from = strip(pair.substr(0, gt)), to = strip(pair.substr(gt + 1));
    if (!pm.emplace(from, to).second) bad_syntax("leaf '" + from + "' mapped twice", lineno);
  }
  return Similarity(bdom, bcod, std::move(pm));
}

}  // namespace detail

inline std::string format_entry(const Similarity& g) {
  return "\"" + g.dom().addr + "\" -> \"" + g.cod().addr + "\" : " + detail::format_tail(g);
}

// ---------------------------------------------------------------------------
// Group elements

inline std::string format_element(const GroupElement& a) {
  std::string out = "elem " + a.structure().id() + "\n";
  for (const auto& g : a.table()) out += format_entry(g) + "\n";
  return out;
}

inline GroupElement parse_element(const SimStructure& s, const std::string& text) {
  std::vector<Similarity> table;
  bool saw_header = false;
  std::size_t lineno = 0;
  for (const auto& raw : detail::split(text, '\n')) {
    ++lineno;
    std::string line = detail::strip(raw);
    if (line.empty() || line.front() == '#') continue;
    if (!saw_header) {
      if (line.compare(0, 5, "elem ") != 0)
        detail::bad_syntax("element text must open with an 'elem' header", lineno);
      std::string id = detail::strip(line.substr(5));
      if (id != s.id())
        fail(Errc::validation_error,
             "element is for structure '" + id + "', expected '" + s.id() + "'",
             "line " + std::to_string(lineno));
      saw_header = true;
      continue;
    }
    table.push_back(detail::parse_entry(s.space(), line, lineno));
  }
  if (!saw_header) detail::bad_syntax("element text must open with an 'elem' header", 1);
  return GroupElement::from_table(s, std::move(table));
}

// ---------------------------------------------------------------------------
// Structure descriptors
//
//   space word d=2                   | space finite tree=((..)(..))
//   sim permutational H=trivial      | H=full | H=<img>,<img>,...
//   sim mirror
//   sim minus <sim ...>              (rest of line describes the base)
//   sim finite                       (generators follow on 'gen' lines)
//   name <identifier>                (optional)
//   gen "dom" -> "cod" : <tail>      (finite generators)

namespace detail {

inline std::vector<Perm> symmetric_group_generators(int d) {
  std::vector<Perm> gens;
  if (d < 2) return gens;
  std::string swap01, cycle;
  for (int i = 0; i < d; ++i) {
    swap01 += static_cast<char>('0' + (i == 0 ? 1 : i == 1 ? 0 : i));
    cycle += static_cast<char>('0' + (i + 1) % d);
  }
  gens.push_back(Perm::parse(swap01));
  gens.push_back(Perm::parse(cycle));
  return gens;
}

inline SimStructure build_sim(const Space& space, const std::string& spec,
                              const std::vector<Similarity>& gens, const std::string& name,
                              std::size_t lineno) {
  std::string t = strip(spec);
  if (t.compare(0, 13, "permutational") == 0) {
    std::string rest = strip(t.substr(13));
    if (rest.compare(0, 2, "H=") != 0) bad_syntax("permutational rule needs H=<perms>", lineno);
    std::string h = strip(rest.substr(2));
    std::vector<Perm> perms;
    if (h == "full") {
      perms = symmetric_group_generators(space.branching());
    } else if (h != "trivial") {
      for (const auto& img : split(h, ',')) perms.push_back(Perm::parse(strip(img)));
    }
    return SimStructure::permutational(space, perms, name);
  }
  if (t == "mirror") return SimStructure::mirror(space, name);
  if (t.compare(0, 5, "minus") == 0) {
    std::string rest = strip(t.substr(5));
    if (rest.empty()) bad_syntax("minus rule needs a base rule on the same line", lineno);
    return SimStructure::minus(build_sim(space, rest, gens, "", lineno), name);
  }
  if (t == "finite") return SimStructure::finite_enumerated(space, gens, 4096, name);
  bad_syntax("unknown similarity rule '" + t + "'", lineno);
}

}  // namespace detail

inline SimStructure parse_descriptor(const std::string& text) {
  std::optional<Space> space;
  std::string sim_spec, name;
  std::size_t sim_line = 0;
  std::vector<std::pair<std::string, std::size_t>> gen_lines;
  std::size_t lineno = 0;
  for (const auto& raw : detail::split(text, '\n')) {
    ++lineno;
    std::string line = detail::strip(raw);
    if (line.empty() || line.front() == '#') continue;
    if (line.compare(0, 6, "space ") == 0) {
      std::string rest = detail::strip(line.substr(6));
      if (rest.compare(0, 4, "word") == 0) {
        std::string arg = detail::strip(rest.substr(4));
        if (arg.compare(0, 2, "d=") != 0) detail::bad_syntax("word spaces read 'd=<n>'", lineno);
        int d = 0;
        for (char c : detail::strip(arg.substr(2))) {
          if (c < '0' || c > '9') detail::bad_syntax("word spaces read 'd=<n>'", lineno);
          d = d * 10 + (c - '0');
        }
        space = Space::word(d);
      } else if (rest.compare(0, 6, "finite") == 0) {
        std::string arg = detail::strip(rest.substr(6));
        if (arg.compare(0, 5, "tree=") != 0)
          detail::bad_syntax("finite spaces read 'tree=<spec>'", lineno);
        space = Space::finite(detail::strip(arg.substr(5)));
      } else {
        detail::bad_syntax("unknown space kind", lineno);
      }
    } else if (line.compare(0, 4, "sim ") == 0) {
      sim_spec = detail::strip(line.substr(4));
      sim_line = lineno;
    } else if (line.compare(0, 5, "name ") == 0) {
      name = detail::strip(line.substr(5));
    } else if (line.compare(0, 4, "gen ") == 0) {
      gen_lines.emplace_back(detail::strip(line.substr(4)), lineno);
    } else {
      detail::bad_syntax("unrecognized descriptor line", lineno);
    }
  }
  if (!space) detail::bad_syntax("descriptor is missing its 'space' line");
  if (sim_spec.empty()) detail::bad_syntax("descriptor is missing its 'sim' line");
  std::vector<Similarity> gens;
  for (const auto& [g, ln] : gen_lines) gens.push_back(detail::parse_entry(*space, g, ln));
  return detail::build_sim(*space, sim_spec, gens, name, sim_line);
}

namespace detail {

inline std::string format_sim_spec(const SimStructure& s) {
  switch (s.rule()) {
    case SimStructure::Rule::permutational: {
      std::string h;
      for (const auto& p : s.tail_group()) {
        if (p.is_identity()) continue;
        if (!h.empty()) h += ",";
        h += p.image_string();
      }
      return "permutational H=" + (h.empty() ? "trivial" : h);
    }
    case SimStructure::Rule::mirror:
      return "mirror";
    case SimStructure::Rule::minus:
      return "minus " + format_sim_spec(s.base());
    case SimStructure::Rule::finite_enumerated:
      return "finite";
    case SimStructure::Rule::restricted:
      fail(Errc::invalid_argument, "restricted structures have no descriptor form");
  }
  fail(Errc::invalid_argument, "unreachable");
}

}  // namespace detail

inline std::string format_descriptor(const SimStructure& s) {
  std::string out;
  if (s.space().is_word())
    out += "space word d=" + std::to_string(s.space().branching()) + "\n";
  else
    out += "space finite tree=" + s.space().tree().spec() + "\n";
  out += "sim " + detail::format_sim_spec(s) + "\n";
  if (!s.name().empty()) out += "name " + s.name() + "\n";
  if (auto root = detail::enumerated_root(s))
    for (const auto& g : root->enumerated())
      if (!g.is_identity()) out += "gen " + format_entry(g) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Built-in structures

inline std::optional<SimStructure> builtin_structure(const std::string& alias) {
  if (alias == "vd2") return SimStructure::permutational(Space::word(2), {}, "vd2");
  if (alias == "vd3") return SimStructure::permutational(Space::word(3), {}, "vd3");
  if (alias == "vd2s2")
    return SimStructure::permutational(Space::word(2), {Perm::parse("10")}, "vd2s2");
  if (alias == "mirror") return SimStructure::mirror(Space::word(2), "mirror");
  if (alias == "vd2-minus")
    return SimStructure::minus(SimStructure::permutational(Space::word(2), {}), "vd2-minus");
  return std::nullopt;
}

}  // namespace locsim
