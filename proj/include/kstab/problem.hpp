/**
 * Problem files.
 *
 *   # comment
 *   [root_system]
 *   A2
 *   [polytope]
 *   1 1
 *   -1 2
 *   [pl_function]          one piece per line: constant : gradient
 *   0 : 0 0
 *   -7/4 : 1 1
 *   [crease]               compiled against P⁺ when the instance is built
 *   corner 1 1
 *   epsilon 1/4
 *   slope 1
 *   symmetrize true
 *   [options]
 *   roof 1
 *   [metadata]
 *   family pgl3
 */
#pragma once

#include "kstab/functionals.hpp"
#include "kstab/pl_function.hpp"
#include "kstab/polytope.hpp"
#include "kstab/rational.hpp"
#include "kstab/root_system.hpp"

#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace kstab {

struct CreaseSpec {
  std::vector<Vec> corners;
  Rat epsilon = 0;
  Rat slope = 1;
  bool symmetrize = true;

  bool operator==(const CreaseSpec&) const = default;
};

struct ProblemFile {
  std::string root_system;
  std::vector<Vec> polytope;
  std::vector<AffinePiece> pieces;
  std::optional<CreaseSpec> crease;
  std::map<std::string, std::string> options;
  std::map<std::string, std::string> metadata;

  bool operator==(const ProblemFile&) const = default;

  std::optional<std::string> option(const std::string& key) const {
    auto it = options.find(key);
    if (it == options.end()) return std::nullopt;
    return it->second;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

/// Whitespace-separated tokens with their 1-based columns.
inline std::vector<std::pair<std::string, int>> tokens(const std::string& line) {
  std::vector<std::pair<std::string, int>> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    if (i >= line.size()) break;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    out.emplace_back(line.substr(i, j - i), static_cast<int>(i) + 1);
    i = j;
  }
  return out;
}

[[noreturn]] inline void parse_fail(int line, int col, const std::string& what) {
  throw ParseError("line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + what);
}

inline Rat rat_at(const std::pair<std::string, int>& tok, int line) {
  try {
    return parse_rat(tok.first);
  } catch (const ParseError& e) {
    parse_fail(line, tok.second, e.what());
  }
}

inline Vec vec_of(const std::vector<std::pair<std::string, int>>& toks, std::size_t from, int line) {
  Vec v;
  for (std::size_t i = from; i < toks.size(); ++i) v.push_back(rat_at(toks[i], line));
  return v;
}

}  // namespace detail

inline ProblemFile parse_problem(const std::string& text) {
  ProblemFile p;
  std::istringstream in(text);
  std::string raw, section;
  int line_no = 0;
  bool saw_root = false;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    if (auto h = line.find('#'); h != std::string::npos) line = line.substr(0, h);
    std::string t = detail::trim(line);
    if (t.empty()) continue;
    int col0 = static_cast<int>(line.find_first_not_of(" \t")) + 1;
    if (t.front() == '[') {
      if (t.back() != ']') detail::parse_fail(line_no, col0, "unterminated section header");
      section = t.substr(1, t.size() - 2);
      static const std::set<std::string> known{"root_system", "polytope", "pl_function", "crease", "options", "metadata"};
      if (!known.count(section)) detail::parse_fail(line_no, col0 + 1, "unknown section '" + section + "'");
      if (section == "crease" && !p.crease) p.crease = CreaseSpec{};
      continue;
    }
    auto toks = detail::tokens(line);
    if (section.empty()) detail::parse_fail(line_no, col0, "data before any section header");
    if (section == "root_system") {
      if (saw_root) detail::parse_fail(line_no, col0, "root system given twice");
      if (toks.size() != 1) detail::parse_fail(line_no, toks[1].second, "expected a single label");
      p.root_system = toks[0].first;
      saw_root = true;
    } else if (section == "polytope") {
      Vec v = detail::vec_of(toks, 0, line_no);
      if (!p.polytope.empty() && v.size() != p.polytope[0].size())
        detail::parse_fail(line_no, col0, "vertex has " + std::to_string(v.size()) + " coordinates, expected " +
                                              std::to_string(p.polytope[0].size()));
      p.polytope.push_back(v);
    } else if (section == "pl_function") {
      if (toks.size() < 3 || toks[1].first != ":")
        detail::parse_fail(line_no, col0, "expected 'constant : gradient...'");
      AffinePiece piece{detail::rat_at(toks[0], line_no), detail::vec_of(toks, 2, line_no)};
      if (!p.pieces.empty() && piece.gradient.size() != p.pieces[0].gradient.size())
        detail::parse_fail(line_no, toks[2].second, "gradient length differs from earlier pieces");
      p.pieces.push_back(piece);
    } else if (section == "crease") {
      const std::string& key = toks[0].first;
      if (key == "corner") {
        if (toks.size() < 2) detail::parse_fail(line_no, col0, "corner needs coordinates");
        p.crease->corners.push_back(detail::vec_of(toks, 1, line_no));
      } else if (key == "epsilon" || key == "slope") {
        if (toks.size() != 2) detail::parse_fail(line_no, col0, key + " takes one value");
        (key == "epsilon" ? p.crease->epsilon : p.crease->slope) = detail::rat_at(toks[1], line_no);
      } else if (key == "symmetrize") {
        if (toks.size() != 2 || (toks[1].first != "true" && toks[1].first != "false"))
          detail::parse_fail(line_no, col0, "symmetrize takes true or false");
        p.crease->symmetrize = toks[1].first == "true";
      } else {
        detail::parse_fail(line_no, col0, "unknown crease key '" + key + "'");
      }
    } else {
      std::string key = toks[0].first;
      std::string value = detail::trim(line.substr(toks[0].second - 1 + key.size()));
      if (value.empty()) detail::parse_fail(line_no, col0, "key '" + key + "' has no value");
      (section == "options" ? p.options : p.metadata)[key] = value;
    }
  }
  if (!saw_root) throw ParseError("line " + std::to_string(line_no) + ", column 1: missing [root_system] section");
  if (p.polytope.empty()) throw ParseError("line " + std::to_string(line_no) + ", column 1: missing [polytope] section");
  if (p.crease && p.crease->corners.empty())
    throw ParseError("line " + std::to_string(line_no) + ", column 1: [crease] needs at least one corner");
  return p;
}

inline std::string serialize_problem(const ProblemFile& p) {
  std::ostringstream o;
  o << "[root_system]\n" << p.root_system << "\n";
  o << "[polytope]\n";
  for (const Vec& v : p.polytope) o << to_string(v) << "\n";
  if (!p.pieces.empty()) {
    o << "[pl_function]\n";
    for (const auto& piece : p.pieces) o << to_string(piece.constant) << " : " << to_string(piece.gradient) << "\n";
  }
  if (p.crease) {
    o << "[crease]\n";
    for (const Vec& c : p.crease->corners) o << "corner " << to_string(c) << "\n";
    o << "epsilon " << to_string(p.crease->epsilon) << "\n";
    o << "slope " << to_string(p.crease->slope) << "\n";
    o << "symmetrize " << (p.crease->symmetrize ? "true" : "false") << "\n";
  }
  if (!p.options.empty()) {
    o << "[options]\n";
    for (const auto& [k, v] : p.options) o << k << " " << v << "\n";
  }
  if (!p.metadata.empty()) {
    o << "[metadata]\n";
    for (const auto& [k, v] : p.metadata) o << k << " " << v << "\n";
  }
  return o.str();
}

inline ProblemFile read_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_problem(ss.str());
}

/// A problem with its derived geometry.
struct Instance {
  RootSystemData rs;
  RationalPolytope polytope;
  RationalPolytope chamber;
  PLFunction f;
  Rat roof;
};

/// Builds rs, P, P⁺ and f. The scale factor s maps P ↦ sP, f ↦ s·f(·/s) and R ↦ sR.
inline Instance build_instance(const ProblemFile& p, const std::optional<std::string>& root_override = std::nullopt,
                               const Rat& scale = 1) {
  if (scale <= 0) throw ValidationError("scale must be positive");
  Instance in;
  in.rs = build_root_system(root_override.value_or(p.root_system));
  for (const Vec& v : p.polytope)
    if (static_cast<int>(v.size()) != in.rs.rank)
      throw ValidationError("polytope vertices have " + std::to_string(v.size()) + " coordinates but " +
                            in.rs.label + " has rank " + std::to_string(in.rs.rank));
  std::vector<Vec> pts;
  for (const Vec& v : p.polytope) pts.push_back(scale * v);
  in.polytope = hull_and_facets(pts);
  if (!in.polytope.full_dimensional()) throw ValidationError("polytope is not full-dimensional");
  in.chamber = chamber_intersect(in.rs, in.polytope);
  PLFunction f = PLFunction::constant(in.rs.rank, 0);
  bool have = false;
  if (!p.pieces.empty()) {
    std::vector<AffinePiece> scaled;
    for (const auto& piece : p.pieces) {
      if (static_cast<int>(piece.gradient.size()) != in.rs.rank)
        throw ValidationError("pl_function gradient length differs from the rank");
      scaled.push_back({scale * piece.constant, piece.gradient});
    }
    f = PLFunction(scaled);
    have = true;
  }
  if (p.crease) {
    for (const Vec& c : p.crease->corners) {
      PLFunction g = corner_crease(in.chamber, scale * c, scale * p.crease->epsilon, p.crease->slope);
      f = have ? pl_max(f, g) : g;
      have = true;
    }
    if (p.crease->symmetrize && !in.rs.is_toric()) f = symmetrize(in.rs, f);
  }
  in.f = f;
  if (auto r = p.option("roof")) {
    in.roof = scale * parse_rat(*r);
  } else {
    in.roof = pl_max_on(in.chamber, f);
  }
  return in;
}

}  // namespace kstab
