#pragma once

// Text formats for synthesis inputs.  Everywhere: blank lines and lines
// starting with '#' are ignored; tokens are whitespace-separated.
//
//   graph       header "graph n m", then exactly m lines "i j w" with
//               1-based endpoints (order normalized to i < j)
//   tree        graph grammar plus at most one "root v" line after the
//               header (default root 1)
//   grid        header "grid s t", then one line per edge:
//               "h r c w" for the edge (r,c)-(r,c+1) and
//               "v r c w" for the edge (r,c)-(r+1,c); each edge exactly once
//   hwp         header "hwp n k", then lines "bitstring amplitude"
//   amplitudes  one real per line, no header
//
// Readers throw ParseError carrying the 1-based line number; structural
// problems surface through the input types' validate().

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hwprep/circuit_text.hpp"
#include "hwprep/errors.hpp"
#include "hwprep/inputs.hpp"

namespace hwprep {

namespace detail {

// Feeds non-blank, non-comment lines with their 1-based line numbers.
class LineSource {
 public:
  explicit LineSource(std::istream& in) : in_(in) {}

  bool next(std::vector<std::string>& tokens, int& line_number) {
    std::string raw;
    while (std::getline(in_, raw)) {
      ++line_;
      const std::string t = trim(raw);
      if (t.empty() || t[0] == '#') continue;
      tokens = split_ws(t);
      line_number = line_;
      return true;
    }
    return false;
  }

  int line() const { return line_; }

 private:
  std::istream& in_;
  int line_ = 0;
};

inline void expect_no_more(LineSource& src, const char* what) {
  std::vector<std::string> toks;
  int line = 0;
  if (src.next(toks, line))
    throw ParseError(line, std::string("unexpected content after ") + what);
}

inline std::ostream& number(std::ostream& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return out << buf;
}

}  // namespace detail

inline WeightedGraph read_graph(std::istream& in) {
  detail::LineSource src(in);
  std::vector<std::string> toks;
  int line = 0;
  if (!src.next(toks, line))
    throw ParseError(src.line(), "expected 'graph n m' header");
  if (toks.size() != 3 || toks[0] != "graph")
    throw ParseError(line, "expected 'graph n m' header");
  WeightedGraph g;
  g.n = detail::parse_int(toks[1], line);
  const int m = detail::parse_int(toks[2], line);
  if (m < 0) throw ParseError(line, "negative edge count");
  for (int e = 0; e < m; ++e) {
    if (!src.next(toks, line))
      throw ParseError(src.line(), "expected " + std::to_string(m) +
                                       " edges, got " + std::to_string(e));
    if (toks.size() != 3)
      throw ParseError(line, "expected an edge line 'i j w'");
    int u = detail::parse_int(toks[0], line);
    int v = detail::parse_int(toks[1], line);
    if (u > v) std::swap(u, v);
    g.edges.push_back({u, v, detail::parse_double(toks[2], line)});
  }
  detail::expect_no_more(src, "the edge list");
  g.validate();
  return g;
}

inline void write_graph(std::ostream& out, const WeightedGraph& g) {
  out << "graph " << g.n << " " << g.edge_count() << "\n";
  for (const WeightedEdge& e : g.edges) {
    out << e.u << " " << e.v << " ";
    detail::number(out, e.w) << "\n";
  }
}

inline TreeGraph read_tree(std::istream& in) {
  detail::LineSource src(in);
  std::vector<std::string> toks;
  int line = 0;
  if (!src.next(toks, line))
    throw ParseError(src.line(), "expected 'graph n m' header");
  if (toks.size() != 3 || toks[0] != "graph")
    throw ParseError(line, "expected 'graph n m' header");
  TreeGraph t;
  t.graph.n = detail::parse_int(toks[1], line);
  const int m = detail::parse_int(toks[2], line);
  if (m < 0) throw ParseError(line, "negative edge count");
  bool saw_root = false;
  int edges = 0;
  while (edges < m || !saw_root) {
    if (!src.next(toks, line)) {
      if (edges < m)
        throw ParseError(src.line(), "expected " + std::to_string(m) +
                                         " edges, got " + std::to_string(edges));
      break;  // root line is optional
    }
    if (toks[0] == "root") {
      if (saw_root) throw ParseError(line, "duplicate 'root' line");
      if (toks.size() != 2) throw ParseError(line, "expected 'root v'");
      t.root = detail::parse_int(toks[1], line);
      saw_root = true;
      continue;
    }
    if (edges == m)
      throw ParseError(line, "unexpected content after the edge list");
    if (toks.size() != 3)
      throw ParseError(line, "expected an edge line 'i j w'");
    int u = detail::parse_int(toks[0], line);
    int v = detail::parse_int(toks[1], line);
    if (u > v) std::swap(u, v);
    t.graph.edges.push_back({u, v, detail::parse_double(toks[2], line)});
    ++edges;
  }
  detail::expect_no_more(src, "the edge list");
  t.graph.validate();
  if (t.root < 1 || t.root > t.graph.n)
    throw Error("root vertex outside 1..n");
  return t;
}

inline void write_tree(std::ostream& out, const TreeGraph& t) {
  out << "graph " << t.graph.n << " " << t.graph.edge_count() << "\n";
  out << "root " << t.root << "\n";
  for (const WeightedEdge& e : t.graph.edges) {
    out << e.u << " " << e.v << " ";
    detail::number(out, e.w) << "\n";
  }
}

inline GridGraph read_grid(std::istream& in) {
  detail::LineSource src(in);
  std::vector<std::string> toks;
  int line = 0;
  if (!src.next(toks, line))
    throw ParseError(src.line(), "expected 'grid s t' header");
  if (toks.size() != 3 || toks[0] != "grid")
    throw ParseError(line, "expected 'grid s t' header");
  const int s = detail::parse_int(toks[1], line);
  const int t = detail::parse_int(toks[2], line);
  if (s < 1 || t < 1) throw ParseError(line, "grid dimensions must be positive");
  GridGraph g = GridGraph::sized(s, t);
  std::vector<std::vector<bool>> seen_h(g.h.size()),
      seen_v(g.v.size());
  for (std::size_t r = 0; r < g.h.size(); ++r)
    seen_h[r].assign(g.h[r].size(), false);
  for (std::size_t r = 0; r < g.v.size(); ++r)
    seen_v[r].assign(g.v[r].size(), false);
  while (src.next(toks, line)) {
    if (toks.size() != 4 || (toks[0] != "h" && toks[0] != "v"))
      throw ParseError(line, "expected an edge line 'h r c w' or 'v r c w'");
    const bool horizontal = toks[0] == "h";
    const int r = detail::parse_int(toks[1], line);
    const int c = detail::parse_int(toks[2], line);
    const double w = detail::parse_double(toks[3], line);
    if (horizontal) {
      if (r < 1 || r > s || c < 1 || c > t - 1)
        throw ParseError(line, "horizontal edge outside the grid");
      if (seen_h[r - 1][c - 1]) throw ParseError(line, "duplicate edge line");
      seen_h[r - 1][c - 1] = true;
      g.h[r - 1][c - 1] = w;
    } else {
      if (r < 1 || r > s - 1 || c < 1 || c > t)
        throw ParseError(line, "vertical edge outside the grid");
      if (seen_v[r - 1][c - 1]) throw ParseError(line, "duplicate edge line");
      seen_v[r - 1][c - 1] = true;
      g.v[r - 1][c - 1] = w;
    }
  }
  for (std::size_t r = 0; r < seen_h.size(); ++r)
    for (std::size_t c = 0; c < seen_h[r].size(); ++c)
      if (!seen_h[r][c])
        throw ParseError(src.line(), "missing weight for the edge (" +
                                         std::to_string(r + 1) + "," +
                                         std::to_string(c + 1) + ")-(" +
                                         std::to_string(r + 1) + "," +
                                         std::to_string(c + 2) + ")");
  for (std::size_t r = 0; r < seen_v.size(); ++r)
    for (std::size_t c = 0; c < seen_v[r].size(); ++c)
      if (!seen_v[r][c])
        throw ParseError(src.line(), "missing weight for the edge (" +
                                         std::to_string(r + 1) + "," +
                                         std::to_string(c + 1) + ")-(" +
                                         std::to_string(r + 2) + "," +
                                         std::to_string(c + 1) + ")");
  g.validate();
  return g;
}

inline void write_grid(std::ostream& out, const GridGraph& g) {
  out << "grid " << g.s << " " << g.t << "\n";
  for (int r = 1; r <= g.s; ++r)
    for (int c = 1; c + 1 <= g.t; ++c) {
      out << "h " << r << " " << c << " ";
      detail::number(out, g.h[r - 1][c - 1]) << "\n";
    }
  for (int r = 1; r + 1 <= g.s; ++r)
    for (int c = 1; c <= g.t; ++c) {
      out << "v " << r << " " << c << " ";
      detail::number(out, g.v[r - 1][c - 1]) << "\n";
    }
}

inline HwpSpec read_hwp(std::istream& in) {
  detail::LineSource src(in);
  std::vector<std::string> toks;
  int line = 0;
  if (!src.next(toks, line))
    throw ParseError(src.line(), "expected 'hwp n k' header");
  if (toks.size() != 3 || toks[0] != "hwp")
    throw ParseError(line, "expected 'hwp n k' header");
  HwpSpec spec;
  spec.n = detail::parse_int(toks[1], line);
  spec.k = detail::parse_int(toks[2], line);
  while (src.next(toks, line)) {
    if (toks.size() != 2)
      throw ParseError(line, "expected a term line 'bitstring amplitude'");
    spec.terms.push_back({toks[0], detail::parse_double(toks[1], line)});
  }
  spec.validate();
  return spec;
}

inline void write_hwp(std::ostream& out, const HwpSpec& spec) {
  out << "hwp " << spec.n << " " << spec.k << "\n";
  for (const HwpTerm& t : spec.terms) {
    out << t.bits << " ";
    detail::number(out, t.amplitude) << "\n";
  }
}

inline AmplitudeVector read_amplitudes(std::istream& in) {
  detail::LineSource src(in);
  std::vector<std::string> toks;
  int line = 0;
  AmplitudeVector amps;
  while (src.next(toks, line)) {
    if (toks.size() != 1)
      throw ParseError(line, "expected one amplitude per line");
    amps.values.push_back(detail::parse_double(toks[0], line));
  }
  if (amps.values.empty())
    throw ParseError(src.line(), "no amplitudes in the input");
  return amps;
}

inline void write_amplitudes(std::ostream& out, const AmplitudeVector& amps) {
  for (double v : amps.values) detail::number(out, v) << "\n";
}

namespace detail {

template <typename T, T (*Reader)(std::istream&)>
T read_file_as(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return Reader(in);
}

}  // namespace detail

inline WeightedGraph read_graph_file(const std::string& path) {
  return detail::read_file_as<WeightedGraph, read_graph>(path);
}
inline TreeGraph read_tree_file(const std::string& path) {
  return detail::read_file_as<TreeGraph, read_tree>(path);
}
inline GridGraph read_grid_file(const std::string& path) {
  return detail::read_file_as<GridGraph, read_grid>(path);
}
inline HwpSpec read_hwp_file(const std::string& path) {
  return detail::read_file_as<HwpSpec, read_hwp>(path);
}
inline AmplitudeVector read_amplitudes_file(const std::string& path) {
  return detail::read_file_as<AmplitudeVector, read_amplitudes>(path);
}

}  // namespace hwprep
