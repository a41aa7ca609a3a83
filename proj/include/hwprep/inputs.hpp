#pragma once

// Input descriptions the synthesizers consume: weighted graphs (general,
// tree, grid) and fixed-Hamming-weight amplitude tables. Validation lives
// here so every consumer sees the same error taxonomy.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "hwprep/errors.hpp"

namespace hwprep {

struct WeightedEdge {
  int u = 0;  // 1-based vertices, u < v
  int v = 0;
  double w = 0.0;

  friend bool operator==(const WeightedEdge&, const WeightedEdge&) = default;
};

struct WeightedGraph {
  int n = 0;  // vertex count, vertices are 1..n
  std::vector<WeightedEdge> edges;

  int edge_count() const { return static_cast<int>(edges.size()); }

  // Sum of squared weights (the normalization constant of the target state).
  double total_square_weight() const {
    double m = 0.0;
    for (const WeightedEdge& e : edges) m += e.w * e.w;
    return m;
  }

  void validate() const {
    detail::check(n >= 1, "graph needs at least one vertex");
    std::vector<std::vector<bool>> seen;
    for (const WeightedEdge& e : edges) {
      if (e.u < 1 || e.u > n || e.v < 1 || e.v > n)
        throw Error("edge endpoint outside 1..n");
      if (e.u == e.v) throw Error("self-loops are not allowed");
      if (e.u > e.v) throw Error("edges must be listed with u < v");
      if (!(e.w > 0.0)) throw Error("edge weights must be positive");
    }
    for (std::size_t a = 0; a < edges.size(); ++a)
      for (std::size_t b = a + 1; b < edges.size(); ++b)
        if (edges[a].u == edges[b].u && edges[a].v == edges[b].v)
          throw Error("duplicate edge");
  }
};

struct TreeGraph {
  WeightedGraph graph;
  int root = 1;
};

// Rectangular grid with per-edge weights; h(r,c) joins (r,c)-(r,c+1) and
// v(r,c) joins (r,c)-(r+1,c), all 1-based.
struct GridGraph {
  int s = 0;  // rows
  int t = 0;  // cols
  std::vector<std::vector<double>> h;  // s rows of t-1 weights
  std::vector<std::vector<double>> v;  // s-1 rows of t weights

  static GridGraph sized(int s, int t) {
    GridGraph g;
    g.s = s;
    g.t = t;
    g.h.assign(s, std::vector<double>(t > 0 ? t - 1 : 0, 0.0));
    g.v.assign(s > 0 ? s - 1 : 0, std::vector<double>(t, 0.0));
    return g;
  }

  int vertex(int r, int c) const { return (r - 1) * t + c; }  // 1-based

  void validate() const {
    if (s < 1 || t < 1) throw BadGridError("grid dimensions must be at least 1x1");
    if (static_cast<int>(h.size()) != s || static_cast<int>(v.size()) != (s > 0 ? s - 1 : 0))
      throw BadGridError("grid weight arrays inconsistent with dimensions");
    for (const auto& row : h) {
      if (static_cast<int>(row.size()) != (t > 0 ? t - 1 : 0))
        throw BadGridError("horizontal weight row has wrong length");
      for (double w : row)
        if (!(w > 0.0)) throw BadGridError("grid weights must be positive");
    }
    for (const auto& row : v) {
      if (static_cast<int>(row.size()) != t)
        throw BadGridError("vertical weight row has wrong length");
      for (double w : row)
        if (!(w > 0.0)) throw BadGridError("grid weights must be positive");
    }
  }

  WeightedGraph to_graph() const {
    WeightedGraph g;
    g.n = s * t;
    for (int r = 1; r <= s; ++r)
      for (int c = 1; c + 1 <= t; ++c)
        g.edges.push_back({vertex(r, c), vertex(r, c + 1), h[r - 1][c - 1]});
    for (int r = 1; r + 1 <= s; ++r)
      for (int c = 1; c <= t; ++c)
        g.edges.push_back({vertex(r, c), vertex(r + 1, c), v[r - 1][c - 1]});
    return g;
  }
};

struct HwpTerm {
  std::string bits;  // '0'/'1' string of length n, leftmost char = qubit 0
  double amplitude = 0.0;

  friend bool operator==(const HwpTerm&, const HwpTerm&) = default;
};

// Amplitude table over basis states of fixed Hamming weight k.
struct HwpSpec {
  int n = 0;
  int k = 0;
  std::vector<HwpTerm> terms;

  void validate() const {
    detail::check(n >= 1 && k >= 1, "weight table needs n >= 1 and k >= 1");
    if (2 * k > n)
      throw Error("target weight k must satisfy k <= n/2 (complement the table otherwise)");
    if (terms.empty()) throw Error("weight table has no terms");
    bool any_nonzero = false;
    for (const HwpTerm& t : terms) {
      if (static_cast<int>(t.bits.size()) != n)
        throw BadHammingWeightError("term '" + t.bits + "' does not have n bits");
      int hw = 0;
      for (char c : t.bits) {
        if (c != '0' && c != '1')
          throw BadHammingWeightError("term '" + t.bits + "' is not a bitstring");
        hw += c == '1';
      }
      if (hw != k)
        throw BadHammingWeightError("term '" + t.bits + "' has Hamming weight " +
                                    std::to_string(hw) + ", expected " + std::to_string(k));
      if (t.amplitude != 0.0) any_nonzero = true;
    }
    for (std::size_t a = 0; a < terms.size(); ++a)
      for (std::size_t b = a + 1; b < terms.size(); ++b)
        if (terms[a].bits == terms[b].bits) throw Error("duplicate term " + terms[a].bits);
    if (!any_nonzero) throw ZeroVectorError("all amplitudes are zero");
  }

  // Returns a copy with amplitudes scaled to unit square-sum.
  HwpSpec normalized() const {
    double sq = 0.0;
    for (const HwpTerm& t : terms) sq += t.amplitude * t.amplitude;
    detail::check(sq > 0.0, "cannot normalize a zero table");
    HwpSpec out = *this;
    const double inv = 1.0 / std::sqrt(sq);
    for (HwpTerm& t : out.terms) t.amplitude *= inv;
    return out;
  }
};

struct AmplitudeVector {
  std::vector<double> values;

  int size() const { return static_cast<int>(values.size()); }

  bool all_zero() const {
    for (double v : values)
      if (v != 0.0) return false;
    return true;
  }

  AmplitudeVector normalized() const {
    double sq = 0.0;
    for (double v : values) sq += v * v;
    if (!(sq > 0.0)) throw ZeroVectorError("cannot encode the zero vector");
    AmplitudeVector out = *this;
    const double inv = 1.0 / std::sqrt(sq);
    for (double& v : out.values) v *= inv;
    return out;
  }
};

}  // namespace hwprep
