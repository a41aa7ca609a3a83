#pragma once
// Structural analysis of synthesized circuits.
//
//  * CircuitDag / light_cone: the layered influence graph over (depth+1) x
//    num_qubits wire vertices. A vertex is in the light cone of the working
//    register when a directed path leads from it to a working vertex in the
//    final layer; only gates inside the cone can affect the working output.
//  * cone_prune: drop every gate outside the cone.
//  * reduced_density / density_distance: compare the working-register output
//    of two states irrespective of what the ancillas hold.
//  * scaling_run: synthesize an instance family over a parameter grid, record
//    depth/size/ancilla rows (CSV-ready), and fit depth against log2 of the
//    instance scale by least squares.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <future>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hwprep/circuit.hpp"
#include "hwprep/cnot_synth.hpp"
#include "hwprep/errors.hpp"
#include "hwprep/graph_prep.hpp"
#include "hwprep/hwp_prep.hpp"
#include "hwprep/inputs.hpp"
#include "hwprep/sparse_sim.hpp"
#include "hwprep/unary_enc.hpp"

namespace hwprep {

// Layered wire graph of a circuit built from gates on at most two qubits.
// Layer j holds one vertex per qubit; edges join layers j and j+1 following
// gate incidence, with identity edges on untouched wires, so every vertex has
// in-degree at most two.
struct CircuitDag {
  int num_qubits = 0;
  int depth = 0;  // vertex layers run 0..depth inclusive
  // gate_at[j][q]: index of the gate acting on qubit q in layer j, -1 if idle
  std::vector<std::vector<int>> gate_at;
  // edges[j]: directed (from_qubit, to_qubit) pairs between layers j and j+1
  std::vector<std::vector<std::pair<int, int>>> edges;
};

inline CircuitDag build_dag(const Circuit& c) {
  for (const Gate& g : c.gates())
    if (g.qubits().size() > 2)
      throw NotLoweredError("influence graph needs gates on at most two qubits");
  CircuitDag dag;
  dag.num_qubits = c.num_qubits();
  dag.depth = c.depth();
  const std::vector<int> layer_of = c.layers();
  dag.gate_at.assign(static_cast<std::size_t>(dag.depth),
                     std::vector<int>(static_cast<std::size_t>(dag.num_qubits), -1));
  dag.edges.resize(static_cast<std::size_t>(dag.depth));
  for (std::size_t i = 0; i < c.gates().size(); ++i) {
    const int j = layer_of[i] - 1;  // layers() is 1-based
    const std::vector<int> qs = c.gates()[i].qubits();
    for (int a : qs) {
      dag.gate_at[static_cast<std::size_t>(j)][static_cast<std::size_t>(a)] =
          static_cast<int>(i);
      for (int b : qs) dag.edges[static_cast<std::size_t>(j)].emplace_back(a, b);
    }
  }
  for (int j = 0; j < dag.depth; ++j)
    for (int q = 0; q < dag.num_qubits; ++q)
      if (dag.gate_at[static_cast<std::size_t>(j)][static_cast<std::size_t>(q)] < 0)
        dag.edges[static_cast<std::size_t>(j)].emplace_back(q, q);
  for (int j = 0; j < dag.depth; ++j) {
    std::vector<int> indeg(static_cast<std::size_t>(dag.num_qubits), 0);
    for (const auto& [from, to] : dag.edges[static_cast<std::size_t>(j)])
      ++indeg[static_cast<std::size_t>(to)];
    for (int d : indeg)
      detail::check(d >= 1 && d <= 2, "wire vertex with in-degree outside 1..2");
  }
  return dag;
}

struct ConeCount {
  int vertices = 0;    // wire vertices from which the working output is reachable
  int edges = 0;       // influence edges ending in a cone vertex
  int gates = 0;       // gates with at least one output vertex in the cone
  int parameters = 0;  // free angles among those gates (rotations 1, fixed 0)
};

namespace detail {

inline bool has_free_angle(const Gate& g) {
  return g.kind == GateKind::Ry || g.kind == GateKind::Phase || g.kind == GateKind::Rbs;
}

// in_cone[j][q] for all layers, computed by reverse traversal from the final
// layer's working vertices.
inline std::vector<std::vector<char>> cone_membership(const CircuitDag& dag, int working) {
  std::vector<std::vector<char>> in_cone(
      static_cast<std::size_t>(dag.depth) + 1,
      std::vector<char>(static_cast<std::size_t>(dag.num_qubits), 0));
  for (int q = 0; q < working; ++q)
    in_cone[static_cast<std::size_t>(dag.depth)][static_cast<std::size_t>(q)] = 1;
  for (int j = dag.depth - 1; j >= 0; --j)
    for (const auto& [from, to] : dag.edges[static_cast<std::size_t>(j)])
      if (in_cone[static_cast<std::size_t>(j) + 1][static_cast<std::size_t>(to)])
        in_cone[static_cast<std::size_t>(j)][static_cast<std::size_t>(from)] = 1;
  return in_cone;
}

}  // namespace detail

inline ConeCount light_cone(const Circuit& c, int working) {
  if (working < 0 || working > c.num_qubits())
    throw Error("working prefix outside the circuit");
  const CircuitDag dag = build_dag(c);
  const std::vector<std::vector<char>> in_cone = detail::cone_membership(dag, working);
  ConeCount out;
  for (const auto& layer : in_cone)
    for (char m : layer) out.vertices += m;
  for (int j = 0; j < dag.depth; ++j)
    for (const auto& [from, to] : dag.edges[static_cast<std::size_t>(j)])
      if (in_cone[static_cast<std::size_t>(j) + 1][static_cast<std::size_t>(to)])
        ++out.edges;
  const std::vector<int> layer_of = c.layers();
  for (std::size_t i = 0; i < c.gates().size(); ++i) {
    const int out_layer = layer_of[i];  // 1-based layer = output vertex layer
    bool inside = false;
    for (int q : c.gates()[i].qubits())
      inside = inside ||
               in_cone[static_cast<std::size_t>(out_layer)][static_cast<std::size_t>(q)];
    if (inside) {
      ++out.gates;
      out.parameters += detail::has_free_angle(c.gates()[i]) ? 1 : 0;
    }
  }
  return out;
}

// The circuit with every gate outside the light cone removed. The working
// output is unchanged; ancillas may end in a different (disentangled) state.
inline Circuit cone_prune(const Circuit& c, int working) {
  if (working < 0 || working > c.num_qubits())
    throw Error("working prefix outside the circuit");
  const CircuitDag dag = build_dag(c);
  const std::vector<std::vector<char>> in_cone = detail::cone_membership(dag, working);
  const std::vector<int> layer_of = c.layers();
  Circuit out(c.num_qubits());
  for (std::size_t i = 0; i < c.gates().size(); ++i) {
    const int out_layer = layer_of[i];  // 1-based layer = output vertex layer
    bool inside = false;
    for (int q : c.gates()[i].qubits())
      inside = inside ||
               in_cone[static_cast<std::size_t>(out_layer)][static_cast<std::size_t>(q)];
    if (inside) out.append(c.gates()[i]);
  }
  return out;
}

// Reduced density matrix of the leading `working` qubits, indexed by basis
// prefixes packed little-endian (bit q of the index = qubit q). Real entries;
// absent keys are zero.
using DensityMatrix = std::map<std::pair<std::uint64_t, std::uint64_t>, double>;

inline DensityMatrix reduced_density(const SparseState& state, int working) {
  detail::check(working >= 0 && working <= state.num_qubits() && working <= 63,
                "working prefix outside the state or over 63 qubits");
  std::unordered_map<BasisKey, std::vector<std::pair<std::uint64_t, double>>, BasisKeyHash>
      by_ancilla;
  for (const auto& [key, amp] : state.terms()) {
    std::uint64_t prefix = 0;
    BasisKey rest = key;
    for (int q = 0; q < working; ++q) {
      if (key.get(q)) prefix |= std::uint64_t{1} << q;
      rest.set(q, false);
    }
    by_ancilla[rest].emplace_back(prefix, amp);
  }
  DensityMatrix rho;
  for (const auto& [anc, entries] : by_ancilla)
    for (const auto& [pa, aa] : entries)
      for (const auto& [pb, ab] : entries) rho[{pa, pb}] += aa * ab;
  return rho;
}

// Frobenius distance between two reduced density matrices.
inline double density_distance(const DensityMatrix& a, const DensityMatrix& b) {
  double sq = 0.0;
  for (const auto& [key, va] : a) {
    auto it = b.find(key);
    const double d = va - (it == b.end() ? 0.0 : it->second);
    sq += d * d;
  }
  for (const auto& [key, vb] : b)
    if (a.find(key) == a.end()) sq += vb * vb;
  return std::sqrt(sq);
}

// ---------------------------------------------------------------------------
// Scaling harness
// ---------------------------------------------------------------------------

struct ScalingRow {
  std::string family;
  long long x = 0;     // instance scale: qubits (chain), controls (fan_in),
                       // amplitudes (unary), vertices (graph/tree/grid),
                       // working qubits (hwp)
  int k = 0;           // target weight for hwp rows, 0 elsewhere
  int depth = 0;
  long long size = 0;  // gate count
  int ancillas = 0;    // qubits beyond the problem register
  double seconds = 0.0;
};

struct LineFit {
  double a = 0.0;
  double b = 0.0;
  double max_residual = 0.0;
};

// Least squares of y against log2(x); max_residual is the largest |y - fit|.
inline LineFit fit_log2(const std::vector<std::pair<long long, int>>& points) {
  LineFit fit;
  if (points.size() < 2) {
    fit.b = points.empty() ? 0.0 : points.front().second;
    return fit;
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : points) {
    const double lx = std::log2(static_cast<double>(x));
    sx += lx;
    sy += y;
    sxx += lx * lx;
    sxy += lx * y;
  }
  const double m = static_cast<double>(points.size());
  const double den = m * sxx - sx * sx;
  if (std::abs(den) < 1e-12) {
    fit.b = sy / m;
  } else {
    fit.a = (m * sxy - sx * sy) / den;
    fit.b = (sy - fit.a * sx) / m;
  }
  for (const auto& [x, y] : points) {
    const double lx = std::log2(static_cast<double>(x));
    fit.max_residual = std::max(fit.max_residual, std::abs(y - (fit.a * lx + fit.b)));
  }
  return fit;
}

struct ScalingReport {
  std::string family;
  std::vector<ScalingRow> rows;
  LineFit fit;  // depth against log2(x) over all rows

  // One row per instance. Columns: family,x,k,depth,size,ancillas - the
  // deterministic measurements; wall time stays in ScalingRow::seconds.
  std::string csv() const {
    std::ostringstream out;
    out << "family,x,k,depth,size,ancillas\n";
    for (const ScalingRow& r : rows)
      out << r.family << ',' << r.x << ',' << r.k << ',' << r.depth << ',' << r.size
          << ',' << r.ancillas << '\n';
    return out.str();
  }
};

namespace detail {

// Deterministic uniform [0, 1) independent of the standard library's
// distribution implementations, so reports are byte-stable across toolchains.
inline double unit_real(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1p-53;
}

inline double scale_weight(std::mt19937_64& gen) { return 0.1 + 1.9 * unit_real(gen); }

inline WeightedGraph scaling_graph(int n, int m, std::mt19937_64& gen) {
  WeightedGraph g;
  g.n = n;
  std::map<std::pair<int, int>, bool> seen;
  while (static_cast<int>(g.edges.size()) < m) {
    int u = 1 + static_cast<int>(gen() % static_cast<unsigned>(n));
    int v = 1 + static_cast<int>(gen() % static_cast<unsigned>(n));
    if (u == v) continue;
    if (u > v) std::swap(u, v);
    if (seen[{u, v}]) continue;
    seen[{u, v}] = true;
    g.edges.push_back({u, v, scale_weight(gen)});
  }
  return g;
}

inline TreeGraph scaling_path(int n, std::mt19937_64& gen) {
  TreeGraph t;
  t.graph.n = n;
  for (int v = 2; v <= n; ++v) t.graph.edges.push_back({v - 1, v, scale_weight(gen)});
  return t;
}

inline HwpSpec scaling_table(int n, int k, std::mt19937_64& gen) {
  HwpSpec s{n, k, {}};
  for (const std::string& b : weight_strings(n, k))
    if (gen() % 2 == 0) s.terms.push_back({b, 2.0 * unit_real(gen) - 1.0});
  bool nonzero = false;
  for (const HwpTerm& t : s.terms) nonzero = nonzero || t.amplitude != 0.0;
  if (!nonzero) s.terms.push_back({weight_strings(n, k).front(), 1.0});
  return s;
}

struct ScalingInstance {
  long long x = 0;
  int k = 0;
};

inline ScalingRow scaling_instance(const std::string& family, const ScalingInstance& inst,
                                   std::uint64_t seed, long long budget) {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 gen(seed);
  const long long x = inst.x;
  ScalingRow row;
  row.family = family;
  row.x = x;
  row.k = inst.k;
  Circuit circuit(0);
  int problem = 0;
  int width = 0;
  if (family == "chain") {
    if (x < 2 || x > budget) throw BudgetError("chain instance outside budget");
    circuit = chain(static_cast<int>(x));
    problem = width = static_cast<int>(x);
  } else if (family == "fan_in") {
    if (x < 1 || x + 1 > budget) throw BudgetError("fan_in instance outside budget");
    std::vector<int> controls(static_cast<std::size_t>(x));
    for (long long i = 0; i < x; ++i) controls[static_cast<std::size_t>(i)] =
        static_cast<int>(i);
    circuit = fan_in(static_cast<int>(x), controls);
    problem = width = static_cast<int>(x) + 1;
  } else if (family == "unary") {
    if (x < 1 || x > budget) throw BudgetError("unary instance outside budget");
    AmplitudeVector amps;
    for (long long i = 0; i < x; ++i) amps.values.push_back(scale_weight(gen));
    std::vector<int> qubits(static_cast<std::size_t>(x));
    for (long long i = 0; i < x; ++i) qubits[static_cast<std::size_t>(i)] =
        static_cast<int>(i);
    circuit = unary_encode(amps, qubits);
    problem = width = static_cast<int>(x);
  } else if (family == "graph") {
    if (x < 2 || 7 * x > budget) throw BudgetError("graph instance outside budget");
    const int n = static_cast<int>(x);
    const long long all = static_cast<long long>(n) * (n - 1) / 2;
    const WeightedGraph g = scaling_graph(n, static_cast<int>(std::min<long long>(3 * n, all)), gen);
    auto [c, layout] = prepare_general(g);
    circuit = std::move(c);
    problem = n;
    width = layout.num_qubits;
  } else if (family == "tree" || family == "tree-naive") {
    if (x < 2 || x > budget) throw BudgetError("tree instance outside budget");
    const TreeGraph t = scaling_path(static_cast<int>(x), gen);
    circuit = prepare_tree(t, family == "tree");
    problem = width = static_cast<int>(x);
  } else if (family == "grid") {
    if (x < 1 || x * x > budget) throw BudgetError("grid instance outside budget");
    const int side = static_cast<int>(x);
    GridGraph g = GridGraph::sized(side, side);
    for (auto& r : g.h)
      for (double& w : r) w = scale_weight(gen);
    for (auto& r : g.v)
      for (double& w : r) w = scale_weight(gen);
    circuit = prepare_grid(g);
    problem = width = side * side;
    row.x = static_cast<long long>(side) * side;
  } else if (family == "hwp") {
    if (x < 4 || x > budget) throw BudgetError("hwp instance outside budget");
    const HwpSpec spec = scaling_table(static_cast<int>(x), inst.k, gen);
    auto [c, layout] = prepare_full(spec);
    circuit = std::move(c);
    problem = static_cast<int>(x);
    width = layout.num_qubits;
  } else {
    throw Error("unknown scaling family '" + family + "'");
  }
  row.depth = circuit.depth();
  row.size = circuit.raw_gate_count();
  row.ancillas = width - problem;
  row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return row;
}

}  // namespace detail

// Synthesize one instance per grid point (hwp: per (n, k) with k in {2, 4},
// k <= n/2) and fit depth against log2(x). Instances run in parallel; rows
// are assembled in grid order, and every instance derives its generator from
// (seed, index), so the report content is deterministic for a given seed.
inline ScalingReport scaling_run(const std::string& family,
                                 const std::vector<long long>& points,
                                 std::uint64_t seed = 0,
                                 long long budget = 4'000'000) {
  std::vector<detail::ScalingInstance> instances;
  for (long long x : points) {
    if (family == "hwp") {
      for (int k : {2, 4})
        if (2 * k <= x) instances.push_back({x, k});
    } else {
      instances.push_back({x, 0});
    }
  }
  std::vector<std::future<ScalingRow>> pending;
  pending.reserve(instances.size());
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const std::uint64_t instance_seed =
        seed ^ (0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(i) + 1));
    pending.push_back(std::async(std::launch::async, detail::scaling_instance, family,
                                 instances[i], instance_seed, budget));
  }
  ScalingReport report;
  report.family = family;
  for (auto& f : pending) report.rows.push_back(f.get());
  std::vector<std::pair<long long, int>> points_fit;
  for (const ScalingRow& r : report.rows) points_fit.emplace_back(r.x, r.depth);
  report.fit = fit_log2(points_fit);
  return report;
}

}  // namespace hwprep
