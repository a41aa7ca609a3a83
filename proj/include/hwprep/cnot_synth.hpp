#pragma once

// Depth-optimized synthesis of the CNOT building blocks: chain-like prefix
// circuits, fan-in/fan-out trees, bipartite CNOT scheduling with dirty
// ancillas, and general unipotent linear maps with dirty ancillas.
//
// Every function here emits CNOT-only circuits, so their action is a GF(2)
// linear map; circuit_to_matrix recovers that map exactly.

#include <algorithm>
#include <cstddef>
#include <map>
#include <utility>
#include <vector>

#include "hwprep/circuit.hpp"
#include "hwprep/errors.hpp"
#include "hwprep/gf2.hpp"

namespace hwprep {

// GF(2) matrix of a CNOT-only circuit: CNOT(c -> t) is I + E_{t,c}, and the
// circuit matrix is the product of its gates, last gate leftmost.
inline gf2::Gf2Matrix circuit_to_matrix(const Circuit& c) {
  gf2::Gf2Matrix m = gf2::Gf2Matrix::identity(c.num_qubits());
  for (const Gate& g : c.gates()) {
    if (!g.is_cnot())
      throw NonLinearGateError("circuit_to_matrix requires a CNOT-only circuit");
    m.row_xor(g.targets[0], g.controls[0]);
  }
  return m;
}

// Chain-like circuit: qubit i ends as x_0 xor ... xor x_i, i.e. the all-ones
// lower-triangular map, realized as an in-place parallel-prefix network
// (up-sweep plus down-sweep, fan-out bounded by two so layers stay parallel).
inline Circuit chain(int n) {
  detail::check(n >= 2, "chain needs at least two qubits");
  Circuit c(n);
  for (int s = 1; s < n; s *= 2)
    for (int i = 2 * s - 1; i < n; i += 2 * s) c.append(Gate::cnot(i - s, i));
  int top = 1;
  while (top < n) top *= 2;
  for (int s = top / 4; s >= 1; s /= 2)
    for (int i = 2 * s - 1; i + s < n; i += 2 * s) c.append(Gate::cnot(i, i + s));
  return c;
}

namespace detail {

inline void fan_in_rec(Circuit& c, int target, const std::vector<int>& controls) {
  if (controls.size() == 1) {
    c.append(Gate::cnot(controls[0], target));
    return;
  }
  // Fold adjacent pairs into the even positions, recurse on the survivors,
  // then mirror the fold so every control is restored.
  std::vector<Gate> layer;
  std::vector<int> survivors;
  for (std::size_t i = 0; i + 1 < controls.size(); i += 2) {
    layer.push_back(Gate::cnot(controls[i + 1], controls[i]));
    survivors.push_back(controls[i]);
  }
  if (controls.size() % 2 == 1) survivors.push_back(controls.back());
  for (const Gate& g : layer) c.append(g);
  fan_in_rec(c, target, survivors);
  for (const Gate& g : layer) c.append(g);
}

inline int qubit_span(std::initializer_list<const std::vector<int>*> lists, int base = 0) {
  int top = base;
  for (const std::vector<int>* l : lists)
    for (int q : *l) top = std::max(top, q + 1);
  return top;
}

}  // namespace detail

// target ^= xor of all controls; controls restored. Depth 2*ceil(log2 n) + 1
// via pairwise folding with a mirrored restore.
inline Circuit fan_in(int target, const std::vector<int>& controls) {
  detail::check(!controls.empty(), "fan_in needs at least one control");
  std::vector<int> sorted = controls;
  sorted.push_back(target);
  std::sort(sorted.begin(), sorted.end());
  detail::check(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(),
                "fan_in qubits must be pairwise distinct");
  Circuit c(detail::qubit_span({&controls}, target + 1));
  detail::fan_in_rec(c, target, controls);
  return c;
}

// every target ^= source; source unchanged. Realized by reversing the
// direction of every CNOT in the corresponding fan-in circuit, which
// transposes its GF(2) map into the rank-1 column update I + sum E_{j,0}.
inline Circuit fan_out(int source, const std::vector<int>& targets) {
  detail::check(!targets.empty(), "fan_out needs at least one target");
  Circuit in = fan_in(source, targets);
  Circuit out(in.num_qubits());
  for (const Gate& g : in.gates()) out.append(Gate::cnot(g.targets[0], g.controls[0]));
  return out;
}

namespace detail {

// target ^= XOR of sources with every source preserved. Plain CNOTs as long
// as the serial depth does not exceed the balanced fan-in depth 2ceil(lg k)+1;
// the restoring fan-in tree beyond that.
inline void append_accumulate(Circuit& out, int target_qubit,
                              std::vector<int> source_qubits) {
  std::sort(source_qubits.begin(), source_qubits.end());
  if (source_qubits.size() <= 7) {
    for (int q : source_qubits) out.append(Gate::cnot(q, target_qubit));
  } else {
    out.append(fan_in(target_qubit, source_qubits));
  }
}

}  // namespace detail

// A bipartite CNOT job: every gate is controlled in A and targeted in B, so
// all m gates commute and may be regrouped freely.
struct BipartiteCnotSpec {
  std::vector<int> control_set;     // A
  std::vector<int> target_set;      // B
  std::vector<std::pair<int, int>> edges;  // (control in A, target in B)
  std::vector<int> dirty_ancillas;  // l >= 1 helpers with unknown state
};

namespace detail {

inline void check_disjoint(const std::vector<int>& a, const std::vector<int>& b,
                           const char* msg) {
  for (int x : a)
    for (int y : b) check(x != y, msg);
}

}  // namespace detail

// Schedule the m commuting CNOTs in batches of l, routing each batch through
// the dirty helpers: per batch the sequence is (helpers into targets as
// fan-ins), (controls onto helpers as fan-outs), repeated twice, which
// reproduces every batch gate and restores every helper regardless of its
// initial value.
inline Circuit bipartite_schedule(const BipartiteCnotSpec& spec) {
  const int l = static_cast<int>(spec.dirty_ancillas.size());
  detail::check(l >= 1, "bipartite schedule needs at least one dirty ancilla");
  detail::check_disjoint(spec.control_set, spec.target_set,
                         "control and target sets must be disjoint");
  detail::check_disjoint(spec.control_set, spec.dirty_ancillas,
                         "controls and dirty ancillas must be disjoint");
  detail::check_disjoint(spec.target_set, spec.dirty_ancillas,
                         "targets and dirty ancillas must be disjoint");
  const auto in_set = [](const std::vector<int>& s, int q) {
    return std::find(s.begin(), s.end(), q) != s.end();
  };
  std::vector<std::pair<int, int>> seen;
  for (const auto& [a, b] : spec.edges) {
    detail::check(in_set(spec.control_set, a), "edge control not in control set");
    detail::check(in_set(spec.target_set, b), "edge target not in target set");
    detail::check(std::find(seen.begin(), seen.end(), std::make_pair(a, b)) == seen.end(),
                  "duplicate edge");
    seen.emplace_back(a, b);
  }

  Circuit c(detail::qubit_span({&spec.control_set, &spec.target_set, &spec.dirty_ancillas}));
  const int m = static_cast<int>(spec.edges.size());
  for (int start = 0; start < m; start += l) {
    const int count = std::min(l, m - start);
    // helper i carries batch edge i.
    std::map<int, std::vector<int>> by_target, by_control;
    for (int i = 0; i < count; ++i) {
      const auto& [a, b] = spec.edges[start + i];
      by_target[b].push_back(spec.dirty_ancillas[i]);
      by_control[a].push_back(spec.dirty_ancillas[i]);
    }
    const auto emit_to_targets = [&] {
      for (const auto& [b, helpers] : by_target) c.append(fan_in(b, helpers));
    };
    const auto emit_to_helpers = [&] {
      for (const auto& [a, helpers] : by_control) c.append(fan_out(a, helpers));
    };
    emit_to_targets();
    emit_to_helpers();
    emit_to_targets();
    emit_to_helpers();
  }
  return c;
}

namespace detail {

// Incremental GF(2) row space for independence tests.
class Gf2Echelon {
 public:
  explicit Gf2Echelon(int dim) : dim_(dim) {}

  // Insert v if independent of the current span; report whether it was.
  bool try_insert(gf2::Gf2Vector v) {
    for (std::size_t i = 0; i < rows_.size(); ++i)
      if (v.get(pivots_[i])) v ^= rows_[i];
    if (!v.any()) return false;
    int pivot = -1;
    for (int b = 0; b < dim_; ++b)
      if (v.get(b)) {
        pivot = b;
        break;
      }
    rows_.push_back(std::move(v));
    pivots_.push_back(pivot);
    return true;
  }

 private:
  int dim_;
  std::vector<gf2::Gf2Vector> rows_;
  std::vector<int> pivots_;
};

struct JordanDecomposition {
  gf2::Gf2Matrix p;      // M = P^{-1} J P
  gf2::Gf2Matrix p_inv;
  std::vector<int> blocks;  // Jordan block sizes, in register order
};

// Jordan chains of the nilpotent part N = M + I, built level by level: a new
// chain head at height j must be independent of ker N^{j-1} together with the
// height-j elements inherited from longer chains.
inline JordanDecomposition jordan_decompose(const gf2::Gf2Matrix& m) {
  const int n = m.rows();
  gf2::Gf2Matrix nil = gf2::add(m, gf2::Gf2Matrix::identity(n));

  std::vector<gf2::Gf2Matrix> power = {gf2::Gf2Matrix::identity(n)};
  while (!power.back().is_zero() && static_cast<int>(power.size()) <= n + 1)
    power.push_back(gf2::multiply(power.back(), nil));
  check(power.back().is_zero(), "matrix is not unipotent");
  const int index = static_cast<int>(power.size()) - 1;  // N^index = 0

  std::vector<std::vector<gf2::Gf2Vector>> kernel(index + 1);
  for (int j = 1; j <= index; ++j) kernel[j] = gf2::kernel_basis(power[j]);

  struct Chain {
    gf2::Gf2Vector head;
    int height;
  };
  std::vector<Chain> chains;
  for (int j = index; j >= 1; --j) {
    Gf2Echelon span(n);
    for (const auto& v : kernel[j - 1]) check(span.try_insert(v), "kernel basis degenerate");
    for (const Chain& c : chains)
      if (c.height > j)
        check(span.try_insert(gf2::multiply(power[c.height - j], c.head)),
              "chain elements dependent");
    for (const auto& v : kernel[j])
      if (span.try_insert(v)) chains.push_back({v, j});
  }

  JordanDecomposition d;
  gf2::Gf2Matrix q(n, n);
  int col = 0;
  for (const Chain& c : chains) {
    d.blocks.push_back(c.height);
    for (int t = 0; t < c.height; ++t) {
      const gf2::Gf2Vector v = gf2::multiply(power[t], c.head);
      for (int r = 0; r < n; ++r) q.set(r, col, v.get(r));
      ++col;
    }
  }
  check(col == n, "chain lengths do not fill the space");

  d.p_inv = q;
  d.p = gf2::invert(q);

  // Defensive: P M P^{-1} must be the block-bidiagonal Jordan form exactly.
  gf2::Gf2Matrix j = gf2::Gf2Matrix::identity(n);
  int off = 0;
  for (int s : d.blocks) {
    for (int i = 1; i < s; ++i) j.set(off + i, off + i - 1, true);
    off += s;
  }
  check(gf2::multiply(d.p, gf2::multiply(m, d.p_inv)) == j,
        "similarity transform does not reach Jordan form");
  return d;
}

// Append the CNOT product "targets[i] ^= sum_j T[i][j] * controls[j]".
// With helpers present the commuting product is routed through
// bipartite_schedule; otherwise it is emitted gate by gate.
inline void append_linear_update(Circuit& out, const gf2::Gf2Matrix& t,
                                 const std::vector<int>& controls,
                                 const std::vector<int>& targets,
                                 const std::vector<int>& helpers) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < t.rows(); ++i)
    for (int j = 0; j < t.cols(); ++j)
      if (t.get(i, j)) edges.emplace_back(controls[j], targets[i]);
  if (edges.empty()) return;
  if (helpers.empty()) {
    for (const auto& [a, b] : edges) out.append(Gate::cnot(a, b));
    return;
  }
  BipartiteCnotSpec spec;
  spec.control_set = controls;
  spec.target_set = targets;
  spec.edges = std::move(edges);
  spec.dirty_ancillas = helpers;
  out.append(bipartite_schedule(spec));
}

}  // namespace detail

// Realize an arbitrary unipotent GF(2) map M on working qubits 0..n-1 using
// dirty ancillas (at least n of them; extras speed up the inner bipartite
// stages). With y the first n dirty qubits and M = P^{-1} J P, the sequence
//   y += Px; x += P^{-1}y; y += Px; y := Jy; y += Px; x += P^{-1}y; y += Px
// maps (x, y) to (Mx, y); J itself splits into independent blocks, each the
// inverse of a chain-like circuit.
inline Circuit unipotent_cnot(const gf2::Gf2Matrix& m, const std::vector<int>& dirty) {
  const int n = m.rows();
  detail::check(n == m.cols() && n >= 1, "map must be square");
  if (!gf2::is_unipotent(m))
    throw NotUnipotentError("general CNOT synthesis requires a unipotent map");
  detail::check(static_cast<int>(dirty.size()) >= n,
                "need at least n dirty ancillas");
  for (int q : dirty) detail::check(q >= n, "dirty ancillas overlap working qubits");
  {
    std::vector<int> sorted = dirty;
    std::sort(sorted.begin(), sorted.end());
    detail::check(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(),
                  "dirty ancillas must be distinct");
  }

  Circuit out(detail::qubit_span({&dirty}, n));
  if (m.is_identity()) return out;

  detail::JordanDecomposition d = detail::jordan_decompose(m);

  std::vector<int> working(n), y(dirty.begin(), dirty.begin() + n);
  for (int i = 0; i < n; ++i) working[i] = i;
  const std::vector<int> helpers(dirty.begin() + n, dirty.end());

  const auto y_accumulate = [&] {
    detail::append_linear_update(out, d.p, working, y, helpers);
  };
  const auto x_accumulate = [&] {
    detail::append_linear_update(out, d.p_inv, y, working, helpers);
  };

  y_accumulate();
  x_accumulate();
  y_accumulate();
  {
    int off = 0;
    for (int s : d.blocks) {
      if (s >= 2) {
        std::vector<int> map(s);
        for (int i = 0; i < s; ++i) map[i] = y[off + i];
        out.append(chain(s).inverse().remapped(map, out.num_qubits()));
      }
      off += s;
    }
  }
  y_accumulate();
  x_accumulate();
  y_accumulate();
  return out;
}

}  // namespace hwprep
