#pragma once

// Unary amplitude encoding: an X gate followed by a balanced binary tree of
// RBS gates prepares sum_i alpha_i |e_i> on l qubits in log depth.  The
// rotation angles come from subtree weights, computed classically in linear
// time.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "hwprep/circuit.hpp"
#include "hwprep/errors.hpp"
#include "hwprep/inputs.hpp"

namespace hwprep {

// Angles of the splitting tree in level order (root first, then each level
// left to right), one per internal node, plus the arithmetic-operation
// count.  `operations` counts the two per-node steps - combining the child
// subtree weights and evaluating the angle - so it equals 2(l - 1); the
// constant per-node square/sqrt work scales the same way.
struct AngleComputation {
  std::vector<double> angles;
  std::int64_t operations = 0;
};

namespace detail {

struct UnaryNode {
  int lo = 0;   // head index of the segment
  int mid = 0;  // head index of the segment's second half
  double angle = 0.0;
};

// Walks the splitting tree (split point floor(len/2)), recording one node
// per split grouped by depth.  Returns the segment's squared weight.
// A single-leaf child contributes its signed amplitude to the angle, which
// is how negative amplitudes survive; multi-leaf children contribute their
// positive norm and leave signs to deeper splits.
inline double unary_tree(const std::vector<double>& a, int lo, int hi,
                         std::size_t depth,
                         std::vector<std::vector<UnaryNode>>& levels,
                         std::int64_t& operations) {
  if (hi - lo == 1) return a[static_cast<std::size_t>(lo)] * a[static_cast<std::size_t>(lo)];
  const int mid = lo + (hi - lo) / 2;
  if (levels.size() <= depth) levels.resize(depth + 1);
  const double left = unary_tree(a, lo, mid, depth + 1, levels, operations);
  const double right = unary_tree(a, mid, hi, depth + 1, levels, operations);
  const double left_amp = mid - lo == 1 ? a[static_cast<std::size_t>(lo)]
                                        : std::sqrt(std::max(0.0, left));
  const double right_amp = hi - mid == 1 ? a[static_cast<std::size_t>(mid)]
                                         : std::sqrt(std::max(0.0, right));
  const double angle = std::atan2(right_amp, left_amp);
  levels[depth].push_back({lo, mid, angle});
  operations += 2;  // one weight combine, one angle evaluation
  return left + right;
}

}  // namespace detail

// Splitting-tree angles for the normalized amplitude vector, level order.
inline AngleComputation compute_angles(const AmplitudeVector& amps) {
  const AmplitudeVector a = amps.normalized();
  AngleComputation out;
  std::vector<std::vector<detail::UnaryNode>> levels;
  detail::unary_tree(a.values, 0, a.size(), 0, levels, out.operations);
  for (const auto& level : levels)
    for (const detail::UnaryNode& node : level) out.angles.push_back(node.angle);
  return out;
}

// Circuit preparing sum_i alpha_i |e_i> on the given qubits from |0...0>:
// X on the first qubit, then the RBS tree in level order.  RBS gates whose
// angle is exactly zero are elided.
inline Circuit unary_encode(const AmplitudeVector& amps,
                            const std::vector<int>& qubits) {
  detail::check(!qubits.empty(), "unary encoding needs at least one qubit");
  detail::check(static_cast<int>(qubits.size()) == amps.size(),
                "amplitude count must match the qubit count");
  const AmplitudeVector a = amps.normalized();

  int max_q = 0;
  for (int q : qubits) {
    detail::check(q >= 0, "negative qubit index");
    max_q = std::max(max_q, q);
  }
  std::vector<int> sorted = qubits;
  std::sort(sorted.begin(), sorted.end());
  detail::check(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(),
                "unary encoding qubits must be pairwise distinct");
  Circuit c(max_q + 1);

  c.append(Gate::x(qubits[0]));
  std::vector<std::vector<detail::UnaryNode>> levels;
  std::int64_t ignored = 0;
  detail::unary_tree(a.values, 0, a.size(), 0, levels, ignored);
  for (const auto& level : levels)
    for (const detail::UnaryNode& node : level)
      if (node.angle != 0.0)
        c.append(Gate::rbs(qubits[static_cast<std::size_t>(node.lo)],
                           qubits[static_cast<std::size_t>(node.mid)],
                           node.angle));
  return c;
}

}  // namespace hwprep
