#pragma once

// Decomposition of composite gates into the elementary set {single-qubit
// gates, CNOT}, plus the generic controlled-circuit construction.
//
// Templates used (all exact as unitaries, no global-phase slack):
//  * one- and two-controlled Ry: the alternating CNOT / quarter-angle Ry
//    pattern (8 gates).  With a single control both CNOT slots reuse it.
//  * Toffoli: the standard 15-gate network of 2 H, 6 CNOT and 7 pi/4
//    phase rotations.
//  * multi-controlled X: split-in-half ladders of Toffolis driven through
//    one borrowed scratch qubit; the borrowed qubit may hold an arbitrary
//    value and is always restored.
//  * RBS: conjugating CNOTs on the two targets around a controlled Ry of
//    twice the mixing angle.  The leading CNOT is required for the map to
//    be correct on the full four-dimensional space, which makes the count
//    10 rather than 9.
//  * Hamming-weight control: a balanced binary adder tree accumulates the
//    weight of the counted qubits into fresh scratch, an X-conjugated
//    multi-controlled X compares against the constant, and the tree is
//    uncomputed.  Scratch enters and leaves in |0>.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <utility>
#include <vector>

#include "hwprep/circuit.hpp"
#include "hwprep/errors.hpp"

namespace hwprep {

// Gate counts fixed by the chosen templates, asserted in the test suite.
inline constexpr int kLoweredControlledRySize = 8;
inline constexpr int kLoweredToffoliSize = 15;
inline constexpr int kLoweredRbsSize = 10;

namespace detail {

// Hands out scratch qubit indices above a fixed base.  Released indices are
// reused, so consecutive lowered gates share their scratch space; every
// template here returns its scratch to the state it found it in (clean
// scratch to |0>), which keeps reuse sound.
class ScratchPool {
 public:
  explicit ScratchPool(int first_free) : next_(first_free) {}

  int acquire() {
    if (!free_.empty()) {
      const int q = free_.back();
      free_.pop_back();
      return q;
    }
    return next_++;
  }

  std::vector<int> acquire(int count) {
    std::vector<int> qs(static_cast<std::size_t>(count));
    for (int& q : qs) q = acquire();
    return qs;
  }

  void release(int q) { free_.push_back(q); }

  void release(const std::vector<int>& qs) {
    for (auto it = qs.rbegin(); it != qs.rend(); ++it) release(*it);
  }

  // One past the largest index ever handed out.
  int high_water() const { return next_; }

 private:
  int next_;
  std::vector<int> free_;
};

inline void emit(std::vector<Gate>& out, Gate g, const std::string& stage) {
  g.stage = stage;
  out.push_back(std::move(g));
}

// Ry(angle) on the target under one or two controls: the alternating
// pattern CNOT, Ry(-angle/4), CNOT, Ry(angle/4) repeated twice, with the
// CNOT controls alternating between the two control qubits (or reusing the
// single control twice).  Exact for every classical control assignment.
inline void lower_controlled_ry(const Gate& g, std::vector<Gate>& out) {
  check(!g.controls.empty() && g.controls.size() <= 2,
        "controlled-Ry lowering expects one or two controls");
  const int t = g.targets[0];
  const int first = g.controls.size() == 2 ? g.controls[1] : g.controls[0];
  const int second = g.controls[0];
  const double quarter = g.angle / 4.0;
  for (int rep = 0; rep < 2; ++rep) {
    emit(out, Gate::cnot(first, t), g.stage);
    emit(out, Gate::ry(t, -quarter), g.stage);
    emit(out, Gate::cnot(second, t), g.stage);
    emit(out, Gate::ry(t, quarter), g.stage);
  }
}

// RBS(theta) = CNOT(t2 -> t1) . C[t1]Ry(2 theta on t2) . CNOT(t2 -> t1).
// An extra control rides on the inner rotation only; the conjugating CNOTs
// cancel by themselves when it is off.
inline void lower_rbs(const Gate& g, std::vector<Gate>& out) {
  check(g.controls.size() <= 1,
        "RBS lowering supports at most one control");
  const int t1 = g.targets[0], t2 = g.targets[1];
  emit(out, Gate::cnot(t2, t1), g.stage);
  Gate inner = g.controls.empty()
                   ? Gate::cry(t1, t2, 2.0 * g.angle)
                   : Gate::ccry(g.controls[0], t1, t2, 2.0 * g.angle);
  inner.stage = g.stage;
  lower_controlled_ry(inner, out);
  emit(out, Gate::cnot(t2, t1), g.stage);
}

// The 15-gate Toffoli network (exact, including phases).
inline void lower_toffoli(const Gate& g, std::vector<Gate>& out) {
  const int c1 = g.controls[0], c2 = g.controls[1], t = g.targets[0];
  const double eighth = std::numbers::pi / 4.0;
  emit(out, Gate::h(t), g.stage);
  emit(out, Gate::cnot(c2, t), g.stage);
  emit(out, Gate::phase(t, -eighth), g.stage);
  emit(out, Gate::cnot(c1, t), g.stage);
  emit(out, Gate::phase(t, eighth), g.stage);
  emit(out, Gate::cnot(c2, t), g.stage);
  emit(out, Gate::phase(t, -eighth), g.stage);
  emit(out, Gate::cnot(c1, t), g.stage);
  emit(out, Gate::phase(t, eighth), g.stage);
  emit(out, Gate::phase(c2, eighth), g.stage);
  emit(out, Gate::h(t), g.stage);
  emit(out, Gate::cnot(c1, c2), g.stage);
  emit(out, Gate::phase(c2, -eighth), g.stage);
  emit(out, Gate::cnot(c1, c2), g.stage);
  emit(out, Gate::phase(c1, eighth), g.stage);
}

// Controlled H: a CZ (H-conjugated CNOT) followed by a controlled
// Ry(pi/2), using H = Ry(pi/2) Z.
inline void lower_controlled_h(const Gate& g, std::vector<Gate>& out,
                               const std::string& stage) {
  check(g.controls.size() == 1, "controlled-H lowering expects one control");
  const int c = g.controls[0], t = g.targets[0];
  emit(out, Gate::h(t), stage);
  emit(out, Gate::cnot(c, t), stage);
  emit(out, Gate::h(t), stage);
  Gate rot = Gate::cry(c, t, std::numbers::pi / 2.0);
  rot.stage = stage;
  lower_controlled_ry(rot, out);
}

// Controlled phase: phase halves on both qubits with a CNOT-conjugated
// correction; total phase angle*a*b on |a b>.
inline void lower_controlled_phase(const Gate& g, std::vector<Gate>& out) {
  check(g.controls.size() == 1,
        "controlled-phase lowering expects one control");
  const int c = g.controls[0], t = g.targets[0];
  const double half = g.angle / 2.0;
  emit(out, Gate::phase(c, half), g.stage);
  emit(out, Gate::phase(t, half), g.stage);
  emit(out, Gate::cnot(c, t), g.stage);
  emit(out, Gate::phase(t, -half), g.stage);
  emit(out, Gate::cnot(c, t), g.stage);
}

// X on `target` under all of `xs`, written as Toffolis that borrow the
// work qubits `ws` (values arbitrary, restored).  Requires |ws| >= |xs|-2.
// The first block drives the target, leaving the borrowed qubits dirty;
// the second block repeats the interior to scrub them.
inline void append_toffoli_ladder(std::vector<Gate>& out,
                                  const std::vector<int>& xs, int target,
                                  const std::vector<int>& ws,
                                  const std::string& stage) {
  const int m = static_cast<int>(xs.size());
  if (m == 1) {
    emit(out, Gate::cnot(xs[0], target), stage);
    return;
  }
  if (m == 2) {
    emit(out, Gate::toffoli(xs[0], xs[1], target), stage);
    return;
  }
  check(static_cast<int>(ws.size()) >= m - 2,
        "Toffoli ladder needs |controls| - 2 borrowed qubits");
  // w[j] plays carry j for j = 2..m-1; stored at ws[j-2].
  const auto w = [&](int j) { return ws[static_cast<std::size_t>(j - 2)]; };
  const auto interior = [&] {
    for (int j = m - 1; j >= 3; --j)
      emit(out, Gate::toffoli(xs[j - 1], w(j - 1), w(j)), stage);
    emit(out, Gate::toffoli(xs[0], xs[1], w(2)), stage);
    for (int j = 3; j <= m - 1; ++j)
      emit(out, Gate::toffoli(xs[j - 1], w(j - 1), w(j)), stage);
  };
  emit(out, Gate::toffoli(xs[m - 1], w(m - 1), target), stage);
  interior();
  emit(out, Gate::toffoli(xs[m - 1], w(m - 1), target), stage);
  interior();
}

// X on `target` under k >= 3 controls using one borrowed qubit: the
// controls split into halves S1, S2 and the conjugation
// B1 B2 B1 B2 with B1 = MCX(S1 -> borrowed), B2 = MCX(S2 + borrowed ->
// target) leaves target ^= AND(controls) with the borrowed qubit restored.
// Each half is a Toffoli ladder borrowing the other half's qubits.
inline std::vector<Gate> mcx_toffoli_expansion(const std::vector<int>& controls,
                                               int target, int borrowed,
                                               const std::string& stage) {
  std::vector<Gate> out;
  const int k = static_cast<int>(controls.size());
  check(k >= 3, "multi-controlled X expansion expects at least 3 controls");
  const int half = (k + 1) / 2;
  const std::vector<int> s1(controls.begin(), controls.begin() + half);
  const std::vector<int> s2(controls.begin() + half, controls.end());
  std::vector<int> work1 = s2;  // idle while B1 runs
  work1.push_back(target);
  const std::vector<int>& work2 = s1;  // idle while B2 runs
  std::vector<int> s2a = s2;
  s2a.push_back(borrowed);
  for (int rep = 0; rep < 2; ++rep) {
    append_toffoli_ladder(out, s1, borrowed, work1, stage);
    append_toffoli_ladder(out, s2a, target, work2, stage);
  }
  return out;
}

// Classical expansion of a Hamming-weight-controlled X: adder tree into
// fresh scratch, comparison against the constant weight, uncomputation.
// Emits only X/CNOT/Toffoli/multi-controlled X gates; scratch indices are
// taken from (and returned to) the pool.
inline std::vector<Gate> hwc_classical_expansion(const Gate& g,
                                                 ScratchPool& pool) {
  std::vector<Gate> out;
  std::vector<int> scratch_used;
  std::vector<Gate> tree;

  // Numbers are little-endian qubit lists; leaves are the counted qubits.
  std::vector<std::vector<int>> numbers;
  numbers.reserve(g.counted.size());
  for (int q : g.counted) numbers.push_back({q});

  const auto add_numbers = [&](const std::vector<int>& a,
                               const std::vector<int>& b) {
    const int len = static_cast<int>(std::max(a.size(), b.size()));
    std::vector<int> r = pool.acquire(len + 1);
    scratch_used.insert(scratch_used.end(), r.begin(), r.end());
    for (int i = 0; i < len; ++i) {
      const bool ha = i < static_cast<int>(a.size());
      const bool hb = i < static_cast<int>(b.size());
      // r[i] still holds the pure carry into position i, so the carry-out
      // majority must be formed before the sum bits fold in.
      if (ha && hb) tree.push_back(Gate::toffoli(a[i], b[i], r[i + 1]));
      if (ha) tree.push_back(Gate::toffoli(a[i], r[i], r[i + 1]));
      if (hb) tree.push_back(Gate::toffoli(b[i], r[i], r[i + 1]));
      if (ha) tree.push_back(Gate::cnot(a[i], r[i]));
      if (hb) tree.push_back(Gate::cnot(b[i], r[i]));
    }
    return r;
  };

  while (numbers.size() > 1) {
    std::vector<std::vector<int>> next;
    for (std::size_t i = 0; i + 1 < numbers.size(); i += 2)
      next.push_back(add_numbers(numbers[i], numbers[i + 1]));
    if (numbers.size() % 2 == 1) next.push_back(numbers.back());
    numbers = std::move(next);
  }
  const std::vector<int>& sum_bits = numbers.front();

  for (const Gate& tg : tree) emit(out, tg, g.stage);

  // Flip the bits where the constant has a zero, so equality becomes
  // all-ones; out-of-range weights simply never fire.
  std::vector<int> flipped;
  for (std::size_t i = 0; i < sum_bits.size(); ++i)
    if (((g.weight >> i) & 1) == 0) flipped.push_back(sum_bits[i]);
  for (int q : flipped) emit(out, Gate::x(q), g.stage);

  std::vector<int> compare = sum_bits;
  compare.insert(compare.end(), g.controls.begin(), g.controls.end());
  emit(out, Gate::mcx(compare, g.targets[0]), g.stage);

  for (int q : flipped) emit(out, Gate::x(q), g.stage);
  for (auto it = tree.rbegin(); it != tree.rend(); ++it) emit(out, *it, g.stage);

  pool.release(scratch_used);
  return out;
}

inline void lower_gate(const Gate& g, std::vector<Gate>& out,
                       ScratchPool& pool) {
  if (g.is_elementary()) {
    out.push_back(g);
    return;
  }
  switch (g.kind) {
    case GateKind::X: {
      if (g.controls.size() == 2) {
        lower_toffoli(g, out);
        return;
      }
      // k >= 3: borrow one scratch qubit (it may be dirty; the expansion
      // restores it) and expand to Toffolis, then lower those.
      const int borrowed = pool.acquire();
      for (const Gate& tg :
           mcx_toffoli_expansion(g.controls, g.targets[0], borrowed, g.stage))
        lower_gate(tg, out, pool);
      pool.release(borrowed);
      return;
    }
    case GateKind::Ry:
      check(g.controls.size() <= 2,
            "Ry lowering supports at most two controls");
      lower_controlled_ry(g, out);
      return;
    case GateKind::H:
      lower_controlled_h(g, out, g.stage);
      return;
    case GateKind::Phase:
      lower_controlled_phase(g, out);
      return;
    case GateKind::Rbs:
      lower_rbs(g, out);
      return;
    case GateKind::Hwc:
      for (const Gate& cg : hwc_classical_expansion(g, pool))
        lower_gate(cg, out, pool);
      return;
  }
  throw Error("unhandled gate kind in lowering");
}

}  // namespace detail

// Rewrites the circuit over {single-qubit gates, CNOT}.  The result acts
// as the original on the first c.num_qubits() qubits; any additional
// qubits are scratch that starts and ends in |0> (borrowed qubits inside
// a single gate's expansion are restored regardless of their value).
// Stage tags survive onto the expanded gates.
inline Circuit lower(const Circuit& c) {
  detail::ScratchPool pool(c.num_qubits());
  std::vector<Gate> out;
  for (const Gate& g : c.gates()) detail::lower_gate(g, out, pool);
  Circuit result(std::max(c.num_qubits(), pool.high_water()));
  for (Gate& g : out) result.append(std::move(g));
  return result;
}

// The circuit c under one extra control qubit.  Layers of width w > 1 are
// handled by fanning the control out into w - 1 fresh scratch copies with
// a doubling tree, giving every gate of a layer its own copy, and undoing
// the fanout afterwards; the copies add O(log w) depth at each end.  The
// control qubit must not appear in c.
inline Circuit controlled(const Circuit& c, int control) {
  for (const Gate& g : c.gates())
    for (int q : g.qubits())
      detail::check(q != control,
                    "control qubit already used by the circuit");

  const std::vector<int> layer_of = c.layers();
  int width = 0;
  {
    std::vector<int> counts(static_cast<std::size_t>(c.depth()) + 1, 0);
    for (int l : layer_of) width = std::max(width, ++counts[l]);
  }

  const int base = std::max(c.num_qubits(), control + 1);
  Circuit out(base + std::max(0, width - 1));

  std::vector<int> copies{control};
  for (int i = 1; i < width; ++i) copies.push_back(base + i - 1);

  std::vector<Gate> fanout;
  for (int have = 1; have < width; have *= 2)
    for (int i = 0; i < have && have + i < width; ++i)
      fanout.push_back(Gate::cnot(copies[i], copies[have + i]));

  for (const Gate& g : fanout) out.append(g);
  // Emit layer by layer so each copy's users appear in layer order; gates
  // moved past each other live in different layers and are therefore
  // disjoint, so the reordering leaves the unitary unchanged.
  std::vector<std::size_t> order(c.gates().size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return layer_of[a] < layer_of[b];
  });
  std::vector<int> next_slot(static_cast<std::size_t>(c.depth()) + 1, 0);
  for (std::size_t i : order) {
    Gate g = c.gates()[i];
    g.controls.push_back(copies[next_slot[layer_of[i]]++]);
    out.append(std::move(g));
  }
  for (auto it = fanout.rbegin(); it != fanout.rend(); ++it) out.append(*it);
  return out;
}

}  // namespace hwprep
