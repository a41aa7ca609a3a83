#pragma once

// Gate-level intermediate representation. A Gate is one of six kinds plus an
// arbitrary list of plain AND-controls, which uniformly encodes CNOT (X with
// one control), Toffoli (two), MCX (three or more), controlled rotations, and
// the controlled Hamming-weight comparator. Circuits are ordered gate lists
// with ASAP depth accounting and structural equality.

#include <algorithm>
#include <string>
#include <vector>

#include "hwprep/errors.hpp"

namespace hwprep {

enum class GateKind {
  X,      // Pauli X on one target
  H,      // Hadamard on one target
  Ry,     // rotation about Y by `angle` on one target
  Phase,  // diag(1, e^{i*angle}) on one target (appears only in lowered output)
  Rbs,    // two-target rotation: |00>,|11> fixed, |10> -> cos a|10> + sin a|01>
  Hwc,    // flip target iff Hamming weight of `counted` equals `weight`
};

struct Gate {
  GateKind kind = GateKind::X;
  std::vector<int> controls;  // plain AND-controls, any count
  std::vector<int> targets;   // 1 target (2 for Rbs)
  std::vector<int> counted;   // Hwc only: qubits whose weight is compared
  int weight = 0;             // Hwc only: required Hamming weight
  double angle = 0.0;         // Ry / Phase / Rbs
  std::string stage;          // metadata tag naming the emitting stage

  static Gate x(int t) { return {GateKind::X, {}, {t}, {}, 0, 0.0, {}}; }
  static Gate cnot(int c, int t) { return {GateKind::X, {c}, {t}, {}, 0, 0.0, {}}; }
  static Gate toffoli(int c1, int c2, int t) {
    return {GateKind::X, {c1, c2}, {t}, {}, 0, 0.0, {}};
  }
  static Gate mcx(std::vector<int> cs, int t) {
    return {GateKind::X, std::move(cs), {t}, {}, 0, 0.0, {}};
  }
  static Gate h(int t) { return {GateKind::H, {}, {t}, {}, 0, 0.0, {}}; }
  static Gate ry(int t, double a) { return {GateKind::Ry, {}, {t}, {}, 0, a, {}}; }
  static Gate cry(int c, int t, double a) { return {GateKind::Ry, {c}, {t}, {}, 0, a, {}}; }
  static Gate ccry(int c1, int c2, int t, double a) {
    return {GateKind::Ry, {c1, c2}, {t}, {}, 0, a, {}};
  }
  static Gate phase(int t, double a) { return {GateKind::Phase, {}, {t}, {}, 0, a, {}}; }
  static Gate rbs(int t1, int t2, double a) {
    return {GateKind::Rbs, {}, {t1, t2}, {}, 0, a, {}};
  }
  static Gate crbs(int c, int t1, int t2, double a) {
    return {GateKind::Rbs, {c}, {t1, t2}, {}, 0, a, {}};
  }
  static Gate hwc(int w, std::vector<int> counted_qubits, std::vector<int> extra_controls,
                  int t) {
    return {GateKind::Hwc, std::move(extra_controls), {t}, std::move(counted_qubits), w,
            0.0, {}};
  }

  Gate with_stage(std::string s) const {
    Gate g = *this;
    g.stage = std::move(s);
    return g;
  }

  // Every qubit the gate touches (controls, targets, counted), in that order.
  std::vector<int> qubits() const {
    std::vector<int> q;
    q.reserve(controls.size() + targets.size() + counted.size());
    q.insert(q.end(), controls.begin(), controls.end());
    q.insert(q.end(), targets.begin(), targets.end());
    q.insert(q.end(), counted.begin(), counted.end());
    return q;
  }

  // X/H/Hwc are self-inverse; rotations negate their angle.
  Gate inverse() const {
    Gate g = *this;
    if (kind == GateKind::Ry || kind == GateKind::Phase || kind == GateKind::Rbs)
      g.angle = -g.angle;
    return g;
  }

  // A gate the elementary set accepts: a plain single-qubit gate or a CNOT.
  bool is_elementary() const {
    if (kind == GateKind::Hwc || kind == GateKind::Rbs) return false;
    if (kind == GateKind::X) return controls.size() <= 1;
    return controls.empty();
  }

  bool is_cnot() const { return kind == GateKind::X && controls.size() == 1; }

  // True when the gate permutes computational basis states.
  bool is_classical() const { return kind == GateKind::X || kind == GateKind::Hwc; }

  friend bool operator==(const Gate& a, const Gate& b) {
    return a.kind == b.kind && a.controls == b.controls && a.targets == b.targets &&
           a.counted == b.counted && a.weight == b.weight && a.angle == b.angle &&
           a.stage == b.stage;
  }
};

class Circuit {
 public:
  Circuit() = default;
  explicit Circuit(int num_qubits) : num_qubits_(num_qubits) {
    detail::check(num_qubits >= 0, "negative qubit count");
  }

  int num_qubits() const { return num_qubits_; }
  const std::vector<Gate>& gates() const { return gates_; }
  bool empty() const { return gates_.empty(); }

  void set_num_qubits(int n) {
    detail::check(n >= num_qubits_, "cannot shrink a circuit's qubit count");
    num_qubits_ = n;
  }

  void append(Gate g) {
    validate(g);
    gates_.push_back(std::move(g));
  }

  // Concatenate another circuit's gates (its qubit indexing must fit).
  void append(const Circuit& other) {
    detail::check(other.num_qubits_ <= num_qubits_,
                  "appended circuit uses more qubits than the host");
    gates_.insert(gates_.end(), other.gates_.begin(), other.gates_.end());
  }

  // Gate count; requires an already-lowered circuit so that the count means
  // elementary gates.
  int size() const {
    for (const Gate& g : gates_)
      if (!g.is_elementary())
        throw NotLoweredError("size is defined on lowered circuits only");
    return static_cast<int>(gates_.size());
  }

  int raw_gate_count() const { return static_cast<int>(gates_.size()); }

  bool is_lowered() const {
    return std::all_of(gates_.begin(), gates_.end(),
                       [](const Gate& g) { return g.is_elementary(); });
  }

  // ASAP layering: two gates conflict iff they share a qubit; list order
  // matters only through those conflicts.
  int depth() const {
    std::vector<int> last(num_qubits_, 0);
    int depth = 0;
    for (const Gate& g : gates_) {
      int layer = 0;
      for (int q : g.qubits()) layer = std::max(layer, last[q]);
      ++layer;
      for (int q : g.qubits()) last[q] = layer;
      depth = std::max(depth, layer);
    }
    return depth;
  }

  // Per-gate ASAP layer assignment (1-based), same rule as depth().
  std::vector<int> layers() const {
    std::vector<int> last(num_qubits_, 0);
    std::vector<int> out;
    out.reserve(gates_.size());
    for (const Gate& g : gates_) {
      int layer = 0;
      for (int q : g.qubits()) layer = std::max(layer, last[q]);
      ++layer;
      for (int q : g.qubits()) last[q] = layer;
      out.push_back(layer);
    }
    return out;
  }

  Circuit inverse() const {
    Circuit inv(num_qubits_);
    inv.gates_.reserve(gates_.size());
    for (auto it = gates_.rbegin(); it != gates_.rend(); ++it)
      inv.gates_.push_back(it->inverse());
    return inv;
  }

  // Rebuild the circuit with qubit i renamed to map[i].
  Circuit remapped(const std::vector<int>& map, int new_num_qubits) const {
    detail::check(static_cast<int>(map.size()) >= num_qubits_,
                  "remap table smaller than qubit count");
    Circuit out(new_num_qubits);
    for (const Gate& g : gates_) {
      Gate m = g;
      for (int& q : m.controls) q = map[q];
      for (int& q : m.targets) q = map[q];
      for (int& q : m.counted) q = map[q];
      out.append(std::move(m));
    }
    return out;
  }

  // Overwrite every gate's stage tag.
  Circuit staged(const std::string& stage) const {
    Circuit out(num_qubits_);
    out.gates_.reserve(gates_.size());
    for (Gate g : gates_) {
      g.stage = stage;
      out.gates_.push_back(std::move(g));
    }
    return out;
  }

  friend bool operator==(const Circuit& a, const Circuit& b) {
    return a.num_qubits_ == b.num_qubits_ && a.gates_ == b.gates_;
  }

 private:
  void validate(const Gate& g) const {
    const std::vector<int> qs = g.qubits();
    detail::check(!g.targets.empty(), "gate without a target");
    for (int q : qs)
      detail::check(q >= 0 && q < num_qubits_, "gate qubit index out of range");
    std::vector<int> sorted = qs;
    std::sort(sorted.begin(), sorted.end());
    detail::check(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(),
                  "gate qubit indices must be pairwise distinct");
    switch (g.kind) {
      case GateKind::Rbs:
        detail::check(g.targets.size() == 2, "two-target rotation needs 2 targets");
        break;
      case GateKind::Hwc:
        detail::check(g.targets.size() == 1 && !g.counted.empty(),
                      "weight comparator needs 1 target and a counted set");
        detail::check(g.weight >= 0 && g.weight <= static_cast<int>(g.counted.size()),
                      "required weight outside the counted range");
        break;
      default:
        detail::check(g.targets.size() == 1, "single-target gate needs exactly 1 target");
        detail::check(g.counted.empty(), "counted set only valid on weight comparators");
        break;
    }
  }

  int num_qubits_ = 0;
  std::vector<Gate> gates_;
};

// Named qubit-index ranges describing how a synthesized circuit's qubits are
// organized (working register, ancilla blocks, scratch pools).
struct RegisterRange {
  std::string name;
  int start = 0;
  int size = 0;

  friend bool operator==(const RegisterRange&, const RegisterRange&) = default;
};

struct RegisterLayout {
  int num_qubits = 0;
  std::vector<RegisterRange> ranges;

  void add(std::string name, int start, int size) {
    detail::check(start >= 0 && size >= 0, "register range malformed");
    ranges.push_back({std::move(name), start, size});
    num_qubits = std::max(num_qubits, start + size);
  }

  const RegisterRange* find(const std::string& name) const {
    for (const RegisterRange& r : ranges)
      if (r.name == name) return &r;
    return nullptr;
  }

  std::vector<int> qubits_of(const std::string& name) const {
    const RegisterRange* r = find(name);
    detail::check(r != nullptr, "unknown register name");
    std::vector<int> q(r->size);
    for (int i = 0; i < r->size; ++i) q[i] = r->start + i;
    return q;
  }
};

}  // namespace hwprep
