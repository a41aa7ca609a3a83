#pragma once

// Sparse statevector simulator: a hash map from packed basis bitstrings to
// real amplitudes. Handles hundreds of qubits as long as the support stays
// small; classical gates permute keys, rotations split a term into at most
// two. Complex gates (Phase) are out of contract — use the dense oracle.

#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hwprep/circuit.hpp"
#include "hwprep/errors.hpp"
#include "hwprep/inputs.hpp"

namespace hwprep {

// Packed basis bitstring; qubit q lives in word q/64, bit q%64. Qubit 0 is
// the leftmost bit of ket notation: |q0 q1 q2 ...>.
struct BasisKey {
  std::vector<std::uint64_t> words;

  explicit BasisKey(int num_qubits = 0) : words((num_qubits + 63) / 64, 0) {}

  bool get(int q) const { return (words[q >> 6] >> (q & 63)) & 1u; }

  void set(int q, bool v) {
    const std::uint64_t m = std::uint64_t{1} << (q & 63);
    if (v)
      words[q >> 6] |= m;
    else
      words[q >> 6] &= ~m;
  }

  void flip(int q) { words[q >> 6] ^= std::uint64_t{1} << (q & 63); }

  int popcount() const {
    int c = 0;
    for (std::uint64_t w : words) c += __builtin_popcountll(w);
    return c;
  }

  std::string to_string(int num_qubits) const {
    std::string s(num_qubits, '0');
    for (int q = 0; q < num_qubits; ++q)
      if (get(q)) s[q] = '1';
    return s;
  }

  friend bool operator==(const BasisKey& a, const BasisKey& b) { return a.words == b.words; }
};

struct BasisKeyHash {
  std::size_t operator()(const BasisKey& k) const {
    std::uint64_t h = 0x9e3779b97f4a7c15ull;
    for (std::uint64_t w : k.words) {
      w ^= w >> 33;
      w *= 0xff51afd7ed558ccdull;
      w ^= w >> 29;
      h = h * 0x100000001b3ull ^ w;
    }
    return static_cast<std::size_t>(h);
  }
};

class SparseState {
 public:
  using TermMap = std::unordered_map<BasisKey, double, BasisKeyHash>;

  static constexpr double kPruneThreshold = 1e-14;
  static constexpr double kNormDriftTolerance = 1e-9;

  explicit SparseState(int num_qubits = 0) : num_qubits_(num_qubits) {
    terms_.emplace(BasisKey(num_qubits), 1.0);
  }

  static SparseState basis_state(int num_qubits, const BasisKey& key) {
    SparseState s(num_qubits);
    s.terms_.clear();
    s.terms_.emplace(key, 1.0);
    return s;
  }

  static SparseState basis_state(int num_qubits, const std::vector<int>& ones) {
    BasisKey k(num_qubits);
    for (int q : ones) k.set(q, true);
    return basis_state(num_qubits, k);
  }

  static SparseState from_terms(int num_qubits, TermMap terms) {
    detail::check(!terms.empty(), "state needs at least one term");
    SparseState s(num_qubits);
    s.terms_ = std::move(terms);
    return s;
  }

  int num_qubits() const { return num_qubits_; }
  const TermMap& terms() const { return terms_; }
  int support_size() const { return static_cast<int>(terms_.size()); }

  double amplitude(const BasisKey& key) const {
    auto it = terms_.find(key);
    return it == terms_.end() ? 0.0 : it->second;
  }

  double amplitude_of(const std::vector<int>& ones) const {
    BasisKey k(num_qubits_);
    for (int q : ones) k.set(q, true);
    return amplitude(k);
  }

  double norm_square() const {
    double s = 0.0;
    for (const auto& [k, a] : terms_) s += a * a;
    return s;
  }

  void apply(const Gate& g) {
    for (int q : g.qubits())
      detail::check(q < num_qubits_, "gate qubit beyond the state's qubit count");
    switch (g.kind) {
      case GateKind::X:
      case GateKind::Hwc:
        apply_classical(g);
        return;
      case GateKind::Ry:
        apply_single_rotation(g, std::cos(g.angle / 2), std::sin(g.angle / 2),
                              /*hadamard=*/false);
        break;
      case GateKind::H:
        apply_single_rotation(g, 0.0, 0.0, /*hadamard=*/true);
        break;
      case GateKind::Rbs:
        apply_rbs(g);
        break;
      case GateKind::Phase:
        throw Error("sparse simulator is real-valued; phase gates need the dense oracle");
    }
    prune_and_renormalize();
  }

  void apply(const Circuit& c) {
    detail::check(c.num_qubits() <= num_qubits_,
                  "circuit uses more qubits than the state");
    for (const Gate& g : c.gates()) apply(g);
  }

 private:
  static bool controls_active(const BasisKey& k, const std::vector<int>& controls) {
    for (int c : controls)
      if (!k.get(c)) return false;
    return true;
  }

  static bool fires(const BasisKey& k, const Gate& g) {
    if (!controls_active(k, g.controls)) return false;
    if (g.kind == GateKind::Hwc) {
      int hw = 0;
      for (int q : g.counted) hw += k.get(q);
      return hw == g.weight;
    }
    return true;
  }

  // X / Hwc: a permutation of basis states; support size is preserved.
  void apply_classical(const Gate& g) {
    TermMap next;
    next.reserve(terms_.size());
    for (auto& [key, amp] : terms_) {
      BasisKey k = key;
      if (fires(k, g)) k.flip(g.targets[0]);
      next.emplace(std::move(k), amp);
    }
    terms_ = std::move(next);
  }

  // Ry (c = cos(a/2), s = sin(a/2)) or Hadamard on one target, with controls.
  void apply_single_rotation(const Gate& g, double c, double s, bool hadamard) {
    static const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    TermMap next;
    next.reserve(terms_.size() * 2);
    const int t = g.targets[0];
    for (const auto& [key, amp] : terms_) {
      if (!controls_active(key, g.controls)) {
        next[key] += amp;
        continue;
      }
      BasisKey other = key;
      other.flip(t);
      if (hadamard) {
        // |0> -> (|0>+|1>)/sqrt2, |1> -> (|0>-|1>)/sqrt2
        next[key] += amp * (key.get(t) ? -inv_sqrt2 : inv_sqrt2);
        next[other] += amp * inv_sqrt2;
      } else if (!key.get(t)) {
        // |0> -> c|0> + s|1>
        next[key] += amp * c;
        next[other] += amp * s;
      } else {
        // |1> -> -s|0> + c|1>
        next[key] += amp * c;
        next[other] += amp * -s;
      }
    }
    terms_ = std::move(next);
  }

  void apply_rbs(const Gate& g) {
    const double c = std::cos(g.angle), s = std::sin(g.angle);
    const int t1 = g.targets[0], t2 = g.targets[1];
    TermMap next;
    next.reserve(terms_.size() * 2);
    for (const auto& [key, amp] : terms_) {
      const bool b1 = key.get(t1), b2 = key.get(t2);
      if (!controls_active(key, g.controls) || b1 == b2) {
        next[key] += amp;  // |00> and |11> are fixed
        continue;
      }
      BasisKey other = key;
      other.flip(t1);
      other.flip(t2);
      if (b1 && !b2) {
        // |10> -> cos|10> + sin|01>
        next[key] += amp * c;
        next[other] += amp * s;
      } else {
        // |01> -> cos|01> - sin|10>
        next[key] += amp * c;
        next[other] += amp * -s;
      }
    }
    terms_ = std::move(next);
  }

  void prune_and_renormalize() {
    double sq = 0.0;
    for (auto it = terms_.begin(); it != terms_.end();) {
      if (std::abs(it->second) < kPruneThreshold) {
        it = terms_.erase(it);
      } else {
        sq += it->second * it->second;
        ++it;
      }
    }
    detail::check(sq > 0.0, "state collapsed to zero norm");
    if (std::abs(sq - 1.0) > kNormDriftTolerance) {
      const double inv = 1.0 / std::sqrt(sq);
      for (auto& [k, a] : terms_) a *= inv;
    }
  }

  int num_qubits_ = 0;
  TermMap terms_;
};

// Absolute overlap |<a|b>| of two real sparse states.
inline double fidelity(const SparseState& a, const SparseState& b) {
  detail::check(a.num_qubits() == b.num_qubits(), "fidelity: qubit counts differ");
  const SparseState& small = a.support_size() <= b.support_size() ? a : b;
  const SparseState& large = a.support_size() <= b.support_size() ? b : a;
  double dot = 0.0;
  for (const auto& [k, amp] : small.terms()) dot += amp * large.amplitude(k);
  return std::abs(dot);
}

// Probability mass on terms whose bits outside the leading `working` qubits
// are not all zero.
inline double ancilla_residue(const SparseState& state, int working) {
  detail::check(working >= 0 && working <= state.num_qubits(),
                "working prefix outside the state");
  double mass = 0.0;
  for (const auto& [key, amp] : state.terms()) {
    bool stray = false;
    for (int q = working; q < state.num_qubits() && !stray; ++q) stray = key.get(q);
    if (stray) mass += amp * amp;
  }
  return mass;
}

// Normalized graph target: amplitude w_uv / sqrt(M) on the bitstring with
// exactly the two endpoint bits set, M = sum of squared weights.
inline SparseState target_graph_state(const WeightedGraph& g) {
  g.validate();
  if (g.edges.empty()) throw EmptyGraphError("graph has no edges");
  const double inv_norm = 1.0 / std::sqrt(g.total_square_weight());
  SparseState::TermMap terms;
  for (const WeightedEdge& e : g.edges) {
    BasisKey k(g.n);
    k.set(e.u - 1, true);
    k.set(e.v - 1, true);
    terms.emplace(std::move(k), e.w * inv_norm);
  }
  return SparseState::from_terms(g.n, std::move(terms));
}

// Normalized fixed-weight target over the working qubits only.
inline SparseState target_hwp_state(const HwpSpec& spec) {
  spec.validate();
  const HwpSpec norm = spec.normalized();
  SparseState::TermMap terms;
  for (const HwpTerm& t : norm.terms) {
    if (t.amplitude == 0.0) continue;
    BasisKey k(norm.n);
    for (int q = 0; q < norm.n; ++q)
      if (t.bits[q] == '1') k.set(q, true);
    terms.emplace(std::move(k), t.amplitude);
  }
  return SparseState::from_terms(norm.n, std::move(terms));
}

}  // namespace hwprep
