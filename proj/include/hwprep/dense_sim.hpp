#pragma once

// Dense complex statevector oracle for up to 14 qubits. Supports every gate
// kind including the complex Phase gates produced by lowering, and arbitrary
// control lists. Used to validate the sparse simulator and the lowering
// passes on small circuits.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "hwprep/circuit.hpp"
#include "hwprep/errors.hpp"
#include "hwprep/sparse_sim.hpp"

namespace hwprep {

class DenseState {
 public:
  using Complex = std::complex<double>;
  static constexpr int kMaxQubits = 14;

  explicit DenseState(int num_qubits) : num_qubits_(num_qubits) {
    detail::check(num_qubits >= 0 && num_qubits <= kMaxQubits,
                  "dense oracle limited to 14 qubits");
    amps_.assign(std::size_t{1} << num_qubits, Complex{0.0, 0.0});
    amps_[0] = 1.0;
  }

  static DenseState basis_state(int num_qubits, std::size_t index) {
    DenseState s(num_qubits);
    s.amps_.assign(s.amps_.size(), Complex{0.0, 0.0});
    s.amps_[index] = 1.0;
    return s;
  }

  static DenseState from_sparse(const SparseState& sparse) {
    DenseState s(sparse.num_qubits());
    s.amps_.assign(s.amps_.size(), Complex{0.0, 0.0});
    for (const auto& [key, amp] : sparse.terms())
      s.amps_[s.index_of(key)] = amp;
    return s;
  }

  int num_qubits() const { return num_qubits_; }
  const std::vector<Complex>& amplitudes() const { return amps_; }
  Complex amplitude(std::size_t index) const { return amps_[index]; }

  // Bit of qubit q inside basis index i; qubit 0 is the leftmost ket bit,
  // so it occupies the most significant position.
  bool bit(std::size_t index, int q) const {
    return (index >> (num_qubits_ - 1 - q)) & 1u;
  }

  std::size_t mask(int q) const { return std::size_t{1} << (num_qubits_ - 1 - q); }

  std::size_t index_of(const BasisKey& key) const {
    std::size_t idx = 0;
    for (int q = 0; q < num_qubits_; ++q)
      if (key.get(q)) idx |= mask(q);
    return idx;
  }

  void apply(const Gate& g) {
    for (int q : g.qubits())
      detail::check(q < num_qubits_, "gate qubit beyond the state's qubit count");
    switch (g.kind) {
      case GateKind::X:
      case GateKind::Hwc:
        apply_classical(g);
        return;
      case GateKind::H: {
        const double r = 1.0 / std::sqrt(2.0);
        apply_one_qubit(g, {Complex{r, 0}, Complex{r, 0}, Complex{r, 0}, Complex{-r, 0}});
        return;
      }
      case GateKind::Ry: {
        const double c = std::cos(g.angle / 2), s = std::sin(g.angle / 2);
        apply_one_qubit(g, {Complex{c, 0}, Complex{-s, 0}, Complex{s, 0}, Complex{c, 0}});
        return;
      }
      case GateKind::Phase:
        apply_one_qubit(g, {Complex{1, 0}, Complex{0, 0}, Complex{0, 0},
                            std::polar(1.0, g.angle)});
        return;
      case GateKind::Rbs:
        apply_rbs(g);
        return;
    }
  }

  void apply(const Circuit& c) {
    detail::check(c.num_qubits() <= num_qubits_,
                  "circuit uses more qubits than the state");
    for (const Gate& g : c.gates()) apply(g);
  }

  double norm_square() const {
    double s = 0.0;
    for (const Complex& a : amps_) s += std::norm(a);
    return s;
  }

  // Reduced density matrix over the listed qubits (row-major, dim 2^|qs|).
  std::vector<Complex> reduced_density(const std::vector<int>& qs) const {
    const int m = static_cast<int>(qs.size());
    const std::size_t dim = std::size_t{1} << m;
    std::vector<Complex> rho(dim * dim, Complex{0, 0});
    for (std::size_t i = 0; i < amps_.size(); ++i) {
      if (amps_[i] == Complex{0, 0}) continue;
      for (std::size_t j = 0; j < amps_.size(); ++j) {
        if (amps_[j] == Complex{0, 0}) continue;
        // i and j must agree outside qs
        std::size_t outside_mask = amps_.size() - 1;
        for (int q : qs) outside_mask &= ~mask(q);
        if ((i & outside_mask) != (j & outside_mask)) continue;
        std::size_t row = 0, col = 0;
        for (int b = 0; b < m; ++b) {
          if (i & mask(qs[b])) row |= std::size_t{1} << (m - 1 - b);
          if (j & mask(qs[b])) col |= std::size_t{1} << (m - 1 - b);
        }
        rho[row * dim + col] += amps_[i] * std::conj(amps_[j]);
      }
    }
    return rho;
  }

 private:
  static bool all_set(std::size_t index, std::size_t control_mask) {
    return (index & control_mask) == control_mask;
  }

  std::size_t controls_mask(const Gate& g) const {
    std::size_t m = 0;
    for (int c : g.controls) m |= mask(c);
    return m;
  }

  void apply_classical(const Gate& g) {
    const std::size_t cmask = controls_mask(g);
    const std::size_t tmask = mask(g.targets[0]);
    std::vector<Complex> next(amps_.size(), Complex{0, 0});
    for (std::size_t i = 0; i < amps_.size(); ++i) {
      if (amps_[i] == Complex{0, 0}) continue;
      bool fire = all_set(i, cmask);
      if (fire && g.kind == GateKind::Hwc) {
        int hw = 0;
        for (int q : g.counted) hw += (i & mask(q)) != 0;
        fire = hw == g.weight;
      }
      next[fire ? (i ^ tmask) : i] += amps_[i];
    }
    amps_ = std::move(next);
  }

  // m = {m00, m01, m10, m11} acting on the target, under the controls.
  void apply_one_qubit(const Gate& g, const std::array<Complex, 4>& m) {
    const std::size_t cmask = controls_mask(g);
    const std::size_t tmask = mask(g.targets[0]);
    for (std::size_t i = 0; i < amps_.size(); ++i) {
      if (i & tmask) continue;           // visit each pair once, from the 0 side
      if (!all_set(i, cmask)) continue;  // controls exclude the target qubit
      const std::size_t j = i | tmask;
      const Complex a0 = amps_[i], a1 = amps_[j];
      amps_[i] = m[0] * a0 + m[1] * a1;
      amps_[j] = m[2] * a0 + m[3] * a1;
    }
  }

  void apply_rbs(const Gate& g) {
    const double c = std::cos(g.angle), s = std::sin(g.angle);
    const std::size_t cmask = controls_mask(g);
    const std::size_t m1 = mask(g.targets[0]), m2 = mask(g.targets[1]);
    for (std::size_t i = 0; i < amps_.size(); ++i) {
      // enumerate the |10> member of each pair once
      if (!(i & m1) || (i & m2)) continue;
      if (!all_set(i, cmask)) continue;
      const std::size_t j = (i ^ m1) | m2;  // the |01> partner
      const Complex a10 = amps_[i], a01 = amps_[j];
      // |10> -> cos|10> + sin|01>, |01> -> cos|01> - sin|10>
      amps_[i] = c * a10 - s * a01;
      amps_[j] = s * a10 + c * a01;
    }
  }

  int num_qubits_ = 0;
  std::vector<Complex> amps_;
};

// Absolute overlap |<a|b>| of two dense states.
inline double fidelity(const DenseState& a, const DenseState& b) {
  detail::check(a.num_qubits() == b.num_qubits(), "fidelity: qubit counts differ");
  std::complex<double> dot{0, 0};
  for (std::size_t i = 0; i < a.amplitudes().size(); ++i)
    dot += std::conj(a.amplitude(i)) * b.amplitude(i);
  return std::abs(dot);
}

}  // namespace hwprep
