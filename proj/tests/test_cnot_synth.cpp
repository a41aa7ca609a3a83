// Tests for the CNOT building blocks: chain prefix circuits, fan-in/fan-out,
// bipartite scheduling with dirty ancillas, and unipotent linear maps.
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <utility>
#include <vector>

#include "hwprep/cnot_synth.hpp"
#include "hwprep/errors.hpp"
#include "hwprep/gf2.hpp"
#include "hwprep/sparse_sim.hpp"
#include "test_util.hpp"

using hwprep::BipartiteCnotSpec;
using hwprep::Circuit;
using hwprep::Gate;
using hwprep::gf2::Gf2Matrix;

namespace {

int ceil_log2(int n) {
  int l = 0;
  while ((1 << l) < n) ++l;
  return l;
}

// Expected whole-register matrix for a map M on qubits 0..n-1 with every
// other qubit untouched.
Gf2Matrix embed_working(const Gf2Matrix& m, int total) {
  Gf2Matrix e = Gf2Matrix::identity(total);
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) e.set(i, j, m.get(i, j));
  return e;
}

Gf2Matrix naive_edge_product(int total, const std::vector<std::pair<int, int>>& edges) {
  Gf2Matrix e = Gf2Matrix::identity(total);
  for (const auto& [a, b] : edges) e.row_xor(b, a);
  return e;
}

}  // namespace

TEST_CASE("circuit matrix of the naive five-qubit chain") {
  Circuit c(5);
  for (int i = 0; i + 1 < 5; ++i) c.append(Gate::cnot(i, i + 1));
  CHECK(hwprep::circuit_to_matrix(c) == testutil::lower_all_ones(5));
}

TEST_CASE("circuit matrix respects composition order") {
  auto gen = testutil::rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    Circuit a(6), b(6);
    for (int g = 0; g < 15; ++g) {
      int c1 = testutil::pick(gen, 0, 5), t1 = testutil::pick(gen, 0, 5);
      if (c1 != t1) a.append(Gate::cnot(c1, t1));
      int c2 = testutil::pick(gen, 0, 5), t2 = testutil::pick(gen, 0, 5);
      if (c2 != t2) b.append(Gate::cnot(c2, t2));
    }
    Circuit ab = a;
    ab.append(b);
    // Later gates act on the left of the matrix product.
    CHECK(hwprep::circuit_to_matrix(ab) ==
          hwprep::gf2::multiply(hwprep::circuit_to_matrix(b), hwprep::circuit_to_matrix(a)));
  }
}

TEST_CASE("circuit matrix rejects non-linear gates") {
  Circuit c(2);
  c.append(Gate::ry(0, 0.5));
  CHECK_THROWS_AS(hwprep::circuit_to_matrix(c), hwprep::NonLinearGateError);
  Circuit d(2);
  d.append(Gate::x(0));  // affine, not linear
  CHECK_THROWS_AS(hwprep::circuit_to_matrix(d), hwprep::NonLinearGateError);
  Circuit e(3);
  e.append(Gate::toffoli(0, 1, 2));
  CHECK_THROWS_AS(hwprep::circuit_to_matrix(e), hwprep::NonLinearGateError);
}

TEST_CASE("prefix chain realizes the all-ones lower-triangular map") {
  for (int n : {2, 3, 4, 5, 6, 7, 8, 13, 16, 17, 33, 64, 100, 256}) {
    Circuit c = hwprep::chain(n);
    CHECK(hwprep::circuit_to_matrix(c) == testutil::lower_all_ones(n));
    CHECK(c.depth() <= 4 * ceil_log2(n) + 4);
    for (const Gate& g : c.gates()) CHECK(g.is_cnot());
  }
}

TEST_CASE("two-qubit chain is a single CNOT") {
  Circuit c = hwprep::chain(2);
  CHECK(c.raw_gate_count() == 1);
  CHECK(c.depth() == 1);
  CHECK(c.gates()[0] == Gate::cnot(0, 1));
}

TEST_CASE("fan-in with one control is a single CNOT") {
  Circuit c = hwprep::fan_in(0, {1});
  CHECK(c.raw_gate_count() == 1);
  CHECK(c.gates()[0] == Gate::cnot(1, 0));
}

TEST_CASE("fan-in realizes the rank-1 row update") {
  for (int n : {1, 2, 3, 5, 8, 31, 100}) {
    std::vector<int> controls(n);
    for (int i = 0; i < n; ++i) controls[i] = i + 1;
    Circuit c = hwprep::fan_in(0, controls);
    Gf2Matrix expect = Gf2Matrix::identity(n + 1);
    for (int j = 1; j <= n; ++j) expect.set(0, j, true);
    CHECK(hwprep::circuit_to_matrix(c) == expect);
  }
}

TEST_CASE("fan-in depth is exactly 2 log n + 1 at powers of two") {
  for (int n : {1, 2, 4, 8, 16, 32, 64, 128, 256, 512}) {
    std::vector<int> controls(n);
    for (int i = 0; i < n; ++i) controls[i] = i + 1;
    Circuit c = hwprep::fan_in(0, controls);
    CHECK(c.depth() == 2 * ceil_log2(n) + 1);
    CHECK(c.raw_gate_count() == 2 * n - 1);
  }
  // Bound holds off powers of two as well.
  for (int n : {3, 5, 6, 7, 11, 100}) {
    std::vector<int> controls(n);
    for (int i = 0; i < n; ++i) controls[i] = i + 1;
    CHECK(hwprep::fan_in(0, controls).depth() <= 2 * ceil_log2(n) + 1);
  }
}

TEST_CASE("eight-control fan-in folds adjacent pairs first") {
  std::vector<int> controls = {1, 2, 3, 4, 5, 6, 7, 8};
  Circuit c = hwprep::fan_in(0, controls);
  REQUIRE(c.raw_gate_count() == 15);
  CHECK(c.depth() == 7);
  // First layer: four CNOTs pairing neighbours, second element controlling.
  CHECK(c.gates()[0] == Gate::cnot(2, 1));
  CHECK(c.gates()[1] == Gate::cnot(4, 3));
  CHECK(c.gates()[2] == Gate::cnot(6, 5));
  CHECK(c.gates()[3] == Gate::cnot(8, 7));
  // Middle gate lands on the target.
  CHECK(c.gates()[7].targets == std::vector<int>{0});
}

TEST_CASE("fan-in works on scattered qubit labels") {
  Circuit c = hwprep::fan_in(3, {0, 5, 2});
  Gf2Matrix expect = Gf2Matrix::identity(6);
  expect.set(3, 0, true);
  expect.set(3, 5, true);
  expect.set(3, 2, true);
  CHECK(hwprep::circuit_to_matrix(c) == expect);
}

TEST_CASE("fan-out with one target is a single CNOT") {
  Circuit c = hwprep::fan_out(0, {1});
  CHECK(c.raw_gate_count() == 1);
  CHECK(c.gates()[0] == Gate::cnot(0, 1));
}

TEST_CASE("fan-out realizes the rank-1 column update") {
  for (int n : {1, 2, 3, 5, 8, 31, 100}) {
    std::vector<int> targets(n);
    for (int i = 0; i < n; ++i) targets[i] = i + 1;
    Circuit c = hwprep::fan_out(0, targets);
    Gf2Matrix expect = Gf2Matrix::identity(n + 1);
    for (int j = 1; j <= n; ++j) expect.set(j, 0, true);
    CHECK(hwprep::circuit_to_matrix(c) == expect);
    CHECK(c.depth() <= 2 * ceil_log2(n) + 1);
  }
}

TEST_CASE("fan-out copies onto every basis input") {
  std::vector<int> targets = {1, 2, 3, 4, 5, 6, 7, 8};
  Circuit c = hwprep::fan_out(0, targets);
  for (int input = 0; input < (1 << 9); ++input) {
    std::vector<int> ones;
    for (int q = 0; q < 9; ++q)
      if (input >> q & 1) ones.push_back(q);
    hwprep::SparseState s = hwprep::SparseState::basis_state(9, ones);
    s.apply(c);
    std::vector<int> expect;
    const bool src = input & 1;
    if (src) expect.push_back(0);
    for (int q = 1; q < 9; ++q)
      if (((input >> q) & 1) ^ src) expect.push_back(q);
    CHECK(s.amplitude_of(expect) == Catch::Approx(1.0));
  }
}

TEST_CASE("single-edge bipartite schedule is the four-gate helper sequence") {
  BipartiteCnotSpec spec;
  spec.control_set = {0};
  spec.target_set = {1};
  spec.edges = {{0, 1}};
  spec.dirty_ancillas = {2};
  Circuit c = hwprep::bipartite_schedule(spec);
  REQUIRE(c.raw_gate_count() == 4);
  CHECK(c.gates()[0] == Gate::cnot(2, 1));
  CHECK(c.gates()[1] == Gate::cnot(0, 2));
  CHECK(c.gates()[2] == Gate::cnot(2, 1));
  CHECK(c.gates()[3] == Gate::cnot(0, 2));
  // All eight basis inputs: acts as CNOT(0 -> 1), helper restored.
  for (int input = 0; input < 8; ++input) {
    std::vector<int> ones;
    for (int q = 0; q < 3; ++q)
      if (input >> q & 1) ones.push_back(q);
    hwprep::SparseState s = hwprep::SparseState::basis_state(3, ones);
    s.apply(c);
    std::vector<int> expect;
    if (input & 1) expect.push_back(0);
    if (((input >> 1) ^ input) & 1) expect.push_back(1);
    if (input >> 2 & 1) expect.push_back(2);
    CHECK(s.amplitude_of(expect) == Catch::Approx(1.0));
  }
}

TEST_CASE("empty bipartite edge set gives an empty circuit") {
  BipartiteCnotSpec spec;
  spec.control_set = {0};
  spec.target_set = {1};
  spec.dirty_ancillas = {2};
  CHECK(hwprep::bipartite_schedule(spec).raw_gate_count() == 0);
}

TEST_CASE("bipartite schedule validates its spec") {
  BipartiteCnotSpec spec;
  spec.control_set = {0, 1};
  spec.target_set = {2};
  spec.edges = {{0, 2}};
  spec.dirty_ancillas = {};
  CHECK_THROWS_AS(hwprep::bipartite_schedule(spec), hwprep::InvariantError);
  spec.dirty_ancillas = {1};  // overlaps control set
  CHECK_THROWS_AS(hwprep::bipartite_schedule(spec), hwprep::InvariantError);
  spec.dirty_ancillas = {3};
  spec.edges = {{0, 2}, {0, 2}};  // duplicate edge
  CHECK_THROWS_AS(hwprep::bipartite_schedule(spec), hwprep::InvariantError);
  spec.edges = {{2, 0}};  // endpoints in wrong sets
  CHECK_THROWS_AS(hwprep::bipartite_schedule(spec), hwprep::InvariantError);
}

TEST_CASE("six-edge bipartite example with three helpers") {
  // Four controls, three targets, six edges, scheduled through three dirty
  // ancillas over ten qubits in total.
  BipartiteCnotSpec spec;
  spec.control_set = {0, 1, 2, 3};
  spec.target_set = {4, 5, 6};
  spec.edges = {{0, 4}, {0, 5}, {1, 5}, {1, 6}, {2, 4}, {3, 5}};
  spec.dirty_ancillas = {7, 8, 9};
  Circuit c = hwprep::bipartite_schedule(spec);
  CHECK(hwprep::circuit_to_matrix(c) == naive_edge_product(10, spec.edges));

  // Random initial basis states: working map applied, dirty bits restored.
  auto gen = testutil::rng(8080);
  for (int trial = 0; trial < 100; ++trial) {
    int input = testutil::pick(gen, 0, (1 << 10) - 1);
    std::vector<int> ones;
    for (int q = 0; q < 10; ++q)
      if (input >> q & 1) ones.push_back(q);
    hwprep::SparseState s = hwprep::SparseState::basis_state(10, ones);
    s.apply(c);
    int out = input;
    for (const auto& [a, b] : spec.edges)
      if (input >> a & 1) out ^= 1 << b;
    std::vector<int> expect;
    for (int q = 0; q < 10; ++q)
      if (out >> q & 1) expect.push_back(q);
    CHECK(s.amplitude_of(expect) == Catch::Approx(1.0));
  }
}

TEST_CASE("random bipartite schedules match the naive product") {
  auto gen = testutil::rng(904);
  for (int trial = 0; trial < 25; ++trial) {
    const int na = testutil::pick(gen, 1, 4);
    const int nb = testutil::pick(gen, 1, 4);
    const int l = testutil::pick(gen, 1, 5);
    BipartiteCnotSpec spec;
    for (int i = 0; i < na; ++i) spec.control_set.push_back(i);
    for (int i = 0; i < nb; ++i) spec.target_set.push_back(na + i);
    for (int i = 0; i < l; ++i) spec.dirty_ancillas.push_back(na + nb + i);
    for (int a = 0; a < na; ++a)
      for (int b = 0; b < nb; ++b)
        if (testutil::coin(gen)) spec.edges.push_back({a, na + b});
    Circuit c = hwprep::bipartite_schedule(spec);
    const int total = na + nb + l;
    CHECK(hwprep::circuit_to_matrix(c) == naive_edge_product(total, spec.edges));
    // Size stays linear in the edge count.
    CHECK(c.raw_gate_count() <= 8 * static_cast<int>(spec.edges.size()));
  }
}

TEST_CASE("identity map needs no gates") {
  CHECK(hwprep::unipotent_cnot(Gf2Matrix::identity(4), {4, 5, 6, 7}).raw_gate_count() == 0);
}

TEST_CASE("unipotent synthesis rejects non-unipotent maps") {
  // Companion matrix of x^2 + x + 1 is invertible but has no eigenvalue 1.
  Gf2Matrix m(2, 2);
  m.set(0, 1, true);
  m.set(1, 0, true);
  m.set(1, 1, true);
  CHECK_THROWS_AS(hwprep::unipotent_cnot(m, {2, 3}), hwprep::NotUnipotentError);
}

TEST_CASE("unipotent synthesis realizes the five-qubit chain matrix") {
  const Gf2Matrix m = testutil::lower_all_ones(5);
  Circuit c = hwprep::unipotent_cnot(m, {5, 6, 7, 8, 9});
  CHECK(hwprep::circuit_to_matrix(c) == embed_working(m, 10));

  // Random dirty basis values are restored.
  auto gen = testutil::rng(606);
  for (int trial = 0; trial < 20; ++trial) {
    int input = testutil::pick(gen, 0, (1 << 10) - 1);
    std::vector<int> ones;
    for (int q = 0; q < 10; ++q)
      if (input >> q & 1) ones.push_back(q);
    hwprep::SparseState s = hwprep::SparseState::basis_state(10, ones);
    s.apply(c);
    // Expected working value: prefix XOR; ancillas unchanged.
    std::vector<int> expect;
    int prefix = 0;
    for (int q = 0; q < 5; ++q) {
      prefix ^= input >> q & 1;
      if (prefix) expect.push_back(q);
    }
    for (int q = 5; q < 10; ++q)
      if (input >> q & 1) expect.push_back(q);
    CHECK(s.amplitude_of(expect) == Catch::Approx(1.0));
  }
}

TEST_CASE("random unipotent maps synthesize exactly") {
  auto gen = testutil::rng(1618);
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 8;
    const Gf2Matrix m = testutil::random_unipotent(n, gen);
    // Extra dirty qubits beyond n exercise the bipartite inner stages.
    const int extra = testutil::pick(gen, 0, 6);
    std::vector<int> dirty;
    for (int i = 0; i < n + extra; ++i) dirty.push_back(n + i);
    Circuit c = hwprep::unipotent_cnot(m, dirty);
    CHECK(hwprep::circuit_to_matrix(c) == embed_working(m, 2 * n + extra));
    for (const Gate& g : c.gates()) CHECK(g.is_cnot());
  }
}

TEST_CASE("unipotent synthesis on small random dimensions") {
  auto gen = testutil::rng(2718);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = testutil::pick(gen, 1, 6);
    const Gf2Matrix m = testutil::random_unipotent(n, gen);
    std::vector<int> dirty;
    const int extra = testutil::pick(gen, 0, 3);
    for (int i = 0; i < n + extra; ++i) dirty.push_back(n + i);
    Circuit c = hwprep::unipotent_cnot(m, dirty);
    CHECK(hwprep::circuit_to_matrix(c) == embed_working(m, 2 * n + extra));
  }
}
