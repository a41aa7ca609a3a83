// Tests for the fixed-Hamming-weight state synthesizers: the split of basis
// states at their middle one, the weak (indicator-per-state) preparation, and
// the full preparation with its split/recombine bookkeeping.
#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "hwprep/circuit.hpp"
#include "hwprep/errors.hpp"
#include "hwprep/hwp_prep.hpp"
#include "hwprep/inputs.hpp"
#include "hwprep/sparse_sim.hpp"
#include "test_util.hpp"

using hwprep::BudgetError;
using hwprep::Circuit;
using hwprep::Gate;
using hwprep::HwpSpec;
using hwprep::HwpTerm;
using hwprep::OddWeightError;
using hwprep::RegisterLayout;
using hwprep::RegisterRange;
using hwprep::SparseState;
using hwprep::SplitIndex;
using hwprep::split_index;

namespace {

HwpSpec uniform_spec(int n, int k) {
  HwpSpec s{n, k, {}};
  for (const std::string& b : hwprep::detail::weight_strings(n, k))
    s.terms.push_back({b, 1.0});
  return s;
}

HwpSpec random_spec(int n, int k, std::mt19937_64& gen) {
  HwpSpec s{n, k, {}};
  for (const std::string& b : hwprep::detail::weight_strings(n, k))
    if (testutil::coin(gen)) s.terms.push_back({b, testutil::uniform_real(gen, -1.0, 1.0)});
  if (s.terms.empty() || std::all_of(s.terms.begin(), s.terms.end(),
                                     [](const HwpTerm& t) { return t.amplitude == 0.0; }))
    s.terms.push_back({hwprep::detail::weight_strings(n, k).front(), 1.0});
  return s;
}

std::vector<int> ones_of(const std::string& bits) {
  std::vector<int> out;
  for (int q = 0; q < static_cast<int>(bits.size()); ++q)
    if (bits[q] == '1') out.push_back(q);
  return out;
}

// Absolute overlap of the state's working-register marginal with the
// normalized table. Valid whenever the state's ancilla residue vanishes.
double table_overlap(const SparseState& st, const HwpSpec& spec) {
  const HwpSpec norm = spec.normalized();
  double dot = 0.0;
  for (const HwpTerm& t : norm.terms) dot += t.amplitude * st.amplitude_of(ones_of(t.bits));
  return std::abs(dot);
}

SparseState run(const std::pair<Circuit, RegisterLayout>& built) {
  SparseState st(built.second.num_qubits);
  st.apply(built.first);
  return st;
}

// True if some term's ones have a gap right after the prefix half, which is
// exactly the condition for the weight-check register to hold a run of two or
// more ones (the qstar = 0 branch).
bool has_multi_one_branch(const HwpSpec& spec) {
  for (const HwpTerm& t : spec.terms) {
    if (t.amplitude == 0.0) continue;
    const SplitIndex s = split_index(t.bits, spec.n, spec.k, true);
    if (s.b.empty() || s.b.front() == '0') return true;
  }
  return false;
}

}  // namespace

TEST_CASE("split_index matches the worked examples") {
  SplitIndex s = split_index("0101", 4, 2);
  REQUIRE(s.i == 2);
  REQUIRE(s.a == "01");
  REQUIRE(s.b == "01");

  s = split_index("1100", 4, 2);
  REQUIRE(s.i == 1);
  REQUIRE(s.a == "1");
  REQUIRE(s.b == "100");
}

TEST_CASE("split_index reconstructs every weight-4 string on eight qubits") {
  const std::vector<std::string> basis = hwprep::detail::weight_strings(8, 4);
  REQUIRE(basis.size() == 70);
  std::map<std::pair<int, std::pair<std::string, std::string>>, int> seen;
  for (const std::string& x : basis) {
    const SplitIndex s = split_index(x, 8, 4);
    REQUIRE(s.a.size() == static_cast<std::size_t>(s.i));
    REQUIRE(s.a + s.b == x);
    REQUIRE(s.a.back() == '1');
    int ha = 0;
    for (char ch : s.a) ha += ch == '1';
    int hb = 0;
    for (char ch : s.b) hb += ch == '1';
    REQUIRE(ha == 2);
    REQUIRE(hb == 2);
    ++seen[{s.i, {s.a, s.b}}];
  }
  REQUIRE(seen.size() == basis.size());  // the triple determines the string
}

TEST_CASE("split_index rejects malformed input") {
  REQUIRE_THROWS_AS(split_index("0101", 4, 3), hwprep::BadHammingWeightError);
  REQUIRE_THROWS_AS(split_index("01011", 4, 2), hwprep::BadHammingWeightError);
  REQUIRE_THROWS_AS(split_index("01a1", 4, 2), hwprep::BadHammingWeightError);
  REQUIRE_THROWS_AS(split_index("0111", 4, 3), OddWeightError);
  const SplitIndex s = split_index("0111", 4, 3, true);
  REQUIRE(s.i == 3);
  REQUIRE(s.a == "011");
  REQUIRE(s.b == "1");
}

TEST_CASE("weak preparation builds the uniform weight-2 state on four qubits") {
  const HwpSpec spec = uniform_spec(4, 2);
  const auto built = prepare_weak(spec);
  REQUIRE(built.second.find("working")->size == 4);
  REQUIRE(built.second.find("A")->size == 6);
  REQUIRE(built.second.find("copies")->size == 12);

  const SparseState st = run(built);
  REQUIRE(st.support_size() == 6);
  REQUIRE(hwprep::ancilla_residue(st, 4) < 1e-18);
  const double want = 1.0 / std::sqrt(6.0);
  for (const std::string& b : hwprep::detail::weight_strings(4, 2))
    REQUIRE(std::abs(st.amplitude_of(ones_of(b)) - want) < 1e-12);
}

TEST_CASE("weak preparation pins a single-term table to its basis state") {
  const HwpSpec spec{8, 3, {{"01010100", 1.0}}};
  const SparseState st = run(prepare_weak(spec));
  REQUIRE(st.support_size() == 1);
  REQUIRE(std::abs(st.amplitude_of(ones_of("01010100")) - 1.0) < 1e-12);
}

TEST_CASE("weak preparation matches random tables") {
  auto gen = testutil::rng(0x11aa22);
  for (int rep = 0; rep < 6; ++rep) {
    const int n = testutil::pick(gen, 4, 8);
    const int k = testutil::pick(gen, 1, n / 2);
    const HwpSpec spec = random_spec(n, k, gen);
    const SparseState st = run(prepare_weak(spec));
    REQUIRE(table_overlap(st, spec) >= 1.0 - 1e-12);
    REQUIRE(hwprep::ancilla_residue(st, n) < 1e-18);
  }
}

TEST_CASE("weak preparation enforces the basis-size budget") {
  REQUIRE_THROWS_AS(prepare_weak(uniform_spec(14, 7)), BudgetError);
  REQUIRE_THROWS_AS(prepare_weak(uniform_spec(4, 2), 5), BudgetError);
  REQUIRE_NOTHROW(prepare_weak(uniform_spec(4, 2), 6));
}

TEST_CASE("full preparation builds the uniform weight-2 state on four qubits") {
  const HwpSpec spec = uniform_spec(4, 2);
  const auto built = prepare_full(spec);
  const SparseState st = run(built);
  REQUIRE(st.support_size() == 6);
  REQUIRE(hwprep::ancilla_residue(st, 4) < 1e-18);
  const double want = 1.0 / std::sqrt(6.0);
  for (const std::string& b : hwprep::detail::weight_strings(4, 2))
    REQUIRE(std::abs(st.amplitude_of(ones_of(b)) - want) < 1e-12);
}

TEST_CASE("full preparation lays out the contracted registers") {
  const auto built = prepare_full(uniform_spec(8, 4));
  const RegisterLayout& layout = built.second;
  REQUIRE(layout.find("working")->size == 8);
  REQUIRE(layout.find("A")->size == 70);
  for (int i = 2; i <= 6; ++i) {
    const RegisterRange* b = layout.find("B" + std::to_string(i));
    REQUIRE(b != nullptr);
    REQUIRE(b->size == static_cast<int>(hwprep::detail::binomial(i, 2) +
                                        hwprep::detail::binomial(8 - i, 2)));
    const RegisterRange* c = layout.find("C" + std::to_string(i));
    REQUIRE(c != nullptr);
    REQUIRE(c->size == 8);
  }
  REQUIRE(layout.find("D")->size == 5);
  REQUIRE(layout.find("E")->size == 5);
  REQUIRE(layout.find("F")->size == 5);
  REQUIRE(layout.find("qstar")->size == 1);
  REQUIRE(layout.find("mcx_copies") != nullptr);
  REQUIRE(layout.find("work_copies")->size == 40);
  REQUIRE(layout.find("e_copies")->size == 25);
}

TEST_CASE("full preparation rejects odd weight unless extended") {
  const HwpSpec spec{8, 3, {{"01010100", 1.0}, {"11100000", 0.5}}};
  REQUIRE_THROWS_AS(prepare_full(spec), OddWeightError);
  const SparseState st = run(prepare_full(spec, 1000, true));
  REQUIRE(table_overlap(st, spec) >= 1.0 - 1e-12);
  REQUIRE(hwprep::ancilla_residue(st, 8) < 1e-18);
}

TEST_CASE("full preparation rejects weight one and oversized bases") {
  REQUIRE_THROWS_AS(prepare_full(HwpSpec{4, 1, {{"0100", 1.0}}}, 1000, true),
                    hwprep::Error);
  REQUIRE_THROWS_AS(prepare_full(uniform_spec(14, 6)), BudgetError);
}

TEST_CASE("full preparation matches the target on random tables") {
  auto gen = testutil::rng(0x77f00d);
  const std::vector<std::pair<int, int>> shapes = {{6, 2}, {8, 2}, {8, 4}};
  bool multi_one_seen = false;
  for (const auto& [n, k] : shapes) {
    for (int rep = 0; rep < 10; ++rep) {
      const HwpSpec spec = random_spec(n, k, gen);
      const SparseState st = run(prepare_full(spec));
      REQUIRE(table_overlap(st, spec) >= 1.0 - 1e-9);
      REQUIRE(hwprep::ancilla_residue(st, n) < 1e-18);
      multi_one_seen = multi_one_seen || has_multi_one_branch(spec);
    }
  }
  REQUIRE(multi_one_seen);  // the qstar = 0 path was exercised
}

TEST_CASE("weak and full preparations agree") {
  auto gen = testutil::rng(0xbeef01);
  for (int rep = 0; rep < 4; ++rep) {
    const HwpSpec spec = random_spec(8, 4, gen);
    const SparseState weak = run(prepare_weak(spec));
    const SparseState full = run(prepare_full(spec));
    double dot = 0.0;
    for (const auto& [key, amp] : weak.terms()) {
      std::vector<int> ones;
      for (int q = 0; q < 8; ++q)
        if (key.get(q)) ones.push_back(q);
      dot += amp * full.amplitude_of(ones);
    }
    REQUIRE(std::abs(dot) >= 1.0 - 1e-9);
  }
}

TEST_CASE("full preparation keeps the support within the basis count") {
  auto gen = testutil::rng(0x5eed5);
  const HwpSpec spec = random_spec(8, 4, gen);
  const auto built = prepare_full(spec);
  SparseState st(built.second.num_qubits);
  for (const Gate& g : built.first.gates()) {
    st.apply(g);
    REQUIRE(st.support_size() <= 70);
  }
}

TEST_CASE("the weight-check block lights E at the split position") {
  struct Probe {
    std::string bits;
    int expect_one_hot;  // 1 when the check register holds a single one
  };
  const std::vector<Probe> probes = {{"10100101", 0}, {"11001100", 0}, {"10111000", 1},
                                     {"11110000", 1}, {"00001111", 1}, {"01010101", 0}};
  for (const Probe& p : probes) {
    const HwpSpec spec{8, 4, {{p.bits, 1.0}}};
    const auto [circ, layout] = prepare_full(spec);
    const SplitIndex s = split_index(p.bits, 8, 4);
    SparseState st(layout.num_qubits);
    for (const Gate& g : circ.gates()) {
      if (g.stage == "branch1") break;
      st.apply(g);
    }
    REQUIRE(st.support_size() == 1);
    const auto& key = st.terms().begin()->first;
    const RegisterRange* e = layout.find("E");
    const int t_live = s.i - 2;  // split positions start at k/2
    int first = -1;
    int count = 0;
    for (int t = 0; t < e->size; ++t)
      if (key.get(e->start + t)) {
        if (first < 0) first = t;
        ++count;
      }
    REQUIRE(first == t_live);
    REQUIRE((count == 1) == (p.expect_one_hot == 1));
    REQUIRE(key.get(layout.find("qstar")->start) == (p.expect_one_hot == 1));
    // D still marks the live split position until the branches clear it.
    const RegisterRange* d = layout.find("D");
    for (int t = 0; t < d->size; ++t)
      REQUIRE(key.get(d->start + t) == (t == t_live));
  }
}

TEST_CASE("full preparation agrees with the graph synthesizer at weight two") {
  auto gen = testutil::rng(0xabc123);
  const hwprep::WeightedGraph g = testutil::random_graph(8, 12, gen);
  HwpSpec spec{8, 2, {}};
  for (const hwprep::WeightedEdge& e : g.edges) {
    std::string bits(8, '0');
    bits[e.u - 1] = '1';
    bits[e.v - 1] = '1';
    spec.terms.push_back({bits, e.w});
  }
  const SparseState via_table = run(prepare_full(spec));
  const SparseState via_graph = hwprep::target_graph_state(g);
  double dot = 0.0;
  for (const auto& [key, amp] : via_graph.terms()) {
    std::vector<int> ones;
    for (int q = 0; q < 8; ++q)
      if (key.get(q)) ones.push_back(q);
    dot += amp * via_table.amplitude_of(ones);
  }
  REQUIRE(std::abs(dot) >= 1.0 - 1e-12);
}

TEST_CASE("gate counts stay proportional to the basis sizes") {
  for (int n = 6; n <= 12; ++n)
    for (int k = 2; 2 * k <= n; k += 2) {
      const HwpSpec spec = uniform_spec(n, k);
      const double basis = static_cast<double>(hwprep::detail::binomial(n, k));
      const double full_ratio = prepare_full(spec).first.raw_gate_count() / basis;
      REQUIRE(full_ratio >= 15.0);
      REQUIRE(full_ratio <= 48.0);
      const double weak_ratio = prepare_weak(spec).first.raw_gate_count() / (k * basis);
      REQUIRE(weak_ratio >= 10.5);
      REQUIRE(weak_ratio <= 12.5);
    }
}

TEST_CASE("the half-table sizes stay within four times the basis count") {
  for (int n = 4; n <= 40; ++n)
    for (int k = 2; 2 * k <= n; k += 2) {
      long long pool = 0;
      for (int i = k / 2; i <= n - k / 2; ++i)
        pool += (k / 2) * (hwprep::detail::binomial(i, k / 2) +
                           hwprep::detail::binomial(n - i, k / 2));
      REQUIRE(pool <= 4 * hwprep::detail::binomial(n, k));
    }
}
