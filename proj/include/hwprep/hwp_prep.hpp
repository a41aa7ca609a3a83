#pragma once
// Synthesis of Hamming-weight-preserving target states: given an amplitude
// table over the weight-k basis states of n qubits, build a circuit that
// prepares the superposition on the working register and returns every
// ancilla to |0>.
//
//   prepare_weak  one indicator ancilla per basis state, a bipartite CNOT
//                 stage writing each pattern onto the working qubits, and a
//                 k-controlled restore pass; ~k * C(n,k) gates.
//   prepare_full  splits each basis state at its ceil(k/2)-th one into a
//                 prefix/suffix pair, prepares each half through much smaller
//                 pattern tables, recombines, and uncomputes the split
//                 bookkeeping through two weight-check branches; ~C(n,k)
//                 gates.
#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "hwprep/circuit.hpp"
#include "hwprep/cnot_synth.hpp"
#include "hwprep/errors.hpp"
#include "hwprep/inputs.hpp"
#include "hwprep/lower.hpp"
#include "hwprep/unary_enc.hpp"

namespace hwprep {
namespace detail {

inline long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (int j = 1; j <= k; ++j)
    r = r * static_cast<unsigned>(n - k + j) / static_cast<unsigned>(j);
  check(r <= static_cast<unsigned __int128>(1) << 62, "binomial overflow");
  return static_cast<long long>(r);
}

// All length-len bitstrings of Hamming weight w, lexicographically ascending.
inline std::vector<std::string> weight_strings(int len, int w) {
  check(0 <= w && w <= len, "string weight out of range");
  std::string s(static_cast<std::size_t>(len - w), '0');
  s.append(static_cast<std::size_t>(w), '1');
  std::vector<std::string> out;
  do {
    out.push_back(s);
  } while (std::next_permutation(s.begin(), s.end()));
  return out;
}

// One pattern-table write pass. Each pattern has a dedicated indicator qubit;
// on every branch at most one indicator is set. `write` XORs the active
// pattern onto the position qubits (scheduled as one bipartite CNOT job using
// the copy pool as helper space). `restore` clears the active indicator by a
// multi-controlled X reading fresh copies of the positions it wrote: among
// equal-weight patterns only the written one has all its positions set, so
// exactly the active indicator flips. The pool must hold one slot per
// (pattern, one-bit) pair and is returned to |0>.
struct PatternWrite {
  Circuit write;
  Circuit restore;
};

inline PatternWrite pattern_write(int num_qubits,
                                  const std::vector<std::string>& patterns,
                                  const std::vector<int>& pattern_qubits,
                                  const std::vector<int>& position_qubits,
                                  const std::vector<int>& copy_pool) {
  check(patterns.size() == pattern_qubits.size(), "one indicator qubit per pattern");
  const int len = static_cast<int>(position_qubits.size());
  BipartiteCnotSpec job;
  job.control_set = pattern_qubits;
  job.target_set = position_qubits;
  std::vector<int> usage(static_cast<std::size_t>(len), 0);
  for (std::size_t p = 0; p < patterns.size(); ++p) {
    check(static_cast<int>(patterns[p].size()) == len, "pattern length mismatch");
    for (int j = 0; j < len; ++j)
      if (patterns[p][j] == '1') {
        job.edges.emplace_back(pattern_qubits[p], position_qubits[j]);
        ++usage[static_cast<std::size_t>(j)];
      }
  }
  check(!copy_pool.empty() && job.edges.size() <= copy_pool.size(),
        "copy pool smaller than the pattern table's one-count");
  job.dirty_ancillas = copy_pool;

  for (const std::string& p : patterns)
    check(p.find('1') != std::string::npos, "pattern with no ones has no indicator restore");

  PatternWrite out{Circuit(num_qubits), Circuit(num_qubits)};
  out.write.append(bipartite_schedule(job));

  std::vector<std::vector<int>> slots(static_cast<std::size_t>(len));
  int cursor = 0;
  for (int j = 0; j < len; ++j)
    for (int u = 0; u < usage[static_cast<std::size_t>(j)]; ++u)
      slots[static_cast<std::size_t>(j)].push_back(copy_pool[static_cast<std::size_t>(cursor++)]);

  Circuit copies(num_qubits);
  for (int j = 0; j < len; ++j)
    if (usage[static_cast<std::size_t>(j)] > 0)
      copies.append(fan_out(position_qubits[static_cast<std::size_t>(j)],
                            slots[static_cast<std::size_t>(j)]));
  out.restore.append(copies);
  std::vector<int> used(static_cast<std::size_t>(len), 0);
  for (std::size_t p = 0; p < patterns.size(); ++p) {
    std::vector<int> cs;
    for (int j = 0; j < len; ++j)
      if (patterns[p][j] == '1')
        cs.push_back(slots[static_cast<std::size_t>(j)]
                          [static_cast<std::size_t>(used[static_cast<std::size_t>(j)]++)]);
    out.restore.append(Gate::mcx(std::move(cs), pattern_qubits[p]));
  }
  out.restore.append(copies.inverse());
  return out;
}

}  // namespace detail

// The split of a weight-k string at its ceil(k/2)-th one: x = a . b where a
// is the shortest prefix holding ceil(k/2) ones, i is that prefix's length
// (equivalently the 1-based position of the split one, so a ends in '1'), and
// b is the remaining suffix with floor(k/2) ones. The pair (i, a, b)
// determines x uniquely.
struct SplitIndex {
  int i = 0;
  std::string a;
  std::string b;

  friend bool operator==(const SplitIndex&, const SplitIndex&) = default;
};

inline SplitIndex split_index(const std::string& x, int n, int k,
                              bool allow_odd_k = false) {
  if (static_cast<int>(x.size()) != n)
    throw BadHammingWeightError("string '" + x + "' does not have n = " +
                                std::to_string(n) + " bits");
  int hw = 0;
  for (char ch : x) {
    if (ch != '0' && ch != '1')
      throw BadHammingWeightError("string '" + x + "' is not a bitstring");
    hw += ch == '1';
  }
  if (hw != k)
    throw BadHammingWeightError("string '" + x + "' has Hamming weight " +
                                std::to_string(hw) + ", expected " + std::to_string(k));
  if (k % 2 != 0 && !allow_odd_k)
    throw OddWeightError("odd target weight " + std::to_string(k) +
                         " needs the odd-weight extension (prefix takes ceil(k/2) ones)");
  const int prefix_ones = (k + 1) / 2;
  int seen = 0;
  int i = 0;
  for (int j = 0; j < n; ++j) {
    if (x[static_cast<std::size_t>(j)] == '1' && ++seen == prefix_ones) {
      i = j + 1;
      break;
    }
  }
  return {i, x.substr(0, static_cast<std::size_t>(i)),
          x.substr(static_cast<std::size_t>(i))};
}

// Weak preparation: registers
//   working  [n]        the target qubits
//   A        [C(n,k)]   one indicator per weight-k basis state, lex order
//   copies   [k*C(n,k)] scratch for the bipartite schedule and the restore
// Stages: "unary" encodes the amplitude table onto A, "cnot" writes the
// active pattern onto working, "restore" clears A. Odd k is allowed; the
// budget caps C(n,k).
inline std::pair<Circuit, RegisterLayout> prepare_weak(const HwpSpec& spec,
                                                       long long budget = 1000) {
  spec.validate();
  const int n = spec.n;
  const int k = spec.k;
  const long long count = detail::binomial(n, k);
  if (count > budget)
    throw BudgetError("weight-" + std::to_string(k) + " basis on " + std::to_string(n) +
                      " qubits has " + std::to_string(count) +
                      " states, over the ancilla budget " + std::to_string(budget));
  const HwpSpec norm = spec.normalized();
  const std::vector<std::string> basis = detail::weight_strings(n, k);
  const int c = static_cast<int>(basis.size());

  std::map<std::string, double> amp;
  for (const HwpTerm& t : norm.terms) amp[t.bits] = t.amplitude;
  AmplitudeVector weights;
  weights.values.reserve(static_cast<std::size_t>(c));
  for (const std::string& s : basis) {
    auto it = amp.find(s);
    weights.values.push_back(it == amp.end() ? 0.0 : it->second);
  }

  RegisterLayout layout;
  layout.add("working", 0, n);
  layout.add("A", n, c);
  layout.add("copies", n + c, k * c);
  Circuit circ(layout.num_qubits);

  const std::vector<int> a_qubits = layout.qubits_of("A");
  circ.append(unary_encode(weights, a_qubits).staged("unary"));
  detail::PatternWrite pass =
      detail::pattern_write(layout.num_qubits, basis, a_qubits,
                            layout.qubits_of("working"), layout.qubits_of("copies"));
  circ.append(pass.write.staged("cnot"));
  circ.append(pass.restore.staged("restore"));
  return {std::move(circ), std::move(layout)};
}

// Full preparation. Registers (in layout order):
//   working [n]; A [C(n,k)]; B<i> and C<i> for every split position i in
//   [ceil(k/2), n-floor(k/2)]; D, E, F [n-k+1 each]; qstar [1]; then the
//   scratch pools mcx_copies, work_copies, e_copies.
// B<i> holds the prefix patterns of length i first, then the suffix patterns
// of length n-i. Stage plan, with every ancilla returned to |0>:
//   "unary"      amplitude table onto A
//   "split"      A -> (B prefix half, B suffix half, D) indicator fan-ins
//   "restore_a"  Toffoli(B-prefix, B-suffix) clears each A indicator
//   "weak"       per split position, pattern-table writes of both halves
//                onto C<i> (positions [0,i) and [i,n))
//   "working"    q_j ^= XOR_i C<i>[j]  (one C<i> row is live per branch)
//   "restore_c"  Toffoli(q_j, D[i]) clears C<i>[j]
//   "copies"     n-k+1 copies of the working register
//   "check"      per copy j: weight check of the first j working qubits into
//                E, then a weight-1 check of E into qstar
//   "branch1"    controlled on qstar: E is one-hot, so E -> D clears D
//   "branch0"    controlled on NOT qstar: E holds a longer run of ones; its
//                first one is isolated by prefix weight-1 checks into F,
//                F -> D clears D, then the F computation is undone
//   "uncompute"  inverse of "copies" + "check"
inline std::pair<Circuit, RegisterLayout> prepare_full(const HwpSpec& spec,
                                                       long long budget = 1000,
                                                       bool allow_odd_k = false) {
  spec.validate();
  const int n = spec.n;
  const int k = spec.k;
  if (k < 2)
    throw Error("full preparation needs k >= 2; a weight-1 table is a plain unary encoding");
  if (k % 2 != 0 && !allow_odd_k)
    throw OddWeightError("odd target weight " + std::to_string(k) +
                         " needs allow_odd_k (prefix takes ceil(k/2) ones)");
  const long long count = detail::binomial(n, k);
  if (count > budget)
    throw BudgetError("weight-" + std::to_string(k) + " basis on " + std::to_string(n) +
                      " qubits has " + std::to_string(count) +
                      " states, over the ancilla budget " + std::to_string(budget));
  const int prefix_ones = (k + 1) / 2;  // ones in a, = k/2 for even k
  const int suffix_ones = k / 2;        // ones in b
  const int lo = prefix_ones;           // least split position
  const int hi = n - suffix_ones;       // greatest split position
  const int nseg = hi - lo + 1;         // = n - k + 1

  const HwpSpec norm = spec.normalized();
  const std::vector<std::string> basis = detail::weight_strings(n, k);
  const int c = static_cast<int>(basis.size());
  std::map<std::string, double> amp;
  for (const HwpTerm& t : norm.terms) amp[t.bits] = t.amplitude;
  AmplitudeVector weights;
  weights.values.reserve(static_cast<std::size_t>(c));
  for (const std::string& s : basis) {
    auto it = amp.find(s);
    weights.values.push_back(it == amp.end() ? 0.0 : it->second);
  }

  // Half-table sizes and pattern lists per split position.
  std::vector<long long> nprefix(static_cast<std::size_t>(nseg));
  std::vector<long long> nsuffix(static_cast<std::size_t>(nseg));
  std::vector<std::vector<std::string>> prefixes(static_cast<std::size_t>(nseg));
  std::vector<std::vector<std::string>> suffixes(static_cast<std::size_t>(nseg));
  std::vector<std::map<std::string, int>> prefix_rank(static_cast<std::size_t>(nseg));
  std::vector<std::map<std::string, int>> suffix_rank(static_cast<std::size_t>(nseg));
  long long mcx_pool = 0;
  for (int t = 0; t < nseg; ++t) {
    const int i = lo + t;
    prefixes[static_cast<std::size_t>(t)] = detail::weight_strings(i, prefix_ones);
    suffixes[static_cast<std::size_t>(t)] = detail::weight_strings(n - i, suffix_ones);
    nprefix[static_cast<std::size_t>(t)] =
        static_cast<long long>(prefixes[static_cast<std::size_t>(t)].size());
    nsuffix[static_cast<std::size_t>(t)] =
        static_cast<long long>(suffixes[static_cast<std::size_t>(t)].size());
    for (int p = 0; p < nprefix[static_cast<std::size_t>(t)]; ++p)
      prefix_rank[static_cast<std::size_t>(t)]
                 [prefixes[static_cast<std::size_t>(t)][static_cast<std::size_t>(p)]] = p;
    for (int p = 0; p < nsuffix[static_cast<std::size_t>(t)]; ++p)
      suffix_rank[static_cast<std::size_t>(t)]
                 [suffixes[static_cast<std::size_t>(t)][static_cast<std::size_t>(p)]] = p;
    mcx_pool += prefix_ones * nprefix[static_cast<std::size_t>(t)] +
                suffix_ones * nsuffix[static_cast<std::size_t>(t)];
  }

  RegisterLayout layout;
  int cursor = 0;
  auto add = [&](const std::string& name, long long size) {
    layout.add(name, cursor, static_cast<int>(size));
    cursor += static_cast<int>(size);
  };
  add("working", n);
  add("A", c);
  for (int t = 0; t < nseg; ++t)
    add("B" + std::to_string(lo + t),
        nprefix[static_cast<std::size_t>(t)] + nsuffix[static_cast<std::size_t>(t)]);
  for (int t = 0; t < nseg; ++t) add("C" + std::to_string(lo + t), n);
  add("D", nseg);
  add("E", nseg);
  add("F", nseg);
  add("qstar", 1);
  add("mcx_copies", mcx_pool);
  add("work_copies", static_cast<long long>(nseg) * n);
  add("e_copies", static_cast<long long>(nseg) * nseg);
  const int base_width = cursor;

  const std::vector<int> a_qubits = layout.qubits_of("A");
  auto b_start = [&](int t) { return layout.find("B" + std::to_string(lo + t))->start; };
  auto c_start = [&](int t) { return layout.find("C" + std::to_string(lo + t))->start; };
  const int d0 = layout.find("D")->start;
  const int e0 = layout.find("E")->start;
  const int f0 = layout.find("F")->start;
  const int qstar = layout.find("qstar")->start;
  const int wc0 = layout.find("work_copies")->start;
  const int ec0 = layout.find("e_copies")->start;

  // Stage "split": every A indicator drives its prefix-pattern indicator, its
  // suffix-pattern indicator, and its split-position marker in D.
  std::vector<int> prefix_qubit(static_cast<std::size_t>(c));
  std::vector<int> suffix_qubit(static_cast<std::size_t>(c));
  std::map<int, std::vector<int>> driven;
  for (int xi = 0; xi < c; ++xi) {
    const SplitIndex s = split_index(basis[static_cast<std::size_t>(xi)], n, k, true);
    const int t = s.i - lo;
    const int qa = b_start(t) + prefix_rank[static_cast<std::size_t>(t)].at(s.a);
    const int qb = b_start(t) + static_cast<int>(nprefix[static_cast<std::size_t>(t)]) +
                   suffix_rank[static_cast<std::size_t>(t)].at(s.b);
    prefix_qubit[static_cast<std::size_t>(xi)] = qa;
    suffix_qubit[static_cast<std::size_t>(xi)] = qb;
    driven[qa].push_back(a_qubits[static_cast<std::size_t>(xi)]);
    driven[qb].push_back(a_qubits[static_cast<std::size_t>(xi)]);
    driven[d0 + t].push_back(a_qubits[static_cast<std::size_t>(xi)]);
  }
  Circuit split_stage(base_width);
  for (const auto& [target, sources] : driven)
    detail::append_accumulate(split_stage, target, sources);

  // Stage "restore_a": the (prefix, suffix) indicator pair of the active basis
  // state is unique to it, so one Toffoli per state clears exactly the active
  // A indicator.
  Circuit restore_a(base_width);
  for (int xi = 0; xi < c; ++xi)
    restore_a.append(Gate::toffoli(prefix_qubit[static_cast<std::size_t>(xi)],
                                   suffix_qubit[static_cast<std::size_t>(xi)],
                                   a_qubits[static_cast<std::size_t>(xi)]));

  // Stage "weak": per split position, write both half patterns onto C<i> and
  // clear the B<i> indicators. On any branch only one split position is live,
  // and the other positions' passes act on all-zero registers.
  const int mcx0 = layout.find("mcx_copies")->start;
  Circuit weak_stage(base_width);
  long long pool_cursor = 0;
  for (int t = 0; t < nseg; ++t) {
    const int i = lo + t;
    std::vector<int> pattern_q;
    std::vector<int> position_q;
    std::vector<int> pool;
    for (int p = 0; p < nprefix[static_cast<std::size_t>(t)]; ++p)
      pattern_q.push_back(b_start(t) + p);
    for (int j = 0; j < i; ++j) position_q.push_back(c_start(t) + j);
    for (long long u = 0; u < prefix_ones * nprefix[static_cast<std::size_t>(t)]; ++u)
      pool.push_back(mcx0 + static_cast<int>(pool_cursor++));
    detail::PatternWrite pre = detail::pattern_write(
        base_width, prefixes[static_cast<std::size_t>(t)], pattern_q, position_q, pool);
    weak_stage.append(pre.write);
    weak_stage.append(pre.restore);

    pattern_q.clear();
    position_q.clear();
    pool.clear();
    for (int p = 0; p < nsuffix[static_cast<std::size_t>(t)]; ++p)
      pattern_q.push_back(b_start(t) + static_cast<int>(nprefix[static_cast<std::size_t>(t)]) + p);
    for (int j = i; j < n; ++j) position_q.push_back(c_start(t) + j);
    for (long long u = 0; u < suffix_ones * nsuffix[static_cast<std::size_t>(t)]; ++u)
      pool.push_back(mcx0 + static_cast<int>(pool_cursor++));
    detail::PatternWrite suf = detail::pattern_write(
        base_width, suffixes[static_cast<std::size_t>(t)], pattern_q, position_q, pool);
    weak_stage.append(suf.write);
    weak_stage.append(suf.restore);
  }

  // Stage "working": q_j ^= XOR over split positions of C<i>[j]; only the live
  // position's row is nonzero, so the working register receives x.
  Circuit work_stage(base_width);
  for (int j = 0; j < n; ++j) {
    std::vector<int> sources;
    for (int t = 0; t < nseg; ++t) sources.push_back(c_start(t) + j);
    detail::append_accumulate(work_stage, j, sources);
  }

  // Stage "restore_c": C<i>[j] ^= q_j & D[i]; only the live position has
  // D[i] = 1, and there C<i> holds exactly x, so every C row is cleared.
  Circuit restore_c(base_width);
  for (int t = 0; t < nseg; ++t)
    for (int j = 0; j < n; ++j)
      restore_c.append(Gate::toffoli(j, d0 + t, c_start(t) + j));

  // Stages "copies" + "check", recorded as one block so the "uncompute" stage
  // can replay its exact inverse after the branches.
  Circuit copy_block(base_width);
  for (int j = 0; j < n; ++j) {
    std::vector<int> targets;
    for (int t = 0; t < nseg; ++t) targets.push_back(wc0 + t * n + j);
    copy_block.append(fan_out(j, targets));
  }
  Circuit check_block(base_width);
  for (int t = 0; t < nseg; ++t) {
    std::vector<int> counted;
    for (int j = 0; j < lo + t; ++j) counted.push_back(wc0 + t * n + j);
    check_block.append(Gate::hwc(prefix_ones, counted, {}, e0 + t));
  }
  std::vector<int> e_all;
  for (int t = 0; t < nseg; ++t) e_all.push_back(e0 + t);
  check_block.append(Gate::hwc(1, e_all, {}, qstar));

  // Stage "branch1" (qstar = 1): E is one-hot at the live split position, so
  // XOR-ing E into D clears D.
  Circuit branch1(base_width);
  for (int t = 0; t < nseg; ++t) branch1.append(Gate::cnot(e0 + t, d0 + t));
  const Circuit branch1_gated = controlled(branch1, qstar);

  // Stage "branch0" (qstar = 0): E holds a run of at least two ones starting
  // at the live split position. Prefix weight-1 checks over copies of E light
  // exactly the run's first position into F, F -> D clears D, and the copies
  // and checks are undone.
  Circuit e_copy(base_width);
  for (int r = 0; r < nseg; ++r) {
    std::vector<int> targets;
    for (int t = 0; t < nseg; ++t) targets.push_back(ec0 + t * nseg + r);
    e_copy.append(fan_out(e0 + r, targets));
  }
  Circuit f_checks(base_width);
  for (int t = 0; t < nseg; ++t) {
    std::vector<int> counted;
    for (int r = 0; r <= t; ++r) counted.push_back(ec0 + t * nseg + r);
    f_checks.append(Gate::hwc(1, counted, {}, f0 + t));
  }
  Circuit branch0(base_width);
  branch0.append(e_copy);
  branch0.append(f_checks);
  for (int t = 0; t < nseg; ++t) branch0.append(Gate::cnot(f0 + t, d0 + t));
  branch0.append(f_checks.inverse());
  branch0.append(e_copy.inverse());
  const Circuit branch0_controlled = controlled(branch0, qstar);

  // The controlled branches fan the qstar control out over parallel layers;
  // their copy qubits sit past the named registers and form one more scratch
  // pool.
  const int full_width = std::max({base_width, branch1_gated.num_qubits(),
                                   branch0_controlled.num_qubits()});
  add("ctrl_copies", full_width - base_width);

  Circuit circ(layout.num_qubits);
  circ.append(unary_encode(weights, a_qubits).staged("unary"));
  circ.append(split_stage.staged("split"));
  circ.append(restore_a.staged("restore_a"));
  circ.append(weak_stage.staged("weak"));
  circ.append(work_stage.staged("working"));
  circ.append(restore_c.staged("restore_c"));
  circ.append(copy_block.staged("copies"));
  circ.append(check_block.staged("check"));
  circ.append(branch1_gated.staged("branch1"));
  Circuit branch0_gated(full_width);
  branch0_gated.append(Gate::x(qstar));
  branch0_gated.append(branch0_controlled);
  branch0_gated.append(Gate::x(qstar));
  circ.append(branch0_gated.staged("branch0"));

  // Stage "uncompute": undo "check" then "copies"; E, qstar, and the working
  // copies all still hold their computed values, so the inverse returns them
  // to |0>.
  Circuit recorded(base_width);
  recorded.append(copy_block);
  recorded.append(check_block);
  circ.append(recorded.inverse().staged("uncompute"));

  return {std::move(circ), std::move(layout)};
}

}  // namespace hwprep
