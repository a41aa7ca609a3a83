// Command-line front end: synthesize preparation circuits from text inputs,
// verify circuit files against their targets with the sparse simulator, and
// benchmark the synthesis families into CSV reports.
//
// Exit codes: 0 success (verify: target reached), 1 verification failure,
// 2 bad input (parse/domain errors), 3 budget exceeded, 4 internal invariant
// failure.
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hwprep/analysis.hpp"
#include "hwprep/circuit.hpp"
#include "hwprep/circuit_text.hpp"
#include "hwprep/errors.hpp"
#include "hwprep/graph_prep.hpp"
#include "hwprep/hwp_prep.hpp"
#include "hwprep/io.hpp"
#include "hwprep/sparse_sim.hpp"

namespace {

using hwprep::Circuit;
using hwprep::RegisterLayout;
using hwprep::SparseState;

struct SynthConfig {
  std::string kind;
  std::string input;
  std::string out;
  std::uint64_t seed = 0;
  long long max_ancillas = 1'000'000;
  long long max_support = 1000;
  bool optimize_tree = false;
  bool odd_k = false;
};

struct VerifyConfig {
  std::string circuit;
  std::string target;
  double tolerance = 1e-9;
};

struct BenchConfig {
  std::string family;
  std::vector<long long> points;
  std::string out;
  std::uint64_t seed = 0;
  long long budget = 4'000'000;
};

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw hwprep::Error("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw hwprep::Error("failed writing '" + path + "'");
}

std::string layout_json(const RegisterLayout& layout, int working) {
  nlohmann::json doc;
  doc["qubits"] = layout.num_qubits;
  doc["working"] = working;
  doc["registers"] = nlohmann::json::array();
  for (const hwprep::RegisterRange& r : layout.ranges)
    doc["registers"].push_back({{"name", r.name}, {"start", r.start}, {"size", r.size}});
  return doc.dump(2) + "\n";
}

int cmd_synth(const SynthConfig& cfg) {
  Circuit circuit;
  RegisterLayout layout;
  int working = 0;
  if (cfg.kind == "graph") {
    const hwprep::WeightedGraph g = hwprep::read_graph_file(cfg.input);
    auto [c, l] = hwprep::prepare_general(g);
    circuit = std::move(c);
    layout = std::move(l);
    working = g.n;
  } else if (cfg.kind == "tree") {
    const hwprep::TreeGraph t = hwprep::read_tree_file(cfg.input);
    circuit = hwprep::prepare_tree(t, cfg.optimize_tree);
    working = t.graph.n;
    layout.add("working", 0, working);
  } else if (cfg.kind == "grid") {
    const hwprep::GridGraph g = hwprep::read_grid_file(cfg.input);
    circuit = hwprep::prepare_grid(g);
    working = g.s * g.t;
    layout.add("working", 0, working);
  } else if (cfg.kind == "hwp") {
    const hwprep::HwpSpec spec = hwprep::read_hwp_file(cfg.input);
    auto [c, l] = hwprep::prepare_full(spec, cfg.max_support, cfg.odd_k);
    circuit = std::move(c);
    layout = std::move(l);
    working = spec.n;
  } else {  // hwp-weak
    const hwprep::HwpSpec spec = hwprep::read_hwp_file(cfg.input);
    auto [c, l] = hwprep::prepare_weak(spec, cfg.max_support);
    circuit = std::move(c);
    layout = std::move(l);
    working = spec.n;
  }

  const int width = std::max(circuit.num_qubits(), layout.num_qubits);
  const long long ancillas = width - working;
  if (ancillas > cfg.max_ancillas)
    throw hwprep::BudgetError("synthesis needs " + std::to_string(ancillas) +
                              " ancillas, over the limit of " +
                              std::to_string(cfg.max_ancillas));

  const std::string out = cfg.out.empty() ? cfg.input + ".circuit" : cfg.out;
  write_text_file(out, hwprep::emit_text(circuit));
  write_text_file(out + ".layout.json", layout_json(layout, working));

  std::printf("qubits %d\n", width);
  std::printf("ancillas %lld\n", ancillas);
  std::printf("depth %d\n", circuit.depth());
  std::printf("size %lld\n", static_cast<long long>(circuit.raw_gate_count()));
  return 0;
}

// First token of the first non-comment line decides how a target file is read.
std::string sniff_header(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw hwprep::Error("cannot open '" + path + "'");
  std::string raw;
  while (std::getline(in, raw)) {
    const std::string line = hwprep::detail::trim(raw);
    if (line.empty() || line[0] == '#') continue;
    return hwprep::detail::split_ws(line)[0];
  }
  throw hwprep::Error("no target description in '" + path + "'");
}

SparseState widen(const SparseState& s, int num_qubits) {
  if (s.num_qubits() == num_qubits) return s;
  SparseState::TermMap terms;
  for (const auto& [key, amp] : s.terms()) {
    hwprep::BasisKey wide(num_qubits);
    for (int q = 0; q < s.num_qubits(); ++q)
      if (key.get(q)) wide.set(q, true);
    terms.emplace(std::move(wide), amp);
  }
  return SparseState::from_terms(num_qubits, std::move(terms));
}

int cmd_verify(const VerifyConfig& cfg) {
  const std::string header = sniff_header(cfg.target);
  SparseState target;
  if (header == "graph") {
    // covers plain graphs and trees; both prepare the same edge-weight state
    target = hwprep::target_graph_state(hwprep::read_tree_file(cfg.target).graph);
  } else if (header == "grid") {
    target = hwprep::target_graph_state(hwprep::read_grid_file(cfg.target).to_graph());
  } else if (header == "hwp") {
    target = hwprep::target_hwp_state(hwprep::read_hwp_file(cfg.target));
  } else {
    throw hwprep::Error("unrecognized target header '" + header + "'");
  }
  const int working = target.num_qubits();

  const Circuit circuit = hwprep::read_circuit_file(cfg.circuit);
  SparseState state(circuit.num_qubits());
  state.apply(circuit);

  const int width = std::max(state.num_qubits(), working);
  const SparseState wide_state = widen(state, width);
  const double fid = hwprep::fidelity(wide_state, widen(target, width));
  const double residue = hwprep::ancilla_residue(wide_state, working);

  std::printf("fidelity %.12f\n", fid);
  std::printf("residue %.17g\n", residue);
  std::printf("support %d\n", state.support_size());
  return (fid >= 1.0 - cfg.tolerance && residue < cfg.tolerance) ? 0 : 1;
}

std::string fit_comment(const std::string& label, const hwprep::LineFit& fit) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "# fit%s%s a=%.17g b=%.17g max_residual=%.17g\n",
                label.empty() ? "" : " ", label.c_str(), fit.a, fit.b,
                fit.max_residual);
  return buf;
}

int cmd_bench(const BenchConfig& cfg) {
  if (cfg.points.empty()) {
    std::cerr << "error: bench needs at least one grid point\n";
    return 2;
  }
  std::string content;
  std::string summary;
  if (cfg.family == "tree") {
    // Both modes side by side, the point of the comparison.
    const hwprep::ScalingReport naive =
        hwprep::scaling_run("tree-naive", cfg.points, cfg.seed, cfg.budget);
    const hwprep::ScalingReport opt =
        hwprep::scaling_run("tree", cfg.points, cfg.seed, cfg.budget);
    std::ostringstream out;
    out << "x,depth_naive,depth_optimized\n";
    for (std::size_t i = 0; i < opt.rows.size(); ++i)
      out << opt.rows[i].x << ',' << naive.rows[i].depth << ',' << opt.rows[i].depth
          << '\n';
    out << fit_comment("naive", naive.fit) << fit_comment("optimized", opt.fit);
    content = out.str();
    summary = "rows " + std::to_string(opt.rows.size()) + "\n" +
              fit_comment("naive", naive.fit) + fit_comment("optimized", opt.fit);
  } else {
    const hwprep::ScalingReport report =
        hwprep::scaling_run(cfg.family, cfg.points, cfg.seed, cfg.budget);
    content = report.csv() + fit_comment("", report.fit);
    summary = "rows " + std::to_string(report.rows.size()) + "\n" +
              fit_comment("", report.fit);
  }
  if (cfg.out.empty()) {
    std::cout << content;
  } else {
    write_text_file(cfg.out, content);
    std::cout << summary;
  }
  return 0;
}

template <typename F>
int run_guarded(F&& body) {
  try {
    return body();
  } catch (const hwprep::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const hwprep::BudgetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const hwprep::InvariantError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  } catch (const hwprep::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Log-depth synthesis of graph-structured and weight-preserving states"};
  app.require_subcommand(1);

  SynthConfig sc;
  CLI::App* synth = app.add_subcommand(
      "synth", "Synthesize a preparation circuit from an input description");
  synth->add_option("kind", sc.kind, "Input kind")
      ->required()
      ->check(CLI::IsMember({"graph", "tree", "grid", "hwp", "hwp-weak"}));
  synth->add_option("input", sc.input, "Input description file")->required();
  synth->add_option("--out", sc.out,
                    "Circuit file to write (default: <input>.circuit); the register "
                    "layout lands beside it as <out>.layout.json");
  synth->add_option("--seed", sc.seed,
                    "Reproducibility seed (synthesis is input-deterministic)");
  synth->add_option("--max-ancillas", sc.max_ancillas, "Ancilla budget")
      ->check(CLI::PositiveNumber);
  synth->add_option("--max-support", sc.max_support,
                    "Budget on the fixed-weight basis size for hwp kinds")
      ->check(CLI::PositiveNumber);
  synth->add_flag("--optimize-tree", sc.optimize_tree,
                  "Rebalance the tree preparation's CNOT stage to logarithmic depth");
  synth->add_flag("--odd-k", sc.odd_k,
                  "Allow odd target weights in the full preparation");

  VerifyConfig vc;
  CLI::App* verify = app.add_subcommand(
      "verify", "Simulate a circuit file and compare it against a target description");
  verify->add_option("circuit", vc.circuit, "Circuit text file")->required();
  verify->add_option("target", vc.target, "Target description (graph/tree/grid/hwp)")
      ->required();
  verify->add_option("--tolerance", vc.tolerance,
                     "Pass when fidelity >= 1 - tolerance and residue < tolerance")
      ->check(CLI::Range(1e-300, 1.0));

  BenchConfig bc;
  CLI::App* bench = app.add_subcommand(
      "bench", "Run a synthesis family over a parameter grid and report CSV");
  bench->add_option("family", bc.family, "chain|fan_in|unary|graph|tree|grid|hwp")
      ->required();
  bench->add_option("points", bc.points, "Instance sizes");
  bench->add_option("--out", bc.out, "CSV file to write (default: standard output)");
  bench->add_option("--seed", bc.seed, "Instance-generation seed");
  bench->add_option("--budget", bc.budget, "Instance size budget")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  return run_guarded([&]() {
    if (synth->parsed()) return cmd_synth(sc);
    if (verify->parsed()) return cmd_verify(vc);
    return cmd_bench(bc);
  });
}
