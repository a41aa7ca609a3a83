// End-to-end tests of the command-line binary: synth/verify/bench round
// trips, exit codes, and byte-determinism of the written artifacts.
#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hwprep/circuit_text.hpp"
#include "hwprep/hwp_prep.hpp"
#include "hwprep/io.hpp"
#include "hwprep/sparse_sim.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kBinary = HWPREP_CLI_PATH;

fs::path sandbox() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() /
                 ("hwprep-cli-" + std::to_string(static_cast<long>(::getpid())));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

struct RunResult {
  int code = -1;
  std::string out;
};

RunResult run(const std::string& args) {
  const fs::path capture = sandbox() / "stdout.txt";
  const std::string cmd =
      kBinary + " " + args + " > " + capture.string() + " 2> /dev/null";
  const int raw = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  std::ifstream in(capture);
  std::ostringstream buf;
  buf << in.rdbuf();
  r.out = buf.str();
  return r;
}

std::string path_of(const std::string& name) { return (sandbox() / name).string(); }

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
  REQUIRE(out.good());
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

double printed_fidelity(const std::string& out) {
  REQUIRE(out.rfind("fidelity ", 0) == 0);
  return std::stod(out.substr(9));
}

}  // namespace

TEST_CASE("synth graph writes the circuit, the layout sidecar, and a summary") {
  const std::string input = path_of("worked.graph");
  {
    std::ofstream out(input);
    hwprep::write_graph(out, testutil::eq3_graph());
  }
  const std::string circ = path_of("worked.circuit");
  const RunResult synth = run("synth graph " + input + " --out " + circ);
  REQUIRE(synth.code == 0);
  REQUIRE(synth.out.find("qubits ") != std::string::npos);
  REQUIRE(synth.out.find("ancillas ") != std::string::npos);
  REQUIRE(synth.out.find("depth ") != std::string::npos);
  REQUIRE(synth.out.find("size ") != std::string::npos);

  const std::string text = read_file(circ);
  REQUIRE(text.find("# stage: unary") != std::string::npos);
  REQUIRE(text.find("# stage: cnot") != std::string::npos);
  REQUIRE(text.find("# stage: toffoli") != std::string::npos);
  const hwprep::Circuit parsed = hwprep::parse_text(text);

  const std::string sidecar = read_file(circ + ".layout.json");
  REQUIRE(sidecar.find("\"working\"") != std::string::npos);
  REQUIRE(sidecar.find("\"qubits\": " + std::to_string(parsed.num_qubits())) !=
          std::string::npos);

  const RunResult verify = run("verify " + circ + " " + input);
  REQUIRE(verify.code == 0);
  REQUIRE(verify.out.rfind("fidelity 1.000000000000\n", 0) == 0);
  REQUIRE(verify.out.find("residue 0\n") != std::string::npos);
  REQUIRE(verify.out.find("support 6\n") != std::string::npos);
}

TEST_CASE("synth tree handles the two-vertex tree and round-trips verify") {
  const std::string input = path_of("two.tree");
  write_file(input, "graph 2 1\nroot 1\n1 2 0.8\n");
  const std::string circ = path_of("two.circuit");
  REQUIRE(run("synth tree " + input + " --out " + circ).code == 0);

  const hwprep::Circuit parsed = hwprep::parse_text(read_file(circ));
  REQUIRE(parsed.gates().size() == 2);
  hwprep::SparseState s(parsed.num_qubits());
  s.apply(parsed);
  REQUIRE(s.support_size() == 1);
  REQUIRE(s.amplitude_of({0, 1}) == Catch::Approx(1.0));

  REQUIRE(run("verify " + circ + " " + input).code == 0);
}

TEST_CASE("synth covers grid and weight-preserving kinds end to end") {
  const std::string grid = path_of("small.grid");
  write_file(grid,
             "grid 2 3\nh 1 1 0.5\nh 1 2 0.7\nh 2 1 0.9\nh 2 2 1.1\n"
             "v 1 1 1.3\nv 1 2 0.4\nv 1 3 0.6\n");
  REQUIRE(run("synth grid " + grid + " --out " + path_of("small.circuit")).code == 0);
  REQUIRE(run("verify " + path_of("small.circuit") + " " + grid).code == 0);

  const std::string table = path_of("table.hwp");
  write_file(table, "hwp 6 2\n110000 0.5\n011000 -0.25\n000011 1.0\n");
  REQUIRE(run("synth hwp " + table + " --out " + path_of("full.circuit")).code == 0);
  const RunResult verify_full = run("verify " + path_of("full.circuit") + " " + table);
  REQUIRE(verify_full.code == 0);
  REQUIRE(verify_full.out.find("support 3\n") != std::string::npos);

  REQUIRE(run("synth hwp-weak " + table + " --out " + path_of("weak.circuit")).code == 0);
  REQUIRE(run("verify " + path_of("weak.circuit") + " " + table).code == 0);
}

TEST_CASE("odd target weights need the explicit flag") {
  const std::string table = path_of("odd.hwp");
  write_file(table, "hwp 6 3\n111000 0.5\n000111 0.5\n101010 -0.3\n");
  REQUIRE(run("synth hwp " + table).code == 2);
  const std::string circ = path_of("odd.circuit");
  REQUIRE(run("synth hwp " + table + " --odd-k --out " + circ).code == 0);
  REQUIRE(run("verify " + circ + " " + table).code == 0);
}

TEST_CASE("synth output is byte-identical across repeated seeded runs") {
  auto gen = testutil::rng(1);
  std::ostringstream table;
  table << "hwp 6 2\n";
  int terms = 0;
  for (const std::string& bits : hwprep::detail::weight_strings(6, 2))
    if (testutil::coin(gen)) {
      table << bits << " " << testutil::uniform_real(gen, -1.0, 1.0) << "\n";
      ++terms;
    }
  if (terms == 0) table << "110000 0.5\n";
  const std::string input = path_of("random.hwp");
  write_file(input, table.str());

  const std::string a = path_of("run_a.circuit");
  const std::string b = path_of("run_b.circuit");
  REQUIRE(run("synth hwp " + input + " --seed 1 --out " + a).code == 0);
  REQUIRE(run("synth hwp " + input + " --seed 1 --out " + b).code == 0);
  REQUIRE(read_file(a) == read_file(b));
  REQUIRE(read_file(a + ".layout.json") == read_file(b + ".layout.json"));
  REQUIRE(!read_file(a).empty());
}

TEST_CASE("verify rejects a corrupted rotation with exit one") {
  const std::string input = path_of("corrupt.graph");
  {
    std::ofstream out(input);
    hwprep::write_graph(out, testutil::eq3_graph());
  }
  const std::string circ = path_of("corrupt.circuit");
  REQUIRE(run("synth graph " + input + " --out " + circ).code == 0);

  hwprep::Circuit parsed = hwprep::parse_text(read_file(circ));
  hwprep::Circuit bumped(parsed.num_qubits());
  bool done = false;
  for (hwprep::Gate g : parsed.gates()) {
    if (!done && g.kind == hwprep::GateKind::Rbs) {
      g.angle += 0.01;
      done = true;
    }
    bumped.append(std::move(g));
  }
  REQUIRE(done);
  hwprep::write_circuit_file(bumped, circ);

  const RunResult verify = run("verify " + circ + " " + input);
  REQUIRE(verify.code == 1);
  REQUIRE(printed_fidelity(verify.out) < 1.0 - 1e-9);
  REQUIRE(printed_fidelity(verify.out) > 0.9);  // small perturbation, small dent
}

TEST_CASE("parse failures and missing files exit with code two") {
  const std::string bad = path_of("bad.graph");
  write_file(bad, "graph 3 oops\n");
  REQUIRE(run("synth graph " + bad).code == 2);
  REQUIRE(run("synth graph " + path_of("does-not-exist")).code == 2);
  REQUIRE(run("verify " + path_of("does-not-exist") + " " + bad).code == 2);
  REQUIRE(run("synth").code == 2);           // missing arguments
  REQUIRE(run("synth carnival " + bad).code == 2);  // unknown kind
}

TEST_CASE("budget limits exit with code three") {
  const std::string table = path_of("budget.hwp");
  write_file(table, "hwp 6 2\n110000 0.5\n000011 1.0\n");
  REQUIRE(run("synth hwp " + table + " --max-support 2").code == 3);
  REQUIRE(run("synth hwp " + table + " --max-ancillas 5").code == 3);
}

TEST_CASE("bench writes a CSV with fitted constants, deterministically") {
  const std::string csv = path_of("chain.csv");
  const RunResult bench = run("bench chain 8 16 32 --seed 4 --out " + csv);
  REQUIRE(bench.code == 0);
  REQUIRE(bench.out.find("rows 3") != std::string::npos);
  const std::string content = read_file(csv);
  REQUIRE(content.rfind("family,x,k,depth,size,ancillas\n", 0) == 0);
  REQUIRE(content.find("chain,8,0,") != std::string::npos);
  REQUIRE(content.find("# fit a=") != std::string::npos);

  const std::string csv2 = path_of("graph_a.csv");
  const std::string csv3 = path_of("graph_b.csv");
  REQUIRE(run("bench graph 8 16 --seed 9 --out " + csv2).code == 0);
  REQUIRE(run("bench graph 8 16 --seed 9 --out " + csv3).code == 0);
  REQUIRE(read_file(csv2) == read_file(csv3));
}

TEST_CASE("bench tree emits side-by-side naive and optimized depths") {
  const std::string csv = path_of("tree.csv");
  REQUIRE(run("bench tree 8 16 32 64 --seed 4 --out " + csv).code == 0);
  std::istringstream in(read_file(csv));
  std::string line;
  REQUIRE(std::getline(in, line));
  REQUIRE(line == "x,depth_naive,depth_optimized");
  long long x = 0;
  int naive = 0, optimized = 0;
  bool saw64 = false;
  while (std::getline(in, line) && line[0] != '#') {
    char comma = 0;
    std::istringstream row(line);
    row >> x >> comma >> naive >> comma >> optimized;
    REQUIRE(naive >= x - 1);  // serial construction scales linearly
    if (x == 64) {
      saw64 = true;
      REQUIRE(optimized < naive);  // rebalancing wins from this size on
    }
  }
  REQUIRE(saw64);
}

TEST_CASE("bench exit codes cover empty grids, bad families, and budgets") {
  REQUIRE(run("bench hwp").code == 2);
  REQUIRE(run("bench moebius 8").code == 2);
  REQUIRE(run("bench chain 8000000").code == 3);
}
