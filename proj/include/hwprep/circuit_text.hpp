#pragma once

// Text serialization of circuits: one gate per line after a `qubits N` header.
// Angles print with 17 significant digits so doubles round-trip bit-exactly.
// Stage metadata travels in `# stage: <tag>` marker lines that apply to all
// following gates until the next marker.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "hwprep/circuit.hpp"
#include "hwprep/errors.hpp"

namespace hwprep {

namespace detail {

inline std::string format_angle(double a) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", a);
  return buf;
}

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

inline int parse_int(const std::string& tok, int line) {
  try {
    std::size_t pos = 0;
    int v = std::stoi(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError(line, "expected an integer, got '" + tok + "'");
  }
}

inline double parse_double(const std::string& tok, int line) {
  try {
    std::size_t pos = 0;
    double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError(line, "expected a number, got '" + tok + "'");
  }
}

}  // namespace detail

inline std::string emit_text(const Circuit& c) {
  std::ostringstream out;
  out << "qubits " << c.num_qubits() << "\n";
  std::string current_stage;
  for (const Gate& g : c.gates()) {
    if (g.stage != current_stage) {
      out << "# stage: " << g.stage << "\n";
      current_stage = g.stage;
    }
    const std::size_t nc = g.controls.size();
    switch (g.kind) {
      case GateKind::X:
        if (nc == 0)
          out << "x " << g.targets[0];
        else if (nc == 1)
          out << "cnot " << g.controls[0] << ' ' << g.targets[0];
        else if (nc == 2)
          out << "toffoli " << g.controls[0] << ' ' << g.controls[1] << ' ' << g.targets[0];
        else {
          out << "mcx";
          for (int q : g.controls) out << ' ' << q;
          out << ' ' << g.targets[0];
        }
        break;
      case GateKind::H:
        if (nc == 0)
          out << "h " << g.targets[0];
        else if (nc == 1)
          out << "ch " << g.controls[0] << ' ' << g.targets[0];
        else
          throw Error("no text mnemonic for H with more than one control");
        break;
      case GateKind::Ry:
        if (nc == 0)
          out << "ry " << g.targets[0] << ' ' << detail::format_angle(g.angle);
        else if (nc == 1)
          out << "cry " << g.controls[0] << ' ' << g.targets[0] << ' '
              << detail::format_angle(g.angle);
        else if (nc == 2)
          out << "ccry " << g.controls[0] << ' ' << g.controls[1] << ' ' << g.targets[0]
              << ' ' << detail::format_angle(g.angle);
        else
          throw Error("no text mnemonic for Ry with more than two controls");
        break;
      case GateKind::Phase:
        if (nc == 0)
          out << "phase " << g.targets[0] << ' ' << detail::format_angle(g.angle);
        else if (nc == 1)
          out << "cphase " << g.controls[0] << ' ' << g.targets[0] << ' '
              << detail::format_angle(g.angle);
        else
          throw Error("no text mnemonic for Phase with more than one control");
        break;
      case GateKind::Rbs:
        if (nc == 0)
          out << "rbs " << g.targets[0] << ' ' << g.targets[1] << ' '
              << detail::format_angle(g.angle);
        else if (nc == 1)
          out << "crbs " << g.controls[0] << ' ' << g.targets[0] << ' ' << g.targets[1]
              << ' ' << detail::format_angle(g.angle);
        else
          throw Error("no text mnemonic for a doubly-controlled two-target rotation");
        break;
      case GateKind::Hwc:
        out << "hwc " << g.weight << ' ' << g.counted.size();
        for (int q : g.counted) out << ' ' << q;
        out << ' ' << g.controls.size();
        for (int q : g.controls) out << ' ' << q;
        out << ' ' << g.targets[0];
        break;
    }
    out << "\n";
  }
  return out.str();
}

inline Circuit parse_text(const std::string& text) {
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  bool have_header = false;
  Circuit circuit;
  std::string stage;

  auto expect_args = [](const std::vector<std::string>& toks, std::size_t n, int line) {
    if (toks.size() != n + 1)
      throw ParseError(line, "'" + toks[0] + "' expects " + std::to_string(n) +
                                 " arguments, got " + std::to_string(toks.size() - 1));
  };

  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = detail::trim(raw);
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string marker = "# stage:";
      if (line.compare(0, marker.size(), marker) == 0)
        stage = detail::trim(line.substr(marker.size()));
      continue;
    }
    std::vector<std::string> toks = detail::split_ws(line);
    if (!have_header) {
      if (toks[0] != "qubits" || toks.size() != 2)
        throw ParseError(line_no, "expected 'qubits N' header");
      int n = detail::parse_int(toks[1], line_no);
      if (n < 0) throw ParseError(line_no, "negative qubit count");
      circuit = Circuit(n);
      have_header = true;
      continue;
    }

    Gate g;
    const std::string& op = toks[0];
    try {
      if (op == "x") {
        expect_args(toks, 1, line_no);
        g = Gate::x(detail::parse_int(toks[1], line_no));
      } else if (op == "cnot") {
        expect_args(toks, 2, line_no);
        g = Gate::cnot(detail::parse_int(toks[1], line_no),
                       detail::parse_int(toks[2], line_no));
      } else if (op == "toffoli") {
        expect_args(toks, 3, line_no);
        g = Gate::toffoli(detail::parse_int(toks[1], line_no),
                          detail::parse_int(toks[2], line_no),
                          detail::parse_int(toks[3], line_no));
      } else if (op == "mcx") {
        if (toks.size() < 5)
          throw ParseError(line_no, "'mcx' expects at least 3 controls and a target");
        std::vector<int> cs;
        for (std::size_t i = 1; i + 1 < toks.size(); ++i)
          cs.push_back(detail::parse_int(toks[i], line_no));
        g = Gate::mcx(std::move(cs), detail::parse_int(toks.back(), line_no));
      } else if (op == "h") {
        expect_args(toks, 1, line_no);
        g = Gate::h(detail::parse_int(toks[1], line_no));
      } else if (op == "ch") {
        expect_args(toks, 2, line_no);
        g = Gate::h(detail::parse_int(toks[2], line_no));
        g.controls = {detail::parse_int(toks[1], line_no)};
      } else if (op == "ry") {
        expect_args(toks, 2, line_no);
        g = Gate::ry(detail::parse_int(toks[1], line_no),
                     detail::parse_double(toks[2], line_no));
      } else if (op == "cry") {
        expect_args(toks, 3, line_no);
        g = Gate::cry(detail::parse_int(toks[1], line_no),
                      detail::parse_int(toks[2], line_no),
                      detail::parse_double(toks[3], line_no));
      } else if (op == "ccry") {
        expect_args(toks, 4, line_no);
        g = Gate::ccry(detail::parse_int(toks[1], line_no),
                       detail::parse_int(toks[2], line_no),
                       detail::parse_int(toks[3], line_no),
                       detail::parse_double(toks[4], line_no));
      } else if (op == "phase") {
        expect_args(toks, 2, line_no);
        g = Gate::phase(detail::parse_int(toks[1], line_no),
                        detail::parse_double(toks[2], line_no));
      } else if (op == "cphase") {
        expect_args(toks, 3, line_no);
        g = Gate::phase(detail::parse_int(toks[2], line_no),
                        detail::parse_double(toks[3], line_no));
        g.controls = {detail::parse_int(toks[1], line_no)};
      } else if (op == "rbs") {
        expect_args(toks, 3, line_no);
        g = Gate::rbs(detail::parse_int(toks[1], line_no),
                      detail::parse_int(toks[2], line_no),
                      detail::parse_double(toks[3], line_no));
      } else if (op == "crbs") {
        expect_args(toks, 4, line_no);
        g = Gate::crbs(detail::parse_int(toks[1], line_no),
                       detail::parse_int(toks[2], line_no),
                       detail::parse_int(toks[3], line_no),
                       detail::parse_double(toks[4], line_no));
      } else if (op == "hwc") {
        std::size_t at = 1;
        auto next = [&]() -> const std::string& {
          if (at >= toks.size()) throw ParseError(line_no, "'hwc' line truncated");
          return toks[at++];
        };
        int w = detail::parse_int(next(), line_no);
        int n_counted = detail::parse_int(next(), line_no);
        std::vector<int> counted;
        for (int i = 0; i < n_counted; ++i)
          counted.push_back(detail::parse_int(next(), line_no));
        int n_extra = detail::parse_int(next(), line_no);
        std::vector<int> extra;
        for (int i = 0; i < n_extra; ++i)
          extra.push_back(detail::parse_int(next(), line_no));
        int target = detail::parse_int(next(), line_no);
        if (at != toks.size()) throw ParseError(line_no, "trailing tokens on 'hwc' line");
        g = Gate::hwc(w, std::move(counted), std::move(extra), target);
      } else {
        throw ParseError(line_no, "unknown gate '" + op + "'");
      }
      g.stage = stage;
      circuit.append(std::move(g));
    } catch (const InvariantError& e) {
      throw ParseError(line_no, e.what());
    }
  }
  if (!have_header) throw ParseError(line_no == 0 ? 1 : line_no, "missing 'qubits N' header");
  return circuit;
}

inline void write_circuit_file(const Circuit& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << emit_text(c);
  if (!out) throw Error("failed writing '" + path + "'");
}

inline Circuit read_circuit_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_text(buf.str());
}

}  // namespace hwprep
