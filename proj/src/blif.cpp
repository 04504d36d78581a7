// SPDX-License-Identifier: Apache-2.0
#include "redact/blif.hpp"

#include <fstream>
#include <sstream>

namespace redact {

namespace {

struct Line {
  int number;  // 1-based, of the first physical line
  std::vector<std::string> tokens;
};

std::vector<Line> tokenize(const std::string& text) {
  std::vector<Line> lines;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  std::string pending;
  int pending_start = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (auto hash = raw.find('#'); hash != std::string::npos)
      raw.erase(hash);
    while (!raw.empty() && (raw.back() == '\r' || raw.back() == ' ' || raw.back() == '\t'))
      raw.pop_back();
    bool cont = !raw.empty() && raw.back() == '\\';
    if (cont) raw.pop_back();
    if (pending.empty()) pending_start = lineno;
    pending += raw;
    pending += ' ';
    if (cont) continue;
    std::istringstream ts(pending);
    Line l{pending_start, {}};
    std::string tok;
    while (ts >> tok) l.tokens.push_back(tok);
    if (!l.tokens.empty()) lines.push_back(std::move(l));
    pending.clear();
  }
  if (!pending.empty()) throw ParseError(lineno, "dangling line continuation");
  return lines;
}

struct NamesBlock {
  int line;
  std::vector<std::string> signals;  // inputs..., output last
  std::vector<std::pair<std::string, char>> cover;  // input plane, output char
};

struct LatchBlock {
  int line;
  std::string input, output, clock;
  uint8_t init;
};

}  // namespace

Netlist parse_blif(const std::string& text) {
  auto lines = tokenize(text);

  std::string model_name = "top";
  std::vector<std::string> input_ports, output_ports;
  std::vector<NamesBlock> names;
  std::vector<LatchBlock> latches;
  bool saw_model = false, saw_end = false;

  size_t i = 0;
  while (i < lines.size()) {
    const Line& l = lines[i];
    const std::string& head = l.tokens[0];
    if (head[0] != '.')
      throw ParseError(l.number, "cover line outside .names block");
    if (head == ".model") {
      if (saw_model) throw ParseError(l.number, "duplicate .model");
      if (l.tokens.size() != 2) throw ParseError(l.number, ".model expects a name");
      model_name = l.tokens[1];
      saw_model = true;
      ++i;
    } else if (head == ".inputs") {
      input_ports.insert(input_ports.end(), l.tokens.begin() + 1, l.tokens.end());
      ++i;
    } else if (head == ".outputs") {
      output_ports.insert(output_ports.end(), l.tokens.begin() + 1, l.tokens.end());
      ++i;
    } else if (head == ".names") {
      if (l.tokens.size() < 2)
        throw ParseError(l.number, ".names expects at least an output signal");
      NamesBlock nb{l.number, {l.tokens.begin() + 1, l.tokens.end()}, {}};
      if (nb.signals.size() - 1 > 16)
        throw ParseError(l.number, ".names with more than 16 inputs");
      ++i;
      while (i < lines.size() && lines[i].tokens[0][0] != '.') {
        const Line& cv = lines[i];
        size_t n_in = nb.signals.size() - 1;
        std::string plane;
        char out;
        if (n_in == 0) {
          if (cv.tokens.size() != 1 || cv.tokens[0].size() != 1)
            throw ParseError(cv.number, "constant cover expects a single 0/1");
          out = cv.tokens[0][0];
        } else {
          if (cv.tokens.size() != 2)
            throw ParseError(cv.number, "cover line expects input plane and output");
          plane = cv.tokens[0];
          if (cv.tokens[1].size() != 1)
            throw ParseError(cv.number, "cover output must be one character");
          out = cv.tokens[1][0];
          if (plane.size() != n_in)
            throw ParseError(cv.number, "cover plane width mismatch");
          for (char ch : plane)
            if (ch != '0' && ch != '1' && ch != '-')
              throw ParseError(cv.number, "cover plane characters must be 0/1/-");
        }
        if (out != '0' && out != '1')
          throw ParseError(cv.number, "cover output must be 0 or 1");
        nb.cover.emplace_back(plane, out);
        ++i;
      }
      names.push_back(std::move(nb));
    } else if (head == ".latch") {
      // .latch <input> <output> re <clock> [<init>]
      if (l.tokens.size() != 5 && l.tokens.size() != 6)
        throw ParseError(l.number, ".latch expects: input output re clock [init]");
      if (l.tokens[3] != "re")
        throw ParseError(l.number, "unsupported latch type '" + l.tokens[3] +
                                       "' (only re)");
      uint8_t init = 0;
      if (l.tokens.size() == 6) {
        if (l.tokens[5] == "0") init = 0;
        else if (l.tokens[5] == "1") init = 1;
        else
          throw ParseError(l.number, "unsupported latch init '" + l.tokens[5] + "'");
      }
      latches.push_back(LatchBlock{l.number, l.tokens[1], l.tokens[2],
                                   l.tokens[4], init});
      ++i;
    } else if (head == ".end") {
      saw_end = true;
      ++i;
      if (i != lines.size()) throw ParseError(lines[i].number, "content after .end");
    } else {
      throw ParseError(l.number, "unsupported directive '" + head + "'");
    }
  }
  if (!saw_model) throw ParseError(1, "missing .model");
  if (!saw_end) throw ParseError(lines.empty() ? 1 : lines.back().number,
                                 "missing .end");

  for (size_t a = 1; a < latches.size(); ++a)
    if (latches[a].clock != latches[0].clock)
      throw ParseError(latches[a].line, "latches must share a single clock");

  Netlist n;
  n.name = model_name;
  for (const auto& p : input_ports) n.add_input(p);

  int cell_seq = 0;
  for (const auto& nb : names) {
    const std::string& out_sig = nb.signals.back();
    size_t n_in = nb.signals.size() - 1;
    Cell c;
    c.name = "n" + std::to_string(cell_seq++) + "_" + out_sig;
    c.output = n.add_net(out_sig);
    if (n_in == 0) {
      bool value = !nb.cover.empty() && nb.cover[0].second == '1';
      if (nb.cover.size() > 1) throw ParseError(nb.line, "constant with several covers");
      c.kind = value ? CellKind::Const1 : CellKind::Const0;
      n.add_cell(std::move(c));
      continue;
    }
    char polarity = nb.cover.empty() ? '1' : nb.cover[0].second;
    for (const auto& [plane, out] : nb.cover)
      if (out != polarity)
        throw ParseError(nb.line, "mixed cover output polarity");
    c.kind = CellKind::Lut;
    for (size_t j = 0; j < n_in; ++j)
      c.inputs.push_back(n.add_net(nb.signals[j]));
    // Cube character position j corresponds to input pin j (LSB of the
    // truth-table index).
    size_t rows = size_t{1} << n_in;
    c.truth.assign(rows, polarity == '1' ? 0 : 1);
    for (size_t m = 0; m < rows; ++m) {
      for (const auto& [plane, out] : nb.cover) {
        bool match = true;
        for (size_t j = 0; j < n_in && match; ++j) {
          char ch = plane[j];
          bool bit = (m >> j) & 1;
          if ((ch == '0' && bit) || (ch == '1' && !bit)) match = false;
        }
        if (match) {
          c.truth[m] = polarity == '1' ? 1 : 0;
          break;
        }
      }
    }
    n.add_cell(std::move(c));
  }

  for (const auto& lb : latches) {
    Cell c;
    c.name = "ff" + std::to_string(cell_seq++) + "_" + lb.output;
    c.kind = CellKind::Dff;
    c.clock = kUserClk;
    c.init = lb.init;
    c.inputs.push_back(n.add_net(lb.input));
    c.output = n.add_net(lb.output);
    n.add_cell(std::move(c));
  }

  for (const auto& p : output_ports) {
    NetIdx idx = n.find_net(p);
    if (idx == kNoNet)
      throw ParseError(1, "undefined signal '" + p + "' in .outputs");
    n.add_output(idx);
  }

  // Every referenced signal must have a driver.
  auto drv = n.drivers();
  for (NetIdx i = 0; i < static_cast<NetIdx>(n.nets.size()); ++i)
    if (drv[i] == Netlist::kDriverNone)
      throw ParseError(1, "undefined signal reference '" + n.net_name(i) + "'");
  require_integrity(n, "parse_blif");
  return n;
}

Netlist parse_blif_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open BLIF file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_blif(ss.str());
}

}  // namespace redact
