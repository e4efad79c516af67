#pragma once

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ionchain/gates.hpp"

namespace ionchain {

struct GateTimes {
  double t1q = 10.0;
  double t2q = 200.0;
  double tPrep = 0.0;
  double tMeas = 0.0;

  double durationOf(const Gate& g) const {
    switch (g.op) {
      case Op::RX:
      case Op::RY:
      case Op::RZ:
      case Op::H:
        return t1q;
      case Op::XX:
      case Op::CNOT:
        return t2q;
      case Op::PrepZ:
        return tPrep;
      case Op::MeasZ:
        return tMeas;
    }
    return 0.0;
  }
};

struct Circuit {
  int nq = 0;
  std::vector<Gate> gates;

  void add(const Gate& g) {
    nq = std::max(nq, int(g.a) + 1);
    if (g.twoQubit()) nq = std::max(nq, int(g.b) + 1);
    gates.push_back(g);
  }
  void add(const std::vector<Gate>& gs) {
    for (const auto& g : gs) add(g);
  }
  void append(const Circuit& c) {
    nq = std::max(nq, c.nq);
    for (const auto& g : c.gates) gates.push_back(g);
  }
};

struct TimedGate {
  Gate g;
  double t0 = 0.0;
  double t1 = 0.0;
};

// Maximal gap on one qubit; `before` is the index of the gate whose start
// closes the gap, -1 for a trailing gap.
struct IdleInterval {
  int q = 0;
  double t0 = 0.0;
  double t1 = 0.0;
  int before = -1;

  double length() const { return t1 - t0; }
};

struct TimedCircuit {
  int nq = 0;
  std::vector<TimedGate> gates;
  std::vector<IdleInterval> idles;
  double totalDuration = 0.0;

  double busyTime(int q) const {
    double s = 0.0;
    for (const auto& tg : gates)
      if (tg.g.a == q || (tg.g.twoQubit() && tg.g.b == q)) s += tg.t1 - tg.t0;
    return s;
  }
  double idleTime(int q) const {
    double s = 0.0;
    for (const auto& iv : idles)
      if (iv.q == q) s += iv.length();
    return s;
  }
};

// ASAP schedule: single-qubit gates run in parallel on disjoint qubits, at
// most one XX gate is active at any instant, per-qubit gate order is kept.
inline TimedCircuit schedule(const Circuit& c, const GateTimes& times = {}) {
  TimedCircuit tc;
  tc.nq = c.nq;
  tc.gates.reserve(c.gates.size());
  std::vector<double> freeAt(c.nq, 0.0);
  double msFreeAt = 0.0;
  for (const auto& g : c.gates) {
    double t0 = freeAt[g.a];
    if (g.twoQubit()) t0 = std::max(t0, freeAt[g.b]);
    bool ms = (g.op == Op::XX || g.op == Op::CNOT);
    if (ms) t0 = std::max(t0, msFreeAt);
    double t1 = t0 + times.durationOf(g);
    freeAt[g.a] = t1;
    if (g.twoQubit()) freeAt[g.b] = t1;
    if (ms) msFreeAt = t1;
    tc.gates.push_back({g, t0, t1});
  }
  for (double t : freeAt) tc.totalDuration = std::max(tc.totalDuration, t);

  constexpr double eps = 1e-9;
  for (int q = 0; q < c.nq; ++q) {
    double cursor = 0.0;
    for (size_t i = 0; i < tc.gates.size(); ++i) {
      const auto& tg = tc.gates[i];
      if (tg.g.a != q && !(tg.g.twoQubit() && tg.g.b == q)) continue;
      if (tg.t0 > cursor + eps) tc.idles.push_back({q, cursor, tg.t0, int(i)});
      cursor = tg.t1;
    }
    if (tc.totalDuration > cursor + eps)
      tc.idles.push_back({q, cursor, tc.totalDuration, -1});
  }
  return tc;
}

inline const char* opName(Op op) {
  switch (op) {
    case Op::H: return "H";
    case Op::CNOT: return "CNOT";
    case Op::RX: return "RX";
    case Op::RY: return "RY";
    case Op::RZ: return "RZ";
    case Op::XX: return "XX";
    case Op::PrepZ: return "PREPZ";
    case Op::MeasZ: return "MEASZ";
  }
  return "?";
}

inline std::string toText(const Circuit& c) {
  std::string out;
  char line[64];
  for (const auto& g : c.gates) {
    switch (g.op) {
      case Op::RX:
      case Op::RY:
      case Op::RZ:
        std::snprintf(line, sizeof line, "%s q%d %d\n", opName(g.op), int(g.a), int(g.deg));
        break;
      case Op::XX:
        std::snprintf(line, sizeof line, "XX q%d q%d %d\n", int(g.a), int(g.b), int(g.deg));
        break;
      case Op::CNOT:
        std::snprintf(line, sizeof line, "CNOT q%d q%d\n", int(g.a), int(g.b));
        break;
      case Op::H:
      case Op::PrepZ:
      case Op::MeasZ:
        std::snprintf(line, sizeof line, "%s q%d\n", opName(g.op), int(g.a));
        break;
    }
    out += line;
  }
  return out;
}

inline int parseQubit(const std::string& tok) {
  if (tok.size() < 2 || (tok[0] != 'q' && tok[0] != 'Q'))
    throw std::runtime_error("bad qubit token: " + tok);
  return std::stoi(tok.substr(1));
}

inline Circuit parseCircuit(const std::string& text) {
  Circuit c;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string op;
    if (!(ls >> op)) continue;
    if (op[0] == '#') continue;
    for (auto& ch : op) ch = char(std::toupper(unsigned(ch)));
    std::string ta, tb;
    if (op == "RX" || op == "RY" || op == "RZ") {
      int deg;
      if (!(ls >> ta >> deg)) throw std::runtime_error("bad rotation line: " + line);
      Op o = op == "RX" ? Op::RX : op == "RY" ? Op::RY : Op::RZ;
      c.add({o, uint8_t(parseQubit(ta)), 0, int16_t(deg)});
    } else if (op == "XX") {
      int deg;
      if (!(ls >> ta >> tb >> deg)) throw std::runtime_error("bad XX line: " + line);
      c.add(Gate::xx(parseQubit(ta), parseQubit(tb), deg));
    } else if (op == "CNOT") {
      if (!(ls >> ta >> tb)) throw std::runtime_error("bad CNOT line: " + line);
      c.add(Gate::cnot(parseQubit(ta), parseQubit(tb)));
    } else if (op == "H" || op == "PREPZ" || op == "MEASZ") {
      if (!(ls >> ta)) throw std::runtime_error("bad line: " + line);
      Op o = op == "H" ? Op::H : op == "PREPZ" ? Op::PrepZ : Op::MeasZ;
      c.add({o, uint8_t(parseQubit(ta)), 0, 0});
    } else {
      throw std::runtime_error("unknown op: " + op);
    }
  }
  return c;
}

}  // namespace ionchain
