#pragma once

#include <cassert>
#include <cstdlib>
#include <vector>

#include "ionchain/circuit.hpp"
#include "ionchain/gates.hpp"

namespace ionchain {

// Normalize a rotation angle to (-180, 180].
inline int canonDeg(int deg) {
  deg %= 360;
  if (deg < 0) deg += 360;
  if (deg > 180) deg -= 360;
  return deg;
}

inline bool isRotation(Op op) { return op == Op::RX || op == Op::RY || op == Op::RZ; }

// Merge same-axis rotations on the same qubit. An RX may slide past XX gates
// sharing its qubit (they commute); everything else touching the qubit is a
// barrier. Prep and measure are always barriers.
inline bool peepholePassOnce(std::vector<Gate>& seq) {
  bool changed = false;
  for (size_t i = 0; i < seq.size(); ++i) {
    if (!isRotation(seq[i].op)) continue;
    bool merged = true;
    while (merged && i < seq.size() && isRotation(seq[i].op)) {
      merged = false;
      int q = seq[i].a;
      for (size_t k = i + 1; k < seq.size(); ++k) {
        const Gate& h = seq[k];
        bool touches = h.a == q || (h.twoQubit() && h.b == q);
        if (!touches) continue;
        if (h.op == seq[i].op) {
          int nd = canonDeg(int(seq[i].deg) + int(h.deg));
          seq.erase(seq.begin() + k);
          if (nd == 0)
            seq.erase(seq.begin() + i);
          else
            seq[i].deg = int16_t(nd);
          changed = merged = true;
        } else if (h.op == Op::XX && seq[i].op == Op::RX) {
          continue;
        }
        break;
      }
    }
  }
  return changed;
}

inline void peephole(std::vector<Gate>& seq) {
  while (peepholePassOnce(seq)) {
  }
}

inline std::vector<Gate> hGates(int q, int variant) {
  if (variant == 0) return {Gate::rx(q, 180), Gate::ry(q, -90)};
  return {Gate::ry(q, 90), Gate::rx(q, -180)};
}

inline std::vector<Gate> cnotGates(int c, int t, int s, int v) {
  assert((s == 1 || s == -1) && (v == 1 || v == -1) && c != t);
  return {Gate::ry(c, v * 90), Gate::xx(c, t, s * 45), Gate::rx(c, -s * 90),
          Gate::rx(t, -v * s * 90), Gate::ry(c, -v * 90)};
}

struct CompileOptions {
  bool peephole = true;
};

struct GateCensus {
  int r1 = 0, xx = 0, prep = 0, meas = 0;
};

inline GateCensus census(const Circuit& c) {
  GateCensus n;
  for (const auto& g : c.gates) {
    switch (g.op) {
      case Op::RX:
      case Op::RY:
      case Op::RZ: n.r1++; break;
      case Op::XX: n.xx++; break;
      case Op::PrepZ: n.prep++; break;
      case Op::MeasZ: n.meas++; break;
      default: std::abort();
    }
  }
  return n;
}

// Lower H and CNOT to native rotations and XX gates. Variant signs are picked
// greedily left to right, keeping whichever candidate leaves the shortest
// sequence after rotation merging; ties keep the first candidate.
inline Circuit compile(const Circuit& src, const CompileOptions& opt = {}) {
  std::vector<Gate> acc;
  auto tryCandidate = [&](const std::vector<Gate>& cand) {
    std::vector<Gate> t = acc;
    t.insert(t.end(), cand.begin(), cand.end());
    peephole(t);
    return t;
  };
  auto pickBest = [&](const std::vector<std::vector<Gate>>& cands) {
    if (!opt.peephole) {
      acc.insert(acc.end(), cands[0].begin(), cands[0].end());
      return;
    }
    std::vector<Gate> best;
    bool first = true;
    for (const auto& cand : cands) {
      auto t = tryCandidate(cand);
      if (first || t.size() < best.size()) {
        best = std::move(t);
        first = false;
      }
    }
    acc = std::move(best);
  };

  for (const auto& g : src.gates) {
    switch (g.op) {
      case Op::H:
        pickBest({hGates(g.a, 0), hGates(g.a, 1)});
        break;
      case Op::CNOT:
        pickBest({cnotGates(g.a, g.b, 1, 1), cnotGates(g.a, g.b, 1, -1),
                  cnotGates(g.a, g.b, -1, 1), cnotGates(g.a, g.b, -1, -1)});
        break;
      default:
        acc.push_back(g);
        break;
    }
  }
  if (opt.peephole) peephole(acc);

  Circuit out;
  for (const auto& g : acc) out.add(g);
  out.nq = std::max(out.nq, src.nq);
  return out;
}

}  // namespace ionchain
