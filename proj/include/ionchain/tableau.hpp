#pragma once
#include <cassert>
#include <cstdint>
#include <vector>

#include "ionchain/gates.hpp"
#include "ionchain/pauli.hpp"

namespace ionchain {

struct MeasRecord {
  bool random = false;
  int bit = 0;
};

// Stabilizer tableau with exact signs (destabilizer/stabilizer pairs).
// Starts in |0...0>.
struct Tableau {
  int n = 0;
  std::vector<Pauli> stab, destab;

  explicit Tableau(int nq) : n(nq) {
    for (int i = 0; i < n; i++) {
      stab.push_back(Pauli::Z(i));
      destab.push_back(Pauli::X(i));
    }
  }

  void applyUnitary(const Gate& g) {
    assert(g.unitary());
    for (auto& s : stab) s = conjugate(s, g);
    for (auto& d : destab) d = conjugate(d, g);
  }

  // Multiply the state by a Pauli error (phase of the error is irrelevant).
  void applyPauli(const Pauli& p) {
    for (auto& s : stab)
      if (!s.commutesWith(p)) s.phase = uint8_t((s.phase + 2) & 3);
    for (auto& d : destab)
      if (!d.commutesWith(p)) d.phase = uint8_t((d.phase + 2) & 3);
  }

  // Measure Hermitian Pauli p (sign +1 form). force: -1 = pick 0 when random,
  // else the demanded outcome (must be legal).
  MeasRecord measure(const Pauli& p, int force = -1) {
    int anti = -1;
    for (int i = 0; i < n; i++) {
      if (!stab[i].commutesWith(p)) { anti = i; break; }
    }
    if (anti >= 0) {
      int bit = force < 0 ? 0 : force;
      for (int i = 0; i < n; i++) {
        if (i != anti && !stab[i].commutesWith(p)) stab[i] = mul(stab[i], stab[anti]);
        if (!destab[i].commutesWith(p)) destab[i] = mul(destab[i], stab[anti]);
      }
      destab[anti] = stab[anti];
      stab[anti] = bit ? mulPhase(p, 2) : p;
      return {true, bit};
    }
    Pauli acc;
    for (int i = 0; i < n; i++)
      if (!destab[i].commutesWith(p)) acc = mul(acc, stab[i]);
    assert(acc.x == p.x && acc.z == p.z);
    int rel = (acc.phase + 4 - p.phase) & 3;
    assert(rel == 0 || rel == 2);
    int bit = rel == 2 ? 1 : 0;
    assert(force < 0 || force == bit);
    return {false, bit};
  }

  MeasRecord measureZ(int q, int force = -1) { return measure(Pauli::Z(q), force); }

  // Reset to |0>: project, flipping into |0> if the qubit was deterministically |1>.
  void prepZ(int q) {
    MeasRecord m = measure(Pauli::Z(q), -1);
    if (!m.random && m.bit == 1) applyPauli(Pauli::X(q));
  }

  void apply(const Gate& g) {
    switch (g.op) {
      case Op::PrepZ: prepZ(g.a); break;
      case Op::MeasZ: measureZ(g.a); break;
      default: applyUnitary(g);
    }
  }

  // Deterministic expectation of Hermitian Pauli p: +1/-1, or 0 if random.
  int expectation(const Pauli& p) {
    for (int i = 0; i < n; i++)
      if (!stab[i].commutesWith(p)) return 0;
    Pauli acc;
    for (int i = 0; i < n; i++)
      if (!destab[i].commutesWith(p)) acc = mul(acc, stab[i]);
    assert(acc.x == p.x && acc.z == p.z);
    int rel = (acc.phase + 4 - p.phase) & 3;
    return rel == 0 ? 1 : -1;
  }
};

// Walk a gate sequence from |0...0>, recording every MeasZ outcome. Random
// outcomes are projected to 0.
inline std::vector<MeasRecord> runReference(const std::vector<Gate>& gates, int nq) {
  Tableau t(nq);
  std::vector<MeasRecord> out;
  for (const Gate& g : gates) {
    if (g.op == Op::MeasZ) {
      out.push_back(t.measureZ(g.a, -1));
    } else {
      t.apply(g);
    }
  }
  return out;
}

}  // namespace ionchain
