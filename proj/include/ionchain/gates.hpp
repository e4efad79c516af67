#pragma once
#include <cassert>
#include <cstdint>

#include "ionchain/pauli.hpp"

namespace ionchain {

enum class Op : uint8_t { H, CNOT, RX, RY, RZ, XX, PrepZ, MeasZ };

// Angles are integer degrees. 1q rotations use exp(-i th/2 A); allowed angles
// +-90, 180. XX uses exp(-i th XaXb); allowed angles +-45.
struct Gate {
  Op op;
  uint8_t a = 0;
  uint8_t b = 0;  // CNOT target / second XX qubit
  int16_t deg = 0;

  static Gate h(int q) { return {Op::H, uint8_t(q), 0, 0}; }
  static Gate cnot(int c, int t) { return {Op::CNOT, uint8_t(c), uint8_t(t), 0}; }
  static Gate rx(int q, int d) { return {Op::RX, uint8_t(q), 0, int16_t(d)}; }
  static Gate ry(int q, int d) { return {Op::RY, uint8_t(q), 0, int16_t(d)}; }
  static Gate rz(int q, int d) { return {Op::RZ, uint8_t(q), 0, int16_t(d)}; }
  static Gate xx(int a_, int b_, int d) {
    return {Op::XX, uint8_t(a_), uint8_t(b_), int16_t(d)};
  }
  static Gate prepZ(int q) { return {Op::PrepZ, uint8_t(q), 0, 0}; }
  static Gate measZ(int q) { return {Op::MeasZ, uint8_t(q), 0, 0}; }

  bool twoQubit() const { return op == Op::CNOT || op == Op::XX; }
  uint64_t mask() const {
    uint64_t m = uint64_t(1) << a;
    if (twoQubit()) m |= uint64_t(1) << b;
    return m;
  }
  bool unitary() const { return op != Op::PrepZ && op != Op::MeasZ; }

  bool operator==(const Gate& o) const = default;
};

inline Pauli rotationAxis(const Gate& g) {
  switch (g.op) {
    case Op::RX: return Pauli::X(g.a);
    case Op::RY: return Pauli::Y(g.a);
    case Op::RZ: return Pauli::Z(g.a);
    case Op::XX: return Pauli::XX(g.a, g.b);
    default: assert(false); return {};
  }
}

// Quarter turns of exp(-i phi A): phi = deg/2 in degrees for 1q, deg for XX.
inline int quarterTurns(const Gate& g) {
  int halfAngleDeg = g.op == Op::XX ? g.deg : g.deg / 2;
  assert(2 * halfAngleDeg % 90 == 0);
  return ((2 * halfAngleDeg / 90) % 4 + 4) % 4;  // 2*phi in units of 90 deg
}

// Sign-exact Heisenberg update P -> G P G^dag for unitary gates.
inline Pauli conjugate(const Pauli& p, const Gate& g) {
  switch (g.op) {
    case Op::H: {
      uint64_t m = uint64_t(1) << g.a;
      Pauli r = p;
      uint64_t xb = r.x & m, zb = r.z & m;
      r.x = (r.x & ~m) | zb;
      r.z = (r.z & ~m) | xb;
      if (xb && zb) r.phase = uint8_t((r.phase + 2) & 3);  // Y -> -Y
      return r;
    }
    case Op::CNOT: {
      // X/Z words map to X/Z words; the i^phase bookkeeping makes this exact.
      uint64_t cm = uint64_t(1) << g.a, tm = uint64_t(1) << g.b;
      Pauli r = p;
      if (r.x & cm) r.x ^= tm;
      if (r.z & tm) r.z ^= cm;
      return r;
    }
    case Op::RX:
    case Op::RY:
    case Op::RZ:
    case Op::XX: {
      Pauli ax = rotationAxis(g);
      if (p.commutesWith(ax)) return p;
      int q = quarterTurns(g);  // 2*phi = q * 90 deg
      assert(q == 1 || q == 2 || q == 3);
      if (q == 2) return mulPhase(p, 2);        // P -> -P
      int s = q == 1 ? 1 : -1;                  // sin(2 phi)
      return mulPhase(mul(ax, p), s > 0 ? 3 : 1);  // -i s A P
    }
    default: assert(false); return p;
  }
}

}  // namespace ionchain
