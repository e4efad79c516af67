#pragma once
#include <bit>
#include <cassert>
#include <cstdint>
#include <string>

namespace ionchain {

// n-qubit Pauli (n <= 64), stored as P = i^phase * X^x * Z^z with the X word
// to the left of the Z word. Y on qubit q is x,z bits set and contributes one
// factor of i to phase, so Hermitian operators always have
// (phase - popcount(x&z)) even.
struct Pauli {
  uint64_t x = 0;
  uint64_t z = 0;
  uint8_t phase = 0;  // exponent of i, mod 4

  static Pauli X(int q) { return {uint64_t(1) << q, 0, 0}; }
  static Pauli Y(int q) { return {uint64_t(1) << q, uint64_t(1) << q, 1}; }
  static Pauli Z(int q) { return {0, uint64_t(1) << q, 0}; }
  static Pauli XX(int a, int b) {
    return {(uint64_t(1) << a) | (uint64_t(1) << b), 0, 0};
  }

  bool identity() const { return x == 0 && z == 0; }
  int weight() const { return std::popcount(x | z); }
  uint64_t support() const { return x | z; }

  bool commutesWith(const Pauli& o) const {
    return ((std::popcount(x & o.z) + std::popcount(z & o.x)) & 1) == 0;
  }

  // +1 or -1; valid for Hermitian Paulis only.
  int sign() const {
    int k = (phase + 4 - (std::popcount(x & z) & 3)) & 3;
    assert(k == 0 || k == 2);
    return k == 0 ? 1 : -1;
  }

  Pauli stripPhase() const { return {x, z, 0}; }

  bool operator==(const Pauli& o) const = default;
};

inline Pauli mul(const Pauli& a, const Pauli& b) {
  Pauli r;
  r.x = a.x ^ b.x;
  r.z = a.z ^ b.z;
  r.phase = uint8_t((a.phase + b.phase + 2 * std::popcount(a.z & b.x)) & 3);
  return r;
}

inline Pauli mulPhase(const Pauli& a, int iPow) {
  Pauli r = a;
  r.phase = uint8_t((r.phase + iPow) & 3);
  return r;
}

// Letter on qubit q: 0=I 1=X 2=Z 3=Y.
inline int letter(const Pauli& p, int q) {
  return (int(p.x >> q) & 1) + 2 * (int(p.z >> q) & 1);
}

inline std::string toString(const Pauli& p, int n) {
  static const char* sym[] = {"+", "+i", "-", "-i"};
  int k = (p.phase + 4 - (std::popcount(p.x & p.z) & 3)) & 3;
  std::string s = sym[k];
  static const char L[] = "IXZY";
  for (int q = 0; q < n; q++) s += L[letter(p, q)];
  return s;
}

// sign-free support notation: "X0X1", "Z4", "I"
inline std::string supportString(const Pauli& p) {
  static const char L[] = "IXZY";
  std::string s;
  for (int q = 0; q < 64; q++)
    if (int l = letter(p, q); l != 0) {
      s += L[l];
      s += std::to_string(q);
    }
  return s.empty() ? "I" : s;
}

}  // namespace ionchain
