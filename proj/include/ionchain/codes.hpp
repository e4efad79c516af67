#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ionchain/circuit.hpp"
#include "ionchain/gates.hpp"
#include "ionchain/pauli.hpp"

namespace ionchain {

enum class CodeName { BaconShor13, Surface17, Shor6Z2X, Shor6X2Z };
enum class Basis { Z, X };

inline const char* codeNameStr(CodeName n) {
  switch (n) {
    case CodeName::BaconShor13: return "BaconShor13";
    case CodeName::Surface17: return "Surface17";
    case CodeName::Shor6Z2X: return "Shor6Z2X";
    case CodeName::Shor6X2Z: return "Shor6X2Z";
  }
  return "?";
}

inline CodeName codeNameFrom(const std::string& s) {
  if (s == "BaconShor13") return CodeName::BaconShor13;
  if (s == "Surface17") return CodeName::Surface17;
  if (s == "Shor6Z2X") return CodeName::Shor6Z2X;
  if (s == "Shor6X2Z") return CodeName::Shor6X2Z;
  throw std::runtime_error("unknown code: " + s);
}

// One stabilizer row: `listing` is the printed support order, `cnotOrder` the
// data order used by the extraction block (they differ only for the Surface-17
// weight-4 Z plaquettes, where the listed row-major order is not hook-safe).
struct StabSpec {
  char kind = 'Z';
  std::vector<int> listing;
  std::vector<int> cnotOrder;
  Pauli op;
  int ancilla = -1;
};

enum class PrepKind { UnitaryEncode, Projective };

struct CodeSpec {
  CodeName name;
  int nData = 9;
  int nAncilla = 0;
  std::vector<StabSpec> stabs;
  std::vector<Pauli> gauge;
  Pauli logicalZ, logicalX;
  PrepKind prepZ = PrepKind::UnitaryEncode;
  PrepKind prepX = PrepKind::UnitaryEncode;

  int nTotal() const { return nData + nAncilla; }
  PrepKind prepKind(Basis b) const { return b == Basis::Z ? prepZ : prepX; }
  const char* nameStr() const { return codeNameStr(name); }
};

inline Pauli pauliOnSupport(char kind, const std::vector<int>& qs) {
  Pauli p;
  for (int q : qs) p = mul(p, kind == 'X' ? Pauli::X(q) : Pauli::Z(q));
  return p;
}

inline std::string stabText(const StabSpec& s) {
  std::string out;
  for (int q : s.listing) {
    out += s.kind;
    out += std::to_string(q);
  }
  return out;
}

namespace detail {
inline StabSpec makeStab(char kind, std::vector<int> listing, int ancilla,
                         std::vector<int> cnotOrder = {}) {
  StabSpec s;
  s.kind = kind;
  s.listing = listing;
  s.cnotOrder = cnotOrder.empty() ? listing : cnotOrder;
  s.op = pauliOnSupport(kind, listing);
  s.ancilla = ancilla;
  return s;
}
}  // namespace detail

inline CodeSpec buildCode(CodeName name) {
  using detail::makeStab;
  CodeSpec c;
  c.name = name;
  c.logicalZ = pauliOnSupport('Z', {0, 1, 2});
  c.logicalX = pauliOnSupport('X', {0, 3, 6});
  switch (name) {
    case CodeName::BaconShor13:
      c.nAncilla = 4;
      c.stabs = {
          makeStab('Z', {0, 3, 1, 4, 2, 5}, 9),
          makeStab('Z', {3, 6, 4, 7, 5, 8}, 10),
          makeStab('X', {0, 1, 3, 4, 6, 7}, 11),
          makeStab('X', {1, 2, 4, 5, 7, 8}, 12),
      };
      for (int r = 0; r < 3; ++r)
        for (int col = 0; col < 2; ++col)
          c.gauge.push_back(pauliOnSupport('X', {3 * r + col, 3 * r + col + 1}));
      for (int col = 0; col < 3; ++col)
        for (int r = 0; r < 2; ++r)
          c.gauge.push_back(pauliOnSupport('Z', {3 * r + col, 3 * r + col + 3}));
      c.prepZ = PrepKind::UnitaryEncode;
      c.prepX = PrepKind::UnitaryEncode;
      break;
    case CodeName::Shor6Z2X:
      c.nAncilla = 8;
      c.stabs = {
          makeStab('X', {0, 1, 3, 4, 6, 7}, 9),
          makeStab('X', {1, 2, 4, 5, 7, 8}, 10),
          makeStab('Z', {0, 3}, 11),
          makeStab('Z', {1, 4}, 12),
          makeStab('Z', {2, 5}, 13),
          makeStab('Z', {3, 6}, 14),
          makeStab('Z', {4, 7}, 15),
          makeStab('Z', {5, 8}, 16),
      };
      c.prepZ = PrepKind::Projective;
      c.prepX = PrepKind::UnitaryEncode;
      break;
    case CodeName::Shor6X2Z:
      c.nAncilla = 8;
      c.stabs = {
          makeStab('Z', {0, 3, 1, 4, 2, 5}, 9),
          makeStab('Z', {3, 6, 4, 7, 5, 8}, 10),
          makeStab('X', {0, 1}, 11),
          makeStab('X', {1, 2}, 12),
          makeStab('X', {3, 4}, 13),
          makeStab('X', {4, 5}, 14),
          makeStab('X', {6, 7}, 15),
          makeStab('X', {7, 8}, 16),
      };
      c.prepZ = PrepKind::UnitaryEncode;
      c.prepX = PrepKind::Projective;
      break;
    case CodeName::Surface17:
      c.nAncilla = 8;
      c.logicalZ = pauliOnSupport('Z', {0, 4, 8});
      c.logicalX = pauliOnSupport('X', {2, 4, 6});
      c.stabs = {
          makeStab('Z', {1, 2, 4, 5}, 12, {1, 4, 2, 5}),
          makeStab('Z', {0, 3}, 10),
          makeStab('Z', {3, 4, 6, 7}, 13, {3, 6, 4, 7}),
          makeStab('Z', {5, 8}, 15),
          makeStab('X', {0, 1, 3, 4}, 11),
          makeStab('X', {6, 7}, 16),
          makeStab('X', {4, 5, 7, 8}, 14),
          makeStab('X', {1, 2}, 9),
      };
      c.prepZ = PrepKind::Projective;
      c.prepX = PrepKind::Projective;
      break;
  }
  return c;
}

inline std::vector<CodeName> allCodes() {
  return {CodeName::BaconShor13, CodeName::Surface17, CodeName::Shor6Z2X,
          CodeName::Shor6X2Z};
}

// GF(2) span of sign-stripped Pauli xz-vectors, for membership tests in the
// stabilizer(+gauge) group. Rows are kept in descending pivot order so a
// single reduction pass is enough.
struct PauliSpan {
  std::vector<std::pair<uint64_t, uint64_t>> rows;

  static int pivotOf(uint64_t x, uint64_t z) {
    for (int b = 127; b >= 0; --b)
      if (bit(x, z, b)) return b;
    return -1;
  }
  void add(const Pauli& p) {
    uint64_t x = p.x, z = p.z;
    reduce(x, z);
    if (!(x | z)) return;
    rows.push_back({x, z});
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
      return pivotOf(a.first, a.second) > pivotOf(b.first, b.second);
    });
  }
  bool contains(const Pauli& p) const {
    uint64_t x = p.x, z = p.z;
    reduce(x, z);
    return (x | z) == 0;
  }

 private:
  static bool bit(uint64_t x, uint64_t z, int b) {
    return b >= 64 ? (z >> (b - 64)) & 1 : (x >> b) & 1;
  }
  void reduce(uint64_t& x, uint64_t& z) const {
    for (const auto& [rx, rz] : rows)
      if (bit(x, z, pivotOf(rx, rz))) {
        x ^= rx;
        z ^= rz;
      }
  }
};

inline PauliSpan stabGaugeSpan(const CodeSpec& c) {
  PauliSpan s;
  for (const auto& st : c.stabs) s.add(st.op);
  for (const auto& g : c.gauge) s.add(g);
  return s;
}

// Mask over stabilizer indices whose first projective reading is random
// (gauge-valued) rather than forced by the product state.
inline uint32_t randomAtPrep(const CodeSpec& c, Basis b) {
  if (c.prepKind(b) != PrepKind::Projective) return 0;
  char randomKind = (b == Basis::Z) ? 'X' : 'Z';
  uint32_t m = 0;
  for (size_t i = 0; i < c.stabs.size(); ++i)
    if (c.stabs[i].kind == randomKind) m |= 1u << i;
  return m;
}

// --- circuit builders (block-local qubit ids, shifted by off) ---

inline void addStabBlock(Circuit& c, const StabSpec& s, int off) {
  int anc = s.ancilla + off;
  c.add(Gate::prepZ(anc));
  if (s.kind == 'X') {
    c.add(Gate::h(anc));
    for (int q : s.cnotOrder) c.add(Gate::cnot(anc, q + off));
    c.add(Gate::h(anc));
  } else {
    for (int q : s.cnotOrder) c.add(Gate::cnot(q + off, anc));
  }
  c.add(Gate::measZ(anc));
}

// One serialized round: Z-type blocks first, then X-type, table order within
// each type.
inline Circuit syndromeRoundCircuit(const CodeSpec& code, int off = 0) {
  Circuit c;
  for (char kind : {'Z', 'X'})
    for (const auto& s : code.stabs)
      if (s.kind == kind) addStabBlock(c, s, off);
  c.nq = std::max(c.nq, code.nTotal() + off);
  return c;
}

// Row-wise GHZ fan in the X basis: |0>_L for the codes whose Z-type structure
// is row-supported (and for Bacon-Shor-13).
inline Circuit encodeZCircuit(int off = 0) {
  Circuit c;
  for (int r = 0; r < 3; ++r) {
    int a = 3 * r + off;
    c.add(Gate::h(a));
    c.add(Gate::cnot(a, a + 1));
    c.add(Gate::cnot(a, a + 2));
    c.add(Gate::h(a));
    c.add(Gate::h(a + 1));
    c.add(Gate::h(a + 2));
  }
  return c;
}

// Column-wise GHZ fan in the Z basis: |+>_L for the codes whose X-type
// structure is column-supported (and for Bacon-Shor-13).
inline Circuit encodeXCircuit(int off = 0) {
  Circuit c;
  for (int col = 0; col < 3; ++col) {
    int a = col + off;
    c.add(Gate::h(a));
    c.add(Gate::cnot(a, a + 3));
    c.add(Gate::cnot(a, a + 6));
  }
  return c;
}

// Preparation circuit per code and basis. Data qubits are assumed freshly
// PrepZ'd here so the block is self-contained. Projective preparation makes a
// product state and measures every stabilizer once; the Pauli fix-up is a
// software frame applied at decode time, not a circuit element.
inline Circuit prepCircuit(const CodeSpec& code, Basis b, int off = 0) {
  Circuit c;
  for (int q = 0; q < code.nData; ++q) c.add(Gate::prepZ(q + off));
  if (code.prepKind(b) == PrepKind::UnitaryEncode) {
    if (b == Basis::Z)
      c.append(encodeZCircuit(off));
    else
      c.append(encodeXCircuit(off));
  } else {
    if (b == Basis::X)
      for (int q = 0; q < code.nData; ++q) c.add(Gate::h(q + off));
    c.append(syndromeRoundCircuit(code, off));
  }
  c.nq = std::max(c.nq, code.nTotal() + off);
  return c;
}

// Destructive transversal readout of the data block.
inline Circuit readoutCircuit(const CodeSpec& code, Basis b, int off = 0) {
  Circuit c;
  if (b == Basis::X)
    for (int q = 0; q < code.nData; ++q) c.add(Gate::h(q + off));
  for (int q = 0; q < code.nData; ++q) c.add(Gate::measZ(q + off));
  c.nq = std::max(c.nq, code.nTotal() + off);
  return c;
}

inline std::string codeToJson(const CodeSpec& c) {
  std::string j = "{\n  \"name\": \"";
  j += c.nameStr();
  j += "\",\n  \"nData\": " + std::to_string(c.nData);
  j += ",\n  \"nAncilla\": " + std::to_string(c.nAncilla);
  j += ",\n  \"stabilizers\": [";
  for (size_t i = 0; i < c.stabs.size(); ++i) {
    j += i ? ", " : "";
    j += "\"" + stabText(c.stabs[i]) + "\"";
  }
  j += "],\n  \"logicalZ\": \"";
  for (int q = 0; q < 9; ++q)
    if ((c.logicalZ.z >> q) & 1) j += "Z" + std::to_string(q);
  j += "\",\n  \"logicalX\": \"";
  for (int q = 0; q < 9; ++q)
    if ((c.logicalX.x >> q) & 1) j += "X" + std::to_string(q);
  j += "\",\n  \"ancillaMap\": {";
  bool first = true;
  for (const auto& s : c.stabs) {
    j += first ? "" : ", ";
    first = false;
    j += "\"" + std::to_string(s.ancilla) + "\": \"" + stabText(s) + "\"";
  }
  j += "},\n  \"gaugeGenerators\": [";
  for (size_t i = 0; i < c.gauge.size(); ++i) {
    j += i ? ", " : "";
    j += "\"";
    for (int q = 0; q < 9; ++q) {
      int l = letter(c.gauge[i], q);
      if (l) {
        j += "IXZY"[l];
        j += std::to_string(q);
      }
    }
    j += "\"";
  }
  j += "]\n}\n";
  return j;
}

}  // namespace ionchain
