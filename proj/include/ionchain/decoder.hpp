#pragma once

#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "codes.hpp"
#include "pauli.hpp"

namespace ionchain {

enum class Residual { None, X, Z, Y };

inline const char* residualStr(Residual r) {
  switch (r) {
    case Residual::None: return "none";
    case Residual::X: return "X";
    case Residual::Z: return "Z";
    default: return "Y";
  }
}

// syndrome bit i = anticommutation with table row i
inline uint32_t syndromeBits(const CodeSpec& c, const Pauli& p) {
  uint32_t s = 0;
  for (size_t i = 0; i < c.stabs.size(); ++i)
    if (!p.commutesWith(c.stabs[i].op)) s |= 1u << i;
  return s;
}

// classifies error*correction by which logical it flips; gauge and stabilizer
// factors commute with both logicals, so they drop out automatically
inline Residual logicalResidual(const CodeSpec& c, const Pauli& error, const Pauli& correction) {
  Pauli r = mul(error, correction);
  bool flipsZ = !r.commutesWith(c.logicalZ);
  bool flipsX = !r.commutesWith(c.logicalX);
  if (flipsZ && flipsX) return Residual::Y;
  if (flipsZ) return Residual::X;
  if (flipsX) return Residual::Z;
  return Residual::None;
}

struct DecoderTable {
  CodeName code = CodeName::Surface17;
  bool gaugeAware = false;
  int nStabs = 0;
  uint32_t zKindMask = 0;  // table bits of Z-type rows (lit by X errors)
  uint32_t xKindMask = 0;
  std::map<uint32_t, Pauli> full;  // syndrome -> correction
  std::map<uint32_t, Pauli> xErr;  // Z-kind bits -> pure-X correction
  std::map<uint32_t, Pauli> zErr;  // X-kind bits -> pure-Z correction
};

// data errors left behind by an ancilla fault mid-block: the rest of the
// schedule sprays the block's Pauli kind onto every not-yet-coupled qubit
inline std::vector<Pauli> hookSprays(const StabSpec& s) {
  std::vector<Pauli> out;
  int w = int(s.cnotOrder.size());
  for (int i = 0; i + 2 < w; ++i) {
    Pauli p;
    for (int j = i + 1; j < w; ++j)
      p = mul(p, s.kind == 'X' ? Pauli::X(s.cnotOrder[j]) : Pauli::Z(s.cnotOrder[j]));
    out.push_back(p);
  }
  return out;
}

inline Pauli singleQubit(int kind, int q) {
  switch (kind) {
    case 0: return Pauli::X(q);
    case 1: return Pauli::Y(q);
    default: return Pauli::Z(q);
  }
}

// fill order: identity, weight-1, schedule hook sprays, weight-2 X pairs,
// then everything else of weight <= 2; first writer keeps the slot
inline DecoderTable buildLookup(const CodeSpec& c) {
  DecoderTable t;
  t.code = c.name;
  t.gaugeAware = !c.gauge.empty();
  t.nStabs = int(c.stabs.size());
  for (size_t i = 0; i < c.stabs.size(); ++i)
    (c.stabs[i].kind == 'Z' ? t.zKindMask : t.xKindMask) |= 1u << i;

  auto fill = [&](std::map<uint32_t, Pauli>& m, const Pauli& p) {
    uint32_t s = syndromeBits(c, p);
    if (s != 0 && !m.count(s)) m.emplace(s, p);
  };

  t.full[0] = Pauli{};
  t.xErr[0] = Pauli{};
  t.zErr[0] = Pauli{};

  for (int q = 0; q < c.nData; ++q) {
    for (int k = 0; k < 3; ++k) fill(t.full, singleQubit(k, q));
    fill(t.xErr, Pauli::X(q));
    fill(t.zErr, Pauli::Z(q));
  }

  for (const auto& s : c.stabs)
    for (const auto& p : hookSprays(s)) {
      fill(t.full, p);
      fill(s.kind == 'X' ? t.xErr : t.zErr, p);
    }

  for (int a = 0; a < c.nData; ++a)
    for (int b = a + 1; b < c.nData; ++b) {
      Pauli xx = mul(Pauli::X(a), Pauli::X(b));
      fill(t.full, xx);
      fill(t.xErr, xx);
      fill(t.zErr, mul(Pauli::Z(a), Pauli::Z(b)));
    }

  for (int a = 0; a < c.nData; ++a)
    for (int b = a + 1; b < c.nData; ++b)
      for (int ka = 0; ka < 3; ++ka)
        for (int kb = 0; kb < 3; ++kb)
          fill(t.full, mul(singleQubit(ka, a), singleQubit(kb, b)));

  return t;
}

inline Pauli decode(const DecoderTable& t, uint32_t syndrome) {
  if (syndrome >> t.nStabs) throw std::invalid_argument("syndrome wider than stabilizer count");
  auto it = t.full.find(syndrome);
  return it == t.full.end() ? Pauli{} : it->second;
}

// errorKind 'X': lookup over Z-row bits; 'Z': lookup over X-row bits
inline Pauli decodeSector(const DecoderTable& t, uint32_t sectorSyndrome, char errorKind) {
  const auto& m = errorKind == 'X' ? t.xErr : t.zErr;
  auto it = m.find(sectorSyndrome);
  return it == m.end() ? Pauli{} : it->second;
}

inline std::string decoderToJson(const DecoderTable& t) {
  std::ostringstream os;
  os << "{\n  \"code\": \"" << codeNameStr(t.code) << "\",\n";
  os << "  \"gaugeAware\": " << (t.gaugeAware ? "true" : "false") << ",\n";
  os << "  \"entries\": {";
  bool first = true;
  for (const auto& [syn, p] : t.full) {
    if (!first) os << ",";
    first = false;
    os << "\n    \"0x" << std::hex << syn << std::dec << "\": \"" << supportString(p) << "\"";
  }
  os << "\n  }\n}\n";
  return os.str();
}

}  // namespace ionchain
