#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "codes.hpp"
#include "compiler.hpp"
#include "decoder.hpp"
#include "layout.hpp"
#include "noise.hpp"
#include "rng.hpp"
#include "stats.hpp"

namespace ionchain {

// Two-block memory experiment: block 0 is prepared in |+>_L, block 1 in
// |0>_L, each runs one syndrome round before and after a transversal CNOT
// (block 0 controls), then both blocks are read out destructively in the
// requested basis. Noiseless, the joint logical parity is +1 in both bases.

enum class MeasKind : uint8_t { Prep, Qec1, Qec2, Readout };

struct MeasTag {
  MeasKind kind;
  uint8_t block;
  uint8_t index;  // stabilizer table row, or data qubit for Readout
};

struct ExperimentContext {
  CodeSpec code;
  Basis basis = Basis::Z;
  NoiseParams noise;
  Circuit source;
  TimedCircuit timed;
  std::vector<FaultLocation> locations;
  std::vector<MeasTag> measTags;
  DecoderTable table;
  uint32_t randomMask[2] = {0, 0};  // stabilizers with random prep outcome
  uint32_t visMask = 0;             // stabilizers recomputable from readout
  char visFlavor = 'X';             // error flavor the readout can see
  std::vector<std::pair<int, uint32_t>> visSupports;  // (row, readout-bit support)
  uint32_t logicalSupport = 0;
  int nTotal = 0;
  std::vector<int> xxGates;  // compiled indices of entangling pulses
};

inline ExperimentContext buildExperiment(const CodeSpec& code, Basis basis,
                                         const ChainLayout& blockLayout,
                                         const NoiseParams& noise) {
  ExperimentContext ctx;
  ctx.code = code;
  ctx.basis = basis;
  ctx.noise = noise;
  ctx.nTotal = code.nTotal();
  int n = ctx.nTotal;

  Basis prepBasis[2] = {Basis::X, Basis::Z};
  int offset[2] = {0, n};
  auto tagRound = [&](int block, MeasKind kind) {
    for (char k : {'Z', 'X'})
      for (size_t i = 0; i < code.stabs.size(); ++i)
        if (code.stabs[i].kind == k)
          ctx.measTags.push_back({kind, uint8_t(block), uint8_t(i)});
  };

  Circuit src;
  src.nq = 2 * n;
  for (int b = 0; b < 2; ++b) {
    src.append(prepCircuit(code, prepBasis[b], offset[b]));
    if (code.prepKind(prepBasis[b]) == PrepKind::Projective)
      tagRound(b, MeasKind::Prep);
  }
  for (int b = 0; b < 2; ++b) {
    src.append(syndromeRoundCircuit(code, offset[b]));
    tagRound(b, MeasKind::Qec1);
  }
  for (int q = 0; q < code.nData; ++q) src.add(Gate::cnot(q, q + n));
  for (int b = 0; b < 2; ++b) {
    src.append(syndromeRoundCircuit(code, offset[b]));
    tagRound(b, MeasKind::Qec2);
  }
  for (int b = 0; b < 2; ++b) {
    src.append(readoutCircuit(code, basis, offset[b]));
    for (int q = 0; q < code.nData; ++q)
      ctx.measTags.push_back({MeasKind::Readout, uint8_t(b), uint8_t(q)});
  }
  ctx.source = src;

  Circuit compiled = compile(src);
  ctx.timed = schedule(compiled, noise.times);
  ctx.locations = enumerateFaults(ctx.timed, twoBlockPositions(blockLayout, n), noise);
  for (size_t i = 0; i < ctx.timed.gates.size(); ++i)
    if (ctx.timed.gates[i].g.op == Op::XX) ctx.xxGates.push_back(int(i));

  ctx.table = buildLookup(code);
  for (int b = 0; b < 2; ++b) ctx.randomMask[b] = randomAtPrep(code, prepBasis[b]);
  char visKind = (basis == Basis::Z) ? 'Z' : 'X';
  ctx.visFlavor = (basis == Basis::Z) ? 'X' : 'Z';
  for (size_t i = 0; i < code.stabs.size(); ++i) {
    if (code.stabs[i].kind != visKind) continue;
    ctx.visMask |= 1u << i;
    uint32_t sup = uint32_t(visKind == 'Z' ? code.stabs[i].op.z : code.stabs[i].op.x);
    ctx.visSupports.push_back({int(i), sup});
  }
  ctx.logicalSupport =
      uint32_t(basis == Basis::Z ? code.logicalZ.z : code.logicalX.x);
  return ctx;
}

// --- fault-frame walker ---

struct Injection {
  int gate;
  int8_t phase;  // 0 = before the gate, 1 = after
  Pauli p;
};

struct ShotRecord {
  uint32_t prep[2] = {0, 0};
  uint32_t qec1[2] = {0, 0};
  uint32_t qec2[2] = {0, 0};
  uint32_t f[2] = {0, 0};  // readout flips, one bit per data qubit
};

// Conjugates the accumulated fault Pauli through the compiled circuit and
// records, per measurement, whether the outcome differs from the noiseless
// reference (random outcomes compare against shared reference coin flips).
template <class GateAt>
inline ShotRecord runWalkerOver(const ExperimentContext& ctx, size_t nGates,
                                GateAt gateAt, std::vector<Injection> evs) {
  std::sort(evs.begin(), evs.end(), [](const Injection& a, const Injection& b) {
    return a.gate != b.gate ? a.gate < b.gate : a.phase < b.phase;
  });
  ShotRecord rec;
  Pauli p;
  size_t e = 0;
  int meas = 0;
  for (size_t gi = 0; gi < nGates; ++gi) {
    while (e < evs.size() && evs[e].gate == int(gi) && evs[e].phase == 0)
      p = mul(p, evs[e++].p);
    const Gate& g = gateAt(gi);
    if (g.op == Op::PrepZ) {
      uint64_t keep = ~(1ull << g.a);
      p.x &= keep;
      p.z &= keep;
    } else if (g.op == Op::MeasZ) {
      const MeasTag& t = ctx.measTags[size_t(meas++)];
      if ((p.x >> g.a) & 1) {
        uint32_t bit = 1u << t.index;
        switch (t.kind) {
          case MeasKind::Prep: rec.prep[t.block] ^= bit; break;
          case MeasKind::Qec1: rec.qec1[t.block] ^= bit; break;
          case MeasKind::Qec2: rec.qec2[t.block] ^= bit; break;
          case MeasKind::Readout: rec.f[t.block] ^= bit; break;
        }
      }
      uint64_t keep = ~(1ull << g.a);
      p.x &= keep;
      p.z &= keep;
    } else {
      p = conjugate(p, g);
    }
    while (e < evs.size() && evs[e].gate == int(gi) && evs[e].phase == 1)
      p = mul(p, evs[e++].p);
  }
  return rec;
}

inline ShotRecord runWalker(const ExperimentContext& ctx, std::vector<Injection> evs) {
  return runWalkerOver(
      ctx, ctx.timed.gates.size(),
      [&](size_t i) -> const Gate& { return ctx.timed.gates[i].g; },
      std::move(evs));
}

// Same walk over the uncompiled gate sequence; injection indices then refer
// to source gates. Compilation preserves the measurement order, so the
// resulting record decodes identically.
inline ShotRecord runSourceWalker(const ExperimentContext& ctx,
                                  std::vector<Injection> evs) {
  return runWalkerOver(
      ctx, ctx.source.gates.size(),
      [&](size_t i) -> const Gate& { return ctx.source.gates[i]; },
      std::move(evs));
}

inline std::vector<Injection> injectionsFor(const ExperimentContext& ctx,
                                            const std::vector<std::pair<int, Pauli>>& faults) {
  std::vector<Injection> evs;
  evs.reserve(faults.size());
  for (const auto& [li, p] : faults) {
    const FaultLocation& loc = ctx.locations[size_t(li)];
    if (loc.channel == Channel::Idle) {
      int g = ctx.timed.idles[size_t(loc.position)].before;
      if (g >= 0) evs.push_back({g, 0, p});
    } else {
      evs.push_back({loc.position, 1, p});
    }
  }
  return evs;
}

// --- decoding ---
//
// No correction is applied between rounds. All records are differenced in
// software at the end of the shot:
//   d1 = first-round syndrome relative to the prep frame,
//   d2 = second-round syndrome relative to the prep frames of both blocks
//        (the transversal CNOT correlates random prep outcomes across blocks),
//   dR = stabilizers recomputed from the destructive readout.
// The first-round estimate is pushed through the CNOT; its copying half must
// re-echo on the partner's second round or it is dismissed as a transient
// readout flip. Identical leftover second-round syndromes in one flavor are a
// data error that copied between the rounds and are corrected symmetrically.
// Whatever still disagrees with the readout is fixed by a final half-lookup.

inline uint32_t blockSyndrome(const ExperimentContext& ctx, const Pauli& p) {
  return syndromeBits(ctx.code, p);
}

inline bool decodeShot(const ExperimentContext& ctx, const ShotRecord& rec) {
  const DecoderTable& T = ctx.table;
  uint32_t crossBase = (rec.prep[0] & ctx.randomMask[0]) | (rec.prep[1] & ctx.randomMask[1]);
  uint32_t d1[2], d2[2], mask[2] = {0, 0};
  for (int b = 0; b < 2; ++b) {
    d1[b] = rec.qec1[b] ^ (rec.prep[b] & ctx.randomMask[b]);
    d2[b] = rec.qec2[b] ^ crossBase;
  }

  Pauli ex[2], ez[2];
  for (int b = 0; b < 2; ++b) {
    ex[b] = decodeSector(T, d1[b] & T.zKindMask, 'X');
    ez[b] = decodeSector(T, d1[b] & T.xKindMask, 'Z');
  }
  if (ex[0].x) {
    uint32_t want = blockSyndrome(ctx, ex[0]);
    if ((d2[1] & want) != want) {
      mask[0] |= want;
      ex[0] = Pauli{};
    }
  }
  if (ez[1].z) {
    uint32_t want = blockSyndrome(ctx, ez[1]);
    if ((d2[0] & want) != want) {
      mask[1] |= want;
      ez[1] = Pauli{};
    }
  }

  Pauli corr[2] = {mul(ex[0], ez[0]), mul(ex[1], ez[1])};
  corr[1].x ^= corr[0].x;  // X copies control -> target
  corr[0].z ^= corr[1].z;  // Z copies target -> control

  uint32_t rho2[2];
  for (int b = 0; b < 2; ++b)
    rho2[b] = (d2[b] ^ blockSyndrome(ctx, corr[b])) & ~mask[b];
  const struct {
    uint32_t sector;
    char kind;
  } flavors[2] = {{T.zKindMask, 'X'}, {T.xKindMask, 'Z'}};
  for (const auto& fl : flavors) {
    uint32_t s0 = rho2[0] & fl.sector, s1 = rho2[1] & fl.sector;
    if (s0 != 0 && s0 == s1) {
      Pauli d = decodeSector(T, s0, fl.kind);
      for (int b = 0; b < 2; ++b) {
        corr[b] = mul(corr[b], d);
        mask[b] |= s0;
      }
    }
  }

  // A fault born midway through the first round shows a truncated syndrome
  // there and the complement in the second; decoding the two halves
  // separately can differ from the whole by a logical. For the non-copying
  // flavors (which echo cannot vet and the CNOT does not symmetrize) a
  // disjoint leftover means exactly that: re-decode the union instead. An
  // identical leftover is a transient first-round readout flip and is left
  // to cancel against the final half-lookup.
  const struct {
    int block;
    char kind;
    uint32_t sector;
  } own[2] = {{0, 'Z', T.xKindMask}, {1, 'X', T.zKindMask}};
  for (const auto& o : own) {
    Pauli part = o.kind == 'Z' ? ez[o.block] : ex[o.block];
    if (part.x == 0 && part.z == 0) continue;
    uint32_t sig = blockSyndrome(ctx, part);
    uint32_t left = rho2[o.block] & o.sector & ~mask[o.block];
    if (left != 0 && (left & sig) == 0) {
      corr[o.block] = mul(corr[o.block], part);  // retract the partial decode
      corr[o.block] = mul(corr[o.block], decodeSector(T, sig | left, o.kind));
    }
  }

  bool viol = false;
  for (int b = 0; b < 2; ++b)
    viol ^= (std::popcount(rec.f[b] & ctx.logicalSupport) & 1) != 0;

  for (int b = 0; b < 2; ++b) {
    uint32_t dr = 0;
    for (const auto& [row, sup] : ctx.visSupports)
      dr |= uint32_t(std::popcount(rec.f[b] & sup) & 1) << row;
    dr ^= crossBase & ctx.visMask;
    dr ^= blockSyndrome(ctx, corr[b]) & ctx.visMask;
    dr &= ~mask[b];
    Pauli post = decodeSector(T, dr, ctx.visFlavor);
    corr[b] = mul(corr[b], post);
  }

  for (int b = 0; b < 2; ++b) {
    uint64_t hit = ctx.basis == Basis::Z ? (corr[b].x & ctx.code.logicalZ.z)
                                         : (corr[b].z & ctx.code.logicalX.x);
    viol ^= (std::popcount(hit) & 1) != 0;
  }
  return viol;
}

inline bool violatesWith(const ExperimentContext& ctx, const std::vector<Injection>& evs) {
  if (evs.empty()) return false;
  return decodeShot(ctx, runWalker(ctx, evs));
}

inline bool violatesAtSource(const ExperimentContext& ctx,
                             const std::vector<Injection>& evs) {
  if (evs.empty()) return false;
  return decodeShot(ctx, runSourceWalker(ctx, evs));
}

// --- unencoded comparator ---

// Failure rate of one bare two-qubit gate under the same noise: the gate
// error itself, four single-qubit wrapper rotations, up to eight crosstalk
// pairs, and dephasing of both ions across the gate's critical path.
inline double physicalComparatorRate(double p2q, double p1q, double pc, double t2Seconds,
                                     const GateTimes& times = {}) {
  double tCrit = (times.t2q + 3.0 * times.t1q) * 1e-6;
  return p2q + 4.0 * p1q + 8.0 * pc + 2.0 * idleFlipProbability(tCrit, t2Seconds);
}

inline double physicalComparatorRate(const NoiseParams& np) {
  if (np.depolarizing())
    return physicalComparatorRate(np.depolarizingP2, np.p1d(), 0.0,
                                  std::numeric_limits<double>::infinity(), np.times);
  return physicalComparatorRate(np.pMS(), np.p1q(), np.pc(), np.T2, np.times);
}

// --- estimation ---

struct StratumStat {
  int k = 0;
  double probability = 0.0;  // P(exactly k faults)
  double failRate = 0.0;     // conditional failure estimate
  double sigma = 0.0;
  uint64_t samples = 0;
};

struct ExperimentResult {
  CodeName code = CodeName::Surface17;
  Basis basis = Basis::Z;
  uint64_t shots = 0;
  uint64_t violations = 0;
  double rate = 0.0;
  double sigma = 0.0;
  Interval ci;
  double pPhys = 0.0;
  double tailBound = 0.0;  // subset mode: probability mass beyond kMax
  std::vector<StratumStat> strata;
};

inline ExperimentResult runDirect(const ExperimentContext& ctx, uint64_t shots,
                                  uint64_t seed, int threads = 1) {
  if (threads < 1) threads = 1;
  std::vector<uint64_t> counts(size_t(threads), 0);
  auto work = [&](int t) {
    uint64_t c = 0;
    for (uint64_t s = t; s < shots; s += uint64_t(threads)) {
      Rng rng(seed, s);
      auto faults = sampleFaults(ctx.locations, rng);
      if (faults.empty()) continue;
      if (violatesWith(ctx, injectionsFor(ctx, faults))) ++c;
    }
    counts[size_t(t)] = c;
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }
  ExperimentResult r;
  r.code = ctx.code.name;
  r.basis = ctx.basis;
  r.shots = shots;
  for (uint64_t c : counts) r.violations += c;
  r.rate = shots ? double(r.violations) / double(shots) : 0.0;
  r.sigma = binomialSigma(r.violations, shots);
  r.ci = wilson(r.violations, shots);
  r.pPhys = physicalComparatorRate(ctx.noise);
  return r;
}

struct K1Result {
  uint64_t cases = 0;     // (location, outcome) pairs tried
  uint64_t failures = 0;  // of which violated
  double condFail = 0.0;  // probability-weighted failure given exactly one fault
};

inline K1Result k1Exhaustive(const ExperimentContext& ctx) {
  const auto& locs = ctx.locations;
  size_t n = locs.size();
  std::vector<long double> pre(n + 1, 1.0L), post(n + 1, 1.0L);
  for (size_t i = 0; i < n; ++i) pre[i + 1] = pre[i] * (1.0L - locs[i].probability);
  for (size_t i = n; i-- > 0;) post[i] = post[i + 1] * (1.0L - locs[i].probability);
  K1Result r;
  long double num = 0.0L, den = 0.0L;
  for (size_t i = 0; i < n; ++i) {
    if (locs[i].probability <= 0.0) continue;
    long double alone = pre[i] * locs[i].probability * post[i + 1];
    for (const auto& o : locs[i].outcomes) {
      bool v = violatesWith(ctx, injectionsFor(ctx, {{int(i), o.p}}));
      ++r.cases;
      r.failures += v;
      if (v) num += alone * o.weight;
      den += alone * o.weight;
    }
  }
  r.condFail = den > 0.0L ? double(num / den) : 0.0;
  return r;
}

// importance-sampled failure rate stratified by fault count: the k = 0 and
// k = 1 strata are exact, k >= 2 subsets are drawn with their conditional
// distribution, and everything past kMax is bounded by its total probability
inline ExperimentResult runSubset(const ExperimentContext& ctx, uint64_t shotsPerStratum,
                                  uint64_t seed, int kMax = 3) {
  if (kMax < 2) throw std::invalid_argument("subset sampling needs kMax >= 2");
  const auto& locs = ctx.locations;
  size_t n = locs.size();
  std::vector<double> ps(n);
  for (size_t i = 0; i < n; ++i) ps[i] = locs[i].probability;
  auto P = poissonBinomial(ps, kMax);
  double covered = 0.0;
  for (double v : P) covered += v;
  double tail = std::max(0.0, 1.0 - covered);

  // suffix[i][r] = P(exactly r faults among locations i..n-1)
  std::vector<std::array<long double, 8>> suffix(n + 1);
  for (auto& row : suffix) row.fill(0.0L);
  suffix[n][0] = 1.0L;
  for (size_t i = n; i-- > 0;) {
    long double p = ps[i];
    suffix[i][0] = (1.0L - p) * suffix[i + 1][0];
    for (int r = 1; r <= kMax; ++r)
      suffix[i][r] = (1.0L - p) * suffix[i + 1][r] + p * suffix[i + 1][r - 1];
  }

  ExperimentResult res;
  res.code = ctx.code.name;
  res.basis = ctx.basis;
  res.pPhys = physicalComparatorRate(ctx.noise);
  res.tailBound = tail;
  res.strata.push_back({0, P[0], 0.0, 0.0, 0});

  K1Result k1 = k1Exhaustive(ctx);
  res.strata.push_back({1, P[1], k1.condFail, 0.0, k1.cases});
  res.shots += k1.cases;
  res.violations += k1.failures;

  for (int k = 2; k <= kMax; ++k) {
    StratumStat st;
    st.k = k;
    st.probability = P[size_t(k)];
    if (st.probability > 0.0 && suffix[0][size_t(k)] > 0.0L) {
      uint64_t viol = 0;
      for (uint64_t s = 0; s < shotsPerStratum; ++s) {
        Rng rng(seed, (uint64_t(k) << 48) | s);
        std::vector<std::pair<int, Pauli>> faults;
        int need = k;
        for (size_t i = 0; i < n && need > 0; ++i) {
          long double denom = suffix[i][size_t(need)];
          if (denom <= 0.0L) break;
          long double take = ps[i] * suffix[i + 1][size_t(need - 1)] / denom;
          if (rng.uniform() < double(take)) {
            const auto& loc = locs[i];
            Pauli p = loc.outcomes[0].p;
            if (loc.outcomes.size() > 1) {
              double u = rng.uniform(), acc = 0.0;
              for (const auto& o : loc.outcomes) {
                acc += o.weight;
                if (u < acc) {
                  p = o.p;
                  break;
                }
              }
            }
            faults.push_back({int(i), p});
            --need;
          }
        }
        if (need == 0 && violatesWith(ctx, injectionsFor(ctx, faults))) ++viol;
      }
      st.failRate = double(viol) / double(shotsPerStratum);
      st.sigma = binomialSigma(viol, shotsPerStratum);
      st.samples = shotsPerStratum;
      res.shots += shotsPerStratum;
      res.violations += viol;
    }
    res.strata.push_back(st);
  }

  double rate = tail, var = 0.0;
  for (const auto& st : res.strata) {
    rate += st.probability * st.failRate;
    var += st.probability * st.sigma * st.probability * st.sigma;
  }
  res.rate = rate;
  res.sigma = std::sqrt(var);
  res.ci = {std::max(0.0, rate - 1.96 * res.sigma), std::min(1.0, rate + 1.96 * res.sigma)};
  return res;
}

// exact probability-weighted violation rate truncated at two simultaneous
// faults; small enough to enumerate when only one channel is active
inline double truncatedRateK2(const ExperimentContext& ctx) {
  const auto& locs = ctx.locations;
  std::vector<int> act;
  for (size_t i = 0; i < locs.size(); ++i)
    if (locs[i].probability > 0.0) act.push_back(int(i));
  long double p0 = 1.0L;
  for (int i : act) {
    if (locs[size_t(i)].probability >= 1.0)
      throw std::invalid_argument("truncated enumeration needs probabilities < 1");
    p0 *= 1.0L - locs[size_t(i)].probability;
  }
  auto odds = [&](int i) {
    long double p = locs[size_t(i)].probability;
    return p / (1.0L - p);
  };
  long double rate = 0.0L;
  for (int i : act) {
    long double wi = p0 * odds(i);
    for (const auto& oi : locs[size_t(i)].outcomes)
      if (violatesWith(ctx, injectionsFor(ctx, {{i, oi.p}})))
        rate += wi * oi.weight;
  }
  for (size_t a = 0; a < act.size(); ++a)
    for (size_t b = a + 1; b < act.size(); ++b) {
      int i = act[a], j = act[b];
      long double wij = p0 * odds(i) * odds(j);
      for (const auto& oi : locs[size_t(i)].outcomes)
        for (const auto& oj : locs[size_t(j)].outcomes)
          if (violatesWith(ctx, injectionsFor(ctx, {{i, oi.p}, {j, oj.p}})))
            rate += wij * oi.weight * oj.weight;
    }
  return double(rate);
}

// fraction of logical failures that flip the Z x Z joint parity
inline double biasZZ(const ExperimentResult& basisX, const ExperimentResult& basisZ) {
  double s = basisX.rate + basisZ.rate;
  if (s <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  return basisZ.rate / s;
}

inline double biasZZ(double rateX, double rateZ) {
  double s = rateX + rateZ;
  if (s <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  return rateZ / s;
}

// crossing of two log-linear segments on (x0, x1): the swept parameter where
// the logical rate meets the comparator; NaN when there is no bracketed
// crossing or a rate is non-positive
inline double logLinearCrossing(double x0, double x1, double f0, double f1, double g0,
                                double g1) {
  if (!(x0 > 0) || !(x1 > 0) || !(f0 > 0) || !(f1 > 0) || !(g0 > 0) || !(g1 > 0))
    return std::numeric_limits<double>::quiet_NaN();
  double h0 = std::log(f0) - std::log(g0);
  double h1 = std::log(f1) - std::log(g1);
  if (h0 == h1 || h0 * h1 > 0) return std::numeric_limits<double>::quiet_NaN();
  double u0 = std::log(x0), u1 = std::log(x1);
  return std::exp(u0 + (u1 - u0) * (h0 / (h0 - h1)));
}

}  // namespace ionchain
