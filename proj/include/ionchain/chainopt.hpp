#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "experiment.hpp"

namespace ionchain {

// Which code-qubit pairs may sit next to each other on the chain. A pair is
// disallowed ("bad") when a single crosstalk fault on it, fired alongside any
// entangling pulse one of the two takes part in, slips past the decoder as a
// logical error. That judgement depends only on the compiled experiment
// circuits and the lookup tables, never on a candidate ordering, so the graph
// is computed once per code.
struct CrosstalkGraph {
  int n = 0;
  std::vector<uint8_t> allowed;  // n*n, symmetric, zero diagonal

  bool edge(int u, int v) const { return allowed[size_t(u) * n + v] != 0; }

  std::vector<std::pair<int, int>> edges() const {
    std::vector<std::pair<int, int>> e;
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v)
        if (edge(u, v)) e.push_back({u, v});
    return e;
  }

  int degree(int u) const {
    int d = 0;
    for (int v = 0; v < n; ++v)
      if (v != u && edge(u, v)) ++d;
    return d;
  }
};

namespace detail {

// Propagates an injected fault through the uncompiled circuit up to the data
// readout, returning the per-round reading flips and the surviving error.
// Reading flips and prep baselines follow the same frame algebra as the shot
// decoder.
struct ClassifierFrame {
  ShotRecord rec;
  Pauli error;  // live Pauli just before readout
};

inline ClassifierFrame classifierWalk(const ExperimentContext& ctx,
                                      const Injection& inj) {
  ClassifierFrame out;
  Pauli p;
  int meas = 0;
  for (size_t gi = 0; gi < ctx.source.gates.size(); ++gi) {
    const Gate& g = ctx.source.gates[gi];
    if (g.op == Op::MeasZ &&
        ctx.measTags[size_t(meas)].kind == MeasKind::Readout)
      break;
    if (g.op == Op::PrepZ) {
      uint64_t keep = ~(1ull << g.a);
      p.x &= keep;
      p.z &= keep;
    } else if (g.op == Op::MeasZ) {
      const MeasTag& t = ctx.measTags[size_t(meas++)];
      if ((p.x >> g.a) & 1) {
        uint32_t bit = 1u << t.index;
        switch (t.kind) {
          case MeasKind::Prep: out.rec.prep[t.block] ^= bit; break;
          case MeasKind::Qec1: out.rec.qec1[t.block] ^= bit; break;
          default: out.rec.qec2[t.block] ^= bit; break;
        }
      }
      uint64_t keep = ~(1ull << g.a);
      p.x &= keep;
      p.z &= keep;
    } else {
      p = conjugate(p, g);
    }
    if (inj.gate == int(gi)) p = mul(p, inj.p);
  }
  out.error = p;
  return out;
}

inline Pauli decodeBoth(const DecoderTable& T, uint32_t s) {
  return mul(decodeSector(T, s & T.zKindMask, 'X'),
             decodeSector(T, s & T.xKindMask, 'Z'));
}

}  // namespace detail

namespace detail {

// Marks every entangling gate of the source circuit as a spillover site.
// Each compiled CNOT carries an MS pulse pair, and the pulse does not care
// which section of the schedule it belongs to, so state preparation, both
// syndrome rounds and the transversal gate all expose neighbouring ions.
inline std::vector<uint8_t> pulseSiteMask(const ExperimentContext& ctx) {
  size_t nG = ctx.source.gates.size();
  std::vector<uint8_t> site(nG, 0);
  for (size_t gi = 0; gi < nG; ++gi)
    site[gi] = ctx.source.gates[gi].op == Op::CNOT;
  return site;
}

// One injected XX fault after one gate, judged against the lookup decoder. A
// follow-up round reads the survivor's true syndrome, so the correction comes
// from that syndrome whenever it is nonzero. A syndrome-silent survivor
// instead leaves the faulty round's transient reading in charge, and a
// correction misled by it stands uncorrected: that is the hook-confusion
// mechanism. When nothing survives, up to a stabilizer, the same transient is
// ordinary measurement noise that round comparison discards. A gauge survivor
// does count: it moves the gauge frame the readings are referenced against,
// so its transient cannot be told from a data error. The fault is damaging
// when the corrected survivor anticommutes either logical operator on either
// block.
inline bool injectionDamages(const ExperimentContext& ctx,
                             const PauliSpan& stabSpan, int gi, int q1,
                             int q2) {
  const CodeSpec& code = ctx.code;
  int n = ctx.nTotal;
  // Leftovers on ancillas die at the next preparation and never reach data
  // again, so only the data-qubit survivor is judged.
  uint64_t dataMask = (uint64_t(1) << code.nData) - 1;
  auto fr = classifierWalk(ctx, {gi, 1, Pauli::XX(q1, q2)});
  uint32_t crossBase = (fr.rec.prep[0] & ctx.randomMask[0]) |
                       (fr.rec.prep[1] & ctx.randomMask[1]);
  for (int b = 0; b < 2; ++b) {
    Pauli e{(fr.error.x >> (b * n)) & dataMask,
            (fr.error.z >> (b * n)) & dataMask, 0};
    if (stabSpan.contains(e)) continue;
    uint32_t sig = syndromeBits(code, e);
    uint32_t transient =
        (fr.rec.prep[b] & ~ctx.randomMask[b]) ^
        (fr.rec.qec1[b] ^ (fr.rec.prep[b] & ctx.randomMask[b])) ^
        (fr.rec.qec2[b] ^ crossBase);
    Pauli c = decodeBoth(ctx.table, sig ? sig : transient);
    Pauli r = mul(e, c);
    bool flipZ = (std::popcount(r.x & code.logicalZ.z) & 1) != 0;
    bool flipX = (std::popcount(r.z & code.logicalX.x) & 1) != 0;
    if (flipZ || flipX) return true;
  }
  return false;
}

}  // namespace detail

// True when adjacency of u and v is unsafe. Neighbouring ions sit inside each
// other's pulse spillover, so every entangling gate that one of the two takes
// part in can deposit an XX fault across the pair. Each such fault is
// injected after its gate, in both block copies, and judged by
// detail::injectionDamages. The verdict depends only on the circuit and the
// decoder, never on the rest of the candidate ordering.
inline bool crosstalkPairBad(const ExperimentContext& ctx, int u, int v) {
  int n = ctx.nTotal;
  PauliSpan stabSpan;
  for (const auto& st : ctx.code.stabs) stabSpan.add(st.op);
  std::vector<uint8_t> site = detail::pulseSiteMask(ctx);
  for (int off : {0, n}) {
    int gu = u + off, gv = v + off;
    for (size_t gi = 0; gi < ctx.source.gates.size(); ++gi) {
      if (!site[gi]) continue;
      const Gate& g = ctx.source.gates[gi];
      if (g.a != gu && g.b != gu && g.a != gv && g.b != gv) continue;
      if (detail::injectionDamages(ctx, stabSpan, int(gi), gu, gv)) return true;
    }
  }
  return false;
}

inline CrosstalkGraph buildGraph(const ExperimentContext& ctx) {
  CrosstalkGraph g;
  g.n = ctx.nTotal;
  g.allowed.assign(size_t(g.n) * g.n, 0);
  for (int u = 0; u < g.n; ++u)
    for (int v = u + 1; v < g.n; ++v) {
      bool bad = crosstalkPairBad(ctx, u, v);
      g.allowed[size_t(u) * g.n + v] = g.allowed[size_t(v) * g.n + u] = !bad;
    }
  return g;
}

// Secondary objective: total chain distance covered by entangling pulses.
// Block 2 repeats block 1's ordering one block length later, so its pulses
// fold onto block-1 qubit ids, and the transversal pulses always span exactly
// one block length regardless of the ordering; they enter as a fixed offset.
// The two basis circuits share one pulse schedule, so one context suffices.
struct GateWeights {
  int n = 0;
  std::vector<long long> w;  // n*n symmetric pair multiplicities
  long long fixedCost = 0;

  long long at(int u, int v) const { return w[size_t(u) * n + v]; }
};

inline GateWeights experimentGateWeights(const ExperimentContext& ctx) {
  GateWeights gw;
  int n = ctx.nTotal;
  gw.n = n;
  gw.w.assign(size_t(n) * n, 0);
  for (int gi : ctx.xxGates) {
    const Gate& g = ctx.timed.gates[gi].g;
    int a = g.a, b = g.b;
    bool ba = a >= n, bb = b >= n;
    if (ba != bb) {
      gw.fixedCost += n;
      continue;
    }
    int la = a - (ba ? n : 0), lb = b - (bb ? n : 0);
    ++gw.w[size_t(la) * n + lb];
    ++gw.w[size_t(lb) * n + la];
  }
  return gw;
}

struct PathSearchResult {
  std::vector<int> order;
  int extraEdges = 0;
  long long timeCost = 0;
};

namespace detail {

inline long long chainDistanceCost(const GateWeights& gw,
                                   const std::vector<int>& order) {
  std::vector<int> pos(order.size());
  for (size_t j = 0; j < order.size(); ++j) pos[order[j]] = int(j);
  long long c = gw.fixedCost;
  for (int u = 0; u < gw.n; ++u)
    for (int v = u + 1; v < gw.n; ++v)
      c += gw.at(u, v) * (pos[u] > pos[v] ? pos[u] - pos[v] : pos[v] - pos[u]);
  return c;
}

}  // namespace detail

// Minimum-extra-edge Hamiltonian path over (subset, endpoint) states; the
// extra count rides in the stored value. Among orderings with minimal extra
// count the one with the smallest pulse-distance cost wins; both objectives
// accumulate edge by edge, and the cost increment of growing a prefix is the
// weight crossing the cut between placed and unplaced qubits, so a single
// lexicographic value per state suffices.
inline PathSearchResult minExtraEdgePath(const CrosstalkGraph& g,
                                         const GateWeights& gw) {
  int n = g.n;
  if (n <= 0 || n > 24) throw std::invalid_argument("unsupported vertex count");
  if (gw.n != n) throw std::invalid_argument("weight matrix size mismatch");
  size_t full = (size_t(1) << n);

  std::vector<long long> deg(n, 0);
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v)
      if (v != u) deg[u] += gw.at(u, v);

  // cutW[S] = total weight between S and its complement
  std::vector<long long> cutW(full, 0);
  for (size_t mask = 1; mask < full; ++mask) {
    int u = __builtin_ctzll(mask);
    size_t rest = mask & (mask - 1);
    long long inside = 0;
    for (size_t t = rest; t; t &= t - 1) inside += gw.at(u, __builtin_ctzll(t));
    cutW[mask] = cutW[rest] + deg[u] - 2 * inside;
  }

  const uint8_t kInf = 255;
  std::vector<uint8_t> extra(full * n, kInf);
  std::vector<long long> cost(full * n, 0);
  std::vector<int8_t> from(full * n, -1);
  for (int v = 0; v < n; ++v) {
    size_t s = (size_t(1) << v);
    extra[s * n + v] = 0;
    cost[s * n + v] = cutW[s];
  }
  for (size_t mask = 1; mask < full; ++mask) {
    for (int v = 0; v < n; ++v) {
      if (!(mask >> v & 1)) continue;
      size_t st = mask * size_t(n) + v;
      if (extra[st] == kInf) continue;
      for (int u = 0; u < n; ++u) {
        if (mask >> u & 1) continue;
        size_t nmask = mask | (size_t(1) << u);
        size_t nst = nmask * size_t(n) + u;
        uint8_t ne = uint8_t(extra[st] + !g.edge(v, u));
        long long nc = cost[st] + cutW[nmask];
        if (ne < extra[nst] || (ne == extra[nst] && nc < cost[nst])) {
          extra[nst] = ne;
          cost[nst] = nc;
          from[nst] = int8_t(v);
        }
      }
    }
  }

  size_t all = full - 1;
  int best = 0;
  for (int v = 1; v < n; ++v) {
    size_t a = all * size_t(n) + best, b = all * size_t(n) + v;
    if (extra[b] < extra[a] || (extra[b] == extra[a] && cost[b] < cost[a]))
      best = v;
  }

  PathSearchResult r;
  r.extraEdges = extra[all * size_t(n) + best];
  size_t mask = all;
  int v = best;
  while (v >= 0) {
    r.order.push_back(v);
    int prev = from[mask * size_t(n) + v];
    mask ^= (size_t(1) << v);
    v = prev;
  }
  std::reverse(r.order.begin(), r.order.end());
  r.timeCost = detail::chainDistanceCost(gw, r.order);
  return r;
}

// Exhaustive cross-check for small instances.
inline PathSearchResult bruteForcePath(const CrosstalkGraph& g,
                                       const GateWeights& gw) {
  int n = g.n;
  if (n <= 0 || n > 10) throw std::invalid_argument("too many vertices");
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  PathSearchResult best;
  bool first = true;
  do {
    int extra = 0;
    for (int j = 0; j + 1 < n; ++j) extra += !g.edge(perm[j], perm[j + 1]);
    long long c = detail::chainDistanceCost(gw, perm);
    if (first || extra < best.extraEdges ||
        (extra == best.extraEdges && c < best.timeCost)) {
      best = {perm, extra, c};
      first = false;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

struct ChainReport {
  std::vector<int> order;
  int extraEdgeCount = 0;
  long long timeCost = 0;
  std::vector<std::pair<int, int>> badAdjacencies;
};

inline ChainReport evaluateChain(const CrosstalkGraph& g, const GateWeights& gw,
                                 const std::vector<int>& order) {
  if (int(order.size()) != g.n) throw std::invalid_argument("wrong chain length");
  std::vector<char> seen(g.n, 0);
  for (int q : order) {
    if (q < 0 || q >= g.n || seen[q]) throw std::invalid_argument("not a permutation of the code qubits");
    seen[q] = 1;
  }
  ChainReport rep;
  rep.order = order;
  for (int j = 0; j + 1 < g.n; ++j)
    if (!g.edge(order[j], order[j + 1])) {
      ++rep.extraEdgeCount;
      rep.badAdjacencies.push_back({order[j], order[j + 1]});
    }
  rep.timeCost = detail::chainDistanceCost(gw, order);
  return rep;
}

inline std::vector<int> publishedChain(CodeName cn) {
  switch (cn) {
    case CodeName::BaconShor13:
      return {0, 6, 3, 11, 9, 1, 4, 7, 10, 12, 5, 2, 8};
    case CodeName::Surface17:
      return {0, 2, 1, 9, 10, 11, 12, 3, 4, 5, 13, 14, 15, 16, 7, 6, 8};
    case CodeName::Shor6X2Z:
      return {0, 2, 1, 11, 12, 9, 13, 3, 4, 5, 14, 10, 15, 6, 7, 8, 16};
    case CodeName::Shor6Z2X:
      return {3, 11, 0, 6, 12, 1, 7, 13, 9, 10, 14, 4, 15, 2, 8, 16, 5};
  }
  throw std::invalid_argument("unknown code");
}

// One-stop bundle for a code: the graph, the pulse weights, the optimizer's
// chain and the published chain re-scored against the same graph.
struct ChainStudy {
  CrosstalkGraph graph;
  GateWeights weights;
  PathSearchResult best;
  ChainReport published;
};

inline ChainStudy chainStudy(const CodeSpec& code) {
  ChainLayout lay = identityLayout(code.nTotal());
  auto ctx = buildExperiment(code, Basis::Z, lay, NoiseParams{});
  ChainStudy s;
  s.graph = buildGraph(ctx);
  s.weights = experimentGateWeights(ctx);
  s.best = minExtraEdgePath(s.graph, s.weights);
  s.published = evaluateChain(s.graph, s.weights, publishedChain(code.name));
  return s;
}

}  // namespace ionchain
