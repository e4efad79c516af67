#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "circuit.hpp"
#include "gates.hpp"
#include "pauli.hpp"
#include "rng.hpp"

namespace ionchain {

// long-double intermediate keeps the special values exact (sin^2(pi/4) = 0.5)
inline double sinSq(double x) {
  long double s = sinl((long double)x);
  return double(s * s);
}

inline double crosstalkProbability(double rabiRatio) {
  long double s = sinl((long double)rabiRatio * M_PIl / 4.0L);
  return double(s * s);
}

inline double idleFlipProbability(double tIdleSeconds, double t2Seconds) {
  if (tIdleSeconds < 0) throw std::invalid_argument("negative idle time");
  if (std::isinf(t2Seconds) || tIdleSeconds == 0) return 0.0;
  return 0.5 * (1.0 - std::exp(-tIdleSeconds / (2.0 * t2Seconds)));
}

struct NoiseParams {
  double eps1q = 0.0;   // radians
  double epsMS = 0.0;   // radians
  double T2 = std::numeric_limits<double>::infinity();  // seconds
  double rabiRatio = 0.0;
  double depolarizingP2 = -1.0;       // >= 0 switches to depolarizing mode
  bool crosstalkMergeAsRate = false;  // merged distance-2 pairs: 4x probability
                                      // instead of 4x Rabi ratio
  GateTimes times{};

  bool depolarizing() const { return depolarizingP2 >= 0.0; }
  double p1q() const { return sinSq(eps1q); }
  double pMS() const { return sinSq(epsMS); }
  double pc() const { return crosstalkProbability(rabiRatio); }
  double p1d() const { return depolarizingP2 / 10.0; }
};

enum class Channel { Depol1, Depol2, Overrot1, OverrotMS, Idle, Crosstalk };

struct FaultOutcome {
  Pauli p;
  double weight;
};

struct FaultLocation {
  Channel channel;
  int position;  // gate index; for Idle, index into circuit.idles
  int q0 = -1, q1 = -1;
  double probability = 0.0;
  std::vector<FaultOutcome> outcomes;
};

inline Pauli depolPauli(int kind, int q) {
  switch (kind) {
    case 1: return Pauli::X(q);
    case 2: return Pauli::Y(q);
    default: return Pauli::Z(q);
  }
}

// locations in execution order: idles close immediately before their gate,
// then the gate's own channel, then crosstalk for XX gates; tail idles last
inline std::vector<FaultLocation> enumerateFaults(const TimedCircuit& tc,
                                                  const std::vector<int>& pos,
                                                  const NoiseParams& np) {
  for (int q = 0; q < tc.nq; ++q)
    if (q >= int(pos.size()) || pos[q] < 0)
      throw std::invalid_argument("qubit missing from chain layout");

  int maxPos = 0;
  for (int q = 0; q < tc.nq; ++q) maxPos = pos[q] > maxPos ? pos[q] : maxPos;
  std::vector<int> occ(size_t(maxPos) + 1, -1);
  for (int q = 0; q < tc.nq; ++q) occ[pos[q]] = q;

  bool depol = np.depolarizing();
  double p1 = np.p1q(), pms = np.pMS(), pcBase = np.pc();
  double pcMerged = np.crosstalkMergeAsRate ? (4.0 * pcBase > 1.0 ? 1.0 : 4.0 * pcBase)
                                            : crosstalkProbability(4.0 * np.rabiRatio);

  std::vector<std::vector<int>> idlesBefore(tc.gates.size());
  std::vector<int> tailIdles;
  for (size_t i = 0; i < tc.idles.size(); ++i) {
    int b = tc.idles[i].before;
    (b >= 0 ? idlesBefore[b] : tailIdles).push_back(int(i));
  }

  std::vector<FaultLocation> out;
  auto addIdle = [&](int ii) {
    const IdleInterval& iv = tc.idles[ii];
    FaultLocation f{Channel::Idle, ii, iv.q, -1,
                    idleFlipProbability(iv.length() * 1e-6, np.T2), {}};
    f.outcomes.push_back({Pauli::Z(iv.q), 1.0});
    out.push_back(std::move(f));
  };

  for (size_t gi = 0; gi < tc.gates.size(); ++gi) {
    const Gate& g = tc.gates[gi].g;
    if (!depol)
      for (int ii : idlesBefore[gi]) addIdle(ii);

    switch (g.op) {
      case Op::RX:
      case Op::RY:
      case Op::RZ: {
        FaultLocation f{depol ? Channel::Depol1 : Channel::Overrot1, int(gi), g.a, -1,
                        depol ? np.p1d() : p1, {}};
        if (depol)
          for (int k = 1; k <= 3; ++k) f.outcomes.push_back({depolPauli(k, g.a), 1.0 / 3.0});
        else
          f.outcomes.push_back({rotationAxis(g), 1.0});
        out.push_back(std::move(f));
        break;
      }
      case Op::XX: {
        FaultLocation f{depol ? Channel::Depol2 : Channel::OverrotMS, int(gi), g.a, g.b,
                        depol ? np.depolarizingP2 : pms, {}};
        if (depol) {
          for (int ka = 0; ka < 4; ++ka)
            for (int kb = 0; kb < 4; ++kb) {
              if (ka == 0 && kb == 0) continue;
              Pauli p;
              if (ka) p = mul(p, depolPauli(ka, g.a));
              if (kb) p = mul(p, depolPauli(kb, g.b));
              f.outcomes.push_back({p, 1.0 / 15.0});
            }
        } else {
          f.outcomes.push_back({Pauli::XX(g.a, g.b), 1.0});
        }
        out.push_back(std::move(f));

        if (!depol) {
          std::vector<std::pair<int, int>> pairs;
          std::vector<bool> merged;
          for (int side : {int(g.a), int(g.b)}) {
            int other = side == g.a ? g.b : g.a;
            for (int dp : {-1, +1}) {
              int p = pos[side] + dp;
              int n = (p >= 0 && p <= maxPos) ? occ[p] : -1;
              if (n < 0 || n == g.a || n == g.b) continue;
              for (int partner : {side, other}) {
                std::pair<int, int> key{n < partner ? n : partner, n < partner ? partner : n};
                bool dup = false;
                for (size_t k = 0; k < pairs.size(); ++k)
                  if (pairs[k] == key) {
                    merged[k] = true;
                    dup = true;
                    break;
                  }
                if (!dup) {
                  pairs.push_back(key);
                  merged.push_back(false);
                }
              }
            }
          }
          for (size_t k = 0; k < pairs.size(); ++k) {
            FaultLocation cf{Channel::Crosstalk, int(gi), pairs[k].first, pairs[k].second,
                             merged[k] ? pcMerged : pcBase, {}};
            cf.outcomes.push_back({Pauli::XX(pairs[k].first, pairs[k].second), 1.0});
            out.push_back(std::move(cf));
          }
        }
        break;
      }
      case Op::PrepZ:
      case Op::MeasZ:
        break;
      default:
        throw std::invalid_argument("noise model requires a compiled circuit");
    }
  }
  if (!depol)
    for (int ii : tailIdles) addIdle(ii);
  return out;
}

inline std::vector<std::pair<int, Pauli>> sampleFaults(const std::vector<FaultLocation>& locs,
                                                       Rng& rng) {
  std::vector<std::pair<int, Pauli>> out;
  for (size_t i = 0; i < locs.size(); ++i) {
    const FaultLocation& f = locs[i];
    if (f.probability <= 0.0 || !rng.bernoulli(f.probability)) continue;
    if (f.outcomes.size() == 1) {
      out.emplace_back(int(i), f.outcomes[0].p);
      continue;
    }
    double u = rng.uniform(), acc = 0.0;
    const FaultOutcome* pick = &f.outcomes.back();
    for (const auto& o : f.outcomes) {
      acc += o.weight;
      if (u < acc) {
        pick = &o;
        break;
      }
    }
    out.emplace_back(int(i), pick->p);
  }
  return out;
}

}  // namespace ionchain
