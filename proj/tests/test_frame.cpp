#include <catch2/catch_amalgamated.hpp>

#include "ionchain/experiment.hpp"
#include "ionchain/tableau.hpp"

using namespace ionchain;

namespace {

Pauli shifted(const Pauli& p, int off) {
  Pauli r;
  r.x = p.x << off;
  r.z = p.z << off;
  return r;
}

int flipOf(const ShotRecord& rec, const MeasTag& t) {
  uint32_t w = 0;
  switch (t.kind) {
    case MeasKind::Prep: w = rec.prep[t.block]; break;
    case MeasKind::Qec1: w = rec.qec1[t.block]; break;
    case MeasKind::Qec2: w = rec.qec2[t.block]; break;
    case MeasKind::Readout: w = rec.f[t.block]; break;
  }
  return int((w >> t.index) & 1);
}

// Replays the compiled circuit with the same injected Paulis on a full
// stabilizer simulation. Random outcomes are collapsed to the walker's
// prediction (any random bit is admissible); deterministic outcomes must
// match the prediction exactly.
void verifyAgainstTableau(const ExperimentContext& ctx, std::vector<Injection> evs) {
  ShotRecord rec = runWalker(ctx, evs);
  std::sort(evs.begin(), evs.end(), [](const Injection& a, const Injection& b) {
    return a.gate != b.gate ? a.gate < b.gate : a.phase < b.phase;
  });
  Tableau t(2 * ctx.nTotal);
  size_t e = 0;
  int meas = 0;
  for (size_t gi = 0; gi < ctx.timed.gates.size(); ++gi) {
    while (e < evs.size() && evs[e].gate == int(gi) && evs[e].phase == 0)
      t.applyPauli(evs[e++].p);
    const Gate& g = ctx.timed.gates[gi].g;
    if (g.op == Op::PrepZ) {
      t.prepZ(g.a);
    } else if (g.op == Op::MeasZ) {
      int pred = flipOf(rec, ctx.measTags[size_t(meas++)]);
      if (t.expectation(Pauli::Z(g.a)) == 0) {
        MeasRecord mr = t.measureZ(g.a, pred);
        REQUIRE(mr.random);
      } else {
        MeasRecord mr = t.measureZ(g.a, -1);
        REQUIRE_FALSE(mr.random);
        CHECK(mr.bit == pred);
      }
    } else {
      t.applyUnitary(g);
    }
    while (e < evs.size() && evs[e].gate == int(gi) && evs[e].phase == 1)
      t.applyPauli(evs[e++].p);
  }
  REQUIRE(meas == int(ctx.measTags.size()));
}

Injection randomInjection(Rng& rng, const ExperimentContext& ctx) {
  int nq = 2 * ctx.nTotal;
  int gate = int(rng.below(ctx.timed.gates.size()));
  auto phase = int8_t(rng.below(2));
  int q = int(rng.below(uint64_t(nq)));
  switch (rng.below(4)) {
    case 0: return {gate, phase, Pauli::X(q)};
    case 1: return {gate, phase, Pauli::Y(q)};
    case 2: return {gate, phase, Pauli::Z(q)};
    default: {
      int q2 = int(rng.below(uint64_t(nq - 1)));
      if (q2 >= q) ++q2;
      return {gate, phase, Pauli::XX(q, q2)};
    }
  }
}

NoiseParams heavyNoise() {
  NoiseParams np;
  np.eps1q = 0.25;
  np.epsMS = 0.35;
  np.T2 = 0.02;
  np.rabiRatio = 0.3;
  return np;
}

}  // namespace

TEST_CASE("noiseless reference: deterministic zeros, random prep rows, Bell parity") {
  for (CodeName cn : allCodes()) {
    const CodeSpec code = buildCode(cn);
    for (Basis basis : {Basis::Z, Basis::X}) {
      auto ctx = buildExperiment(code, basis, identityLayout(code.nTotal()), NoiseParams{});
      int n = ctx.nTotal;
      Pauli joint = basis == Basis::Z
                        ? mul(shifted(code.logicalZ, 0), shifted(code.logicalZ, n))
                        : mul(shifted(code.logicalX, 0), shifted(code.logicalX, n));
      int lastQec2 = -1;
      {
        int m = 0;
        for (size_t gi = 0; gi < ctx.timed.gates.size(); ++gi)
          if (ctx.timed.gates[gi].g.op == Op::MeasZ &&
              ctx.measTags[size_t(m++)].kind == MeasKind::Qec2)
            lastQec2 = int(gi);
      }
      REQUIRE(lastQec2 >= 0);
      Tableau t(2 * n);
      int meas = 0;
      bool checkedParity = false;
      for (size_t gi = 0; gi < ctx.timed.gates.size(); ++gi) {
        const Gate& g = ctx.timed.gates[gi].g;
        if (g.op == Op::PrepZ) {
          t.prepZ(g.a);
        } else if (g.op == Op::MeasZ) {
          const MeasTag& tag = ctx.measTags[size_t(meas++)];
          MeasRecord mr = t.measureZ(g.a, -1);
          if (tag.kind == MeasKind::Prep) {
            bool expectRandom = (ctx.randomMask[tag.block] >> tag.index) & 1;
            CHECK(mr.random == expectRandom);
          } else if (tag.kind != MeasKind::Readout) {
            CHECK_FALSE(mr.random);
          }
          CHECK(mr.bit == 0);
        } else {
          t.applyUnitary(g);
        }
        if (int(gi) == lastQec2) {
          CHECK(t.expectation(joint) == 1);
          checkedParity = true;
        }
      }
      CHECK(checkedParity);
      CHECK(runDirect(ctx, 64, 7).violations == 0);
    }
  }
}

TEST_CASE("walker flips match the stabilizer simulation under random injections") {
  for (CodeName cn : allCodes()) {
    const CodeSpec code = buildCode(cn);
    for (Basis basis : {Basis::Z, Basis::X}) {
      auto ctx = buildExperiment(code, basis, identityLayout(code.nTotal()), heavyNoise());
      Rng rng(0xf0a1 + uint64_t(cn) * 8 + (basis == Basis::X));
      for (int trial = 0; trial < 40; ++trial) {
        std::vector<Injection> evs;
        int count = int(rng.below(6));
        for (int i = 0; i < count; ++i) evs.push_back(randomInjection(rng, ctx));
        verifyAgainstTableau(ctx, evs);
      }
    }
  }
}

TEST_CASE("walker flips match the stabilizer simulation under sampled noise") {
  for (CodeName cn : allCodes()) {
    const CodeSpec code = buildCode(cn);
    for (Basis basis : {Basis::Z, Basis::X}) {
      auto ctx = buildExperiment(code, basis, identityLayout(code.nTotal()), heavyNoise());
      for (uint64_t shot = 0; shot < 12; ++shot) {
        Rng rng(0xbeef, shot);
        verifyAgainstTableau(ctx, injectionsFor(ctx, sampleFaults(ctx.locations, rng)));
      }
    }
  }
}

TEST_CASE("logical flip on one block before readout violates exactly its basis") {
  for (CodeName cn : allCodes()) {
    const CodeSpec code = buildCode(cn);
    int n = code.nTotal();
    for (Basis basis : {Basis::Z, Basis::X}) {
      auto ctx = buildExperiment(code, basis, identityLayout(n), NoiseParams{});
      int lastQec2 = -1;
      int meas = 0;
      for (size_t gi = 0; gi < ctx.timed.gates.size(); ++gi)
        if (ctx.timed.gates[gi].g.op == Op::MeasZ &&
            ctx.measTags[size_t(meas++)].kind == MeasKind::Qec2)
          lastQec2 = int(gi);
      REQUIRE(lastQec2 >= 0);
      auto inject = [&](const Pauli& p) {
        return violatesWith(ctx, {{lastQec2, 1, p}});
      };
      CHECK(inject(shifted(code.logicalX, 0)) == (basis == Basis::Z));
      CHECK(inject(shifted(code.logicalX, n)) == (basis == Basis::Z));
      CHECK(inject(shifted(code.logicalZ, 0)) == (basis == Basis::X));
      CHECK(inject(shifted(code.logicalZ, n)) == (basis == Basis::X));
      CHECK_FALSE(inject(mul(shifted(code.logicalX, 0), shifted(code.logicalX, n))));
      CHECK_FALSE(inject(mul(shifted(code.logicalZ, 0), shifted(code.logicalZ, n))));
    }
  }
}
