#include <catch2/catch_amalgamated.hpp>

#include "ionchain/experiment.hpp"

using namespace ionchain;

namespace {

NoiseParams ionNoise(double t2 = 0.5, double rabi = 0.0) {
  NoiseParams np;
  np.eps1q = 0.1;
  np.epsMS = 0.12;
  np.T2 = t2;
  np.rabiRatio = rabi;
  return np;
}

NoiseParams depolNoise(double p2 = 1e-3) {
  NoiseParams np;
  np.depolarizingP2 = p2;
  return np;
}

const char* channelName(Channel c) {
  switch (c) {
    case Channel::Depol1: return "Depol1";
    case Channel::Depol2: return "Depol2";
    case Channel::Overrot1: return "Overrot1";
    case Channel::OverrotMS: return "OverrotMS";
    case Channel::Idle: return "Idle";
    default: return "Crosstalk";
  }
}

// every (location, outcome) pair alone, with a readable report on failure
uint64_t singleFaultFailures(const ExperimentContext& ctx) {
  uint64_t failures = 0;
  for (size_t i = 0; i < ctx.locations.size(); ++i) {
    const auto& loc = ctx.locations[i];
    if (loc.probability <= 0.0) continue;
    for (const auto& o : loc.outcomes) {
      if (violatesWith(ctx, injectionsFor(ctx, {{int(i), o.p}}))) {
        ++failures;
        UNSCOPED_INFO(channelName(loc.channel)
                      << " at position " << loc.position << " q0=" << loc.q0
                      << " q1=" << loc.q1 << " fault=" << supportString(o.p));
      }
    }
  }
  return failures;
}

}  // namespace

TEST_CASE("noiseless experiments never violate the Bell parity") {
  for (CodeName cn : allCodes()) {
    const CodeSpec code = buildCode(cn);
    for (Basis basis : {Basis::Z, Basis::X}) {
      auto ctx = buildExperiment(code, basis, identityLayout(code.nTotal()), NoiseParams{});
      auto r = runDirect(ctx, 500, 11);
      CHECK(r.violations == 0);
      CHECK(r.rate == 0.0);
    }
  }
}

TEST_CASE("no single fault causes a logical error when crosstalk is off") {
  for (CodeName cn : allCodes()) {
    const CodeSpec code = buildCode(cn);
    for (Basis basis : {Basis::Z, Basis::X}) {
      DYNAMIC_SECTION(codeNameStr(cn) << " basis " << (basis == Basis::Z ? "Z" : "X")) {
        auto ion = buildExperiment(code, basis, identityLayout(code.nTotal()), ionNoise());
        auto k1 = k1Exhaustive(ion);
        CHECK(k1.cases > 300);
        CHECK(k1.failures == 0);
        CHECK(k1.condFail == 0.0);

        auto dep = buildExperiment(code, basis, identityLayout(code.nTotal()), depolNoise());
        CHECK(singleFaultFailures(dep) == 0);
      }
    }
  }
}

TEST_CASE("crosstalk on the unoptimized chain defeats Bacon-Shor-13 at one fault") {
  const CodeSpec code = buildCode(CodeName::BaconShor13);
  uint64_t failures = 0;
  for (Basis basis : {Basis::Z, Basis::X}) {
    NoiseParams np;
    np.rabiRatio = 0.1;
    auto ctx = buildExperiment(code, basis, identityLayout(code.nTotal()), np);
    failures += k1Exhaustive(ctx).failures;
  }
  CHECK(failures > 0);
}

TEST_CASE("a syndrome round costs Shor-6X2Z more rotations than Shor-6Z2X") {
  auto rotations = [](CodeName cn) {
    Circuit c = compile(syndromeRoundCircuit(buildCode(cn)));
    int n = 0;
    for (const auto& g : c.gates)
      if (g.op == Op::RX || g.op == Op::RY || g.op == Op::RZ) ++n;
    return n;
  };
  CHECK(rotations(CodeName::Shor6X2Z) - rotations(CodeName::Shor6Z2X) == 4);
}

TEST_CASE("direct estimates are reproducible and thread-count independent") {
  const CodeSpec code = buildCode(CodeName::Surface17);
  auto ctx = buildExperiment(code, Basis::Z, identityLayout(code.nTotal()), depolNoise(0.02));
  auto a = runDirect(ctx, 4000, 123, 1);
  auto b = runDirect(ctx, 4000, 123, 1);
  auto c = runDirect(ctx, 4000, 123, 4);
  CHECK(a.violations == b.violations);
  CHECK(a.violations == c.violations);
  CHECK(a.violations > 0);
  CHECK(a.rate == c.rate);
  CHECK(a.ci.low == c.ci.low);
  CHECK(a.ci.high == c.ci.high);
}

TEST_CASE("subset estimator: strata bookkeeping and reproducibility") {
  const CodeSpec code = buildCode(CodeName::Shor6Z2X);
  auto ctx = buildExperiment(code, Basis::X, identityLayout(code.nTotal()), depolNoise(2e-3));
  CHECK_THROWS_AS(runSubset(ctx, 100, 5, 1), std::invalid_argument);

  auto r = runSubset(ctx, 400, 17, 3);
  REQUIRE(r.strata.size() == 4);
  CHECK(r.strata[0].failRate == 0.0);
  CHECK(r.strata[1].samples > 1000);
  CHECK(r.strata[1].failRate == 0.0);  // distance three: one fault never fails
  double mass = r.tailBound;
  for (const auto& st : r.strata) mass += st.probability;
  CHECK(mass == Catch::Approx(1.0).epsilon(1e-9));
  CHECK(r.rate >= r.tailBound);
  CHECK(r.rate <= 1.0);

  auto r2 = runSubset(ctx, 400, 17, 3);
  CHECK(r.rate == r2.rate);
  CHECK(r.violations == r2.violations);
}

TEST_CASE("truncated two-fault enumeration tracks the subset estimate") {
  const CodeSpec code = buildCode(CodeName::BaconShor13);
  NoiseParams np;
  np.T2 = 0.2;  // dephasing only
  auto ctx = buildExperiment(code, Basis::X, identityLayout(code.nTotal()), np);
  double exact = truncatedRateK2(ctx);
  auto sub = runSubset(ctx, 3000, 31, 2);
  CHECK(exact >= 0.0);
  CHECK(std::abs(exact - sub.rate) <= sub.tailBound + 5.0 * sub.sigma + 1e-12);
}

TEST_CASE("comparator formula special values are exact") {
  double inf = std::numeric_limits<double>::infinity();
  CHECK(physicalComparatorRate(1e-4, 1e-5, 0.0, inf) == 1e-4 + 4 * 1e-5);
  CHECK(physicalComparatorRate(0.0, 0.0, 0.0, inf) == 0.0);

  NoiseParams np = depolNoise(1e-3);
  CHECK(physicalComparatorRate(np) == 1e-3 + 4 * (1e-3 / 10.0));

  NoiseParams ion;
  ion.T2 = 0.5;
  double tCrit = 230e-6;
  CHECK(physicalComparatorRate(ion) == 2.0 * idleFlipProbability(tCrit, 0.5));
}

TEST_CASE("bias ratio conventions") {
  CHECK(biasZZ(0.25, 0.75) == 0.75);
  CHECK(biasZZ(0.75, 0.25) == 0.25);
  CHECK(std::isnan(biasZZ(0.0, 0.0)));
  CHECK(logLinearCrossing(1.0, 2.0, 1e-3, 4e-3, 2e-3, 2e-3) ==
        Catch::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(std::isnan(logLinearCrossing(1.0, 2.0, 1e-3, 1e-3, 2e-3, 2e-3)));
}
