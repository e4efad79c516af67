#include <catch2/catch_amalgamated.hpp>

#include "ionchain/tableau.hpp"

using namespace ionchain;

TEST_CASE("bell state measurements") {
  Tableau t(2);
  t.applyUnitary(Gate::h(0));
  t.applyUnitary(Gate::cnot(0, 1));
  CHECK(t.expectation(mul(Pauli::X(0), Pauli::X(1))) == 1);
  CHECK(t.expectation(mul(Pauli::Z(0), Pauli::Z(1))) == 1);
  CHECK(t.expectation(Pauli::Z(0)) == 0);

  MeasRecord m0 = t.measureZ(0);
  CHECK(m0.random);
  CHECK(m0.bit == 0);
  MeasRecord m1 = t.measureZ(1);
  CHECK(!m1.random);
  CHECK(m1.bit == 0);
}

TEST_CASE("pauli errors flip stabilizer signs") {
  Tableau t(2);
  t.applyUnitary(Gate::h(0));
  t.applyUnitary(Gate::cnot(0, 1));
  t.applyPauli(Pauli::X(1));
  CHECK(t.expectation(mul(Pauli::Z(0), Pauli::Z(1))) == -1);
  CHECK(t.expectation(mul(Pauli::X(0), Pauli::X(1))) == 1);
}

TEST_CASE("ghz forced branch") {
  Tableau t(3);
  t.applyUnitary(Gate::h(0));
  t.applyUnitary(Gate::cnot(0, 1));
  t.applyUnitary(Gate::cnot(0, 2));
  CHECK(t.expectation(mul(Pauli::X(0), mul(Pauli::X(1), Pauli::X(2)))) == 1);
  MeasRecord m = t.measureZ(0, 1);
  CHECK(m.random);
  CHECK(m.bit == 1);
  CHECK(t.measureZ(1).bit == 1);
  CHECK(t.measureZ(2).bit == 1);
}

TEST_CASE("prep resets including deterministic one") {
  Tableau t(1);
  t.applyPauli(Pauli::X(0));
  CHECK(t.measureZ(0).bit == 1);
  t.prepZ(0);
  MeasRecord m = t.measureZ(0);
  CHECK(!m.random);
  CHECK(m.bit == 0);
}

TEST_CASE("ancilla-mediated parity measurement") {
  Tableau t(3);
  t.applyUnitary(Gate::h(0));
  t.applyUnitary(Gate::h(1));
  t.prepZ(2);
  t.applyUnitary(Gate::cnot(0, 2));
  t.applyUnitary(Gate::cnot(1, 2));
  MeasRecord m = t.measureZ(2, 0);
  CHECK(m.random);

  // Now in the +1 eigenstate of Z0Z1; an X error flips the next reading.
  t.applyPauli(Pauli::X(0));
  t.prepZ(2);
  t.applyUnitary(Gate::cnot(0, 2));
  t.applyUnitary(Gate::cnot(1, 2));
  MeasRecord m2 = t.measureZ(2);
  CHECK(!m2.random);
  CHECK(m2.bit == 1);
}

TEST_CASE("rotation sign exactness") {
  Tableau t(1);
  t.applyUnitary(Gate::rx(0, 90));
  CHECK(t.expectation(Pauli::Y(0)) == -1);
  Tableau u(1);
  u.applyUnitary(Gate::rx(0, -90));
  CHECK(u.expectation(Pauli::Y(0)) == 1);
}

TEST_CASE("direct multi-qubit pauli measurement") {
  Tableau t(2);
  MeasRecord m = t.measure(Pauli::XX(0, 1), 1);
  CHECK(m.random);
  CHECK(t.expectation(mul(Pauli::Z(0), Pauli::Z(1))) == 1);
  MeasRecord m2 = t.measure(Pauli::XX(0, 1));
  CHECK(!m2.random);
  CHECK(m2.bit == 1);
}

TEST_CASE("runReference records and projects") {
  std::vector<Gate> g = {Gate::prepZ(0), Gate::prepZ(1), Gate::h(0), Gate::cnot(0, 1),
                         Gate::measZ(0), Gate::measZ(1)};
  auto rec = runReference(g, 2);
  REQUIRE(rec.size() == 2);
  CHECK(rec[0].random);
  CHECK(rec[0].bit == 0);
  CHECK(!rec[1].random);
  CHECK(rec[1].bit == 0);
}
