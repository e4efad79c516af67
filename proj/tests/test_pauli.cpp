#include <catch2/catch_amalgamated.hpp>

#include "ionchain/gates.hpp"
#include "ionchain/pauli.hpp"
#include "matrix_oracle.hpp"

using namespace ionchain;

static Pauli fromLetter(int l, int q) {
  switch (l) {
    case 1: return Pauli::X(q);
    case 2: return Pauli::Z(q);
    case 3: return Pauli::Y(q);
    default: return {};
  }
}

TEST_CASE("pauli algebra") {
  CHECK(Pauli::Y(0).sign() == 1);
  CHECK(toString(Pauli::Y(2), 3) == "+IIY");

  Pauli xz = mul(Pauli::X(0), Pauli::Z(0));
  CHECK(toString(xz, 1) == "-iY");
  Pauli zx = mul(Pauli::Z(0), Pauli::X(0));
  CHECK(toString(zx, 1) == "+iY");

  CHECK(!Pauli::X(0).commutesWith(Pauli::Z(0)));
  CHECK(Pauli::X(0).commutesWith(Pauli::X(0)));
  CHECK(Pauli::XX(0, 1).commutesWith(mul(Pauli::Z(0), Pauli::Z(1))));
  CHECK(!Pauli::XX(0, 1).commutesWith(Pauli::Z(0)));

  CHECK(mul(Pauli::Y(0), Pauli::Y(0)).identity());
  CHECK(mul(Pauli::Y(0), Pauli::Y(0)).sign() == 1);
  CHECK(Pauli::XX(0, 5).weight() == 2);
  CHECK(mul(Pauli::X(1), Pauli::Z(1)).weight() == 1);
}

TEST_CASE("single-qubit conjugation matches dense matrices") {
  std::vector<Gate> gates = {Gate::h(0)};
  for (int d : {90, -90, 180, -180}) {
    gates.push_back(Gate::rx(0, d));
    gates.push_back(Gate::ry(0, d));
    gates.push_back(Gate::rz(0, d));
  }
  for (const Gate& g : gates) {
    for (int l = 1; l <= 3; l++) {
      Pauli p = fromLetter(l, 0);
      Pauli got = conjugate(p, g);
      oracle::Mat U = oracle::gateMatrix(g);
      oracle::Mat want =
          oracle::matmul(oracle::matmul(U, oracle::pauliMatrix(p, {0})), oracle::dagger(U));
      INFO(toString(p, 1) << " through op " << int(g.op) << " deg " << g.deg);
      CHECK(oracle::approxEqual(want, oracle::pauliMatrix(got, {0})));
    }
  }
}

TEST_CASE("two-qubit conjugation matches dense matrices") {
  std::vector<Gate> gates = {Gate::cnot(0, 1), Gate::cnot(1, 0), Gate::xx(0, 1, 45),
                             Gate::xx(0, 1, -45), Gate::xx(1, 0, 45)};
  for (const Gate& g : gates) {
    std::vector<int> qs = {g.a, g.b};
    for (int la = 0; la <= 3; la++) {
      for (int lb = 0; lb <= 3; lb++) {
        if (la == 0 && lb == 0) continue;
        Pauli p = mul(fromLetter(la, g.a), fromLetter(lb, g.b));
        Pauli got = conjugate(p, g);
        oracle::Mat U = oracle::gateMatrix(g);
        oracle::Mat want =
            oracle::matmul(oracle::matmul(U, oracle::pauliMatrix(p, qs)), oracle::dagger(U));
        INFO("letters " << la << "," << lb << " through op " << int(g.op));
        CHECK(oracle::approxEqual(want, oracle::pauliMatrix(got, qs)));
      }
    }
  }
}

TEST_CASE("conversion facts used by the fault analysis") {
  // CNOT propagation
  Pauli r = conjugate(Pauli::X(0), Gate::cnot(0, 1));
  CHECK(r == Pauli::XX(0, 1));
  r = conjugate(Pauli::Z(1), Gate::cnot(0, 1));
  CHECK((r.z == 0b11 && r.x == 0 && r.sign() == 1));
  r = conjugate(mul(Pauli::Y(0), Pauli::Y(1)), Gate::cnot(0, 1));
  CHECK(letter(r, 0) == 1);
  CHECK(letter(r, 1) == 2);
  CHECK(r.sign() == -1);  // YY -> -XZ

  // Z on a participant of the MS gate picks up the partner
  r = conjugate(Pauli::Z(0), Gate::xx(0, 1, 45));
  CHECK(letter(r, 0) == 3);
  CHECK(letter(r, 1) == 1);
  CHECK(r.sign() == -1);  // Z0 -> -Y0X1
  r = conjugate(Pauli::Z(0), Gate::xx(0, 1, -45));
  CHECK(r.sign() == 1);  // Z0 -> +Y0X1

  // Hadamard
  CHECK(conjugate(Pauli::X(3), Gate::h(3)) == Pauli::Z(3));
  CHECK(conjugate(Pauli::Z(3), Gate::h(3)) == Pauli::X(3));
  CHECK(conjugate(Pauli::Y(3), Gate::h(3)).sign() == -1);

  // Spectator qubits never acquire support
  Pauli zfar = Pauli::Z(7);
  CHECK(conjugate(zfar, Gate::xx(0, 1, 45)) == zfar);
  CHECK(conjugate(zfar, Gate::cnot(2, 3)) == zfar);
}
