#include <cmath>
#include <random>

#include "ctc/qcore.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace ctc;

TEST_SUITE("qcore") {

TEST_CASE("tensor of maximally mixed qubits") {
  auto r = tensor(DensityMatrix::maximally_mixed({2}), DensityMatrix::maximally_mixed({2}));
  CHECK(r.dims() == Dims{2, 2});
  CHECK(oracle::max_abs(r.data() - Mat::Identity(4, 4) / 4.0) < 1e-15);
  CHECK_NOTHROW(r.validate());
}

TEST_CASE("tensor of basis states") {
  auto r = tensor(DensityMatrix::basis({2}, 0), DensityMatrix::basis({2}, 1));
  CHECK(std::abs(r.data()(1, 1) - 1.0) < 1e-15);
  CHECK(std::abs(r.data().trace() - 1.0) < 1e-15);
}

TEST_CASE("partial trace matches explicit sandwich sums") {
  std::mt19937_64 rng(7);
  auto a = random_density({3}, rng);
  auto b = random_density({2, 2}, rng);
  auto ab = tensor(a, b);
  CHECK(oracle::max_abs(partial_trace(ab, {0}).data() - a.data()) < 1e-12);
  CHECK(oracle::max_abs(partial_trace(ab, {1, 2}).data() - b.data()) < 1e-12);
  auto g = random_density({3, 4}, rng);
  CHECK(oracle::max_abs(partial_trace(g, {0}).data() - oracle::trace_out_second(g.data(), 3, 4)) < 1e-13);
  CHECK(oracle::max_abs(partial_trace(g, {1}).data() - oracle::trace_out_first(g.data(), 3, 4)) < 1e-13);
  CHECK(oracle::max_abs(partial_trace(g, {0, 1}).data() - g.data()) == 0.0);
}

TEST_CASE("partial trace of a Bell pair") {
  Vec bell = Vec::Zero(4);
  bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
  auto r = partial_trace(DensityMatrix::pure({2, 2}, bell), {0});
  CHECK(oracle::max_abs(r.data() - Mat::Identity(2, 2) / 2.0) < 1e-15);
}

TEST_CASE("partial trace of a middle subsystem") {
  std::mt19937_64 rng(11);
  auto a = random_density({2}, rng), b = random_density({3}, rng), c = random_density({2}, rng);
  auto abc = tensor(tensor(a, b), c);
  CHECK(oracle::max_abs(partial_trace(abc, {1}).data() - b.data()) < 1e-13);
  CHECK(oracle::max_abs(partial_trace(abc, {2, 0}).data() - tensor(a, c).data()) < 1e-13);
  CHECK_THROWS_AS(partial_trace(abc, {3}), IndexOutOfRange);
  CHECK_THROWS_AS(partial_trace(abc, {}), IndexOutOfRange);
}

TEST_CASE("evolve") {
  auto x = standard_gate("X");
  auto r = evolve(DensityMatrix::basis({2}, 0), x);
  CHECK(std::abs(r.data()(1, 1) - 1.0) < 1e-15);
  auto i = standard_gate("I");
  std::mt19937_64 rng(3);
  auto rho = random_density({2, 2}, rng);
  CHECK(oracle::max_abs(evolve(rho, UnitaryOp({2, 2}, Mat::Identity(4, 4))).data() - rho.data()) == 0.0);
  CHECK_THROWS_AS(evolve(rho, i), DimensionMismatch);
}

TEST_CASE("evolve preserves trace, hermiticity and spectrum") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 20; ++t) {
    auto rho = random_density({2, 3}, rng);
    UnitaryOp u({2, 3}, random_unitary(6, rng));
    CHECK_NOTHROW(u.validate());
    auto out = evolve(rho, u);
    CHECK(std::abs(out.data().trace() - 1.0) < 1e-10);
    CHECK(oracle::max_abs(out.data() - out.data().adjoint()) < 1e-10);
    Eigen::SelfAdjointEigenSolver<Mat> e1(rho.data()), e2(0.5 * (out.data() + out.data().adjoint()));
    CHECK((e1.eigenvalues() - e2.eigenvalues()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(std::abs(entropy(out) - entropy(rho)) < 1e-9);
  }
}

TEST_CASE("entropy values and concavity") {
  CHECK(entropy(DensityMatrix::basis({2}, 1)) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(entropy(DensityMatrix::maximally_mixed({2})) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(entropy(DensityMatrix::maximally_mixed({2, 2})) == doctest::Approx(2.0).epsilon(1e-12));
  std::mt19937_64 rng(9);
  for (int t = 0; t < 50; ++t) {
    auto a = random_density({3}, rng), b = random_density({3}, rng);
    DensityMatrix mix({3}, 0.5 * (a.data() + b.data()));
    CHECK(entropy(mix) >= 0.5 * entropy(a) + 0.5 * entropy(b) - 1e-9);
    CHECK(entropy(a) <= std::log2(3.0) + 1e-12);
  }
}

TEST_CASE("trace distance") {
  auto z0 = DensityMatrix::basis({2}, 0), z1 = DensityMatrix::basis({2}, 1);
  CHECK(trace_distance(z0, z0) == doctest::Approx(0.0));
  CHECK(trace_distance(z0, z1) == doctest::Approx(1.0));
  CHECK(trace_distance(z0, DensityMatrix::maximally_mixed({2})) == doctest::Approx(0.5));
  CHECK_THROWS_AS(trace_distance(z0, DensityMatrix::maximally_mixed({2, 2})), DimensionMismatch);
}

TEST_CASE("standard gates") {
  auto h = standard_gate("H").data;
  CHECK(oracle::max_abs(h * h - Mat::Identity(2, 2)) < 1e-15);
  auto s = standard_gate("SWAP");
  CHECK(s.dims == Dims{2, 2});
  CHECK(oracle::max_abs(s.data * s.data - Mat::Identity(4, 4)) == 0.0);
  auto cz = standard_gate("CSIGN").data;
  Mat expect = Mat::Identity(4, 4);
  expect(3, 3) = -1.0;
  CHECK(oracle::max_abs(cz - expect) == 0.0);
  auto cnot = standard_gate("CNOT").data;
  CHECK(std::abs(cnot(3, 2) - 1.0) == 0.0);
  CHECK(std::abs(cnot(0, 0) - 1.0) == 0.0);
  auto rx = standard_gate("ROT", {M_PI, 'x'}).data;
  CHECK(oracle::max_abs(rx - cplx(0, -1) * pauli('X')) < 1e-15);
  CHECK_THROWS_AS(standard_gate("TOFFOLI"), UnknownGate);
  CHECK_THROWS_AS(standard_gate("ROT", {1.0, 'q'}), UnknownGate);
}

TEST_CASE("embed agrees with explicit Kronecker products") {
  Mat x = pauli('X'), z = pauli('Z'), i2 = Mat::Identity(2, 2), i3 = Mat::Identity(3, 3);
  Dims dims{2, 3, 2};
  CHECK(oracle::max_abs(embed(x, dims, {0}) - oracle::kron(oracle::kron(x, i3), i2)) == 0.0);
  CHECK(oracle::max_abs(embed(z, dims, {2}) - oracle::kron(oracle::kron(i2, i3), z)) == 0.0);
  // Two-subsystem operator on non-adjacent, reversed targets.
  Mat xz = oracle::kron(x, z);
  Mat direct = embed(xz, dims, {2, 0});
  CHECK(oracle::max_abs(direct - oracle::kron(oracle::kron(z, i3), x)) == 0.0);
}

TEST_CASE("channel superoperator matches direct application") {
  std::mt19937_64 rng(13);
  Mat u = random_unitary(4, rng);
  QuantumChannel ch;
  ch.out_dims = {2};
  ch.kraus_ops = {u.block(0, 0, 2, 2), u.block(2, 0, 2, 2)};
  CHECK_NOTHROW(ch.validate());
  auto rho = random_density({2}, rng);
  Mat direct = ch.apply(rho.data());
  Mat r = rho.data();
  Vec v = ch.superoperator() * Eigen::Map<Vec>(r.data(), 4);
  CHECK(oracle::max_abs(Eigen::Map<Mat>(v.data(), 2, 2) - direct) < 1e-14);
}

TEST_CASE("validation is explicit") {
  Mat bad = Mat::Identity(2, 2);
  DensityMatrix r({2}, bad);  // trace 2, allowed to exist
  CHECK_THROWS_AS(r.validate(), InvalidState);
  CHECK_THROWS_AS(DensityMatrix({2, 2}, bad), DimensionMismatch);
  CHECK(r.projected().is_valid());
}

}
