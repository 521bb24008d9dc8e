#include <cmath>
#include <random>

#include "ctc/eventop.hpp"
#include "ctc/fock.hpp"
#include "doctest.h"

using namespace ctc;
using cplx = std::complex<double>;

namespace {

std::vector<cplx> rail_coeffs(double eta, double phi, int N) {
  std::vector<cplx> j{-std::sqrt(1 - eta) * std::exp(cplx(0, -phi))};
  for (int m = 1; m <= N; ++m) j.push_back(eta * std::pow(std::sqrt(1 - eta) * std::exp(cplx(0, phi)), m - 1));
  return j;
}

// Plain double sums over rails 0..N.
std::pair<cplx, cplx> brute_sums(double eta, double phi, double kappa, int N) {
  auto j = rail_coeffs(eta, phi, N);
  cplx aa = 0, ada = 0;
  for (int m = 0; m <= N; ++m)
    for (int n = 0; n <= N; ++n) {
      double c = std::exp(-kappa * kappa * (m - n) * (m - n));
      aa += j[m] * j[n] * c;
      ada += std::conj(j[m]) * j[n] * c;
    }
  return {aa, ada};
}

// Printed phi = pi/2 truncated forms; the <AA> lag factor carries (+i sqrt(1-eta))^{|v|}.
std::pair<cplx, cplx> printed_half_pi(double eta, double kappa, int X) {
  const cplx i(0, 1);
  const double s = std::sqrt(1 - eta);
  cplx aa = 0, ada = 0;
  for (int v = -X; v <= X; ++v) {
    const double e = std::exp(-kappa * kappa * v * v);
    const int a = std::abs(v);
    aa += eta * eta / (2 - eta) * std::pow(i * s, a) * e;
    ada += eta * std::pow(i, -v - a) * std::pow(i * s, -a) * std::pow(1 - eta, a) * e;
  }
  for (int m = 1; m <= X; ++m) {
    const double e = std::exp(-kappa * kappa * m * m);
    aa += 2.0 * eta * std::pow(i * s, m) * e;
    ada -= eta * (std::pow(-i * s, m) + std::pow(i * s, m)) * e;
  }
  aa -= 1 - eta;
  ada += 1 - eta;
  return {aa, ada};
}

double max_abs(const RMat& a) { return a.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_SUITE("eventop") {

TEST_CASE("Gaussian commutator kernel") {
  auto k0 = kernel_from_physical({2e-13, 0.0});
  CHECK(k0.kappa == 0.0);
  CHECK(k0(3, 17) == 1.0);
  auto k1 = CommutatorKernel::gaussian(1.0);
  CHECK(k1(4, 5) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(k1(5, 5) == 1.0);
  CHECK(CommutatorKernel::gaussian(10.0)(0, 1) < 1e-43);
  CHECK(kappa_from_physical({1.0, std::sqrt(8.0)}) == doctest::Approx(1.0));
  RMat bad = RMat::Identity(3, 3);
  bad(0, 1) = 0.5;
  CHECK_THROWS_AS(CommutatorKernel::explicit_matrix(bad), InvalidState);
  CHECK_THROWS_AS(CommutatorKernel::gaussian(-1.0), InvalidState);
}

TEST_CASE("truncated kernel sums against brute force") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(0, 1);
  for (int t = 0; t < 30; ++t) {
    double eta = 0.3 + 0.7 * U(rng), phi = 2 * M_PI * U(rng), kappa = std::pow(10.0, -2 + 3 * U(rng));
    auto s = kernel_sums({eta, phi}, CommutatorKernel::gaussian(kappa));
    auto [aa, ada] = brute_sums(eta, phi, kappa, 200);
    CHECK(std::abs(s.aa - aa) < 1e-10);
    CHECK(std::abs(s.ada - ada) < 1e-10);
    TruncationSpec d;
    d.method = SumMethod::Direct;
    auto sd = kernel_sums({eta, phi}, CommutatorKernel::gaussian(kappa), d);
    CHECK(std::abs(sd.aa - aa) < 1e-8);
  }
}

TEST_CASE("printed quarter-turn forms") {
  for (double eta : {0.2, 0.5, 2.0 / 3.0, 0.9})
    for (double kappa : {0.05, 0.3, 1.0, 3.0}) {
      auto s = kernel_sums({eta, M_PI / 2}, CommutatorKernel::gaussian(kappa));
      int X = s.cutoff;
      auto [aa, ada] = printed_half_pi(eta, kappa, X);
      CHECK(std::abs(s.ada - ada) < 1e-10);
      CHECK(std::abs(s.aa - aa) < 1e-10);
    }
}

TEST_CASE("truncation control") {
  TruncationSpec t;
  t.X = 2;
  CHECK_THROWS_AS(kernel_sums({0.5, M_PI / 2}, CommutatorKernel::gaussian(0.01), t), TruncationTooSmall);
  CHECK_THROWS_AS(eo_g2(0.1, CommutatorKernel::gaussian(0.5), G2Method::direct(10)), TruncationTooSmall);
  auto s = kernel_sums({0.5, M_PI / 2}, CommutatorKernel::gaussian(0.5));
  CHECK(s.tail <= 1e-12);
}

TEST_CASE("Gaussian moments interpolate between the two limits") {
  const double r = 0.8;
  GaussianPrep sq{0, r, M_PI / 2, 0};
  BsParams bs{2.0 / 3.0, M_PI / 2};
  auto hi = eo_gaussian_moments(bs, sq, CommutatorKernel::gaussian(10.0));
  CHECK(max_abs(hi.state.cov - std::cosh(2 * r) * RMat::Identity(2, 2)) < 1e-6);

  auto in = prep_state(sq);
  auto lo = eo_gaussian_moments(bs, sq, CommutatorKernel::gaussian(1e-4));
  auto rotated = apply_symplectic(in, phase_shift(1, 0, std::arg(ec_sum(bs.eta, bs.phi))));
  CHECK(max_abs(lo.state.cov - rotated.cov) < 1e-6);
  auto lo2 = eo_gaussian_moments(bs, sq, CommutatorKernel::gaussian(0.01));
  CHECK(max_abs(lo2.state.cov - rotated.cov) < 1e-3);

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> U(0, 1);
  for (int t = 0; t < 20; ++t) {
    BsParams b{0.2 + 0.8 * U(rng), 6 * U(rng)};
    GaussianPrep g{cplx(U(rng), U(rng)), 1.5 * U(rng), 3 * U(rng), 3 * U(rng)};
    auto d = eo_gaussian_moments(b, g, CommutatorKernel::gaussian(12.0));
    auto ref = ctc_beamsplitter_moments(b, g);
    CHECK(max_abs(d.state.cov - ref.state.cov) < 1e-6);
    CHECK(max_abs(d.state.mean - ref.state.mean) < 1e-12);
    // Coherent input: kernel-independent.
    GaussianPrep coh{g.alpha, 0, 0, 0};
    auto c1 = eo_gaussian_moments(b, coh, CommutatorKernel::gaussian(0.05));
    auto c2 = eo_gaussian_moments(b, coh, CommutatorKernel::gaussian(5.0));
    CHECK(max_abs(c1.state.cov - c2.state.cov) < 1e-12);
    CHECK(max_abs(c1.state.mean - c2.state.mean) < 1e-12);
    CHECK(d.state.det() >= 1 - 1e-9);
  }
}

TEST_CASE("photon number is conserved") {
  auto a = eo_photon_number({0.5, M_PI / 2}, CommutatorKernel::gaussian(10.0));
  CHECK(std::abs(a.mean_n - 1) < 1e-6);
  auto b = eo_photon_number({0.9, M_PI / 2}, CommutatorKernel::gaussian(0.1));
  CHECK(std::abs(b.mean_n - 1) < 1e-6);
  CHECK(eo_photon_number({1.0, M_PI / 2}, CommutatorKernel::gaussian(0.7)).mean_n == 1.0);
  double worst = 0, worst_y = 0;
  for (double kappa : {0.0, 0.01, 0.1, 0.5, 1.0, 3.0, 10.0})
    for (int k = 0; k <= 10; ++k) {
      auto p = eo_photon_number({0.1 * k, M_PI / 2}, CommutatorKernel::gaussian(kappa));
      worst = std::max(worst, std::abs(p.mean_n - 1));
      worst = std::max(worst, p.x_residual);
      worst_y = std::max(worst_y, p.y_residual);
    }
  CHECK(worst < 1e-5);
  CHECK(worst_y < 1e-5);
  auto ph = eo_photon_number({0.4, 1.1}, CommutatorKernel::gaussian(0.3));
  CHECK(std::abs(ph.mean_n - 1) < 1e-10);
}

TEST_CASE("g2 limits") {
  for (int k = 1; k <= 9; ++k) {
    double eta = 0.1 * k;
    auto hi = eo_g2(eta, CommutatorKernel::gaussian(10.0), G2Method::truncated());
    CHECK(std::abs(hi.g2 - photon_ctc_stats(eta, M_PI / 2).g2) < 1e-3);
    auto lo = eo_g2(eta, CommutatorKernel::gaussian(0.01), G2Method::truncated());
    CHECK(lo.g2 < 1e-3);
  }
  for (double kappa : {0.01, 1.0, 10.0})
    for (double eta : {0.0, 1.0}) {
      CHECK(std::abs(eo_g2(eta, CommutatorKernel::gaussian(kappa), G2Method::truncated()).g2) < 1e-14);
      CHECK(std::abs(eo_g2(eta, CommutatorKernel::gaussian(kappa), G2Method::direct()).g2) < 1e-14);
    }
}

TEST_CASE("direct quadruple sum agrees with the truncated evaluation") {
  for (double kappa : {0.01, 0.3, 1.0, 10.0})
    for (double eta : {0.3, 0.5, 0.7, 0.9}) {
      auto d = eo_g2(eta, CommutatorKernel::gaussian(kappa), G2Method::direct());
      auto t = eo_g2(eta, CommutatorKernel::gaussian(kappa), G2Method::truncated());
      CHECK(std::abs(d.g2 - t.g2) < 1e-4);
      CHECK(d.cutoff >= 60);
    }
  // Off the quarter turn.
  for (double phi : {0.0, 1.0, 2.5}) {
    auto d = eo_g2(0.6, CommutatorKernel::gaussian(0.4), G2Method::direct(), phi);
    auto t = eo_g2(0.6, CommutatorKernel::gaussian(0.4), G2Method::truncated(), phi);
    CHECK(std::abs(d.g2 - t.g2) < 1e-4);
  }
}

TEST_CASE("explicit kernels") {
  // Identity kernel is the finite equivalent circuit.
  const int N = 80;
  auto id = CommutatorKernel::explicit_matrix(RMat::Identity(N + 1, N + 1));
  auto g = eo_g2(0.5, id, G2Method::direct());
  auto gt = eo_g2(0.5, id, G2Method::truncated());
  CHECK(std::abs(g.g2 - 4.0 / 3.0) < 1e-9);
  CHECK(std::abs(gt.g2 - g.g2) < 1e-12);
  auto ones = CommutatorKernel::explicit_matrix(RMat::Ones(N + 1, N + 1));
  CHECK(std::abs(eo_g2(0.5, ones, G2Method::direct()).g2) < 1e-9);
  RMat gk(N + 1, N + 1);
  for (int m = 0; m <= N; ++m)
    for (int n = 0; n <= N; ++n) gk(m, n) = std::exp(-0.25 * (m - n) * (m - n));
  auto ex = eo_g2(0.5, CommutatorKernel::explicit_matrix(gk), G2Method::direct());
  auto ga = eo_g2(0.5, CommutatorKernel::gaussian(0.5), G2Method::truncated());
  CHECK(std::abs(ex.g2 - ga.g2) < 1e-9);
}

TEST_CASE("direct sums are reproducible across worker counts") {
  auto k = CommutatorKernel::gaussian(0.2);
  auto a = eo_g2(0.5, k, G2Method::direct(), M_PI / 2, 1);
  auto b = eo_g2(0.5, k, G2Method::direct(), M_PI / 2, 1);
  auto c = eo_g2(0.5, k, G2Method::direct(), M_PI / 2, 3);
  CHECK(a.g2 == b.g2);
  CHECK(std::abs(a.g2 - c.g2) < 1e-12);
}

TEST_CASE("OTC interpolation: generalized formalism versus extended circuit") {
  const double r = 1.0;
  GaussianPrep coh{cplx(0.3, 0.2), 0, 0, 0}, anc{0, r, 0, 0};
  BsParams half{0.5, 0.0};
  for (double C : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    auto g = eo_otc_interpolation(C, coh, anc, half, OtcPath::Generalized);
    auto c = eo_otc_interpolation(C, coh, anc, half, OtcPath::Circuit);
    CHECK(max_abs(g.joint.cov - c.joint.cov) < 1e-9);
    CHECK(max_abs(g.joint.mean - c.joint.mean) < 1e-9);
    CHECK_NOTHROW(g.joint.validate());
    // Signal quadrature: matched part passes, mismatched part is squeezed.
    CHECK(g.signal.cov(0, 0) == doctest::Approx(0.5 * (1 + C) + 0.5 * std::exp(-2 * r) * (1 - C)).epsilon(1e-12));
    CHECK(max_abs(g.signal.mean - prep_state(coh).mean) < 1e-12);
  }
  auto zero = eo_otc_interpolation(0.0, coh, anc, half);
  CHECK(zero.signal.cov(0, 0) == doctest::Approx(std::exp(-r) * std::cosh(r)).epsilon(1e-12));
  auto one = eo_otc_interpolation(1.0, coh, anc, half);
  CHECK(max_abs(one.signal.cov - RMat::Identity(2, 2)) < 1e-12);

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> U(0, 1);
  for (int t = 0; t < 20; ++t) {
    GaussianPrep a{cplx(U(rng), U(rng)), U(rng), 3 * U(rng), 3 * U(rng)};
    GaussianPrep b{cplx(U(rng), -U(rng)), U(rng), 3 * U(rng), 3 * U(rng)};
    BsParams bs{U(rng), 6 * U(rng)};
    double C = U(rng);
    auto g = eo_otc_interpolation(C, a, b, bs, OtcPath::Generalized);
    auto c = eo_otc_interpolation(C, a, b, bs, OtcPath::Circuit);
    CHECK(max_abs(g.joint.cov - c.joint.cov) < 1e-9);
    CHECK(max_abs(g.joint.mean - c.joint.mean) < 1e-9);
  }
}

TEST_CASE("gravitational time dilation") {
  auto g = gravity_scenario(1e5, 2e-13);
  CHECK(g.delta_t > 4e-13);
  CHECK(g.delta_t < 6e-13);
  // First-order form 2 (1.49e-11) h / r_e.
  CHECK(g.delta_t == doctest::Approx(2 * 1.49e-11 * 1e5 / earth::radius).epsilon(0.02));
  CHECK(1 - g.C01 > 0.1);
  CHECK(g.C01 == doctest::Approx(std::exp(-g.kappa * g.kappa)));
  auto flat = gravity_scenario(0.0, 2e-13);
  CHECK(flat.delta_t == 0.0);
  CHECK(flat.C01 == 1.0);
  auto metre = gravity_scenario(1.0, 2e-13);
  CHECK(std::abs((1 - metre.C01) - metre.kappa * metre.kappa) < 1e-15);
  CHECK(1 - metre.C01 < 1e-10);
  CHECK_THROWS_AS(gravity_scenario(-1.0, 2e-13), InvalidState);
}

}
