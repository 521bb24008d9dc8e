#include <cmath>
#include <random>

#include "ctc/gaussian.hpp"
#include "doctest.h"

using namespace ctc;
using cplx = std::complex<double>;

namespace {

// Output mode sum_m j_m A_m over independent copies, assembled as a real 2x2N
// transfer matrix acting on the block-diagonal copy covariance.
GaussianState passive_output_oracle(const std::vector<cplx>& j, const GaussianState& in) {
  int n = static_cast<int>(j.size());
  RMat T(2, 2 * n);
  RMat cov = RMat::Zero(2 * n, 2 * n);
  RVec mean(2 * n);
  for (int m = 0; m < n; ++m) {
    double a = j[m].real(), b = j[m].imag();
    T.block(0, 2 * m, 2, 2) << a, -b, b, a;
    cov.block(2 * m, 2 * m, 2, 2) = in.cov;
    mean.segment(2 * m, 2) = in.mean;
  }
  // Mode is not normalized when sum |j|^2 != 1; vacuum part fixes the commutator.
  double w = 0;
  for (auto x : j) w += std::norm(x);
  GaussianState out{1, T * mean, T * cov * T.transpose() + (1 - w) * RMat::Identity(2, 2)};
  return out;
}

std::vector<cplx> coeffs(double eta, double phi, int N) {
  std::vector<cplx> j;
  double s = std::sqrt(1 - eta);
  j.push_back(-s * std::exp(cplx(0, -phi)));
  cplx z = s * std::exp(cplx(0, phi)), zp = 1;
  for (int m = 1; m <= N; ++m, zp *= z) j.push_back(eta * zp);
  return j;
}

double max_abs(const RMat& a) { return a.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_SUITE("gaussianctc") {

TEST_CASE("state basics and validation") {
  auto v = GaussianState::vacuum(2);
  CHECK_NOTHROW(v.validate());
  auto bad = GaussianState::vacuum(1);
  bad.cov *= 0.5;
  CHECK_THROWS_AS(bad.validate(), InvalidState);
  GaussianPrep g{cplx(0.3, -0.2), 0.7, 0.4, 1.1};
  auto s = prep_state(g);
  CHECK_NOTHROW(s.validate());
  CHECK(s.det() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.mean(0) == doctest::Approx(0.6));
  CHECK(s.mean(1) == doctest::Approx(-0.4));
  // P-squeezed for theta_R = theta_S + pi/2.
  auto sp = prep_state({0, 0.5, M_PI / 2, 0});
  CHECK(sp.cov(1, 1) == doctest::Approx(std::exp(-1.0)));
  CHECK(sp.cov(0, 0) == doctest::Approx(std::exp(1.0)));
}

TEST_CASE("symplectic helpers preserve the symplectic form") {
  RMat om = symplectic_form(3);
  for (RMat S : {beamsplitter(3, 0, 2, 0.3), phase_shift(3, 1, 1.2)})
    CHECK(max_abs(S * om * S.transpose() - om) < 1e-14);
}

TEST_CASE("beamsplitter CTC moments") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> U(0, 1);
  SUBCASE("coherent input only picks up a phase") {
    for (int t = 0; t < 20; ++t) {
      BsParams bs{U(rng), 2 * M_PI * U(rng)};
      GaussianPrep g{cplx(U(rng), U(rng)), 0, 0, 0};
      auto m = ctc_beamsplitter_moments(bs, g);
      CHECK(std::abs(std::abs(m.phase) - 1) < 1e-12);
      CHECK(max_abs(m.state.cov - RMat::Identity(2, 2)) < 1e-12);
      CHECK(std::abs(m.v - m.phase * g.alpha) < 1e-14);
      CHECK(std::abs(std::abs(m.v) - std::abs(g.alpha)) < 1e-12);
    }
  }
  SUBCASE("full reflectivity decouples") {
    GaussianPrep g{cplx(0.4, 0.1), 0.8, 0.3, 0.9};
    auto m = ctc_beamsplitter_moments({1.0, 0.77}, g);
    CHECK(std::abs(m.phase - 1.0) < 1e-15);
    CHECK(max_abs(m.state.cov - prep_state(g).cov) < 1e-12);
  }
  SUBCASE("number moment is sinh^2 r + |alpha|^2") {
    for (int t = 0; t < 20; ++t) {
      GaussianPrep g{cplx(U(rng) - 0.5, U(rng)), 2 * U(rng), 3 * U(rng), 3 * U(rng)};
      auto m = ctc_beamsplitter_moments({U(rng), 6 * U(rng)}, g);
      CHECK(m.vdv == doctest::Approx(std::pow(std::sinh(g.r), 2) + std::norm(g.alpha)).epsilon(1e-12));
    }
  }
  SUBCASE("closed form against series and passive-transform oracle") {
    for (int t = 0; t < 20; ++t) {
      BsParams bs{0.3 + 0.7 * U(rng), 6 * U(rng)};
      GaussianPrep g{cplx(U(rng), U(rng) - 0.5), 1.5 * U(rng), 3 * U(rng), 3 * U(rng)};
      auto m = ctc_beamsplitter_moments(bs, g);
      auto ser = ctc_beamsplitter_series(bs, g, 400);
      CHECK(max_abs(m.state.cov - ser.state.cov) < 1e-10);
      auto orc = passive_output_oracle(coeffs(bs.eta, bs.phi, 400), prep_state(g));
      CHECK(max_abs(m.state.cov - orc.cov) < 1e-10);
      CHECK(max_abs(m.state.mean - orc.mean) < 1e-10);
      CHECK(m.state.det() >= 1 - 1e-9);
    }
  }
  SUBCASE("eta = 0 passes through with a phase") {
    GaussianPrep g{cplx(0.5, 0), 0.6, M_PI / 2, 0};
    auto m = ctc_beamsplitter_moments({0.0, 0.4}, g);
    CHECK(std::abs(m.phase + std::exp(cplx(0, -0.4))) < 1e-15);
    CHECK(m.state.det() == doctest::Approx(1.0));
  }
}

TEST_CASE("squeezed covariance through the CTC") {
  const double r = 1.0;
  Eigen::Matrix2d in;
  in << std::exp(2 * r), 0, 0, std::exp(-2 * r);
  CHECK((ctc_squeezed_covariance({0.5, 0.0}, r) - in).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((ctc_squeezed_covariance({0.5, M_PI}, r) - in).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((ctc_squeezed_covariance({1.0, 1.3}, r) - in).cwiseAbs().maxCoeff() < 1e-12);
  // eta = 0 is pass-through with a phase: same squeezing, rotated axes.
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> e0(ctc_squeezed_covariance({0.0, 1.3}, r));
  CHECK(e0.eigenvalues()(0) == doctest::Approx(std::exp(-2 * r)).epsilon(1e-12));
  CHECK(e0.eigenvalues()(1) == doctest::Approx(std::exp(2 * r)).epsilon(1e-12));
  auto pass = ctc_beamsplitter_moments({0.0, 1.3}, {0, r, M_PI / 2, 0});
  CHECK((ctc_squeezed_covariance({0.0, 1.3}, r) - Eigen::Matrix2d(pass.state.cov)).cwiseAbs().maxCoeff() < 1e-12);
  auto th = ctc_squeezed_covariance({2.0 / 3.0, M_PI / 2}, r);
  CHECK((th - std::cosh(2.0) * Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() < 1e-10);

  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> U(0, 1);
  for (int t = 0; t < 50; ++t) {
    BsParams bs{U(rng), 2 * M_PI * U(rng)};
    double rr = 2 * U(rng);
    auto c = ctc_squeezed_covariance(bs, rr);
    CHECK(std::abs(c(0, 1) - c(1, 0)) == 0.0);
    CHECK(c.determinant() >= 1 - 1e-9);
    auto m = ctc_beamsplitter_moments(bs, {0, rr, M_PI / 2, 0});
    CHECK((c - Eigen::Matrix2d(m.state.cov)).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("OTC variance formula") {
  auto v0 = otc_variances(0, 3.0);
  CHECK(v0.var_q == 1.0);
  CHECK(v0.var_p == 1.0);
  CHECK(otc_variances(1, 30.0).var_q == doctest::Approx(0.5).epsilon(1e-12));
  double r = 5 * std::log(2.0);  // R = 10
  CHECK(otc_variances(2, r).var_q == doctest::Approx(0.25073242187500).epsilon(1e-13));
  auto v1 = otc_variances(1, 0.8);
  CHECK(v1.var_q == doctest::Approx(std::exp(-0.8) * std::cosh(0.8)));
  CHECK(v1.var_p == doctest::Approx(std::exp(0.8) * std::cosh(0.8)));
}

TEST_CASE("OTC circuit reproduces the closed form") {
  auto s0 = otc_circuit_simulate(1, 0.0, cplx(0.3, 0.4));
  CHECK(max_abs(s0.cov - RMat::Identity(2, 2)) < 1e-15);
  CHECK(otc_circuit_simulate(1, 2.0, 0).cov(0, 0) == doctest::Approx(std::exp(-2.0) * std::cosh(2.0)).epsilon(1e-12));
  CHECK(std::abs(otc_circuit_simulate(1, 2.0, 0).cov(0, 0) - 0.50915781944437) < 1e-12);
  double worst = 0, worst_p = 0, worst_mean = 0;
  const cplx alpha(0.7, -1.3);
  for (int M = 1; M <= 10; ++M)
    for (double r = 0; r <= 10.0 + 1e-9; r += 0.5) {
      auto s = otc_circuit_simulate(M, r, alpha);
      auto v = otc_variances(M, r);
      worst = std::max(worst, std::abs(s.cov(0, 0) - v.var_q));
      // Var P reaches e^{20}; compare it relatively.
      worst_p = std::max(worst_p, std::abs(s.cov(1, 1) / v.var_p - 1));
      worst_mean = std::max({worst_mean, std::abs(s.mean(0) - 2 * alpha.real()), std::abs(s.mean(1) - 2 * alpha.imag())});
    }
  CHECK(worst < 1e-10);
  CHECK(worst_p < 1e-12);
  CHECK(worst_mean < 1e-12);
}

TEST_CASE("uncertainty product from the two-arm construction") {
  auto big = hup_demo(1, 12.0, cplx(1, 0));
  CHECK(big.var_q_a * big.var_p_c == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(big.sigma_product == doctest::Approx(0.5).epsilon(1e-9));
  auto h5 = hup_demo(1, 5.0, 0);
  CHECK(h5.sigma_product < 1.0);
  CHECK(hup_demo(3, 0.0, 0).sigma_product == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(h5.mean_photons_ancilla == doctest::Approx(std::pow(std::sinh(5.0), 2)));

  // R = N and M = N: K stays below 2 while the ancilla cost doubles each step.
  double prev = 0;
  for (int N = 2; N <= 16; ++N) {
    double r = N * std::log(2.0) / 2;
    auto h = hup_demo(N, r, 0);
    CHECK(h.K == doctest::Approx(2 - std::ldexp(1.0, -N)).epsilon(1e-10));
    if (N > 4) CHECK(h.mean_photons_ancilla / prev > 1.9);
    prev = h.mean_photons_ancilla;
  }
}

TEST_CASE("TMSV through an OTC loses its correlations") {
  for (double r : {0.3, 1.0, 2.5}) {
    auto t = two_mode_squeezed_vacuum(r);
    CHECK_NOTHROW(t.validate());
    auto b = break_entanglement(t, {1});
    CHECK(max_abs(b.cov.block(0, 2, 2, 2)) == 0.0);
    CHECK(max_abs(b.mode(0).cov - std::cosh(2 * r) * RMat::Identity(2, 2)) < 1e-12);
    CHECK(max_abs(b.mode(1).cov - std::cosh(2 * r) * RMat::Identity(2, 2)) < 1e-12);
    CHECK_NOTHROW(b.validate());
  }
}

TEST_CASE("Wigner grids") {
  auto vac = GaussianState::vacuum(1);
  auto g = wigner_grid(vac, 5.0, 201);
  CHECK(g.w(100, 100) == doctest::Approx(1 / M_PI).epsilon(1e-14));
  CHECK(std::abs(g.integral() - 1) < 1e-3);

  GaussianState th{1, RVec::Zero(2), std::cosh(2.0) * RMat::Identity(2, 2)};
  auto gt = wigner_grid(th);
  CHECK(std::abs(gt.integral() - 1) < 1e-3);
  CHECK(max_abs(gt.w - gt.w.transpose()) < 1e-10);
  CHECK(max_abs(gt.w - gt.w.colwise().reverse()) < 1e-10);

  const double r = 0.6;
  auto sq = prep_state({cplx(0.2, -0.1), r, 0, 0});
  auto gs = wigner_grid(sq, 0.0, 401);
  CHECK(std::abs(gs.integral() - 1) < 1e-3);
  // Curvature of log W at the centre along each axis: -2 / Var.
  int c = 200;
  auto lw = [&](int i, int j) { return std::log(gs.w(i, j)); };
  double kq = (lw(c + 1, c) - 2 * lw(c, c) + lw(c - 1, c)) / (gs.dq * gs.dq);
  double kp = (lw(c, c + 1) - 2 * lw(c, c) + lw(c, c - 1)) / (gs.dp * gs.dp);
  CHECK(std::sqrt(kq / kp) == doctest::Approx(std::exp(2 * r)).epsilon(1e-9));

  GaussianState sing{1, RVec::Zero(2), RMat::Zero(2, 2)};
  CHECK_THROWS_AS(wigner_grid(sing), SingularCovariance);
}

}
