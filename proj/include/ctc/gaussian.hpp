#pragma once
#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "ctc/errors.hpp"

namespace ctc {

using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

// Quadratures Q = A + A†, P = i(A† - A); vacuum covariance is the identity.
// Ordering (Q1, P1, Q2, P2, ...).
struct GaussianState {
  int n_modes = 0;
  RVec mean;
  RMat cov;

  static GaussianState vacuum(int n);
  // Single mode with <V>, <VV>, <V†V>.
  static GaussianState from_moments(std::complex<double> v, std::complex<double> vv, double vdv);

  void validate(double sym_tol = 1e-12, double psd_tol = 1e-8) const;
  GaussianState mode(int k) const;  // marginal
  double det() const { return cov.determinant(); }
};

GaussianState tensor(const GaussianState& a, const GaussianState& b);
RMat symplectic_form(int n);
GaussianState apply_symplectic(const GaussianState& s, const RMat& S);

// A_i -> cos t A_i + sin t A_j, A_j -> cos t A_j - sin t A_i. t = pi/4 is 50:50.
RMat beamsplitter(int n, int i, int j, double t);
// A_k -> e^{i a} A_k
RMat phase_shift(int n, int k, double a);
// Passive map a_{modes[x]} -> sum_y U(x, y) a_{modes[y]}, U unitary.
RMat passive_symplectic(int n, const std::vector<int>& modes, const Eigen::MatrixXcd& U);
// A' = sqrt(eta) A + e^{i phi} sqrt(1-eta) B, B' = sqrt(eta) B - e^{-i phi} sqrt(1-eta) A.
Eigen::Matrix2cd bs_unitary(double eta, double phi);

// Zero the covariance between `modes` and the rest; marginals and means kept.
GaussianState break_entanglement(const GaussianState& s, const std::vector<int>& modes);
GaussianState two_mode_squeezed_vacuum(double r);

struct GaussianPrep {
  std::complex<double> alpha{0.0, 0.0};
  double r = 0.0;
  double theta_R = 0.0;
  double theta_S = 0.0;
};

// V = p A + q A† + alpha.
std::complex<double> prep_p(const GaussianPrep& g);
std::complex<double> prep_q(const GaussianPrep& g);
GaussianState prep_state(const GaussianPrep& g);

struct BsParams {
  double eta = 1.0;
  double phi = 0.0;
  void validate() const;
};

// Output-mode coefficient j_m for the beamsplitter CTC (m = 0 is the direct path).
std::complex<double> ec_coefficient(double eta, double phi, int m);
// sum_m j_m and sum_m j_m^2 over the infinite series.
std::complex<double> ec_sum(double eta, double phi);
std::complex<double> ec_sum_sq(double eta, double phi);

struct CtcMoments {
  std::complex<double> v;    // <V'>
  std::complex<double> vv;   // <V'V'>
  double vdv = 0.0;          // <V'†V'>
  std::complex<double> phase;  // e^{-i Phi} = sum_m j_m
  GaussianState state;
  double tail_bound = 0.0;
};

CtcMoments ctc_beamsplitter_moments(const BsParams& bs, const GaussianPrep& prep);
// Same quantities from the explicit series j_0..j_N.
CtcMoments ctc_beamsplitter_series(const BsParams& bs, const GaussianPrep& prep, int N = 10000);

// Covariance for the P-squeezed vacuum (theta_R = theta_S + pi/2), (Q, P) order.
Eigen::Matrix2d ctc_squeezed_covariance(const BsParams& bs, double r);

struct OtcVariances {
  double var_q = 1.0;
  double var_p = 1.0;
};
OtcVariances otc_variances(int M, double r);

// M passes: 50:50 with a Q-squeezed ancilla, break, inverse 50:50.
GaussianState otc_circuit_simulate(int M, double r, std::complex<double> alpha,
                                   bool squeeze_q = true);

struct HupResult {
  double var_q_a = 1.0;
  double var_p_c = 1.0;
  double sigma_product = 1.0;  // sigma_Q sigma_P
  double mean_photons_ancilla = 0.0;  // per arm
  double K = 1.0;  // 2^M Var
};
HupResult hup_demo(int M, double r, std::complex<double> alpha);

struct WignerGrid {
  std::vector<double> q, p;
  RMat w;  // w(i, j) at (q[i], p[j])
  double dq = 0.0, dp = 0.0;
  double integral() const { return w.sum() * dq * dp; }
};

// Square grid of half-width `range` around the mean; range <= 0 picks 7 sigma.
WignerGrid wigner_grid(const GaussianState& s, double range = 0.0, int resolution = 201);
double wigner_value(const GaussianState& s, double q, double p);

}  // namespace ctc
