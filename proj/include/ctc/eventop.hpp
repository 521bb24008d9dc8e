#pragma once
#include <complex>

#include "ctc/gaussian.hpp"

namespace ctc {

// C_mn = [A_(m), A_(n)†] between equivalent-circuit rails.
struct CommutatorKernel {
  enum class Kind { Gaussian, Explicit };
  Kind kind = Kind::Gaussian;
  double kappa = 0.0;
  RMat C;  // Explicit only, rails 0..N

  static CommutatorKernel gaussian(double kappa);
  static CommutatorKernel explicit_matrix(RMat C);

  double operator()(int m, int n) const;
  double lag(int v) const;  // Gaussian only
  int rails() const { return kind == Kind::Explicit ? static_cast<int>(C.rows()) : -1; }
  void validate() const;
};

struct PhysicalCoupling {
  double sigma_t = 1.0;     // detector temporal resolution [s]
  double delta_tau = 0.0;   // CTC temporal size [s]
  void validate() const;
};

// kappa^2 = delta_tau^2 / (8 sigma_t^2)
double kappa_from_physical(const PhysicalCoupling& p);
CommutatorKernel kernel_from_physical(const PhysicalCoupling& p);

enum class SumMethod { Truncated, Direct };

struct TruncationSpec {
  int X = 0;          // lag cutoff; 0 picks one from the tail estimate
  int direct_N = 0;   // rails 0..N for brute-force sums; 0 picks one (at least 60)
  double max_tail = 1e-8;
  SumMethod method = SumMethod::Truncated;
};

// sum_{mn} j_m j_n C_mn and sum_{mn} j*_m j_n C_mn.
struct KernelSums {
  std::complex<double> aa;
  std::complex<double> ada;
  int cutoff = 0;   // X or N actually used
  double tail = 0.0;
};

KernelSums kernel_sums(const BsParams& bs, const CommutatorKernel& k, const TruncationSpec& t = {});

struct EoMoments {
  std::complex<double> v, vv;
  double vdv = 0.0;
  std::complex<double> phase;
  GaussianState state;  // feed to wigner_grid
  KernelSums sums;
};

EoMoments eo_gaussian_moments(const BsParams& bs, const GaussianPrep& prep, const CommutatorKernel& k,
                              const TruncationSpec& t = {});

// <A'†A'> = X <V†V> + Y |<V>|^2; X = sum j*_m j_n C_mn, Y = sum j*_m j_n sqrt(1 - C_mn^2).
struct EoPhotonNumber {
  double mean_n = 0.0;
  std::complex<double> X_factor, Y_factor;
  double x_residual = 0.0;  // |X - 1|
  double y_residual = 0.0;  // |Y|
  int cutoff = 0;
  double tail = 0.0;
};

EoPhotonNumber eo_photon_number(const BsParams& bs, const CommutatorKernel& k, const TruncationSpec& t = {});

struct G2Method {
  SumMethod kind = SumMethod::Truncated;
  int cutoff = 0;  // N for Direct, X for Truncated; 0 = automatic
  double max_tail = 1e-8;
  static G2Method direct(int N = 0) { return {SumMethod::Direct, N, 1e-6}; }
  static G2Method truncated(int X = 0) { return {SumMethod::Truncated, X, 1e-8}; }
};

struct EoG2 {
  double g2 = 0.0;
  double mean_n = 0.0;
  double numerator = 0.0;  // <A'†A'†A'A'>
  int cutoff = 0;
  double tail = 0.0;
};

// Single photon per rail.
EoG2 eo_g2(double eta, const CommutatorKernel& k, const G2Method& method, double phi = M_PI / 2,
           int workers = 0);

// One arm of a two-mode Gaussian state (inputs prep_a, prep_b mixed on bs) passes an
// OTC whose rails overlap by C10. arm_a = A'_(1), arm_b = B'_(0); signal is arm A
// after undoing the beamsplitter.
struct OtcInterpolation {
  GaussianState joint;   // (arm_a, arm_b)
  GaussianState arm_a, arm_b, signal;
};

enum class OtcPath { Generalized, Circuit };

OtcInterpolation eo_otc_interpolation(double C10, const GaussianPrep& prep_a, const GaussianPrep& prep_b,
                                      const BsParams& bs, OtcPath path = OtcPath::Generalized);

namespace earth {
constexpr double G = 6.67430e-11;       // m^3 kg^-1 s^-2
constexpr double M = 5.9722e24;         // kg
constexpr double radius = 6.371e6;      // m
constexpr double c = 299792458.0;       // m/s
}  // namespace earth

struct GravityResult {
  double h = 0.0;
  double delta_t = 0.0;
  double kappa = 0.0;
  double C01 = 1.0;
};

GravityResult gravity_scenario(double h, double sigma_t);

}  // namespace ctc
