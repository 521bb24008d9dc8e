#pragma once
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "ctc/errors.hpp"

namespace ctc {

struct EcCoefficients {
  double eta = 1.0;
  double phi = 0.0;
  std::vector<std::complex<double>> j;  // j_0 .. j_N
  double tail_bound = 0.0;              // (1 - eta)^{N/2}
};

EcCoefficients ec_output_coefficients(double eta, double phi, int N);

struct PhotonStats {
  double mean_n = 0.0;
  double g2 = 0.0;
};

// Single photon into the beamsplitter CTC.
PhotonStats photon_ctc_stats(double eta, double phi);

// N_rails copies j_0..j_{N-1} plus one residual rail carrying the tail, so the
// output mode stays normalized. cutoff = 0 evaluates the single-photon delta
// identities over coefficient sums; cutoff > 0 applies the output mode to the
// Fock state |1,...,1> explicitly (small N_rails only).
PhotonStats fock_simulate(double eta, double phi, int N_rails, int cutoff = 0);

struct SpodParams {
  double chi = 0.01;
  long N = 1;
  double mu = 1.5;
  double nu = 0.5;
  void validate() const;
};

struct SpodStats {
  double mean_n = 0.0;
  double g2 = 0.0;
  bool large_chi = false;  // chi > 0.1: fourth-order expansion unreliable
};

SpodStats spod_stats(const SpodParams& p);

// Per-source vacuum moments of the truncated heralding operators.
struct SpodMoments {
  double f1, f2, f3, f4, f5;
  double mean_n;
  double aadag;  // <a†a†aa>
  double g2;
};
SpodMoments spod_fmoments(const SpodParams& p, int cutoff = 14);

// Exact two-mode-squeezed model with a true bucket detector.
SpodStats spod_exact(const SpodParams& p);

struct SpodMc {
  double mean_n_est = 0.0;
  double g2_est = 0.0;
  double stderr_ = 0.0;     // of mean_n_est
  double g2_stderr = 0.0;
  long trials = 0;
};

// Deterministic for a given seed regardless of worker count.
SpodMc spod_montecarlo(const SpodParams& p, long trials, std::uint64_t seed, int workers = 0);

long spod_min_sources(double chi, double epsilon);

}  // namespace ctc
