#include "ctc/fock.hpp"

#include <cmath>
#include <map>

#include "ctc/gaussian.hpp"

namespace ctc {

using cplx = std::complex<double>;

EcCoefficients ec_output_coefficients(double eta, double phi, int N) {
  if (!(eta >= 0 && eta <= 1)) throw InvalidState("eta outside [0, 1]");
  if (N < 0) throw InvalidState("N must be non-negative");
  EcCoefficients c{eta, phi, {}, std::pow(1 - eta, N / 2.0)};
  c.j.push_back(ec_coefficient(eta, phi, 0));
  if (eta == 0.0) return c;
  const cplx z = std::polar(std::sqrt(1 - eta), phi);
  cplx zp = 1.0;
  for (int m = 1; m <= N; ++m, zp *= z) c.j.push_back(eta * zp);
  return c;
}

PhotonStats photon_ctc_stats(double eta, double phi) {
  if (!(eta >= 0 && eta <= 1)) throw InvalidState("eta outside [0, 1]");
  return {1.0, 8 * eta * (1 - eta) / (2 - eta)};
}

namespace {

std::vector<cplx> rail_weights(double eta, double phi, int N) {
  auto c = ec_output_coefficients(eta, phi, N - 1);
  std::vector<cplx> w = c.j;
  w.resize(N, 0.0);
  // Residual rail: sqrt(eta) z^{N-1}.
  w.push_back(std::sqrt(eta) * std::pow(std::polar(std::sqrt(1 - eta), phi), N - 1));
  return w;
}

using Occ = std::vector<int>;
using FockVec = std::map<Occ, cplx>;

FockVec annihilate(const FockVec& in, const std::vector<cplx>& w) {
  FockVec out;
  for (const auto& [occ, amp] : in)
    for (std::size_t m = 0; m < w.size(); ++m) {
      if (occ[m] == 0 || w[m] == 0.0) continue;
      Occ o = occ;
      --o[m];
      out[o] += w[m] * std::sqrt(double(occ[m])) * amp;
    }
  return out;
}

double norm2(const FockVec& v) {
  double s = 0;
  for (const auto& kv : v) s += std::norm(kv.second);
  return s;
}

}  // namespace

PhotonStats fock_simulate(double eta, double phi, int N_rails, int cutoff) {
  if (N_rails < 1) throw InvalidState("N_rails must be at least 1");
  if (!(eta >= 0 && eta <= 1)) throw InvalidState("eta outside [0, 1]");
  auto w = rail_weights(eta, phi, N_rails);
  if (cutoff == 0) {
    // <A†_m A_n> = delta_mn; <A†_m A†_n A_r A_s> = d_ms d_nr + d_mr d_ns - 2 d_mn d_mr d_ms.
    double s2 = 0, s4 = 0;
    for (auto x : w) {
      s2 += std::norm(x);
      s4 += std::norm(x) * std::norm(x);
    }
    return {s2, (2 * s2 * s2 - 2 * s4) / (s2 * s2)};
  }
  if (cutoff < 1) throw TruncationTooSmall("single photons need cutoff >= 1");
  if (N_rails > 12) throw TruncationTooSmall("explicit Fock path limited to 12 rails");
  FockVec psi{{Occ(w.size(), 1), 1.0}};
  auto a1 = annihilate(psi, w);
  auto a2 = annihilate(a1, w);
  double n = norm2(a1);
  return {n, norm2(a2) / (n * n)};
}

}  // namespace ctc
