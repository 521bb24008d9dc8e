#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <array>
#include <cmath>
#include <random>

#include "ctc/fock.hpp"
#include "ctc/parallel.hpp"

namespace ctc {

void SpodParams::validate() const {
  if (!(chi > 0 && chi < 1)) throw InvalidState("chi outside (0, 1)");
  if (N < 0) throw InvalidState("N must be non-negative");
}

SpodStats spod_stats(const SpodParams& p) {
  p.validate();
  const double c2 = p.chi * p.chi, c4 = c2 * c2;
  const double a = 4 - 4 * c2 + 9 * c4;
  const double decay = std::pow(1 - c2, double(p.N)) - 1;  // (1 - chi^2)^N - 1
  SpodStats s;
  s.large_chi = p.chi > 0.1;
  s.mean_n = a * decay / (5 * c4 - 4);
  s.g2 = p.N == 0 ? 0.0 : -2 * c2 * std::pow(4 - 5 * c4, 2) / (a * a * decay);
  return s;
}

SpodStats spod_exact(const SpodParams& p) {
  p.validate();
  const double ch2 = std::pow(std::cosh(p.chi), 2);
  const double click = 1 - std::pow(1 / ch2, double(p.N));  // some source fires
  SpodStats s;
  s.large_chi = p.chi > 0.1;
  s.mean_n = ch2 * click;
  s.g2 = p.N == 0 ? 0.0 : 2 * std::pow(std::tanh(p.chi), 2) / click;
  return s;
}

namespace {

// Two modes (signal, idler) truncated at `cut` photons each; index = s*(cut+1)+i.
struct TwoMode {
  int n;
  Eigen::MatrixXd s, i;
  explicit TwoMode(int cut) : n(cut + 1) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(double(k));
    Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
    s = Eigen::kroneckerProduct(a, id);
    i = Eigen::kroneckerProduct(id, a);
  }
};

}  // namespace

SpodMoments spod_fmoments(const SpodParams& p, int cutoff) {
  p.validate();
  TwoMode t(cutoff);
  const double q = p.chi;  // p = 1
  Eigen::MatrixXd v = t.s + q * t.i.transpose();
  Eigen::MatrixXd idl = t.i + q * t.s.transpose();
  Eigen::MatrixXd nn = idl.transpose() * idl;
  const int D = t.n * t.n;
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(D, D);
  Eigen::MatrixXd d = (p.mu * id - p.nu * nn) * nn;
  Eigen::MatrixXd u = id - d;
  Eigen::VectorXd vac = Eigen::VectorXd::Zero(D);
  vac(0) = 1;
  Eigen::MatrixXd vd = v.transpose();
  auto ev = [&](const Eigen::VectorXd& x) { return vac.dot(x); };

  SpodMoments m;
  m.f1 = ev(vd * (d * (d * (v * vac))));
  Eigen::VectorXd uv = u * vac;
  m.f2 = uv.squaredNorm();
  Eigen::VectorXd uuv = u * uv;
  m.f3 = uuv.squaredNorm();
  m.f4 = ev(vd * (d * (d * (v * uv))));
  m.f5 = ev(vd * (d * (vd * (d * (d * (v * (d * (v * vac))))))));
  const double N = double(p.N);
  const double f2N = std::pow(m.f2, N), f3N = std::pow(m.f3, N);
  m.mean_n = m.f1 * (f2N - 1) / (m.f2 - 1);
  m.aadag = 4 * m.f1 * m.f4 * (m.f3 - m.f2 + f3N * (m.f2 - 1) - f2N * (m.f3 - 1)) /
                ((m.f2 - 1) * (m.f3 - 1) * (m.f3 - m.f2)) +
            m.f5 * (f3N - 1) / (m.f3 - 1);
  m.g2 = p.N == 0 ? 0.0 : m.aadag / (m.mean_n * m.mean_n);
  return m;
}

namespace {

struct Tally {
  std::array<std::int64_t, 4> pow{};  // sums of n, n^2, n^3, n^4
};

}  // namespace

SpodMc spod_montecarlo(const SpodParams& p, long trials, std::uint64_t seed, int workers) {
  p.validate();
  if (trials < 1) throw InvalidState("trials must be at least 1");
  const double u = std::pow(std::tanh(p.chi), 2);
  const int chunks = 64;
  auto tallies = parallel_map<Tally>(
      chunks,
      [&](int c) {
        std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(c)};
        std::mt19937_64 rng(seq);
        // Lowest-index clicking source, then its pair count given a click.
        std::geometric_distribution<long> first(u), extra(1 - u);
        Tally t;
        const long lo = trials * c / chunks, hi = trials * (c + 1) / chunks;
        for (long k = lo; k < hi; ++k) {
          if (first(rng) >= p.N) continue;
          const std::int64_t n = 1 + extra(rng);
          t.pow[0] += n;
          t.pow[1] += n * n;
          t.pow[2] += n * n * n;
          t.pow[3] += n * n * n * n;
        }
        return t;
      },
      workers);
  Tally tot;
  for (const auto& t : tallies)
    for (int k = 0; k < 4; ++k) tot.pow[k] += t.pow[k];
  const double T = double(trials);
  const double e1 = tot.pow[0] / T, e2 = tot.pow[1] / T, e3 = tot.pow[2] / T, e4 = tot.pow[3] / T;
  SpodMc r;
  r.trials = trials;
  r.mean_n_est = e1;
  r.stderr_ = std::sqrt(std::max(0.0, e2 - e1 * e1) / T);
  const double y = e2 - e1;  // <n(n-1)>
  if (e1 > 0) {
    r.g2_est = y / (e1 * e1);
    const double vy = (e4 - 2 * e3 + e2) - y * y;
    const double cxy = (e3 - e2) - e1 * y;
    const double vx = e2 - e1 * e1;
    const double var = vy / std::pow(e1, 4) + 4 * y * y * vx / std::pow(e1, 6) - 4 * y * cxy / std::pow(e1, 5);
    r.g2_stderr = std::sqrt(std::max(0.0, var) / T);
  }
  return r;
}

long spod_min_sources(double chi, double epsilon) {
  if (!(chi > 0 && chi < 1)) throw InvalidState("chi outside (0, 1)");
  if (!(epsilon > 0)) throw InvalidState("epsilon must be positive");
  if (epsilon >= 1) return 1;
  const double l = std::log1p(-chi * chi);
  long n = std::max(1L, long(std::floor(std::log(epsilon) / l)));
  while (n * l >= std::log(epsilon)) ++n;
  while (n > 1 && (n - 1) * l < std::log(epsilon)) --n;
  return n;
}

}  // namespace ctc
