#include "ctc/eventop.hpp"

#include <cmath>
#include <functional>
#include <string>

#include "ctc/parallel.hpp"

namespace ctc {

using cplx = std::complex<double>;

CommutatorKernel CommutatorKernel::gaussian(double kappa) {
  CommutatorKernel k;
  k.kappa = kappa;
  k.validate();
  return k;
}

CommutatorKernel CommutatorKernel::explicit_matrix(RMat C) {
  CommutatorKernel k;
  k.kind = Kind::Explicit;
  k.C = std::move(C);
  k.validate();
  return k;
}

double CommutatorKernel::lag(int v) const {
  if (kind != Kind::Gaussian) throw InvalidState("lag() needs a Gaussian kernel");
  return std::exp(-kappa * kappa * double(v) * double(v));
}

double CommutatorKernel::operator()(int m, int n) const {
  if (kind == Kind::Gaussian) return lag(m - n);
  if (m < 0 || n < 0 || m >= C.rows() || n >= C.rows()) throw IndexOutOfRange("kernel index");
  return C(m, n);
}

void CommutatorKernel::validate() const {
  if (kind == Kind::Gaussian) {
    if (!(kappa >= 0)) throw InvalidState("kappa must be non-negative");
    return;
  }
  if (C.rows() != C.cols() || C.rows() < 1) throw DimensionMismatch("kernel matrix must be square");
  for (int m = 0; m < C.rows(); ++m) {
    if (std::abs(C(m, m) - 1) > 1e-12) throw InvalidState("kernel diagonal must be 1");
    for (int n = 0; n < C.rows(); ++n)
      if (C(m, n) < 0 || C(m, n) > 1 || std::abs(C(m, n) - C(n, m)) > 1e-12)
        throw InvalidState("kernel entries must be symmetric and in [0, 1]");
  }
}

void PhysicalCoupling::validate() const {
  if (!(sigma_t > 0)) throw InvalidState("sigma_t must be positive");
  if (!(delta_tau >= 0)) throw InvalidState("delta_tau must be non-negative");
}

double kappa_from_physical(const PhysicalCoupling& p) {
  p.validate();
  return p.delta_tau / (std::sqrt(8.0) * p.sigma_t);
}

CommutatorKernel kernel_from_physical(const PhysicalCoupling& p) {
  return CommutatorKernel::gaussian(kappa_from_physical(p));
}

namespace {

constexpr double kPrune = 1e-12;

struct Rails {
  double eta, phi;
  cplx j0, z;
  double az;
  Rails(double e, double f) : eta(e), phi(f) {
    if (!(e >= 0 && e <= 1)) throw InvalidState("eta outside [0, 1]");
    j0 = ec_coefficient(e, f, 0);
    z = std::polar(std::sqrt(1 - e), f);
    az = e == 0.0 ? 0.0 : std::abs(z);  // eta = 0: no rails beyond 0
  }
  std::vector<cplx> coeffs(int N) const {
    std::vector<cplx> j(N + 1, 0.0);
    j[0] = j0;
    cplx zp = 1.0;
    for (int m = 1; m <= N; ++m, zp *= z) j[m] = eta * zp;
    return j;
  }
  // 4 sum_{m>N} |j_m|
  double geo_tail(int N) const {
    if (eta == 0.0 || az == 0.0) return 0.0;
    return 4 * eta * std::pow(az, N + 1) / (1 - az);
  }
};

// Every dropped term carries a lag > X and a rail index > X.
double lag_tail(double kappa, double az, int X) {
  return 200 * std::exp(-kappa * kappa * double(X + 1) * double(X + 1)) * std::pow(az, X);
}

int auto_lag_cutoff(double kappa, double az) {
  int X = 1;
  while (lag_tail(kappa, az, X) > 1e-13 && X < 1000000) X += X < 64 ? 1 : X / 8;
  return X;
}

int auto_rails(const Rails& r, double max_tail) {
  int N = 60;
  while (r.geo_tail(N) > max_tail && N < 4000) N += 4;
  return N;
}

// Sums for a kernel depending only on the lag, g(v) = g(-v), lags |v| <= X.
KernelSums lag_sums(const Rails& r, const std::function<double(int)>& g, int X) {
  KernelSums s;
  s.cutoff = X;
  if (r.eta == 0.0) {
    s.aa = r.j0 * r.j0 * g(0);
    s.ada = std::norm(r.j0) * g(0);
    return s;
  }
  cplx cross = 0, sym = 0, herm = 0;
  cplx zp = 1.0, zq = 1.0;  // z^v, z^{v-1}
  for (int v = 0; v <= X; ++v, zp *= r.z) {
    const double gv = g(v);
    if (v >= 1) {
      cross += r.eta * zq * gv;  // j_v g(v)
      zq *= r.z;
    }
    sym += (v == 0 ? 1.0 : 2.0) * zp * gv;
    herm += (v == 0 ? 1.0 : 2.0 * zp.real()) * gv;
  }
  s.aa = r.j0 * r.j0 * g(0) + 2.0 * r.j0 * cross + r.eta * r.eta / (1.0 - r.z * r.z) * sym;
  s.ada = std::norm(r.j0) * g(0) + 2.0 * (std::conj(r.j0) * cross).real() + r.eta * herm;
  return s;
}

KernelSums direct_sums(const Rails& r, const std::function<double(int, int)>& C, int N) {
  auto j = r.coeffs(N);
  KernelSums s;
  s.cutoff = N;
  for (int m = 0; m <= N; ++m)
    for (int n = 0; n <= N; ++n) {
      const double c = C(m, n);
      s.aa += j[m] * j[n] * c;
      s.ada += std::conj(j[m]) * j[n] * c;
    }
  s.tail = r.geo_tail(N);
  return s;
}

}  // namespace

KernelSums kernel_sums(const BsParams& bs, const CommutatorKernel& k, const TruncationSpec& t) {
  bs.validate();
  k.validate();
  Rails r(bs.eta, bs.phi);
  if (k.kind == CommutatorKernel::Kind::Explicit) {
    auto s = direct_sums(r, [&](int m, int n) { return k(m, n); }, k.rails() - 1);
    if (s.tail > t.max_tail) throw TruncationTooSmall("explicit kernel has too few rails, tail " + std::to_string(s.tail));
    return s;
  }
  if (t.method == SumMethod::Direct) {
    const int N = t.direct_N > 0 ? t.direct_N : auto_rails(r, t.max_tail);
    auto s = direct_sums(r, [&](int m, int n) { return k(m, n); }, N);
    if (s.tail > t.max_tail) throw TruncationTooSmall("direct_N = " + std::to_string(N));
    return s;
  }
  const int X = t.X > 0 ? t.X : auto_lag_cutoff(k.kappa, r.az);
  const double tail = lag_tail(k.kappa, r.az, X);
  if (tail > t.max_tail) throw TruncationTooSmall("X = " + std::to_string(X) + ", tail " + std::to_string(tail));
  auto s = lag_sums(r, [&](int v) { return k.lag(v); }, X);
  s.tail = tail;
  return s;
}

EoMoments eo_gaussian_moments(const BsParams& bs, const GaussianPrep& prep, const CommutatorKernel& k,
                              const TruncationSpec& t) {
  EoMoments m;
  m.sums = kernel_sums(bs, k, t);
  const cplx p = prep_p(prep), q = prep_q(prep);
  // Displacement is unaffected by the kernel.
  m.phase = ec_sum(bs.eta, bs.phi);
  const cplx a = m.phase * prep.alpha;
  m.v = a;
  m.vv = m.sums.aa * p * q + a * a;
  m.vdv = m.sums.ada.real() * std::norm(q) + std::norm(a);
  m.state = GaussianState::from_moments(m.v, m.vv, m.vdv);
  return m;
}

EoPhotonNumber eo_photon_number(const BsParams& bs, const CommutatorKernel& k, const TruncationSpec& t) {
  EoPhotonNumber out;
  auto s = kernel_sums(bs, k, t);
  Rails r(bs.eta, bs.phi);
  auto off = [](double c) { return std::sqrt(std::max(0.0, 1 - c * c)); };
  KernelSums y;
  if (k.kind == CommutatorKernel::Kind::Explicit || t.method == SumMethod::Direct) {
    y = direct_sums(r, [&](int m, int n) { return off(k(m, n)); }, s.cutoff);
  } else {
    // sqrt(1 - C^2) does not decay with the lag; only the rail amplitudes do.
    int X = 1;
    while (200 * std::pow(r.az, X) > 1e-13 && X < 1000000) X += X < 64 ? 1 : X / 8;
    y = lag_sums(r, [&](int v) { return off(k.lag(v)); }, X);
  }
  out.X_factor = s.ada;
  out.Y_factor = y.ada;
  out.mean_n = s.ada.real();  // single photon: <V> = 0, <V†V> = 1
  out.x_residual = std::abs(s.ada - 1.0);
  out.y_residual = std::abs(y.ada);
  out.cutoff = s.cutoff;
  out.tail = s.tail;
  return out;
}

namespace {

double g2_direct(const Rails& r, const std::function<double(int, int)>& kern, int N, int workers, double& mean_n) {
  auto j = r.coeffs(N);
  const int R = N + 1;
  std::vector<double> C(std::size_t(R) * R);
  std::vector<std::vector<int>> nz(R);
  for (int m = 0; m < R; ++m)
    for (int n = 0; n < R; ++n) {
      double c = kern(m, n);
      if (c < kPrune) c = 0.0;
      C[std::size_t(m) * R + n] = c;
      if (c != 0.0) nz[m].push_back(n);
    }
  auto at = [&](int a, int b) { return C[std::size_t(a) * R + b]; };

  cplx s = 0;
  for (int m = 0; m < R; ++m)
    for (int n : nz[m]) s += std::conj(j[m]) * j[n] * at(m, n);
  mean_n = s.real();

  // sum_{mnrs} j*_m j*_n j_r j_s (C_mr C_ns + C_ms C_nr - 2 C_mn C_mr C_ms); every
  // term needs C_mr or C_ms nonzero.
  auto partial = parallel_map<cplx>(
      R,
      [&](int m) {
        const double* Cm = &C[std::size_t(m) * R];
        std::vector<char> in_m(R, 0);
        for (int x : nz[m]) in_m[x] = 1;
        std::vector<cplx> rows(R);
        for (int n = 0; n < R; ++n) {
          const double* Cn = &C[std::size_t(n) * R];
          const double cmn = Cm[n];
          cplx acc_n = 0;
          for (int rr = 0; rr < R; ++rr) {
            const double cmr = Cm[rr], cnr = Cn[rr];
            cplx inner = 0;
            if (cmr != 0.0) {
              const double b = cnr - 2 * cmn * cmr;
              for (int ss = 0; ss < R; ++ss) inner += j[ss] * (cmr * Cn[ss] + Cm[ss] * b);
            } else if (cnr != 0.0) {
              for (int ss : nz[m]) inner += j[ss] * Cm[ss] * cnr;
            }
            acc_n += j[rr] * inner;
          }
          rows[n] = std::conj(j[n]) * acc_n;
        }
        return std::conj(j[m]) * pairwise_sum(rows);
      },
      workers);
  return pairwise_sum(partial).real();
}

// T = sum_{mnrs} j*_m j*_n j_r j_s C_mn C_mr C_ms = sum_m j*_m |G_m|^2 G_m, G_m = sum_r j_r C_mr.
double star_truncated(const Rails& r, const CommutatorKernel& k, int X) {
  auto j = r.coeffs(2 * X + 1);
  auto G = [&](int m) {
    cplx g = 0;
    for (int rr = std::max(0, m - X); rr <= m + X; ++rr) g += j[rr] * k.lag(rr - m);
    return g;
  };
  std::vector<cplx> terms;
  for (int m = 0; m <= X; ++m) {
    const cplx g = G(m);
    terms.push_back(std::conj(j[m]) * std::norm(g) * g);
  }
  if (r.eta > 0 && r.az > 0) {
    // m > X: G_m = eta z^{m-1} sum_{|v|<=X} z^v C(v); geometric in |z|^4.
    cplx gs = 0;
    for (int v = -X; v <= X; ++v) gs += std::pow(r.z, v) * k.lag(v);
    const double e4 = std::pow(r.eta, 4);
    terms.push_back(e4 * std::norm(gs) * gs * std::pow(r.az, 4 * X) / (1 - std::pow(r.az, 4)));
  }
  return pairwise_sum(terms).real();
}

double star_explicit(const Rails& r, const CommutatorKernel& k) {
  const int N = k.rails() - 1;
  auto j = r.coeffs(N);
  std::vector<cplx> terms;
  for (int m = 0; m <= N; ++m) {
    cplx g = 0;
    for (int rr = 0; rr <= N; ++rr) g += j[rr] * k(m, rr);
    terms.push_back(std::conj(j[m]) * std::norm(g) * g);
  }
  return pairwise_sum(terms).real();
}

}  // namespace

EoG2 eo_g2(double eta, const CommutatorKernel& k, const G2Method& method, double phi, int workers) {
  k.validate();
  Rails r(eta, phi);
  EoG2 out;
  if (method.kind == SumMethod::Direct || k.kind == CommutatorKernel::Kind::Explicit) {
    int N = method.cutoff;
    if (k.kind == CommutatorKernel::Kind::Explicit) {
      N = N > 0 ? std::min(N, k.rails() - 1) : k.rails() - 1;
    } else if (N <= 0) {
      N = auto_rails(r, method.max_tail);
    }
    out.cutoff = N;
    out.tail = r.geo_tail(N);
    if (out.tail > method.max_tail) throw TruncationTooSmall("N = " + std::to_string(N));
    if (method.kind == SumMethod::Direct) {
      out.numerator = g2_direct(r, [&](int m, int n) { return k(m, n); }, N, workers, out.mean_n);
    } else {
      out.mean_n = direct_sums(r, [&](int m, int n) { return k(m, n); }, N).ada.real();
      out.numerator = 2 * out.mean_n * out.mean_n - 2 * star_explicit(r, k);
    }
  } else {
    const int X = method.cutoff > 0 ? method.cutoff : auto_lag_cutoff(k.kappa, r.az);
    out.cutoff = X;
    out.tail = lag_tail(k.kappa, r.az, X);
    if (out.tail > method.max_tail) throw TruncationTooSmall("X = " + std::to_string(X));
    out.mean_n = lag_sums(r, [&](int v) { return k.lag(v); }, X).ada.real();
    out.numerator = 2 * out.mean_n * out.mean_n - 2 * star_truncated(r, k, X);
  }
  out.g2 = out.numerator / (out.mean_n * out.mean_n);
  return out;
}

namespace {

// Linear form c.a + d.a† + const over vacuum modes with Gram matrix G_ij = [a_i, a_j†].
struct LinearMode {
  Eigen::VectorXcd c, d;
  cplx k;
};

GaussianState gram_state(const std::vector<LinearMode>& modes, const Eigen::MatrixXd& G) {
  const int n = static_cast<int>(modes.size());
  const int b = static_cast<int>(G.rows());
  Eigen::MatrixXcd U(2 * n, b), W(2 * n, b);
  GaussianState s{n, RVec(2 * n), RMat(2 * n, 2 * n)};
  const cplx i(0, 1);
  for (int x = 0; x < n; ++x) {
    const auto& m = modes[x];
    U.row(2 * x) = (m.c + m.d.conjugate()).transpose();
    W.row(2 * x) = (m.d + m.c.conjugate()).transpose();
    U.row(2 * x + 1) = (-i * (m.c - m.d.conjugate())).transpose();
    W.row(2 * x + 1) = (-i * (m.d - m.c.conjugate())).transpose();
    s.mean(2 * x) = 2 * m.k.real();
    s.mean(2 * x + 1) = 2 * m.k.imag();
  }
  s.cov = (U * G.cast<cplx>() * W.transpose()).real();
  s.cov = 0.5 * (s.cov + s.cov.transpose()).eval();
  return s;
}

GaussianState pick(const GaussianState& s, int a, int b) {
  GaussianState out{2, RVec(4), RMat(4, 4)};
  const int idx[2] = {a, b};
  for (int x = 0; x < 2; ++x) {
    out.mean.segment(2 * x, 2) = s.mean.segment(2 * idx[x], 2);
    for (int y = 0; y < 2; ++y) out.cov.block(2 * x, 2 * y, 2, 2) = s.cov.block(2 * idx[x], 2 * idx[y], 2, 2);
  }
  return out;
}

}  // namespace

OtcInterpolation eo_otc_interpolation(double C10, const GaussianPrep& prep_a, const GaussianPrep& prep_b,
                                      const BsParams& bs, OtcPath path) {
  if (!(C10 >= 0 && C10 <= 1)) throw InvalidState("C10 outside [0, 1]");
  bs.validate();
  const double t = std::sqrt(bs.eta), s = std::sqrt(1 - bs.eta);
  const cplx ef = std::polar(1.0, bs.phi);
  OtcInterpolation out;
  if (path == OtcPath::Generalized) {
    // Base modes A_(0), A_(1), B_(0), B_(1).
    Eigen::MatrixXd G = Eigen::MatrixXd::Identity(4, 4);
    G(0, 1) = G(1, 0) = G(2, 3) = G(3, 2) = C10;
    const cplx pa = prep_p(prep_a), qa = prep_q(prep_a), pb = prep_p(prep_b), qb = prep_q(prep_b);
    LinearMode a1{Eigen::VectorXcd::Zero(4), Eigen::VectorXcd::Zero(4), t * prep_a.alpha + ef * s * prep_b.alpha};
    a1.c(1) = t * pa;
    a1.d(1) = t * qa;
    a1.c(3) = ef * s * pb;
    a1.d(3) = ef * s * qb;
    LinearMode b0{Eigen::VectorXcd::Zero(4), Eigen::VectorXcd::Zero(4), t * prep_b.alpha - std::conj(ef) * s * prep_a.alpha};
    b0.c(0) = -std::conj(ef) * s * pa;
    b0.d(0) = -std::conj(ef) * s * qa;
    b0.c(2) = t * pb;
    b0.d(2) = t * qb;
    out.joint = gram_state({a1, b0}, G);
  } else {
    // Rails A0, B0 and their mismatch partners D, E; D is mixed with the rail-0
    // output at reflectivity zeta, with displacements rescaled so the mean is kept.
    const double zeta = C10 * C10;
    const double shrink = std::sqrt((1 - C10) / (1 + C10));  // (1 - sqrt zeta) / sqrt(1 - zeta)
    GaussianPrep da = prep_a, db = prep_b;
    da.alpha *= shrink;
    db.alpha *= shrink;
    GaussianState st = tensor(tensor(prep_state(prep_a), prep_state(prep_b)), tensor(prep_state(da), prep_state(db)));
    const auto U = bs_unitary(bs.eta, bs.phi);
    st = apply_symplectic(st, passive_symplectic(4, {2, 3}, U));
    st = apply_symplectic(st, passive_symplectic(4, {0, 1}, U));
    st = apply_symplectic(st, beamsplitter(4, 2, 0, std::asin(std::sqrt(zeta))));
    out.joint = pick(st, 2, 1);
  }
  out.arm_a = out.joint.mode(0);
  out.arm_b = out.joint.mode(1);
  auto back = apply_symplectic(out.joint, passive_symplectic(2, {0, 1}, bs_unitary(bs.eta, bs.phi).adjoint()));
  out.signal = back.mode(0);
  return out;
}

GravityResult gravity_scenario(double h, double sigma_t) {
  if (!(h >= 0)) throw InvalidState("height must be non-negative");
  GravityResult g;
  g.h = h;
  const double rs = 2 * earth::G * earth::M / std::pow(earth::c, 3);
  g.delta_t = rs * std::log1p(h / earth::radius);
  g.kappa = kappa_from_physical({sigma_t, g.delta_t});
  g.C01 = std::exp(-g.kappa * g.kappa);
  return g;
}

}  // namespace ctc
