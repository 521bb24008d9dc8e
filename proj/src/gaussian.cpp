#include "ctc/gaussian.hpp"

#include <cmath>
#include <string>

namespace ctc {

using cplx = std::complex<double>;

GaussianState GaussianState::vacuum(int n) {
  return {n, RVec::Zero(2 * n), RMat::Identity(2 * n, 2 * n)};
}

GaussianState GaussianState::from_moments(cplx v, cplx vv, double vdv) {
  cplx m2 = vv - v * v;
  double n = vdv - std::norm(v);
  GaussianState s{1, RVec(2), RMat(2, 2)};
  s.mean << 2 * v.real(), 2 * v.imag();
  s.cov << 1 + 2 * n + 2 * m2.real(), 2 * m2.imag(), 2 * m2.imag(), 1 + 2 * n - 2 * m2.real();
  return s;
}

void GaussianState::validate(double sym_tol, double psd_tol) const {
  if (mean.size() != 2 * n_modes || cov.rows() != 2 * n_modes || cov.cols() != 2 * n_modes)
    throw DimensionMismatch("Gaussian state sizes do not match n_modes");
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > sym_tol) throw InvalidState("covariance not symmetric");
  Eigen::MatrixXcd h = cov.cast<cplx>() + cplx(0, 1) * symplectic_form(n_modes).cast<cplx>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  if (es.eigenvalues().minCoeff() < -psd_tol) throw InvalidState("covariance violates the uncertainty relation");
}

GaussianState GaussianState::mode(int k) const {
  if (k < 0 || k >= n_modes) throw IndexOutOfRange("mode " + std::to_string(k));
  return {1, mean.segment(2 * k, 2), cov.block(2 * k, 2 * k, 2, 2)};
}

GaussianState tensor(const GaussianState& a, const GaussianState& b) {
  int n = a.n_modes + b.n_modes;
  GaussianState s{n, RVec(2 * n), RMat::Zero(2 * n, 2 * n)};
  s.mean << a.mean, b.mean;
  s.cov.topLeftCorner(2 * a.n_modes, 2 * a.n_modes) = a.cov;
  s.cov.bottomRightCorner(2 * b.n_modes, 2 * b.n_modes) = b.cov;
  return s;
}

RMat symplectic_form(int n) {
  RMat om = RMat::Zero(2 * n, 2 * n);
  for (int k = 0; k < n; ++k) {
    om(2 * k, 2 * k + 1) = 1;
    om(2 * k + 1, 2 * k) = -1;
  }
  return om;
}

GaussianState apply_symplectic(const GaussianState& s, const RMat& S) {
  if (S.rows() != 2 * s.n_modes) throw DimensionMismatch("symplectic size");
  return {s.n_modes, S * s.mean, S * s.cov * S.transpose()};
}

RMat beamsplitter(int n, int i, int j, double t) {
  RMat S = RMat::Identity(2 * n, 2 * n);
  double c = std::cos(t), sn = std::sin(t);
  for (int x = 0; x < 2; ++x) {
    S(2 * i + x, 2 * i + x) = c;
    S(2 * i + x, 2 * j + x) = sn;
    S(2 * j + x, 2 * i + x) = -sn;
    S(2 * j + x, 2 * j + x) = c;
  }
  return S;
}

RMat phase_shift(int n, int k, double a) {
  RMat S = RMat::Identity(2 * n, 2 * n);
  S(2 * k, 2 * k) = std::cos(a);
  S(2 * k, 2 * k + 1) = -std::sin(a);
  S(2 * k + 1, 2 * k) = std::sin(a);
  S(2 * k + 1, 2 * k + 1) = std::cos(a);
  return S;
}

RMat passive_symplectic(int n, const std::vector<int>& modes, const Eigen::MatrixXcd& U) {
  RMat S = RMat::Identity(2 * n, 2 * n);
  const int k = static_cast<int>(modes.size());
  if (U.rows() != k || U.cols() != k) throw DimensionMismatch("passive map size");
  for (int x = 0; x < k; ++x)
    for (int y = 0; y < k; ++y) {
      // a = (Q + iP)/2, a' = U a: Q' = Re U Q - Im U P, P' = Im U Q + Re U P.
      const int i = modes[x], j = modes[y];
      const double re = U(x, y).real(), im = U(x, y).imag();
      S(2 * i, 2 * j) = re;
      S(2 * i, 2 * j + 1) = -im;
      S(2 * i + 1, 2 * j) = im;
      S(2 * i + 1, 2 * j + 1) = re;
    }
  return S;
}

Eigen::Matrix2cd bs_unitary(double eta, double phi) {
  const double t = std::sqrt(eta), s = std::sqrt(1 - eta);
  Eigen::Matrix2cd u;
  u << t, std::polar(s, phi), -std::polar(s, -phi), t;
  return u;
}

GaussianState break_entanglement(const GaussianState& s, const std::vector<int>& modes) {
  std::vector<bool> in(s.n_modes, false);
  for (int m : modes) {
    if (m < 0 || m >= s.n_modes) throw IndexOutOfRange("mode " + std::to_string(m));
    in[m] = true;
  }
  GaussianState out = s;
  for (int a = 0; a < s.n_modes; ++a)
    for (int b = 0; b < s.n_modes; ++b)
      if (in[a] != in[b]) out.cov.block(2 * a, 2 * b, 2, 2).setZero();
  return out;
}

GaussianState two_mode_squeezed_vacuum(double r) {
  double c = std::cosh(2 * r), sn = std::sinh(2 * r);
  GaussianState s = GaussianState::vacuum(2);
  s.cov.diagonal().setConstant(c);
  s.cov(0, 2) = s.cov(2, 0) = sn;
  s.cov(1, 3) = s.cov(3, 1) = -sn;
  return s;
}

cplx prep_p(const GaussianPrep& g) { return std::polar(std::cosh(g.r), g.theta_R); }
cplx prep_q(const GaussianPrep& g) { return -std::polar(std::sinh(g.r), g.theta_R - 2 * g.theta_S); }

GaussianState prep_state(const GaussianPrep& g) {
  cplx p = prep_p(g), q = prep_q(g);
  return GaussianState::from_moments(g.alpha, g.alpha * g.alpha + p * q, std::norm(q) + std::norm(g.alpha));
}

void BsParams::validate() const {
  if (!(eta >= 0.0 && eta <= 1.0)) throw InvalidState("beamsplitter eta outside [0, 1]");
}

cplx ec_coefficient(double eta, double phi, int m) {
  double s = std::sqrt(1 - eta);
  if (m == 0) return -std::polar(s, -phi);
  return eta * std::pow(std::polar(s, phi), m - 1);
}

cplx ec_sum(double eta, double phi) {
  if (eta == 0.0) return -std::polar(1.0, -phi);
  double s = std::sqrt(1 - eta);
  return (1.0 - std::polar(s, -phi)) / (1.0 - std::polar(s, phi));
}

cplx ec_sum_sq(double eta, double phi) {
  double s2 = 1 - eta;
  return std::polar(s2, -2 * phi) + eta * eta / (1.0 - std::polar(s2, 2 * phi));
}

namespace {

CtcMoments assemble(const GaussianPrep& prep, cplx sj, cplx sj2, double sabs2, double tail) {
  cplx p = prep_p(prep), q = prep_q(prep), a = prep.alpha;
  CtcMoments m;
  m.phase = sj;
  m.v = sj * a;
  m.vv = sj * sj * a * a + sj2 * p * q;
  m.vdv = std::norm(sj * a) + sabs2 * std::norm(q);
  m.state = GaussianState::from_moments(m.v, m.vv, m.vdv);
  m.tail_bound = tail;
  return m;
}

}  // namespace

CtcMoments ctc_beamsplitter_moments(const BsParams& bs, const GaussianPrep& prep) {
  bs.validate();
  // Copies are independent, so <V'V'> = (sum j)^2 <V>^2 + sum j^2 (<VV> - <V>^2), and sum |j|^2 = 1.
  return assemble(prep, ec_sum(bs.eta, bs.phi), ec_sum_sq(bs.eta, bs.phi), 1.0, 0.0);
}

CtcMoments ctc_beamsplitter_series(const BsParams& bs, const GaussianPrep& prep, int N) {
  bs.validate();
  cplx sj = 0, sj2 = 0;
  double sa = 0;
  for (int m = 0; m <= N; ++m) {
    cplx j = ec_coefficient(bs.eta, bs.phi, m);
    sj += j;
    sj2 += j * j;
    sa += std::norm(j);
  }
  return assemble(prep, sj, sj2, sa, std::pow(1 - bs.eta, N / 2.0));
}

Eigen::Matrix2d ctc_squeezed_covariance(const BsParams& bs, double r) {
  bs.validate();
  double e = bs.eta, f = bs.phi;
  double den = 2 + (e - 2) * e + 2 * (e - 1) * std::cos(2 * f);
  double k1 = std::cos(2 * f) + 2 * e * std::pow(std::sin(f), 2) * (2 * (e - 1) * std::cos(2 * f) + e) / den;
  double k2 = -8 * (e - 1) * (e - 1) * std::cos(f) * std::pow(std::sin(f), 3) / den;
  double c = std::cosh(2 * r), s = std::sinh(2 * r);
  Eigen::Matrix2d cov;
  cov << c + k1 * s, k2 * s, k2 * s, c - k1 * s;
  return cov;
}

OtcVariances otc_variances(int M, double r) {
  if (M < 0) throw InvalidState("M must be non-negative");
  // 2^{-R} = e^{-2r}
  double x = std::exp(-2 * r), y = std::exp(2 * r), pm = std::ldexp(1.0, -M);
  return {pm * (1 + (std::ldexp(1.0, M) - 1) * x), pm * (1 + (std::ldexp(1.0, M) - 1) * y)};
}

namespace {

GaussianState otc_pass(const GaussianState& in, double r, bool squeeze_q) {
  GaussianState anc = GaussianState::vacuum(1);
  double sq = std::exp(-2 * r), an = std::exp(2 * r);
  anc.cov(0, 0) = squeeze_q ? sq : an;
  anc.cov(1, 1) = squeeze_q ? an : sq;
  auto s = apply_symplectic(tensor(in, anc), beamsplitter(2, 0, 1, M_PI / 4));
  s = break_entanglement(s, {1});
  s = apply_symplectic(s, beamsplitter(2, 0, 1, -M_PI / 4));
  return s.mode(0);
}

GaussianState coherent(cplx alpha) {
  auto s = GaussianState::vacuum(1);
  s.mean << 2 * alpha.real(), 2 * alpha.imag();
  return s;
}

}  // namespace

GaussianState otc_circuit_simulate(int M, double r, cplx alpha, bool squeeze_q) {
  if (M < 0) throw InvalidState("M must be non-negative");
  GaussianState s = coherent(alpha);
  for (int k = 0; k < M; ++k) s = otc_pass(s, r, squeeze_q);
  return s;
}

HupResult hup_demo(int M, double r, cplx alpha) {
  if (M < 1) throw InvalidState("M must be at least 1");
  auto split = apply_symplectic(tensor(coherent(alpha), GaussianState::vacuum(1)), beamsplitter(2, 0, 1, M_PI / 4));
  GaussianState a = split.mode(0), c = split.mode(1);
  for (int k = 0; k < M; ++k) {
    a = otc_pass(a, r, true);
    c = otc_pass(c, r, false);
  }
  HupResult h;
  h.var_q_a = a.cov(0, 0);
  h.var_p_c = c.cov(1, 1);
  h.sigma_product = std::sqrt(h.var_q_a * h.var_p_c);
  h.mean_photons_ancilla = M * std::pow(std::sinh(r), 2);
  h.K = std::ldexp(h.var_q_a, M);
  return h;
}

double wigner_value(const GaussianState& s, double q, double p) {
  if (s.n_modes != 1) throw DimensionMismatch("Wigner function needs a single mode");
  Eigen::Matrix2d c = s.cov;
  double d = c.determinant();
  if (d < 1e-14) throw SingularCovariance("det = " + std::to_string(d));
  Eigen::Vector2d x(q - s.mean(0), p - s.mean(1));
  return std::exp(-x.dot(c.inverse() * x)) / (M_PI * std::sqrt(d));
}

WignerGrid wigner_grid(const GaussianState& s, double range, int resolution) {
  if (s.n_modes != 1) throw DimensionMismatch("Wigner function needs a single mode");
  if (resolution < 2) throw InvalidState("resolution must be at least 2");
  double d = s.cov.determinant();
  if (d < 1e-14) throw SingularCovariance("det = " + std::to_string(d));
  if (range <= 0) {
    Eigen::SelfAdjointEigenSolver<RMat> es(s.cov);
    range = 7 * std::sqrt(es.eigenvalues().maxCoeff() / 2);
  }
  WignerGrid g;
  g.dq = g.dp = 2 * range / (resolution - 1);
  for (int i = 0; i < resolution; ++i) {
    g.q.push_back(s.mean(0) - range + i * g.dq);
    g.p.push_back(s.mean(1) - range + i * g.dp);
  }
  Eigen::Matrix2d inv = s.cov.inverse();
  double norm = 1.0 / (M_PI * std::sqrt(d));
  g.w.resize(resolution, resolution);
  for (int i = 0; i < resolution; ++i)
    for (int j = 0; j < resolution; ++j) {
      Eigen::Vector2d x(g.q[i] - s.mean(0), g.p[j] - s.mean(1));
      g.w(i, j) = norm * std::exp(-x.dot(inv * x));
    }
  return g;
}

}  // namespace ctc
