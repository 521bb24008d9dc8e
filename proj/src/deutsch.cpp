#include "ctc/deutsch.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ctc {

CtcCircuit::CtcCircuit(UnitaryOp u, Dims cr, Dims ctc)
    : U(std::move(u)), dims_cr(std::move(cr)), dims_ctc(std::move(ctc)) {
  if (U.data.rows() != total_dim(dims_cr) * total_dim(dims_ctc))
    throw DimensionMismatch("U dimension must equal D_cr * D_ctc");
  Dims d = dims_cr;
  d.insert(d.end(), dims_ctc.begin(), dims_ctc.end());
  U.dims = d;
}

void FixedPointConfig::validate() const {
  if (!(tol > 0)) throw InvalidConfig("tol must be positive");
  if (max_iter < 1) throw InvalidConfig("max_iter must be >= 1");
  if (damping < 0 || damping >= 1) throw InvalidConfig("damping must lie in [0,1)");
  if (noise_eps < 0 || noise_eps > 1) throw InvalidConfig("noise_eps must lie in [0,1]");
  if (stall_window < 1) throw InvalidConfig("stall_window must be >= 1");
}

namespace {

void check_input(const CtcCircuit& c, const DensityMatrix& rho1) {
  if (rho1.dim() != c.d_cr()) throw DimensionMismatch("rho1 dimension vs CR dimension");
}

Mat depolarize(const Mat& x, double eps) {
  if (eps == 0.0) return x;
  const auto d = x.rows();
  return (1.0 - eps) * x + eps * Mat::Identity(d, d) / double(d);
}

}  // namespace

QuantumChannel deutsch_map_channel(const CtcCircuit& c, const DensityMatrix& rho1) {
  check_input(c, rho1);
  const int dcr = c.d_cr(), dctc = c.d_ctc();
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (rho1.data() + rho1.data().adjoint()));
  QuantumChannel ch;
  ch.out_dims = c.dims_ctc;
  // K_{a,b} = sqrt(p_a) (<b| (x) I) U (|a> (x) I)
  for (int a = 0; a < dcr; ++a) {
    const double p = es.eigenvalues()(a);
    if (p <= 1e-15) continue;
    Mat in = kron(Mat(es.eigenvectors().col(a)), Mat::Identity(dctc, dctc));
    Mat ua = c.U.data * in;
    for (int b = 0; b < dcr; ++b) ch.kraus_ops.push_back(std::sqrt(p) * ua.block(b * dctc, 0, dctc, dctc));
  }
  return ch;
}

DensityMatrix output_given_ctc(const CtcCircuit& c, const DensityMatrix& rho1, const DensityMatrix& rho2) {
  check_input(c, rho1);
  if (rho2.dim() != c.d_ctc()) throw DimensionMismatch("rho2 dimension vs CTC dimension");
  Mat joint = c.U.data * kron(rho1.data(), rho2.data()) * c.U.data.adjoint();
  std::vector<int> keep(c.dims_cr.size());
  std::iota(keep.begin(), keep.end(), 0);
  return {c.dims_cr, partial_trace(joint, c.U.dims, keep)};
}

DensityMatrix noisy_fixed_point(const QuantumChannel& m, const Dims& dims, double eps) {
  if (!(eps > 0)) throw InvalidConfig("noisy_fixed_point needs eps > 0");
  const int d = total_dim(dims);
  const int d2 = d * d;
  Mat s = m.superoperator();
  Mat a = Mat::Identity(d2, d2) - (1.0 - eps) * s;
  Mat mix = m.apply(Mat(Mat::Identity(d, d) / double(d)));
  Vec rhs = eps * Eigen::Map<Vec>(mix.data(), d2);
  Vec x = a.partialPivLu().solve(rhs);
  Mat r = Eigen::Map<Mat>(x.data(), d, d);
  r = 0.5 * (r + r.adjoint());
  r /= r.trace().real();
  return {dims, r};
}

namespace {

FixedPointResult extrapolate_noise(const QuantumChannel& m, const Dims& dims, const FixedPointConfig& cfg,
                                   long iterations_so_far) {
  const double eps[3] = {1e-6, 1e-7, 1e-8};
  Mat x[3];
  for (int i = 0; i < 3; ++i) x[i] = noisy_fixed_point(m, dims, eps[i]).data();
  // Quadratic Lagrange extrapolation to eps = 0.
  Mat x0 = Mat::Zero(x[0].rows(), x[0].cols());
  for (int i = 0; i < 3; ++i) {
    double w = 1.0;
    for (int j = 0; j < 3; ++j)
      if (j != i) w *= (0.0 - eps[j]) / (eps[i] - eps[j]);
    x0 += w * x[i];
  }
  FixedPointResult res;
  res.rho_ctc = DensityMatrix(dims, x0).projected();
  res.residual = trace_distance(res.rho_ctc.data(), m.apply(res.rho_ctc.data()));
  res.iterations = iterations_so_far;
  res.method = "noise-extrapolation";
  res.converged = res.residual <= cfg.tol;
  return res;
}

}  // namespace

FixedPointResult solve_fixed_point(const CtcCircuit& c, const DensityMatrix& rho1, const FixedPointConfig& cfg) {
  cfg.validate();
  const QuantumChannel m = deutsch_map_channel(c, rho1);
  Mat x = cfg.seed_state ? cfg.seed_state->data() : Mat(DensityMatrix::maximally_mixed(c.dims_ctc).data());
  if (x.rows() != c.d_ctc()) throw DimensionMismatch("seed_state dimension");

  FixedPointResult res;
  res.method = "iteration";
  double best = std::numeric_limits<double>::infinity();
  int since_best = 0;
  for (long k = 1; k <= cfg.max_iter; ++k) {
    const Mat y = m.apply(depolarize(x, cfg.noise_eps));
    const double r = trace_distance(x, y);
    if (cfg.record_history) res.entropy_history.push_back(entropy(DensityMatrix(c.dims_ctc, x)));
    if (r <= cfg.tol) {
      res.rho_ctc = DensityMatrix(c.dims_ctc, x);
      res.iterations = k;
      res.residual = r;
      res.converged = true;
      return res;
    }
    if (r < best * (1.0 - 1e-12)) {
      best = r;
      since_best = 0;
    } else if (++since_best >= cfg.stall_window) {
      if (cfg.noise_eps == 0.0 && cfg.extrapolate_on_oscillation && c.d_ctc() <= 16) {
        FixedPointResult ex = extrapolate_noise(m, c.dims_ctc, cfg, k);
        if (ex.converged) return ex;
        throw NotConverged("noise extrapolation residual " + std::to_string(ex.residual), ex.residual, ex.rho_ctc);
      }
      throw NotConverged("residual stalled at " + std::to_string(r) + " after " + std::to_string(k) + " iterations",
                         r, DensityMatrix(c.dims_ctc, x));
    }
    x = cfg.damping > 0 ? Mat((1.0 - cfg.damping) * y + cfg.damping * x) : y;
  }
  const double r = trace_distance(x, m.apply(depolarize(x, cfg.noise_eps)));
  throw NotConverged("max_iter reached", r, DensityMatrix(c.dims_ctc, x));
}

DensityMatrix deutsch_output(const CtcCircuit& c, const DensityMatrix& rho1, const FixedPointConfig& cfg) {
  return output_given_ctc(c, rho1, solve_fixed_point(c, rho1, cfg).rho_ctc);
}

FixedPointResult spectral_fixed_point(const CtcCircuit& c, const DensityMatrix& rho1) {
  const int d = c.d_ctc();
  if (d > 16) throw DimensionMismatch("spectral solve limited to D_ctc <= 16");
  const QuantumChannel m = deutsch_map_channel(c, rho1);
  Eigen::ComplexEigenSolver<Mat> es(m.superoperator());
  const Mat& v = es.eigenvectors();
  Mat vinv = v.partialPivLu().inverse();
  Mat seed = Mat::Identity(d, d) / double(d);
  Vec s = Eigen::Map<Vec>(seed.data(), d * d);
  Vec out = Vec::Zero(d * d);
  for (int i = 0; i < d * d; ++i)
    if (std::abs(es.eigenvalues()(i) - 1.0) < 1e-8) out += v.col(i) * (vinv.row(i) * s)(0);
  Mat r = Eigen::Map<Mat>(out.data(), d, d);
  r = 0.5 * (r + r.adjoint());
  FixedPointResult res;
  res.rho_ctc = DensityMatrix(c.dims_ctc, r / r.trace().real()).projected();
  res.residual = trace_distance(res.rho_ctc.data(), m.apply(res.rho_ctc.data()));
  res.converged = true;
  res.method = "spectral";
  return res;
}

DensityMatrix otc_break(const DensityMatrix& rho_ab, std::vector<int> cut) {
  const int n = static_cast<int>(rho_ab.dims().size());
  std::sort(cut.begin(), cut.end());
  cut.erase(std::unique(cut.begin(), cut.end()), cut.end());
  if (cut.empty() || static_cast<int>(cut.size()) >= n) throw IndexOutOfRange("cut must be a proper nonempty subset");
  for (int k : cut)
    if (k < 0 || k >= n) throw IndexOutOfRange("cut index");
  std::vector<int> rest;
  for (int s = 0; s < n; ++s)
    if (!std::binary_search(cut.begin(), cut.end(), s)) rest.push_back(s);
  DensityMatrix a = partial_trace(rho_ab, cut);
  DensityMatrix b = partial_trace(rho_ab, rest);
  // Reassemble in the original subsystem order.
  DensityMatrix ab = tensor(a, b);
  std::vector<int> order = cut;
  order.insert(order.end(), rest.begin(), rest.end());
  bool identity_order = std::is_sorted(order.begin(), order.end());
  if (identity_order) return ab;
  // Permute subsystems back: build permutation matrix on the basis.
  const Dims& dims = rho_ab.dims();
  const int d = rho_ab.dim();
  Dims pd;
  for (int s : order) pd.push_back(dims[s]);
  Mat p = Mat::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    // digits of i in the permuted layout
    std::vector<int> dig(n);
    int rem = i;
    for (int q = n - 1; q >= 0; --q) {
      dig[q] = rem % pd[q];
      rem /= pd[q];
    }
    std::vector<int> orig(n);
    for (int q = 0; q < n; ++q) orig[order[q]] = dig[q];
    int j = 0;
    for (int s = 0; s < n; ++s) j = j * dims[s] + orig[s];
    p(j, i) = 1.0;
  }
  return {dims, p * ab.data() * p.adjoint()};
}

DensityMatrix extend_with_ancilla(const CtcCircuit& c, const DensityMatrix& sigma_ar, const FixedPointConfig& cfg) {
  const int na = static_cast<int>(c.dims_cr.size());
  const int n = static_cast<int>(sigma_ar.dims().size());
  if (n < na) throw DimensionMismatch("sigma_ar has fewer subsystems than the CR register");
  for (int s = 0; s < na; ++s)
    if (sigma_ar.dims()[s] != c.dims_cr[s]) throw DimensionMismatch("sigma_ar A-part dims vs CR dims");
  std::vector<int> a_idx(na);
  std::iota(a_idx.begin(), a_idx.end(), 0);
  Dims dims_r(sigma_ar.dims().begin() + na, sigma_ar.dims().end());
  if (dims_r.empty()) return deutsch_output(c, sigma_ar, cfg);

  const DensityMatrix rho_a = partial_trace(sigma_ar, a_idx);
  const DensityMatrix rho2 = solve_fixed_point(c, rho_a, cfg).rho_ctc;

  // Joint layout A, R, CTC; U acts on A and CTC.
  DensityMatrix full = tensor(sigma_ar, rho2);
  std::vector<int> targets = a_idx;
  const int nr = static_cast<int>(dims_r.size());
  for (int s = 0; s < static_cast<int>(c.dims_ctc.size()); ++s) targets.push_back(na + nr + s);
  Mat ue = embed(c.U.data, full.dims(), targets);
  Mat out = ue * full.data() * ue.adjoint();
  std::vector<int> keep(na + nr);
  std::iota(keep.begin(), keep.end(), 0);
  return {sigma_ar.dims(), partial_trace(out, full.dims(), keep)};
}

namespace {

Mat normalized(const Mat& x) {
  Mat h = 0.5 * (x + x.adjoint());
  return h / h.trace().real();
}

Mat reduce(const Mat& joint, const Dims& dims, std::vector<int> keep) { return partial_trace(joint, dims, keep); }

}  // namespace

MultiCtcResult multi_ctc_solve(const UnitaryOp& U, const Dims& dims_cr, const Dims& dims_ctc2,
                               const Dims& dims_ctc3, const DensityMatrix& rho1, MultiPolicy policy,
                               const FixedPointConfig& cfg) {
  cfg.validate();
  Dims ctc = dims_ctc2;
  ctc.insert(ctc.end(), dims_ctc3.begin(), dims_ctc3.end());
  CtcCircuit joint_circ(U, dims_cr, ctc);
  MultiCtcResult out;
  out.policy = policy;
  const int ncr = static_cast<int>(dims_cr.size());
  const int n2 = static_cast<int>(dims_ctc2.size());
  const int n3 = static_cast<int>(dims_ctc3.size());
  std::vector<int> idx2(n2), idx3(n3);
  std::iota(idx2.begin(), idx2.end(), ncr);
  std::iota(idx3.begin(), idx3.end(), ncr + n2);

  if (policy == MultiPolicy::Joint) {
    out.joint = solve_fixed_point(joint_circ, rho1, cfg);
    Dims jd = ctc;
    std::vector<int> k2(n2), k3(n3);
    std::iota(k2.begin(), k2.end(), 0);
    std::iota(k3.begin(), k3.end(), n2);
    out.rho2 = partial_trace(out.joint.rho_ctc, k2);
    out.rho3 = partial_trace(out.joint.rho_ctc, k3);
    out.iterations = out.joint.iterations;
    out.converged = out.joint.converged;
    out.residual2 = out.residual3 = out.joint.residual;
    return out;
  }

  const Dims& all = joint_circ.U.dims;
  auto images = [&](const Mat& r2, const Mat& r3, Mat& m2, Mat& m3) {
    Mat j = U.data * kron(kron(rho1.data(), r2), r3) * U.data.adjoint();
    m2 = reduce(j, all, idx2);
    m3 = reduce(j, all, idx3);
  };

  auto run = [&](Mat r2, Mat r3, MultiCtcResult& res) -> bool {
    double best = std::numeric_limits<double>::infinity();
    long since_best = 0;
    Mat m2, m3;
    for (long k = 1; k <= cfg.max_iter; ++k) {
      images(r2, r3, m2, m3);
      const double e2 = trace_distance(r2, m2), e3 = trace_distance(r3, m3);
      if (std::max(e2, e3) <= cfg.tol) {
        res.rho2 = DensityMatrix(dims_ctc2, r2);
        res.rho3 = DensityMatrix(dims_ctc3, r3);
        res.residual2 = e2;
        res.residual3 = e3;
        res.iterations = k;
        res.converged = true;
        return true;
      }
      if (std::max(e2, e3) < best * (1.0 - 1e-12)) {
        best = std::max(e2, e3);
        since_best = 0;
      } else if (++since_best >= 10L * cfg.stall_window) {
        break;
      }
      // Cyclic update: rail 2 first, then rail 3 against the new rail 2.
      // The joint update is bilinear, so trace errors compound; renormalize.
      r2 = normalized(depolarize(m2, cfg.noise_eps));
      Mat t2, t3;
      images(r2, r3, t2, t3);
      r3 = normalized(depolarize(t3, cfg.noise_eps));
    }
    res.rho2 = DensityMatrix(dims_ctc2, r2);
    res.rho3 = DensityMatrix(dims_ctc3, r3);
    images(r2, r3, m2, m3);
    res.residual2 = trace_distance(r2, m2);
    res.residual3 = trace_distance(r3, m3);
    return false;
  };

  const int d2 = total_dim(dims_ctc2), d3 = total_dim(dims_ctc3);
  Mat s2 = Mat::Identity(d2, d2) / double(d2), s3 = Mat::Identity(d3, d3) / double(d3);
  if (cfg.seed_state && cfg.seed_state->dim() == d2 * d3) {
    s2 = partial_trace(cfg.seed_state->data(), ctc, [&] { std::vector<int> v(n2); std::iota(v.begin(), v.end(), 0); return v; }());
    s3 = partial_trace(cfg.seed_state->data(), ctc, [&] { std::vector<int> v(n3); std::iota(v.begin(), v.end(), n2); return v; }());
  }
  if (!run(s2, s3, out))
    throw NoSolution("separate consistency conditions not met; residuals " + std::to_string(out.residual2) + ", " +
                     std::to_string(out.residual3));

  // Second seed: product of pure basis states. A different converged pair flags multiplicity.
  MultiCtcResult alt = out;
  if (run(Mat(DensityMatrix::basis(dims_ctc2, 0).data()), Mat(DensityMatrix::basis(dims_ctc3, 0).data()), alt)) {
    out.multiple_solutions = trace_distance(alt.rho2, out.rho2) > 1e-6 || trace_distance(alt.rho3, out.rho3) > 1e-6;
  }
  return out;
}

DensityMatrix unroll_equivalent_circuit(const CtcCircuit& c, const DensityMatrix& rho1, int N,
                                        const DensityMatrix& rho0, double noise_eps) {
  if (N < 1) throw InvalidConfig("N must be >= 1");
  check_input(c, rho1);
  if (rho0.dim() != c.d_ctc()) throw DimensionMismatch("rho0 dimension vs CTC dimension");
  const Dims& all = c.U.dims;
  const int ncr = static_cast<int>(c.dims_cr.size());
  std::vector<int> cr_idx(ncr), ctc_idx(c.dims_ctc.size());
  std::iota(cr_idx.begin(), cr_idx.end(), 0);
  std::iota(ctc_idx.begin(), ctc_idx.end(), ncr);
  // Each copy of rho1 meets the rail once and is then discarded; the copy that
  // sees the rail after N steps is read out.
  Mat rail = rho0.data();
  for (int k = 0; k <= N; ++k) {
    const Mat joint = c.U.data * kron(rho1.data(), depolarize(rail, noise_eps)) * c.U.data.adjoint();
    if (k == N) return {c.dims_cr, partial_trace(joint, all, cr_idx)};
    rail = partial_trace(joint, all, ctc_idx);
  }
  return {};
}

Mat swap_op(int da, int db) {
  if (da != db) throw DimensionMismatch("swap requires equal dimensions");
  const int d = da * db;
  Mat s = Mat::Zero(d, d);
  for (int i = 0; i < da; ++i)
    for (int j = 0; j < db; ++j) s(j * da + i, i * db + j) = 1.0;
  return s;
}

CtcCircuit grandfather_circuit() {
  // CNOT with the CTC qubit (subsystem 1) as control.
  Mat cnot = swap_op(2, 2) * standard_gate("CNOT").data * swap_op(2, 2);
  return {UnitaryOp({2, 2}, swap_op(2, 2) * cnot), {2}, {2}};
}

CtcCircuit info_paradox_circuit() {
  return {UnitaryOp({2, 2}, swap_op(2, 2) * standard_gate("CNOT").data), {2}, {2}};
}

CtcCircuit otc_circuit(const Dims& dims) {
  const int d = total_dim(dims);
  Dims all = dims;
  all.insert(all.end(), dims.begin(), dims.end());
  return {UnitaryOp(all, swap_op(d, d)), dims, dims};
}

CtcCircuit brun_circuit() {
  const double s = 1.0 / std::sqrt(2.0);
  Vec psi[4];
  psi[0] = Vec::Zero(2); psi[0] << 1, 0;
  psi[1] = Vec::Zero(2); psi[1] << 0, 1;
  psi[2] = Vec::Zero(2); psi[2] << s, s;
  psi[3] = Vec::Zero(2); psi[3] << s, -s;
  const int perp[4] = {1, 0, 3, 2};
  const int m[4] = {2, 3, 1, 0};
  const Vec a0 = ket(2, 0), a1 = ket(2, 1);

  Mat ctrl = Mat::Zero(16, 16);
  for (int k = 0; k < 4; ++k) {
    std::vector<int> rest;
    for (int l = 0; l < 4; ++l)
      if (l != k && l != m[k]) rest.push_back(l);
    Mat uk = ket(4, k) * kron(psi[k], a0).adjoint() + ket(4, m[k]) * kron(psi[perp[k]], a0).adjoint() +
             ket(4, rest[0]) * kron(ket(2, 0), a1).adjoint() + ket(4, rest[1]) * kron(ket(2, 1), a1).adjoint();
    ctrl += kron(Mat(ket(4, k) * ket(4, k).adjoint()), uk);
  }
  // Swap the two-qubit registers, then apply U_k to the CTC conditioned on CR = k.
  return {UnitaryOp({2, 2, 2, 2}, ctrl * swap_op(4, 4)), {2, 2}, {2, 2}};
}

}  // namespace ctc
