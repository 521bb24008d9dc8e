#include "ctc/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace ctc {

int total_dim(const Dims& dims) {
  int d = 1;
  for (int x : dims) {
    if (x < 1) throw DimensionMismatch("subsystem dimension < 1");
    d *= x;
  }
  return d;
}

DensityMatrix::DensityMatrix(Dims dims, Mat data) : dims_(std::move(dims)), data_(std::move(data)) {
  const int d = total_dim(dims_);
  if (data_.rows() != d || data_.cols() != d) {
    std::ostringstream os;
    os << "matrix is " << data_.rows() << "x" << data_.cols() << ", dims imply " << d;
    throw DimensionMismatch(os.str());
  }
}

DensityMatrix DensityMatrix::pure(Dims dims, const Vec& psi) {
  Vec v = psi / psi.norm();
  return {std::move(dims), v * v.adjoint()};
}

DensityMatrix DensityMatrix::basis(Dims dims, int index) {
  const int d = total_dim(dims);
  if (index < 0 || index >= d) throw IndexOutOfRange("basis index");
  return pure(std::move(dims), ket(d, index));
}

DensityMatrix DensityMatrix::maximally_mixed(Dims dims) {
  const int d = total_dim(dims);
  return {std::move(dims), Mat::Identity(d, d) / double(d)};
}

void DensityMatrix::validate(double herm_tol, double trace_tol, double eig_tol) const {
  const double herm = (data_ - data_.adjoint()).cwiseAbs().maxCoeff();
  if (herm > herm_tol) throw InvalidState("not Hermitian, deviation " + std::to_string(herm));
  const double tr_err = std::abs(data_.trace() - 1.0);
  if (tr_err > trace_tol) throw InvalidState("trace deviates from 1 by " + std::to_string(tr_err));
  Eigen::SelfAdjointEigenSolver<Mat> es(data_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -eig_tol)
    throw InvalidState("negative eigenvalue " + std::to_string(es.eigenvalues().minCoeff()));
}

bool DensityMatrix::is_valid() const {
  try {
    validate();
    return true;
  } catch (const InvalidState&) {
    return false;
  }
}

DensityMatrix DensityMatrix::projected() const {
  Mat h = 0.5 * (data_ + data_.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
  lam /= lam.sum();
  Mat out = es.eigenvectors() * lam.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
  return {dims_, 0.5 * (out + out.adjoint())};
}

UnitaryOp::UnitaryOp(Dims d, Mat m) : dims(std::move(d)), data(std::move(m)) {
  const int n = total_dim(dims);
  if (data.rows() != n || data.cols() != n) throw DimensionMismatch("unitary size vs dims");
}

void UnitaryOp::validate(double tol) const {
  const double err = (data.adjoint() * data - Mat::Identity(data.rows(), data.cols())).cwiseAbs().maxCoeff();
  if (err > tol) throw InvalidState("operator is not unitary, deviation " + std::to_string(err));
}

Mat QuantumChannel::apply(const Mat& rho) const {
  Mat out = Mat::Zero(kraus_ops.front().rows(), kraus_ops.front().rows());
  for (const auto& k : kraus_ops) out.noalias() += k * rho * k.adjoint();
  return out;
}

DensityMatrix QuantumChannel::apply(const DensityMatrix& rho) const {
  if (kraus_ops.empty()) throw DimensionMismatch("channel has no Kraus operators");
  if (kraus_ops.front().cols() != rho.dim()) throw DimensionMismatch("channel input dimension");
  return {out_dims, apply(rho.data())};
}

void QuantumChannel::validate(double tol) const {
  if (kraus_ops.empty()) throw InvalidState("channel has no Kraus operators");
  const auto n = kraus_ops.front().cols();
  Mat s = Mat::Zero(n, n);
  for (const auto& k : kraus_ops) s += k.adjoint() * k;
  const double err = (s - Mat::Identity(n, n)).cwiseAbs().maxCoeff();
  if (err > tol) throw InvalidState("channel is not trace preserving, deviation " + std::to_string(err));
}

Mat QuantumChannel::superoperator() const {
  const auto n = kraus_ops.front().cols();
  const auto m = kraus_ops.front().rows();
  Mat s = Mat::Zero(m * m, n * n);
  for (const auto& k : kraus_ops) s += kron(k.conjugate(), k);
  return s;
}

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Vec kron(const Vec& a, const Vec& b) {
  Vec out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

Vec ket(int dim, int index) {
  Vec v = Vec::Zero(dim);
  v(index) = 1.0;
  return v;
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  Dims d = a.dims();
  d.insert(d.end(), b.dims().begin(), b.dims().end());
  return {std::move(d), kron(a.data(), b.data())};
}

namespace {

// Splits every basis index into (kept multi-index, traced multi-index).
void split_indices(const Dims& dims, const std::vector<int>& keep, std::vector<int>& kidx,
                   std::vector<int>& tidx, int& dk, int& dt) {
  const int n = static_cast<int>(dims.size());
  std::vector<bool> is_kept(n, false);
  for (int k : keep) is_kept[k] = true;
  const int d = total_dim(dims);
  dk = 1;
  dt = 1;
  for (int s = 0; s < n; ++s) (is_kept[s] ? dk : dt) *= dims[s];
  kidx.assign(d, 0);
  tidx.assign(d, 0);
  for (int i = 0; i < d; ++i) {
    int rem = i, stride = d, ki = 0, ti = 0;
    for (int s = 0; s < n; ++s) {
      stride /= dims[s];
      const int digit = rem / stride;
      rem %= stride;
      if (is_kept[s]) ki = ki * dims[s] + digit;
      else ti = ti * dims[s] + digit;
    }
    kidx[i] = ki;
    tidx[i] = ti;
  }
}

std::vector<int> normalize_subset(std::vector<int> keep, int n) {
  if (keep.empty()) throw IndexOutOfRange("empty subsystem set");
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  for (int k : keep)
    if (k < 0 || k >= n) throw IndexOutOfRange("subsystem " + std::to_string(k) + " of " + std::to_string(n));
  return keep;
}

}  // namespace

Mat partial_trace(const Mat& rho, const Dims& dims, std::vector<int> keep) {
  keep = normalize_subset(std::move(keep), static_cast<int>(dims.size()));
  if (rho.rows() != total_dim(dims)) throw DimensionMismatch("partial_trace: matrix vs dims");
  std::vector<int> kidx, tidx;
  int dk, dt;
  split_indices(dims, keep, kidx, tidx, dk, dt);
  std::vector<std::vector<int>> groups(dt);
  for (int i = 0; i < static_cast<int>(kidx.size()); ++i) groups[tidx[i]].push_back(i);
  Mat out = Mat::Zero(dk, dk);
  for (const auto& g : groups)
    for (int a : g)
      for (int b : g) out(kidx[a], kidx[b]) += rho(a, b);
  return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::vector<int> keep) {
  keep = normalize_subset(std::move(keep), static_cast<int>(rho.dims().size()));
  Dims kd;
  for (int k : keep) kd.push_back(rho.dims()[k]);
  return {kd, partial_trace(rho.data(), rho.dims(), keep)};
}

DensityMatrix evolve(const DensityMatrix& rho, const UnitaryOp& U) {
  if (U.data.rows() != rho.dim()) throw DimensionMismatch("evolve: unitary vs state dimension");
  return {rho.dims(), U.data * rho.data() * U.data.adjoint()};
}

double entropy(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (rho.data() + rho.data().adjoint()), Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (double l : es.eigenvalues())
    if (l >= 1e-14) s -= l * std::log2(l);
  return s;
}

double trace_distance(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionMismatch("trace_distance");
  Mat d = a - b;
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (d + d.adjoint()), Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  return trace_distance(rho.data(), sigma.data());
}

Mat embed(const Mat& op, const Dims& dims, const std::vector<int>& targets) {
  const int n = static_cast<int>(dims.size());
  int dop = 1;
  for (int t : targets) {
    if (t < 0 || t >= n) throw IndexOutOfRange("embed target");
    dop *= dims[t];
  }
  if (op.rows() != dop || op.cols() != dop) throw DimensionMismatch("embed: operator vs target dims");
  const int d = total_dim(dims);
  std::vector<int> stride(n, 1);
  for (int s = n - 2; s >= 0; --s) stride[s] = stride[s + 1] * dims[s + 1];

  // Offset contributed by a target multi-index.
  std::vector<int> toff(dop, 0);
  for (int t = 0; t < dop; ++t) {
    int rem = t, off = 0;
    for (int q = static_cast<int>(targets.size()) - 1; q >= 0; --q) {
      off += (rem % dims[targets[q]]) * stride[targets[q]];
      rem /= dims[targets[q]];
    }
    toff[t] = off;
  }
  Mat out = Mat::Zero(d, d);
  for (int j = 0; j < d; ++j) {
    int tj = 0, base = j;
    for (int q : targets) {
      const int digit = (j / stride[q]) % dims[q];
      tj = tj * dims[q] + digit;
      base -= digit * stride[q];
    }
    for (int ti = 0; ti < dop; ++ti)
      if (op(ti, tj) != cplx(0.0)) out(base + toff[ti], j) = op(ti, tj);
  }
  return out;
}

Mat pauli(char which) {
  Mat m(2, 2);
  const cplx i(0, 1);
  switch (which) {
    case 'I': m << 1, 0, 0, 1; break;
    case 'X': case 'x': m << 0, 1, 1, 0; break;
    case 'Y': case 'y': m << 0, -i, i, 0; break;
    case 'Z': case 'z': m << 1, 0, 0, -1; break;
    default: throw UnknownGate(std::string("pauli ") + which);
  }
  return m;
}

UnitaryOp standard_gate(const std::string& name, const GateParams& params) {
  const double s = 1.0 / std::sqrt(2.0);
  Mat m;
  if (name == "I" || name == "X" || name == "Y" || name == "Z") {
    return {{2}, pauli(name[0])};
  } else if (name == "H") {
    m.resize(2, 2);
    m << s, s, s, -s;
    return {{2}, m};
  } else if (name == "CNOT") {
    m = Mat::Identity(4, 4);
    m.block(2, 2, 2, 2) = pauli('X');
  } else if (name == "SWAP") {
    m = Mat::Zero(4, 4);
    m(0, 0) = m(1, 2) = m(2, 1) = m(3, 3) = 1.0;
  } else if (name == "CSIGN") {
    m = Mat::Identity(4, 4);
    m(3, 3) = -1.0;
  } else if (name == "ROT") {
    if (params.axis != 'x' && params.axis != 'y' && params.axis != 'z')
      throw UnknownGate(std::string("ROT axis ") + params.axis);
    // exp(-i theta sigma / 2)
    m = std::cos(params.theta / 2) * Mat::Identity(2, 2) -
        cplx(0, 1) * std::sin(params.theta / 2) * pauli(params.axis);
    return {{2}, m};
  } else {
    throw UnknownGate(name);
  }
  return {{2, 2}, m};
}

Mat random_unitary(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Mat z(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) z(i, j) = cplx(g(rng), g(rng));
  Eigen::HouseholderQR<Mat> qr(z);
  Mat q = qr.householderQ();
  Mat r = qr.matrixQR();
  // Fix column phases so the distribution is Haar.
  for (int j = 0; j < dim; ++j) {
    const cplx d = r(j, j);
    q.col(j) *= (std::abs(d) > 0 ? d / std::abs(d) : cplx(1.0));
  }
  return q;
}

DensityMatrix random_density(const Dims& dims, std::mt19937_64& rng) {
  const int d = total_dim(dims);
  std::normal_distribution<double> g(0.0, 1.0);
  Mat z(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) z(i, j) = cplx(g(rng), g(rng));
  Mat r = z * z.adjoint();
  r /= r.trace().real();
  return {dims, 0.5 * (r + r.adjoint())};
}

}  // namespace ctc
