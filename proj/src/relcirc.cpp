#include "ctc/relcirc.hpp"

#include <cmath>

namespace ctc {

namespace {

constexpr int kMaxQubits = 5;

Mat gate_matrix(const std::string& name, const GateParams& p) { return standard_gate(name, p).data; }

bool is_unitary(const Mat& u, double tol = 1e-10) {
  return u.rows() == u.cols() && (u.adjoint() * u - Mat::Identity(u.rows(), u.cols())).norm() < tol;
}

Mat csign_extended() {
  // Pair of qubits, each |block, logical>; phase only when both sit in the matched block at |1>.
  Mat m = Mat::Identity(16, 16);
  m(1 * 4 + 1, 1 * 4 + 1) = -1.0;
  return m;
}

Dims qubit_dims(int n, int d) { return Dims(n, d); }

}  // namespace

void GaussianEnvelope::validate() const {
  if (!(sigma > 0) || !(k0 > 0)) throw InvalidState("envelope width and carrier must be positive");
  if (!(std::abs(v) < 1)) throw InvalidState("envelope velocity must satisfy |v| < 1");
  if (!std::isfinite(x_center)) throw InvalidState("envelope position must be finite");
}

double GaussianEnvelope::gamma() const { return 1.0 / std::sqrt(1.0 - v * v); }

double GaussianEnvelope::doppler() const { return doppler_factor(v); }

cplx GaussianEnvelope::amplitude(double k) const {
  const double a = 1.0 / (lab_sigma() * lab_sigma());
  const double d = k - lab_carrier();
  return std::pow(2.0 * a / M_PI, 0.25) * std::exp(cplx(-a * d * d, -k * x_center));
}

GaussianEnvelope GaussianEnvelope::in_frame(double u) const {
  if (!(std::abs(u) < 1)) throw InvalidState("frame velocity must satisfy |u| < 1");
  GaussianEnvelope e = *this;
  e.v = (v - u) / (1.0 - u * v);
  e.x_center = frame_separation(x_center, u);
  return e;
}

double doppler_factor(double v) { return std::sqrt((1.0 + v) / (1.0 - v)); }

double frame_separation(double dx, double u) { return dx / doppler_factor(u); }

cplx lorentz_overlap(const GaussianEnvelope& source, const GaussianEnvelope& reference, double dx) {
  source.validate();
  reference.validate();
  const double a = 1.0 / (source.lab_sigma() * source.lab_sigma());
  const double b = 1.0 / (reference.lab_sigma() * reference.lab_sigma());
  const double ks = source.lab_carrier(), kr = reference.lab_carrier();
  const double sep = dx + reference.x_center - source.x_center;
  const double mean = (a * ks + b * kr) / (a + b);
  const double re = -a * b / (a + b) * (ks - kr) * (ks - kr) - sep * sep / (4.0 * (a + b));
  return std::sqrt(2.0 * std::sqrt(a * b) / (a + b)) * std::exp(cplx(re, mean * sep));
}

MismatchCircuit::MismatchCircuit(int n_qubits) : n_(n_qubits), zeta_(n_qubits, 1.0) {
  if (n_qubits < 1 || n_qubits > kMaxQubits)
    throw InvalidState("mismatch circuits support 1 to " + std::to_string(kMaxQubits) + " qubits");
}

void MismatchCircuit::check_qubit(int q) const {
  if (q < 0 || q >= n_) throw IndexOutOfRange("qubit " + std::to_string(q));
}

MismatchCircuit& MismatchCircuit::single(int q, const Mat& u) {
  check_qubit(q);
  if (u.rows() != 2 || u.cols() != 2) throw DimensionMismatch("single-qubit gate must be 2x2");
  if (!is_unitary(u)) throw InvalidState("single-qubit gate is not unitary");
  gates_.push_back({CircuitGate::Kind::Single, {q}, u});
  return *this;
}

MismatchCircuit& MismatchCircuit::single(int q, const std::string& name, const GateParams& p) {
  Mat u = gate_matrix(name, p);
  if (u.rows() != 2) throw UnsupportedGate(name + " is not a single-qubit gate");
  return single(q, u);
}

MismatchCircuit& MismatchCircuit::csign(int a, int b) {
  check_qubit(a);
  check_qubit(b);
  if (a == b) throw InvalidState("CSIGN needs two distinct qubits");
  gates_.push_back({CircuitGate::Kind::CSign, {a, b}, gate_matrix("CSIGN", {})});
  return *this;
}

MismatchCircuit& MismatchCircuit::cnot(int control, int target) {
  single(target, "H");
  csign(control, target);
  return single(target, "H");
}

MismatchCircuit& MismatchCircuit::other(std::vector<int> qubits, const Mat& u) {
  for (int q : qubits) check_qubit(q);
  if (u.rows() != (1 << qubits.size()) || !is_unitary(u)) throw InvalidState("gate matrix does not match its qubits");
  gates_.push_back({CircuitGate::Kind::Other, std::move(qubits), u});
  return *this;
}

MismatchCircuit& MismatchCircuit::set_overlap(int q, cplx zeta) {
  check_qubit(q);
  if (std::abs(zeta) > 1.0 + 1e-12) throw InvalidState("overlap magnitude exceeds 1");
  zeta_[q] = zeta;
  return *this;
}

Mat MismatchCircuit::ideal_unitary() const {
  const Dims dims = qubit_dims(n_, 2);
  Mat u = Mat::Identity(1 << n_, 1 << n_);
  for (const auto& g : gates_) u = embed(g.matrix, dims, g.qubits) * u;
  return u;
}

Mat MismatchCircuit::extended_unitary() const {
  const Dims dims = qubit_dims(n_, 4);
  const int d = total_dim(dims);
  Mat u = Mat::Identity(d, d);
  for (const auto& g : gates_) {
    switch (g.kind) {
      case CircuitGate::Kind::Single:
        u = embed(kron(Mat::Identity(2, 2), g.matrix), dims, g.qubits) * u;
        break;
      case CircuitGate::Kind::CSign:
        u = embed(csign_extended(), dims, g.qubits) * u;
        break;
      case CircuitGate::Kind::Other:
        throw UnsupportedGate("only single-qubit gates and CSIGN have a known action on mismatched packets");
    }
  }
  return u;
}

Mat mismatch_rotation(cplx zeta) {
  if (std::abs(zeta) > 1.0 + 1e-12) throw InvalidState("overlap magnitude exceeds 1");
  const double s = std::sqrt(std::max(0.0, 1.0 - std::norm(zeta)));
  Mat v(2, 2);
  v << zeta, -s, s, std::conj(zeta);
  return v;
}

Mat MismatchCircuit::mismatch_rotations() const {
  Mat v = Mat::Identity(1, 1);
  for (int q = 0; q < n_; ++q) v = kron(v, kron(mismatch_rotation(zeta_[q]), Mat::Identity(2, 2)));
  return v;
}

Mat pauli_string(const std::string& labels) {
  Mat m = Mat::Identity(1, 1);
  for (char c : labels) m = kron(m, pauli(c));
  return m;
}

double ideal_expectation(const MismatchCircuit& c, const std::string& observable) {
  if (static_cast<int>(observable.size()) != c.n_qubits()) throw DimensionMismatch("one Pauli label per qubit");
  const Vec out = c.ideal_unitary() * ket(1 << c.n_qubits(), 0);
  return (out.adjoint() * pauli_string(observable) * out)(0, 0).real();
}

double extended_expectation(const MismatchCircuit& c, const std::string& observable) {
  const int n = c.n_qubits();
  if (static_cast<int>(observable.size()) != n) throw DimensionMismatch("one Pauli label per qubit");
  Mat j = Mat::Identity(1, 1);
  for (char label : observable) j = kron(j, kron(Mat::Identity(2, 2), pauli(label)));
  const Vec out = c.extended_unitary() * (c.mismatch_rotations() * ket(1 << (2 * n), 0));
  return (out.adjoint() * j * out)(0, 0).real();
}

double relativistic_cnot(double alpha, double v, double dx, double sigma, double k0) {
  if (!(std::abs(alpha) <= 1)) throw InvalidState("|alpha| must not exceed 1");
  GaussianEnvelope pump{sigma, k0, 0.0, 0.0};
  // The moving source is tuned so its carrier lands on k0 in the lab.
  GaussianEnvelope source{sigma, k0 * doppler_factor(v), 0.0, v};
  const cplx zeta = lorentz_overlap(source, pump, dx);

  Mat prep(2, 2);
  const double c = std::sqrt(1.0 - alpha * alpha);
  prep << c, -alpha, alpha, c;
  MismatchCircuit circ(2);
  circ.single(0, prep).cnot(0, 1).set_overlap(1, zeta);
  return extended_expectation(circ, "IZ");
}

PauliTable pauli_from_modes(int qubit, int n_qubits) {
  if (n_qubits < 1 || qubit < 0 || qubit >= n_qubits) throw IndexOutOfRange("dual-rail qubit index");
  Mat a = Mat::Zero(3, 3);
  a(0, 1) = 1.0;
  a(1, 2) = std::sqrt(2.0);
  const Mat id3 = Mat::Identity(3, 3);
  const Mat A = kron(a, id3), B = kron(id3, a);
  const Mat Ad = A.adjoint(), Bd = B.adjoint();
  const cplx i(0, 1);

  // Sector basis: |10> then |01>.
  Mat P = Mat::Zero(9, 2);
  P(3, 0) = 1.0;
  P(1, 1) = 1.0;
  auto restrict = [&](const Mat& op) -> Mat {
    const Mat image = op * P;
    if ((P * P.adjoint() * image - image).norm() > 1e-12) throw InvalidState("operator leaves the single-photon sector");
    return P.adjoint() * image;
  };
  auto lift = [&](const Mat& local) {
    Mat m = Mat::Identity(1, 1);
    for (int q = 0; q < n_qubits; ++q) m = kron(m, q == qubit ? local : Mat::Identity(2, 2));
    return m;
  };
  return {lift(restrict(Ad * A + Bd * B)), lift(restrict(Ad * B + Bd * A)), lift(restrict(i * Bd * A - i * Ad * B)),
          lift(restrict(Ad * A - Bd * B))};
}

}  // namespace ctc
