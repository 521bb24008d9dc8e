#pragma once
#include <complex>
#include <string>
#include <vector>

#include "ctc/errors.hpp"
#include "ctc/qcore.hpp"

namespace ctc {

// 1+1 dimensions, right-moving massless packets, c = 1. An envelope moving
// with velocity v has its rest-frame momenta k' related to lab momenta by
// k' = D(v) k with Doppler factor D(v) = gamma (1 + v).
struct GaussianEnvelope {
  double sigma = 1.0;     // rest-frame momentum width
  double k0 = 1.0;        // rest-frame carrier
  double x_center = 0.0;  // lab position at the interaction time
  double v = 0.0;

  void validate() const;
  double gamma() const;
  double doppler() const;
  double lab_sigma() const { return sigma / doppler(); }
  double lab_carrier() const { return k0 / doppler(); }
  // Lab-frame amplitude, unit norm under dk.
  cplx amplitude(double k) const;
  // Same packet described from a frame moving with velocity u.
  GaussianEnvelope in_frame(double u) const;
};

double doppler_factor(double v);
// Lab separation expressed in the frame moving with velocity u.
double frame_separation(double dx, double u);

// Overlap of the source packet with the reference, separated by
// dx + reference.x_center - source.x_center.
cplx lorentz_overlap(const GaussianEnvelope& source, const GaussianEnvelope& reference, double dx);

struct CircuitGate {
  enum class Kind { Single, CSign, Other } kind;
  std::vector<int> qubits;
  Mat matrix;
};

class MismatchCircuit {
 public:
  explicit MismatchCircuit(int n_qubits);

  int n_qubits() const { return n_; }
  const std::vector<CircuitGate>& gates() const { return gates_; }
  const std::vector<cplx>& overlaps() const { return zeta_; }

  MismatchCircuit& single(int q, const Mat& u);
  MismatchCircuit& single(int q, const std::string& name, const GateParams& p = {});
  MismatchCircuit& csign(int a, int b);
  // H on the target, CSIGN, H on the target.
  MismatchCircuit& cnot(int control, int target);
  // Arbitrary multi-qubit unitary; representable in the ideal circuit only.
  MismatchCircuit& other(std::vector<int> qubits, const Mat& u);
  MismatchCircuit& set_overlap(int q, cplx zeta);

  // 2^n matrix, qubit 0 most significant.
  Mat ideal_unitary() const;
  // 4^n matrix; per qubit the basis is |block, logical>, block 0 = matched.
  Mat extended_unitary() const;
  Mat mismatch_rotations() const;

 private:
  void check_qubit(int q) const;
  int n_;
  std::vector<CircuitGate> gates_;
  std::vector<cplx> zeta_;
};

// Unitary on the (matched, orthogonal) block index with first column (zeta, sqrt(1-|zeta|^2)).
Mat mismatch_rotation(cplx zeta);

// Observable given as one Pauli label per qubit, e.g. "IZ".
Mat pauli_string(const std::string& labels);
double ideal_expectation(const MismatchCircuit& c, const std::string& observable);
// Detectors respond to both blocks: each J_i acts on the logical index only.
double extended_expectation(const MismatchCircuit& c, const std::string& observable);

// <I_1 Z_2> for a CNOT whose target qubit comes from a moving, mistimed source.
// The control is prepared with amplitude alpha on |1>.
double relativistic_cnot(double alpha, double v, double dx, double sigma, double k0);

struct PauliTable {
  Mat I, X, Y, Z;
};
// Stokes operators of rails (A, B) restricted to the {|10>, |01>} sector,
// embedded for qubit `qubit` of n_qubits dual-rail qubits.
PauliTable pauli_from_modes(int qubit = 0, int n_qubits = 1);

}  // namespace ctc
