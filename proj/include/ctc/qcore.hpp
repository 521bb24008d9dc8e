#pragma once
#include <Eigen/Dense>
#include <complex>
#include <random>
#include <string>
#include <vector>

#include "ctc/errors.hpp"

namespace ctc {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using Dims = std::vector<int>;

int total_dim(const Dims& dims);

// Hermitian, unit-trace, PSD matrix with subsystem structure. Validation is
// explicit so that solvers can hold slightly unphysical intermediates.
class DensityMatrix {
 public:
  DensityMatrix() = default;
  DensityMatrix(Dims dims, Mat data);

  static DensityMatrix pure(Dims dims, const Vec& psi);
  static DensityMatrix basis(Dims dims, int index);
  static DensityMatrix maximally_mixed(Dims dims);

  const Dims& dims() const { return dims_; }
  const Mat& data() const { return data_; }
  int dim() const { return static_cast<int>(data_.rows()); }

  // Throws InvalidState with the first violated invariant.
  void validate(double herm_tol = 1e-12, double trace_tol = 1e-12,
                double eig_tol = 1e-10) const;
  bool is_valid() const;

  // Hermitize, clip negative eigenvalues, renormalize.
  DensityMatrix projected() const;

 private:
  Dims dims_;
  Mat data_;
};

struct UnitaryOp {
  Dims dims;
  Mat data;

  UnitaryOp() = default;
  UnitaryOp(Dims d, Mat m);
  void validate(double tol = 1e-10) const;
  UnitaryOp adjoint() const { return {dims, data.adjoint()}; }
};

struct QuantumChannel {
  std::vector<Mat> kraus_ops;
  Dims out_dims;

  DensityMatrix apply(const DensityMatrix& rho) const;
  Mat apply(const Mat& rho) const;
  void validate(double tol = 1e-10) const;
  // Column-stacking convention: vec(K r K^dag) = (conj(K) kron K) vec(r).
  Mat superoperator() const;
};

Mat kron(const Mat& a, const Mat& b);
Vec kron(const Vec& a, const Vec& b);
Vec ket(int dim, int index);

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);
DensityMatrix partial_trace(const DensityMatrix& rho, std::vector<int> keep);
Mat partial_trace(const Mat& rho, const Dims& dims, std::vector<int> keep);
DensityMatrix evolve(const DensityMatrix& rho, const UnitaryOp& U);
double entropy(const DensityMatrix& rho);
double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);
double trace_distance(const Mat& a, const Mat& b);

// op acts on the listed subsystems, in the listed order.
Mat embed(const Mat& op, const Dims& dims, const std::vector<int>& targets);

struct GateParams {
  double theta = 0.0;
  char axis = 'z';
};
// I, X, Y, Z, H, CNOT (control = subsystem 0), SWAP, CSIGN, ROT.
UnitaryOp standard_gate(const std::string& name, const GateParams& params = {});

Mat pauli(char which);

Mat random_unitary(int dim, std::mt19937_64& rng);
DensityMatrix random_density(const Dims& dims, std::mt19937_64& rng);

}  // namespace ctc
