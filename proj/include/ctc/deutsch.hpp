#pragma once
#include <optional>
#include <string>
#include <vector>

#include "ctc/qcore.hpp"

namespace ctc {

// U acts on H_CR (x) H_CTC, CR subsystems first.
struct CtcCircuit {
  UnitaryOp U;
  Dims dims_cr;
  Dims dims_ctc;

  CtcCircuit() = default;
  CtcCircuit(UnitaryOp u, Dims cr, Dims ctc);
  int d_cr() const { return total_dim(dims_cr); }
  int d_ctc() const { return total_dim(dims_ctc); }
};

struct FixedPointConfig {
  double tol = 1e-10;
  long max_iter = 100000;
  std::optional<DensityMatrix> seed_state;  // default I/D_ctc
  double damping = 0.0;
  double noise_eps = 0.0;
  bool extrapolate_on_oscillation = true;
  int stall_window = 100;
  bool record_history = false;

  void validate() const;
};

struct FixedPointResult {
  DensityMatrix rho_ctc;
  long iterations = 0;
  double residual = 0.0;  // trace distance to the image under the map that was iterated
  bool converged = false;
  std::string method;     // "iteration" | "noise-extrapolation" | "spectral"
  std::vector<double> entropy_history;
};

struct NotConverged : Error {
  NotConverged(const std::string& what, double res, DensityMatrix last)
      : Error("NotConverged: " + what), residual(res), last_iterate(std::move(last)) {}
  double residual;
  DensityMatrix last_iterate;
};

QuantumChannel deutsch_map_channel(const CtcCircuit& c, const DensityMatrix& rho1);

FixedPointResult solve_fixed_point(const CtcCircuit& c, const DensityMatrix& rho1,
                                   const FixedPointConfig& cfg = {});

// Tr_CTC[U (rho1 (x) rho2) U^dag]
DensityMatrix output_given_ctc(const CtcCircuit& c, const DensityMatrix& rho1, const DensityMatrix& rho2);

DensityMatrix deutsch_output(const CtcCircuit& c, const DensityMatrix& rho1,
                             const FixedPointConfig& cfg = {});

// Fixed point from the eigenvalue-1 spectral projector of the superoperator
// applied to I/D. Restricted to D_ctc <= 16.
FixedPointResult spectral_fixed_point(const CtcCircuit& c, const DensityMatrix& rho1);

// Unique fixed point of x -> M((1-eps) x + eps I/D) for eps > 0, by a direct
// linear solve on the superoperator.
DensityMatrix noisy_fixed_point(const QuantumChannel& m, const Dims& dims, double eps);

// cut: subsystems forming side A; the rest is B.
DensityMatrix otc_break(const DensityMatrix& rho_ab, std::vector<int> cut);

// sigma_ar on H_A (x) H_R where H_A = H_CR of the circuit.
DensityMatrix extend_with_ancilla(const CtcCircuit& c, const DensityMatrix& sigma_ar,
                                  const FixedPointConfig& cfg = {});

enum class MultiPolicy { Joint, Separate };

struct MultiCtcResult {
  MultiPolicy policy = MultiPolicy::Joint;
  DensityMatrix rho2, rho3;
  FixedPointResult joint;  // Joint policy only
  double residual2 = 0.0, residual3 = 0.0;
  long iterations = 0;
  bool converged = false;
  bool multiple_solutions = false;  // Separate: a second seed reached a different pair
};

// U on H_CR (x) H_CTC2 (x) H_CTC3.
MultiCtcResult multi_ctc_solve(const UnitaryOp& U, const Dims& dims_cr, const Dims& dims_ctc2,
                               const Dims& dims_ctc3, const DensityMatrix& rho1, MultiPolicy policy,
                               const FixedPointConfig& cfg = {});

// N copies of rho1 drive the rail from rho0, one more copy produces the output.
DensityMatrix unroll_equivalent_circuit(const CtcCircuit& c, const DensityMatrix& rho1, int N,
                                        const DensityMatrix& rho0, double noise_eps = 0.0);

// Canonical circuits.
CtcCircuit grandfather_circuit();   // CNOT(control CTC, target CR), then SWAP
CtcCircuit info_paradox_circuit();  // CNOT(control CR, target CTC), then SWAP
CtcCircuit otc_circuit(const Dims& dims);  // rail passes straight through the CTC
// CR = (input, ancilla), CTC = two qubits. Maps |0>,|1>,|+>,|-> (ancilla |0>)
// to |00>,|01>,|10>,|11>.
CtcCircuit brun_circuit();

Mat swap_op(int da, int db);

}  // namespace ctc
