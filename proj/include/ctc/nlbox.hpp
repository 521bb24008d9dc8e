#pragma once
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ctc/deutsch.hpp"
#include "ctc/qcore.hpp"

namespace ctc {

// Finite mixture of ontic density matrices.
struct GeneralizedState {
  std::vector<std::pair<double, DensityMatrix>> support;

  GeneralizedState() = default;
  GeneralizedState(std::vector<std::pair<double, DensityMatrix>> s) : support(std::move(s)) {}
  static GeneralizedState delta(const DensityMatrix& rho) { return GeneralizedState({{1.0, rho}}); }

  const Dims& dims() const;
  void validate() const;
};

struct NonlinearBox {
  Dims dims;  // empty: accepts any dims
  std::function<DensityMatrix(const DensityMatrix&)> map;
  std::string label;
};

struct RemotePreparation {
  std::string label;
  std::vector<std::string> settings;
  std::vector<GeneralizedState> ensembles;  // one per setting

  void validate(double tol = 1e-10) const;
};

struct BoxOptions {
  double eps_ball = 1e-6;
  std::optional<CtcCircuit> circuit;  // DeutschBox only
  FixedPointConfig solver;
};

DensityMatrix simplify(const GeneralizedState& g);
GeneralizedState apply_box(const NonlinearBox& box, const GeneralizedState& g);

// Brun, AxisSwap, DeutschBox (needs options.circuit), Identity.
NonlinearBox builtin_box(const std::string& name, const BoxOptions& options = {});

// Wraps a linear channel as a box (used to check commutation with simplification).
NonlinearBox channel_box(const QuantumChannel& ch, const Dims& dims, std::string label);

struct Helstrom {
  Mat projector;  // onto the positive part of rho_a - rho_b
  double gap = 0.0;  // total-variation distance of outcome statistics = trace distance
};
Helstrom helstrom(const Mat& rho_a, const Mat& rho_b);

struct VerifyWitness {
  // Convex weights over the set for the two sides; pairs have a single 1 on each side.
  std::vector<double> lambda, mu;
  int a = -1, b = -1;  // set when the witness is a plain pair
  Helstrom measurement;
};

struct VerifyResult {
  bool verifying = false;
  std::optional<VerifyWitness> witness;
};

VerifyResult is_verifying_set(const NonlinearBox& box, const std::vector<GeneralizedState>& states,
                              double gap_threshold = 1e-6);

enum class Verdict { NoSignalling, SignallingPossible };
std::string to_string(Verdict v);

struct AuditWitness {
  std::string prep;
  std::string setting_a, setting_b;
  std::string measurement;
  double distance = 0.0;
};

struct AuditReport {
  Verdict verdict = Verdict::NoSignalling;
  std::vector<AuditWitness> witnesses;
};

AuditReport signalling_audit(const NonlinearBox& box, const std::vector<RemotePreparation>& preps,
                             double gap_threshold = 1e-6);

struct GisinResult {
  bool applicable = false;
  std::string measurement;  // "helstrom" | "pretty-good"
  long trials = 0;
  double success = 0.0;
  double stderr_ = 0.0;
  double analytic = 0.0;  // exact success probability of the same measurement
};

GisinResult gisin_experiment(const NonlinearBox& box,
                             const std::vector<std::pair<std::string, GeneralizedState>>& ontology, long trials,
                             std::uint64_t seed);

// Fixtures.
RemotePreparation ontology_os();        // computational vs diagonal proper mixtures, ancilla |0>
RemotePreparation ontology_ons();       // both settings -> delta(I/2 (x) |0><0|)
RemotePreparation appendix_preparation();  // z, y, other for the AxisSwap box
std::pair<GeneralizedState, GeneralizedState> heisenberg_cut_pair();  // coherent vs classical preparation of I/2

}  // namespace ctc
