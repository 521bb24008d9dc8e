#include "ctc/nlbox.hpp"

#include <cmath>
#include <random>

namespace ctc {

const Dims& GeneralizedState::dims() const {
  if (support.empty()) throw InvalidState("empty generalized state");
  return support.front().second.dims();
}

void GeneralizedState::validate() const {
  if (support.empty()) throw InvalidState("empty generalized state");
  double total = 0.0;
  for (const auto& [w, rho] : support) {
    if (!(w > 0)) throw InvalidState("weights must be positive");
    if (rho.dims() != dims()) throw DimensionMismatch("ontic states must share dims");
    rho.validate();
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw InvalidState("weights must sum to 1");
}

void RemotePreparation::validate(double tol) const {
  if (ensembles.size() != settings.size()) throw InvalidState(label + ": one ensemble per setting");
  if (ensembles.empty()) throw InvalidState(label + ": no settings");
  for (const auto& g : ensembles) g.validate();
  const DensityMatrix ref = simplify(ensembles.front());
  for (const auto& g : ensembles)
    if ((simplify(g).data() - ref.data()).cwiseAbs().maxCoeff() > tol)
      throw InvalidState(label + ": ensembles differ at the density-matrix level");
}

DensityMatrix simplify(const GeneralizedState& g) {
  Mat s = Mat::Zero(g.support.front().second.dim(), g.support.front().second.dim());
  for (const auto& [w, rho] : g.support) s += w * rho.data();
  return {g.dims(), s};
}

GeneralizedState apply_box(const NonlinearBox& box, const GeneralizedState& g) {
  GeneralizedState out;
  for (const auto& [w, rho] : g.support) {
    if (!box.dims.empty() && rho.dims() != box.dims) throw DimensionMismatch("box " + box.label + " input dims");
    out.support.emplace_back(w, box.map(rho));
  }
  return out;
}

namespace {

const double kS = 1.0 / std::sqrt(2.0);

DensityMatrix qubit(cplx a, cplx b) {
  Vec v(2);
  v << a, b;
  return DensityMatrix::pure({2}, v);
}

// Pure-state box: listed inputs within eps (trace distance) go to their targets,
// everything else passes through.
NonlinearBox listed_box(std::vector<std::pair<DensityMatrix, DensityMatrix>> table, double eps, std::string label) {
  Dims d = table.front().first.dims();
  return {d,
          [table = std::move(table), eps](const DensityMatrix& rho) {
            for (const auto& [in, out] : table)
              if (trace_distance(rho, in) <= eps) return out;
            return rho;
          },
          std::move(label)};
}

}  // namespace

NonlinearBox builtin_box(const std::string& name, const BoxOptions& options) {
  if (name == "Brun") {
    const DensityMatrix a0 = DensityMatrix::basis({2}, 0);
    const DensityMatrix in[4] = {qubit(1, 0), qubit(0, 1), qubit(kS, kS), qubit(kS, -kS)};
    std::vector<std::pair<DensityMatrix, DensityMatrix>> t;
    for (int k = 0; k < 4; ++k) t.emplace_back(tensor(in[k], a0), DensityMatrix::basis({2, 2}, k));
    return listed_box(std::move(t), options.eps_ball, "Brun");
  }
  if (name == "AxisSwap") {
    const cplx i(0, 1);
    std::vector<std::pair<DensityMatrix, DensityMatrix>> t = {{qubit(kS, kS * i), qubit(1, 0)},
                                                             {qubit(kS, -kS * i), qubit(0, 1)}};
    return listed_box(std::move(t), options.eps_ball, "AxisSwap");
  }
  if (name == "DeutschBox") {
    if (!options.circuit) throw UnknownBox("DeutschBox needs a circuit");
    CtcCircuit c = *options.circuit;
    FixedPointConfig cfg = options.solver;
    return {c.dims_cr, [c, cfg](const DensityMatrix& rho) { return deutsch_output(c, rho, cfg); }, "DeutschBox"};
  }
  if (name == "Identity") {
    return {{}, [](const DensityMatrix& rho) { return rho; }, "Identity"};  // any dims
  }
  throw UnknownBox(name);
}

NonlinearBox channel_box(const QuantumChannel& ch, const Dims& dims, std::string label) {
  return {dims, [ch](const DensityMatrix& rho) { return ch.apply(rho); }, std::move(label)};
}

Helstrom helstrom(const Mat& rho_a, const Mat& rho_b) {
  Mat d = rho_a - rho_b;
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (d + d.adjoint()));
  Helstrom h;
  h.projector = Mat::Zero(d.rows(), d.cols());
  for (int i = 0; i < d.rows(); ++i)
    if (es.eigenvalues()(i) > 0) {
      h.projector += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
      h.gap += es.eigenvalues()(i);
    }
  return h;
}

namespace {

Eigen::VectorXd real_vec(const Mat& m) {
  Eigen::VectorXd v(2 * m.size());
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    v(2 * i) = m.data()[i].real();
    v(2 * i + 1) = m.data()[i].imag();
  }
  return v;
}

}  // namespace

VerifyResult is_verifying_set(const NonlinearBox& box, const std::vector<GeneralizedState>& states,
                              double gap_threshold) {
  VerifyResult res;
  const int n = static_cast<int>(states.size());
  if (n < 2) return res;
  std::vector<Mat> s(n), o(n);
  for (int i = 0; i < n; ++i) {
    if (states[i].dims() != states.front().dims()) throw DimensionMismatch("states must share dims");
    s[i] = simplify(states[i]).data();
    o[i] = simplify(apply_box(box, states[i])).data();
  }
  // Pairs with equal simplification.
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (trace_distance(s[i], s[j]) > 1e-10) continue;
      Helstrom h = helstrom(o[i], o[j]);
      if (h.gap > gap_threshold && (!res.witness || h.gap > res.witness->measurement.gap)) {
        VerifyWitness w;
        w.lambda.assign(n, 0.0);
        w.mu.assign(n, 0.0);
        w.lambda[i] = 1.0;
        w.mu[j] = 1.0;
        w.a = i;
        w.b = j;
        w.measurement = h;
        res.verifying = true;
        res.witness = w;
      }
    }
  if (res.verifying) return res;

  // Convex combinations: c with sum c = 0 and sum c_i s_i = 0 but sum c_i o_i != 0.
  const auto rows = real_vec(s[0]).size() + 1;
  Eigen::MatrixXd a(rows, n);
  for (int i = 0; i < n; ++i) {
    a.col(i).head(rows - 1) = real_vec(s[i]);
    a(rows - 1, i) = 1.0;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cut = 1e-10 * std::max(1.0, sv.size() ? sv(0) : 1.0);
  for (int k = 0; k < n; ++k) {
    if (k < sv.size() && sv(k) > cut) continue;
    Eigen::VectorXd c = svd.matrixV().col(k);
    double pos = 0, neg = 0;
    for (int i = 0; i < n; ++i) (c(i) > 0 ? pos : neg) += std::abs(c(i));
    if (pos < 1e-12 || neg < 1e-12) continue;
    VerifyWitness w;
    w.lambda.assign(n, 0.0);
    w.mu.assign(n, 0.0);
    Mat oa = Mat::Zero(o[0].rows(), o[0].cols()), ob = oa;
    for (int i = 0; i < n; ++i) {
      if (c(i) > 0) w.lambda[i] = c(i) / pos;
      else w.mu[i] = -c(i) / neg;
      oa += w.lambda[i] * o[i];
      ob += w.mu[i] * o[i];
    }
    w.measurement = helstrom(oa, ob);
    if (w.measurement.gap > gap_threshold) {
      res.verifying = true;
      res.witness = w;
      return res;
    }
  }
  return res;
}

std::string to_string(Verdict v) { return v == Verdict::NoSignalling ? "NoSignalling" : "SignallingPossible"; }

AuditReport signalling_audit(const NonlinearBox& box, const std::vector<RemotePreparation>& preps,
                             double gap_threshold) {
  AuditReport rep;
  for (const auto& p : preps) {
    p.validate();
    const int n = static_cast<int>(p.ensembles.size());
    std::vector<Mat> o(n);
    for (int i = 0; i < n; ++i) o[i] = simplify(apply_box(box, p.ensembles[i])).data();
    bool any_pair = false;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        Helstrom h = helstrom(o[i], o[j]);
        if (h.gap > gap_threshold) {
          rep.witnesses.push_back({p.label, p.settings[i], p.settings[j], "helstrom", h.gap});
          any_pair = true;
        }
      }
    if (!any_pair) {
      // Mixtures of settings can still form a verifying set.
      VerifyResult v = is_verifying_set(box, p.ensembles, gap_threshold);
      if (v.verifying)
        rep.witnesses.push_back({p.label, "mixture", "mixture", "helstrom", v.witness->measurement.gap});
    }
  }
  rep.verdict = rep.witnesses.empty() ? Verdict::NoSignalling : Verdict::SignallingPossible;
  return rep;
}

namespace {

Mat inv_sqrt_on_support(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.adjoint()));
  Eigen::VectorXd l = es.eigenvalues();
  for (int i = 0; i < l.size(); ++i) l(i) = l(i) > 1e-12 ? 1.0 / std::sqrt(l(i)) : 0.0;
  return es.eigenvectors() * l.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

GisinResult gisin_experiment(const NonlinearBox& box,
                             const std::vector<std::pair<std::string, GeneralizedState>>& ontology, long trials,
                             std::uint64_t seed) {
  GisinResult res;
  const int k = static_cast<int>(ontology.size());
  if (k < 2 || trials < 1) return res;  // NotApplicable
  res.applicable = true;
  res.trials = trials;

  // Box outputs per (setting, ontic member), and the averaged outputs Bob faces.
  std::vector<std::vector<Mat>> outs(k);
  std::vector<Mat> avg(k);
  for (int s = 0; s < k; ++s) {
    const auto& g = ontology[s].second;
    avg[s] = Mat::Zero(g.support.front().second.dim(), g.support.front().second.dim());
    for (const auto& [w, rho] : g.support) {
      outs[s].push_back(box.map(rho).data());
      avg[s] += w * outs[s].back();
    }
  }
  const int d = static_cast<int>(avg[0].rows());
  std::vector<Mat> povm;
  if (k == 2) {
    res.measurement = "helstrom";
    Helstrom h = helstrom(avg[0], avg[1]);
    povm = {h.projector, Mat::Identity(d, d) - h.projector};
  } else {
    res.measurement = "pretty-good";
    Mat mean = Mat::Zero(d, d);
    for (const auto& a : avg) mean += a / double(k);
    Mat r = inv_sqrt_on_support(mean);
    Mat total = Mat::Zero(d, d);
    for (const auto& a : avg) {
      povm.push_back(r * (a / double(k)) * r);
      total += povm.back();
    }
    povm[0] += Mat::Identity(d, d) - total;  // kernel of the mean
  }
  res.analytic = 0.0;
  for (int s = 0; s < k; ++s) res.analytic += (povm[s] * avg[s]).trace().real() / k;

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, k - 1);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::vector<std::discrete_distribution<int>> member(k);
  for (int s = 0; s < k; ++s) {
    std::vector<double> w;
    for (const auto& pr : ontology[s].second.support) w.push_back(pr.first);
    member[s] = std::discrete_distribution<int>(w.begin(), w.end());
  }
  long wins = 0;
  for (long t = 0; t < trials; ++t) {
    const int s = pick(rng);
    const Mat& rho = outs[s][member[s](rng)];
    double x = u01(rng), acc = 0.0;
    int guess = k - 1;
    for (int j = 0; j < k; ++j) {
      acc += (povm[j] * rho).trace().real();
      if (x < acc) {
        guess = j;
        break;
      }
    }
    wins += (guess == s);
  }
  res.success = double(wins) / trials;
  res.stderr_ = std::sqrt(std::max(res.success * (1 - res.success), 1.0 / trials) / trials);
  return res;
}

RemotePreparation ontology_os() {
  const DensityMatrix a0 = DensityMatrix::basis({2}, 0);
  GeneralizedState c({{0.5, tensor(qubit(1, 0), a0)}, {0.5, tensor(qubit(0, 1), a0)}});
  GeneralizedState d({{0.5, tensor(qubit(kS, kS), a0)}, {0.5, tensor(qubit(kS, -kS), a0)}});
  return {"O_s", {"C", "D"}, {c, d}};
}

RemotePreparation ontology_ons() {
  const DensityMatrix mixed = tensor(DensityMatrix::maximally_mixed({2}), DensityMatrix::basis({2}, 0));
  return {"O_ns", {"C", "D"}, {GeneralizedState::delta(mixed), GeneralizedState::delta(mixed)}};
}

RemotePreparation appendix_preparation() {
  const cplx i(0, 1);
  GeneralizedState z({{0.5, qubit(1, 0)}, {0.5, qubit(0, 1)}});
  GeneralizedState y({{0.5, qubit(kS, kS * i)}, {0.5, qubit(kS, -kS * i)}});
  GeneralizedState other = GeneralizedState::delta(DensityMatrix::maximally_mixed({2}));
  return {"Appendix", {"z", "y", "other"}, {z, y, other}};
}

std::pair<GeneralizedState, GeneralizedState> heisenberg_cut_pair() {
  GeneralizedState quantum = GeneralizedState::delta(DensityMatrix::maximally_mixed({2}));
  GeneralizedState classical({{0.5, qubit(1, 0)}, {0.5, qubit(0, 1)}});
  return {quantum, classical};
}

}  // namespace ctc
