#include <cmath>
#include <functional>

#include "ctc/cli.hpp"
#include "ctc/deutsch.hpp"
#include "ctc/eventop.hpp"
#include "ctc/fock.hpp"
#include "ctc/gaussian.hpp"
#include "ctc/nlbox.hpp"
#include "ctc/parallel.hpp"
#include "ctc/relcirc.hpp"

namespace ctc {

namespace {

constexpr const char* kVersion = "1.0.0";
const std::string kHalfPi = "1.5707963267948966";

using R = ParamKind;

class Params {
 public:
  Params(const ScenarioInfo& info, const ScenarioConfig& cfg) : info_(info), cfg_(cfg) {
    for (const auto& p : info.params) {
      const std::string& raw = text(p.name);
      switch (p.kind) {
        case R::Real: record_[p.name] = std::stod(raw); break;
        case R::Int: record_[p.name] = static_cast<long>(std::stod(raw)); break;
        case R::Text: record_[p.name] = raw; break;
        case R::Grid: record_[p.name] = parse_grid(raw); break;
      }
    }
  }
  const std::string& text(const std::string& name) const {
    auto it = cfg_.params.find(name);
    if (it != cfg_.params.end()) return it->second;
    for (const auto& p : info_.params)
      if (p.name == name) return p.fallback;
    throw InvalidConfig("parameter '" + name + "' not declared");
  }
  double real(const std::string& name) const { return record_.at(name).get<double>(); }
  long integer(const std::string& name) const { return record_.at(name).get<long>(); }
  std::vector<double> grid(const std::string& name) const { return record_.at(name).get<std::vector<double>>(); }
  const Json& record() const { return record_; }

 private:
  const ScenarioInfo& info_;
  const ScenarioConfig& cfg_;
  Json record_ = Json::object();
};

struct Context {
  std::uint64_t seed;
  int workers;
};

Json matrix_json(const Mat& m) {
  Json re = Json::array(), im = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json rr = Json::array(), ii = Json::array();
    for (int j = 0; j < m.cols(); ++j) {
      rr.push_back(m(i, j).real());
      ii.push_back(m(i, j).imag());
    }
    re.push_back(rr);
    im.push_back(ii);
  }
  return {{"re", re}, {"im", im}};
}

Json real_matrix_json(const RMat& m) {
  Json out = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(row);
  }
  return out;
}

Json vector_json(const RVec& v) {
  Json out = Json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Table wigner_table(const WignerGrid& g) {
  Table t{"wigner", {"q", "p", "w"}, {}};
  for (std::size_t i = 0; i < g.q.size(); ++i)
    for (std::size_t j = 0; j < g.p.size(); ++j) t.rows.push_back({g.q[i], g.p[j], g.w(i, j)});
  return t;
}

GaussianPrep prep_from(const Params& p) {
  return {cplx(p.real("alpha_re"), p.real("alpha_im")), p.real("r"), p.real("theta_R"), p.real("theta_S")};
}

double max_dev(const Mat& a, const Mat& b) { return (a - b).cwiseAbs().maxCoeff(); }

DensityMatrix plus_state(int sign) {
  Vec v(2);
  v << 1.0, static_cast<double>(sign);
  return DensityMatrix::pure({2}, v / std::sqrt(2.0));
}

void fixed_point_outputs(ScenarioResult& out, const FixedPointResult& r) {
  out.outputs["rho_ctc"] = matrix_json(r.rho_ctc.data());
  out.outputs["residual"] = r.residual;
  out.outputs["iterations"] = r.iterations;
  out.outputs["method"] = r.method;
  out.outputs["converged"] = r.converged;
  out.outputs["distance_to_maximally_mixed"] = trace_distance(r.rho_ctc, DensityMatrix::maximally_mixed({2}));
}

// --- scenarios -----------------------------------------------------------

void grandfather(const Params& p, const Context&, ScenarioResult& out) {
  const long input = p.integer("input");
  if (input != 0 && input != 1) throw InvalidConfig("input must be 0 or 1");
  FixedPointConfig cfg;
  cfg.tol = p.real("tol");
  const auto c = grandfather_circuit();
  const auto rho1 = DensityMatrix::basis({2}, static_cast<int>(input));
  const auto r = solve_fixed_point(c, rho1, cfg);
  fixed_point_outputs(out, r);
  out.outputs["rho_out"] = matrix_json(output_given_ctc(c, rho1, r.rho_ctc).data());
  out.metadata["tol"] = cfg.tol;
}

void info_paradox(const Params& p, const Context&, ScenarioResult& out) {
  FixedPointConfig cfg;
  cfg.tol = p.real("tol");
  const auto c = info_paradox_circuit();
  const auto rho1 = plus_state(+1);
  const auto map = deutsch_map_channel(c, rho1);
  for (int s : {+1, -1}) {
    const auto rho = plus_state(s);
    out.outputs[s > 0 ? "residual_plus" : "residual_minus"] = trace_distance(map.apply(rho), rho);
  }
  fixed_point_outputs(out, solve_fixed_point(c, rho1, cfg));
  out.metadata["tol"] = cfg.tol;
}

void otc_bell(const Params& p, const Context&, ScenarioResult& out) {
  Vec bell = Vec::Zero(4);
  bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
  const auto rho = extend_with_ancilla(otc_circuit({2}), DensityMatrix::pure({2, 2}, bell));
  out.outputs["density_output"] = matrix_json(rho.data());
  out.outputs["density_max_deviation"] = max_dev(rho.data(), Mat::Identity(4, 4) / 4.0);

  const double r = p.real("r");
  const auto tmsv = two_mode_squeezed_vacuum(r);
  const auto broken = break_entanglement(tmsv, {1});
  out.outputs["gaussian_cov"] = real_matrix_json(broken.cov);
  out.outputs["gaussian_cross_max"] = broken.cov.block(0, 2, 2, 2).cwiseAbs().maxCoeff();
  out.outputs["gaussian_marginal_deviation"] =
      (broken.cov - std::cosh(2 * r) * RMat::Identity(4, 4)).cwiseAbs().maxCoeff();
}

void brun_audit(const Params& p, const Context&, ScenarioResult& out) {
  const double thr = p.real("gap_threshold");
  auto record = [&](const std::string& key, const AuditReport& rep) {
    double gap = 0;
    for (const auto& w : rep.witnesses) gap = std::max(gap, w.distance);
    out.outputs[key] = {{"verdict", to_string(rep.verdict)}, {"gap", gap}, {"witnesses", rep.witnesses.size()}};
  };
  const auto brun = builtin_box("Brun");
  record("brun_os", signalling_audit(brun, {ontology_os()}, thr));
  record("brun_ons", signalling_audit(brun, {ontology_ons()}, thr));
  record("axisswap_appendix", signalling_audit(builtin_box("AxisSwap"), {appendix_preparation()}, thr));
  out.metadata["gap_threshold"] = thr;
}

void gisin(const Params& p, const Context& ctx, ScenarioResult& out) {
  const std::string which = p.text("ontology");
  RemotePreparation prep;
  if (which == "os") prep = ontology_os();
  else if (which == "ons") prep = ontology_ons();
  else if (which == "appendix") prep = appendix_preparation();
  else throw InvalidConfig("ontology must be os, ons or appendix");
  std::vector<std::pair<std::string, GeneralizedState>> onto;
  for (std::size_t i = 0; i < prep.settings.size(); ++i) onto.push_back({prep.settings[i], prep.ensembles[i]});
  const auto r = gisin_experiment(builtin_box(p.text("box")), onto, p.integer("trials"), ctx.seed);
  out.outputs["applicable"] = r.applicable;
  out.outputs["measurement"] = r.measurement;
  out.outputs["trials"] = r.trials;
  out.outputs["success"] = r.success;
  out.outputs["stderr"] = r.stderr_;
  out.outputs["analytic"] = r.analytic;
}

void ctc_bs_gaussian(const Params& p, const Context&, ScenarioResult& out) {
  const BsParams bs{p.real("eta"), p.real("phi")};
  const auto m = ctc_beamsplitter_moments(bs, prep_from(p));
  out.outputs["mean"] = vector_json(m.state.mean);
  out.outputs["cov"] = real_matrix_json(m.state.cov);
  out.outputs["det"] = m.state.det();
  out.outputs["mean_photons"] = m.vdv;
  const long res = p.integer("resolution");
  if (res > 0) out.tables.push_back(wigner_table(wigner_grid(m.state, p.real("range"), static_cast<int>(res))));
}

void ctc_bs_photon(const Params& p, const Context&, ScenarioResult& out) {
  const double eta = p.real("eta"), phi = p.real("phi");
  const auto s = photon_ctc_stats(eta, phi);
  out.outputs["eta"] = eta;
  out.outputs["g2"] = s.g2;
  out.outputs["mean_n"] = s.mean_n;
  const long n = p.integer("N_rails");
  if (n > 0) {
    const auto f = fock_simulate(eta, phi, static_cast<int>(n), static_cast<int>(p.integer("cutoff")));
    out.outputs["g2_finite"] = f.g2;
    out.outputs["mean_n_finite"] = f.mean_n;
    out.metadata["finite_tail_bound"] = std::pow(1 - eta, n / 2.0);
  }
}

void otc_hup(const Params& p, const Context&, ScenarioResult& out) {
  const long M = p.integer("M");
  const double r = p.real("r");
  const cplx alpha(p.real("alpha_re"), p.real("alpha_im"));
  const auto h = hup_demo(static_cast<int>(M), r, alpha);
  out.outputs["var_q"] = h.var_q_a;
  out.outputs["var_p"] = h.var_p_c;
  out.outputs["sigma_product"] = h.sigma_product;
  out.outputs["K"] = h.K;
  out.outputs["mean_photons_ancilla"] = h.mean_photons_ancilla;
  Table t{"passes", {"M", "var_q", "var_q_formula", "var_p"}, {}};
  for (int m = 1; m <= M; ++m) {
    const auto s = otc_circuit_simulate(m, r, alpha);
    t.rows.push_back({double(m), s.cov(0, 0), otc_variances(m, r).var_q, s.cov(1, 1)});
  }
  out.tables.push_back(t);
}

void spod(const Params& p, const Context& ctx, ScenarioResult& out) {
  SpodParams sp{p.real("chi"), p.integer("N"), p.real("mu"), p.real("nu")};
  const auto s = spod_stats(sp);
  out.outputs["mean_n"] = s.mean_n;
  out.outputs["g2"] = s.g2;
  out.outputs["large_chi"] = s.large_chi;
  const auto e = spod_exact(sp);
  out.outputs["exact_mean_n"] = e.mean_n;
  out.outputs["exact_g2"] = e.g2;
  if (const long trials = p.integer("trials"); trials > 0) {
    const auto mc = spod_montecarlo(sp, trials, ctx.seed, ctx.workers);
    out.outputs["mc_mean_n"] = mc.mean_n_est;
    out.outputs["mc_stderr"] = mc.stderr_;
    out.outputs["mc_g2"] = mc.g2_est;
    out.outputs["mc_g2_stderr"] = mc.g2_stderr;
  }
  if (const double eps = p.real("epsilon"); eps > 0) out.outputs["min_sources"] = spod_min_sources(sp.chi, eps);
}

G2Method g2_method(const Params& p) {
  const std::string m = p.text("method");
  G2Method g;
  if (m == "truncated") g = G2Method::truncated(static_cast<int>(p.integer("cutoff")));
  else if (m == "direct") g = G2Method::direct(static_cast<int>(p.integer("cutoff")));
  else throw InvalidConfig("method must be truncated or direct");
  if (p.real("max_tail") > 0) g.max_tail = p.real("max_tail");
  return g;
}

void eventop_g2(const Params& p, const Context& ctx, ScenarioResult& out) {
  const auto k = CommutatorKernel::gaussian(p.real("kappa"));
  const auto method = g2_method(p);
  const double phi = p.real("phi");
  const auto etas = p.grid("eta");
  const auto rows = parallel_map<std::vector<double>>(
      static_cast<int>(etas.size()),
      [&](int i) {
        const auto g = eo_g2(etas[i], k, method, phi, 1);
        return std::vector<double>{etas[i], g.g2, photon_ctc_stats(etas[i], phi).g2, g.mean_n, double(g.cutoff),
                                   g.tail};
      },
      ctx.workers);
  Table t{"g2", {"eta", "g2", "g2_deutsch", "mean_n", "cutoff", "tail"}, rows};
  double worst_tail = 0;
  for (const auto& r : rows) worst_tail = std::max(worst_tail, r[5]);
  out.outputs["points"] = rows.size();
  out.tables.push_back(t);
  out.metadata["method"] = p.text("method");
  out.metadata["max_tail"] = method.max_tail;
  out.metadata["worst_tail"] = worst_tail;
}

void eventop_wigner(const Params& p, const Context&, ScenarioResult& out) {
  const BsParams bs{p.real("eta"), p.real("phi")};
  TruncationSpec t;
  t.X = static_cast<int>(p.integer("X"));
  const auto m = eo_gaussian_moments(bs, prep_from(p), CommutatorKernel::gaussian(p.real("kappa")), t);
  out.outputs["mean"] = vector_json(m.state.mean);
  out.outputs["cov"] = real_matrix_json(m.state.cov);
  out.outputs["det"] = m.state.det();
  out.metadata["cutoff"] = m.sums.cutoff;
  out.metadata["tail"] = m.sums.tail;
  if (const long res = p.integer("resolution"); res > 0)
    out.tables.push_back(wigner_table(wigner_grid(m.state, p.real("range"), static_cast<int>(res))));
}

void gravity(const Params& p, const Context&, ScenarioResult& out) {
  const auto g = gravity_scenario(p.real("h"), p.real("sigma_t"));
  out.outputs["h"] = g.h;
  out.outputs["delta_t"] = g.delta_t;
  out.outputs["kappa"] = g.kappa;
  out.outputs["C01"] = g.C01;
}

void rel_cnot(const Params& p, const Context&, ScenarioResult& out) {
  const double alpha = p.real("alpha"), v = p.real("v"), dx = p.real("dx"), sigma = p.real("sigma"), k0 = p.real("k0");
  const cplx z = lorentz_overlap({sigma, k0 * doppler_factor(v), 0, v}, {sigma, k0, 0, 0}, dx);
  out.outputs["zeta_re"] = z.real();
  out.outputs["zeta_im"] = z.imag();
  out.outputs["zeta_abs"] = std::abs(z);
  out.outputs["expectation"] = relativistic_cnot(alpha, v, dx, sigma, k0);
  out.outputs["matched_expectation"] = 1 - 2 * alpha * alpha;
}

using Runner = std::function<void(const Params&, const Context&, ScenarioResult&)>;

std::vector<ParamSpec> gaussian_prep_params(const std::string& r, const std::string& theta_r) {
  return {{"alpha_re", R::Real, "0", "input displacement, real part"},
          {"alpha_im", R::Real, "0", "input displacement, imaginary part"},
          {"r", R::Real, r, "squeezing"},
          {"theta_R", R::Real, theta_r, "rotation before squeezing"},
          {"theta_S", R::Real, "0", "squeezing angle"}};
}

std::vector<ParamSpec> concat(std::vector<ParamSpec> a, const std::vector<ParamSpec>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

struct Entry {
  ScenarioInfo info;
  Runner run;
};

const std::vector<Entry>& entries() {
  static const std::vector<Entry> list = {
      {{"grandfather", "CNOT+SWAP loop with a classical bit on the chronology-respecting rail",
        {{"input", R::Int, "1", "computational input 0 or 1"}, {"tol", R::Real, "1e-10", "fixed-point tolerance"}}},
       grandfather},
      {{"info-paradox", "phase-kickback loop with |+> input: pure and mixed consistent solutions",
        {{"tol", R::Real, "1e-10", "fixed-point tolerance"}}},
       info_paradox},
      {{"otc-bell", "one half of a Bell pair (or a two-mode squeezed state) sent through an open curve",
        {{"r", R::Real, "1", "two-mode squeezing for the Gaussian path"}}},
       otc_bell},
      {{"brun-audit", "signalling audits for the Brun and axis-swap boxes",
        {{"gap_threshold", R::Real, "1e-6", "minimum distinguishability counted as signalling"}}},
       brun_audit},
      {{"gisin", "sampled remote-preparation signalling experiment",
        {{"box", R::Text, "Brun", "Brun, AxisSwap or Identity"},
         {"ontology", R::Text, "os", "os, ons or appendix"},
         {"trials", R::Int, "100000", "samples"}}},
       gisin},
      {{"ctc-bs-gaussian", "Gaussian input to a beamsplitter loop, infinite-copy limit",
        concat({{"eta", R::Real, "0.6666666666666666", "beamsplitter reflectivity"},
                {"phi", R::Real, kHalfPi, "beamsplitter phase"},
                {"resolution", R::Int, "0", "Wigner grid points per axis, 0 for none"},
                {"range", R::Real, "0", "Wigner half-width, 0 for automatic"}},
               gaussian_prep_params("1", kHalfPi))},
       ctc_bs_gaussian},
      {{"ctc-bs-photon", "single photon into a beamsplitter loop",
        {{"eta", R::Real, "0.5", "beamsplitter reflectivity"},
         {"phi", R::Real, kHalfPi, "beamsplitter phase"},
         {"N_rails", R::Int, "0", "finite equivalent circuit size, 0 to skip"},
         {"cutoff", R::Int, "0", "explicit Fock cutoff for the finite circuit, 0 for the identity path"}}},
       ctc_bs_photon},
      {{"otc-hup", "iterated open-curve squeezing of a coherent state",
        {{"M", R::Int, "1", "number of passes"},
         {"r", R::Real, "5", "ancilla squeezing"},
         {"alpha_re", R::Real, "0", "input displacement, real part"},
         {"alpha_im", R::Real, "0", "input displacement, imaginary part"}}},
       otc_hup},
      {{"spod", "heralded single photons from N weakly pumped sources",
        {{"chi", R::Real, "0.01", "pump strength"},
         {"N", R::Int, "50000", "number of sources"},
         {"mu", R::Real, "1.5", "detector linear coefficient"},
         {"nu", R::Real, "0.5", "detector quadratic coefficient"},
         {"trials", R::Int, "0", "Monte Carlo trials, 0 to skip"},
         {"epsilon", R::Real, "0", "target failure probability for the source count, 0 to skip"}}},
       spod},
      {{"eventop-g2", "g2 of a single photon through a finite-size loop",
        {{"kappa", R::Real, "10", "loop size relative to the packet width"},
         {"eta", R::Grid, "0:1:0.05", "reflectivity grid"},
         {"phi", R::Real, kHalfPi, "beamsplitter phase"},
         {"method", R::Text, "truncated", "truncated or direct"},
         {"cutoff", R::Int, "0", "lag cutoff (truncated) or rail count (direct), 0 for automatic"},
         {"max_tail", R::Real, "0", "largest accepted tail bound, 0 for the method default"}}},
       eventop_g2},
      {{"eventop-wigner", "squeezed input through a finite-size loop",
        concat({{"kappa", R::Real, "1", "loop size relative to the packet width"},
                {"eta", R::Real, "0.6666666666666666", "beamsplitter reflectivity"},
                {"phi", R::Real, kHalfPi, "beamsplitter phase"},
                {"X", R::Int, "0", "lag cutoff, 0 for automatic"},
                {"resolution", R::Int, "101", "Wigner grid points per axis, 0 for none"},
                {"range", R::Real, "0", "Wigner half-width, 0 for automatic"}},
               gaussian_prep_params("1", kHalfPi))},
       eventop_wigner},
      {{"gravity", "loop size from gravitational time dilation between ground and height h",
        {{"h", R::Real, "100000", "height in metres"}, {"sigma_t", R::Real, "2e-13", "temporal resolution in seconds"}}},
       gravity},
      {{"rel-cnot", "CNOT whose target comes from a moving, mistimed source",
        {{"alpha", R::Real, "0.5", "control amplitude on |1>"},
         {"v", R::Real, "0", "source velocity (c = 1)"},
         {"dx", R::Real, "0", "displacement at the gate"},
         {"sigma", R::Real, "1", "momentum width"},
         {"k0", R::Real, "10", "carrier"}}},
       rel_cnot},
  };
  return list;
}

const Entry& entry(const std::string& name) {
  for (const auto& e : entries())
    if (e.info.name == name) return e;
  throw UnknownScenario("'" + name + "'");
}

}  // namespace

const std::vector<ScenarioInfo>& scenario_registry() {
  static const std::vector<ScenarioInfo> infos = [] {
    std::vector<ScenarioInfo> v;
    for (const auto& e : entries()) v.push_back(e.info);
    return v;
  }();
  return infos;
}

const ScenarioInfo& scenario_info(const std::string& name) { return entry(name).info; }

ScenarioResult run(const ScenarioConfig& cfg) {
  cfg.validate();
  const auto& e = entry(cfg.scenario);
  Params params(e.info, cfg);
  const int workers = cfg.workers > 0 ? cfg.workers : worker_count();
  ScenarioResult out;
  out.scenario = cfg.scenario;
  out.params = params.record();
  out.metadata["version"] = kVersion;
  out.metadata["seed"] = cfg.seed;
  out.metadata["workers"] = workers;
  e.run(params, {cfg.seed, workers}, out);
  return out;
}

SweepResult sweep(const ScenarioConfig& cfg, const AxisSpec& axis) {
  cfg.validate();
  SweepResult s;
  if (axis.key.empty() || axis.values.empty()) {
    s.runs.push_back(run(cfg));
  } else {
    const auto& info = scenario_info(cfg.scenario);
    bool numeric = false;
    for (const auto& p : info.params)
      if (p.name == axis.key) numeric = p.kind != ParamKind::Text;
    if (!numeric) throw InvalidConfig("axis '" + axis.key + "' is not a numeric parameter of " + cfg.scenario);
    const int n = static_cast<int>(axis.values.size());
    const int workers = cfg.workers > 0 ? cfg.workers : worker_count();
    s.runs = parallel_map<ScenarioResult>(
        n,
        [&](int i) {
          ScenarioConfig c = cfg;
          c.params[axis.key] = format_real(axis.values[i]);
          c.workers = workers;
          return run(c);
        },
        workers);
  }
  // One row per point: the axis value, then every numeric scalar output.
  s.merged.name = "sweep";
  if (!axis.key.empty()) s.merged.columns.push_back(axis.key);
  for (const auto& [k, v] : s.runs.front().outputs.items())
    if (v.is_number() || v.is_boolean()) s.merged.columns.push_back(k);
  for (std::size_t i = 0; i < s.runs.size(); ++i) {
    std::vector<double> row;
    if (!axis.key.empty()) row.push_back(axis.values[i]);
    const Json& o = s.runs[i].outputs;
    for (std::size_t c = axis.key.empty() ? 0 : 1; c < s.merged.columns.size(); ++c) {
      const auto it = o.find(s.merged.columns[c]);
      if (it == o.end() || !(it->is_number() || it->is_boolean())) row.push_back(std::nan(""));
      else row.push_back(it->is_boolean() ? double(it->get<bool>()) : it->get<double>());
    }
    s.merged.rows.push_back(row);
  }
  return s;
}

}  // namespace ctc
