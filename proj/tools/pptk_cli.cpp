#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "pptk/pptk.hpp"
#include "spec_io.hpp"

using namespace pptk;
using pptk::cli::json;

namespace {

constexpr const char* kVersion = "pptk 0.1.0";
constexpr const char* kUndecided = "PPT — entanglement undecided by this toolkit";

// Resource problems (output path, dimension cap) map to exit code 3.
class ResourceError : public Error {
 public:
  using Error::Error;
};

struct Common {
  std::string spec_path;
  std::string cut;
  std::optional<double> p;
  std::uint64_t seed = 1;
  int restarts = 200;
  double tol = 1e-12;
  std::size_t max_dim = kDefaultMaxDim;
  unsigned jobs = 1;
  int samples = 2000;

  SearchConfig search() const {
    SearchConfig c;
    c.seed = seed;
    c.restarts = restarts;
    c.tol = tol;
    c.jobs = jobs;
    return c;
  }
};

void add_search_flags(CLI::App* app, Common& c) {
  app->add_option("--seed", c.seed, "Seed for the randomized searches");
  app->add_option("--restarts", c.restarts, "Random restarts per epsilon search")->check(CLI::PositiveNumber);
  app->add_option("--tol", c.tol, "Convergence tolerance of the epsilon search")->check(CLI::NonNegativeNumber);
  app->add_option("--max-dim", c.max_dim, "Cap on the composite Hilbert-space dimension")->check(CLI::PositiveNumber);
  app->add_option("--jobs", c.jobs, "Worker threads")->check(CLI::PositiveNumber);
}

void add_spec_flags(CLI::App* app, Common& c) {
  app->add_option("spec", c.spec_path, "JSON state spec")->required();
  app->add_option("--cut", c.cut, "Bipartition such as \"0|1,2\" (default: every cut)");
  app->add_option("--p", c.p, "Mixing probability, overrides the spec")->check(CLI::Range(0.0, 1.0));
  add_search_flags(app, c);
}

double num(double v) { return std::stod(format_number(v)); }

json vec_json(const RealVector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(num(v(i)));
  return a;
}

json matrix_json(const ComplexMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(json::array({num(m(r, c).real()), num(m(r, c).imag())}));
    rows.push_back(row);
  }
  return rows;
}

cli::LoadedSpec load(const Common& c) {
  cli::LoadedSpec s = cli::load_spec(c.spec_path);
  if (c.p) {
    s.spec.p = *c.p;
    s.has_p = true;
  }
  if (!s.has_p) throw ParseError("spec: no 'p' in the document and no --p given");
  for (const auto& w : s.warnings) std::cerr << "warning: " << w << '\n';
  return s;
}

std::vector<Bipartition> selected_cuts(const Common& c, std::size_t n) {
  if (!c.cut.empty()) return {Bipartition::parse(c.cut, n)};
  return enumerate_cuts(n);
}

json spec_summary(const cli::LoadedSpec& s) {
  json j;
  j["factors"] = s.spec.factors.size();
  j["parties"] = s.spec.party_count();
  j["total_dimension"] = s.spec.total_dimension();
  j["p"] = num(s.spec.p);
  j["warnings"] = s.warnings;
  return j;
}

json threshold_json(const PptThreshold& t) {
  json j;
  j["value"] = num(t.p_gamma);
  j["method"] = to_string(t.method);
  if (t.exact) j["exact"] = std::to_string(t.exact->num) + "/" + std::to_string(t.exact->den);
  if (!t.reason.empty()) j["reason"] = t.reason;
  return j;
}

bool all_separable_across(const std::vector<PureFactorState>& fs, const Bipartition& cut) {
  for (const auto& f : fs)
    if (!separable_across(f, cut)) return false;
  return true;
}

// ---------------------------------------------------------------------------

json analyze_cut(const EnsembleSpec& spec, const MixedState& rho, const Bipartition& cut, const Common& c) {
  const CutReport rep = cut_report(spec, cut, c.search(), c.max_dim);
  const auto [da, db] = rho.layout.cut_dims(cut);
  const double rnorm = realignment_norm(rho, cut);
  const auto cert = rep.ppt_at_p ? std::nullopt : distillability_certificate(rho, cut);
  const double eps_used = kEpsilonSafety * rep.epsilon.value;
  std::optional<double> expectation;
  if (spec.factors.size() >= 2) expectation = build_W_gen(spec.factors, eps_used, c.max_dim).expectation(rho.matrix);

  json j;
  j["cut"] = cut.label();
  j["dims"] = {da, db};
  j["ppt"] = rep.ppt_at_p;
  j["min_pt_eigenvalue"] = num(rep.min_pt_eigenvalue);
  j["p_gamma"] = threshold_json(rep.p_gamma);
  j["realignment_norm"] = num(rnorm);
  j["distillability_certificate"] = cert.has_value();
  if (cert) {
    j["certificate_value"] = num(cert->value);
    j["certificate_schmidt_rank"] = cert->schmidt_rank_across_cut;
  }
  j["nontrivial_witness"] = rep.nontrivial;
  j["epsilon"] = {{"upper_bound", num(rep.epsilon.value)},
                  {"used", num(eps_used)},
                  {"safety_factor", kEpsilonSafety},
                  {"method", to_string(rep.epsilon.method)},
                  {"restarts", rep.epsilon.restarts_used},
                  {"converged", rep.epsilon.converged},
                  {"note", rep.epsilon.note}};
  j["witness_expectation"] = expectation ? json(num(*expectation)) : json(nullptr);

  std::string cls;
  json detected_by = nullptr;
  if (spec.p == 0.0 || all_separable_across(spec.factors, cut)) {
    cls = "separable";
  } else if (!rep.ppt_at_p) {
    if (rep.p_gamma.p_gamma == 0.0)
      cls = "NPT entangled for all p>0";
    else
      cls = cert ? "NPT entangled, distillable" : "NPT entangled";
  } else if (rep.nontrivial && expectation && *expectation < -1e-12) {
    cls = "PPT entangled";
    detected_by = "witness";
  } else if (rnorm > 1.0 + 1e-9) {
    cls = "PPT entangled";
    detected_by = "realignment";
  } else {
    cls = kUndecided;
  }
  j["classification"] = cls;
  j["detected_by"] = detected_by;
  return j;
}

int cmd_analyze(const Common& c) {
  const auto s = load(c);
  const MixedState rho = build_rho_p(s.spec, c.max_dim);
  json out;
  out["version"] = kVersion;
  out["spec"] = spec_summary(s);
  json cuts = json::array();
  for (const auto& cut : selected_cuts(c, s.spec.party_count())) cuts.push_back(analyze_cut(s.spec, rho, cut, c));
  out["cuts"] = cuts;
  std::cout << out.dump(2) << '\n';
  return 0;
}

// ---------------------------------------------------------------------------

struct WitnessArgs {
  Common common;
  std::string kind = "W_eps";
};

json certificate_json(const EpsilonEstimate& est) {
  return {{"alpha", matrix_json(est.alpha)}, {"beta", matrix_json(est.beta)}, {"analytic", est.analytic}};
}

int cmd_witness(const WitnessArgs& a) {
  const Common& c = a.common;
  const auto s = load(c);
  const auto& f = s.spec.factors;
  const std::size_t M = f.size(), N = s.spec.party_count();
  if (M < 2) throw PreconditionError("witness: need at least two factors");
  const WitnessKind kind = a.kind == "W_eps" ? WitnessKind::W_eps : a.kind == "W_tilde" ? WitnessKind::W_tilde : WitnessKind::W_gen;
  if (kind != WitnessKind::W_gen && (M != 2 || N != 2))
    throw PreconditionError("witness: W_eps and W_tilde need two bipartite factors; use --kind W_gen");

  json out;
  out["version"] = kVersion;
  out["spec"] = spec_summary(s);
  out["kind"] = a.kind;

  double ub = 0.0;
  if (M == 2 && N == 2) {
    const WitnessKind search_kind = kind == WitnessKind::W_tilde ? WitnessKind::W_tilde : WitnessKind::W_eps;
    const auto est = epsilon_estimate(f[0], f[1], search_kind, c.search());
    ub = est.upper_bound;
    out["epsilon_method"] = "schmidt_relation";
    out["restarts"] = est.restarts_used;
    out["converged"] = est.converged;
    out["certificate"] = certificate_json(est);
    if (ub == 0.0)
      out["note"] = est.degenerate ? "both factors product: no witness"
                                   : "epsilon = 0; certificate alpha = beta = 1 attains the bound analytically";
  } else {
    const auto cuts = selected_cuts(c, N);
    double best = std::numeric_limits<double>::infinity();
    json per_cut = json::array();
    for (const auto& cut : cuts) {
      double v = 0.0;
      if (!all_separable_across(f, cut)) v = std::max(0.0, w_gen_product_search(f, cut, c.search(), c.max_dim).value);
      per_cut.push_back({{"cut", cut.label()}, {"epsilon_upper_bound", num(v)}});
      best = std::min(best, v);
    }
    ub = best;
    out["epsilon_method"] = "product_search";
    out["per_cut"] = per_cut;
    if (N == 2 && M >= 3) {
      // Each split {psi_i} | {the rest} bounds W_gen from below by a two-factor W_eps.
      json splits = json::array();
      double gbest = 0.0;
      std::size_t gi = 0;
      for (std::size_t i = 0; i < M; ++i) {
        std::vector<PureFactorState> rest;
        for (std::size_t k = 0; k < M; ++k)
          if (k != i) rest.push_back(f[k]);
        const double v = epsilon_estimate(f[i], group_bipartite(rest), WitnessKind::W_eps, c.search()).upper_bound;
        splits.push_back({{"split", "{" + std::to_string(i + 1) + "} | rest"}, {"epsilon_upper_bound", num(v)}});
        if (v > gbest) {
          gbest = v;
          gi = i;
        }
      }
      out["grouping"] = {{"used", "{" + std::to_string(gi + 1) + "} | rest"},
                         {"epsilon_upper_bound", num(gbest)},
                         {"splits", splits}};
    }
  }
  const double used = kEpsilonSafety * ub;
  out["epsilon"] = {{"upper_bound", num(ub)}, {"used", num(used)}, {"safety_factor", kEpsilonSafety}};

  const Witness w = kind == WitnessKind::W_tilde ? build_W_tilde(f[0], f[1], used)
                    : (M == 2 && N == 2)          ? build_W_eps(f[0], f[1], used)
                                                  : build_W_gen(f, used, c.max_dim);
  const MixedState rho = build_rho_p(s.spec, c.max_dim);
  out["expectation"] = num(w.expectation(rho.matrix));
  if (kind != WitnessKind::W_tilde) out["predicted_expectation"] = num(-s.spec.p * used);

  json pos = json::array();
  for (const auto& cut : selected_cuts(c, N)) {
    const CutView v = cut_major(w.matrix, w.layout, cut);
    const double lo = sampled_product_minimum(v.matrix, v.dim_a, v.dim_b, c.samples, c.seed);
    pos.push_back({{"cut", cut.label()}, {"samples", c.samples}, {"min", num(lo)}, {"nonnegative", lo >= -1e-9}});
  }
  out["sampled_product_positivity"] = pos;
  std::cout << out.dump(2) << '\n';
  return 0;
}

// ---------------------------------------------------------------------------

struct MultiArgs {
  Common common;
  std::optional<double> p_fraction;
};

int cmd_multipartite(const MultiArgs& a) {
  const Common& c = a.common;
  cli::LoadedSpec s = cli::load_spec(c.spec_path);
  for (const auto& w : s.warnings) std::cerr << "warning: " << w << '\n';
  const std::size_t N = s.spec.party_count();
  if (N < 3) throw PreconditionError("multipartite: need at least three parties");
  const auto cuts = enumerate_cuts(N);
  const PptProfile prof = design_ppt_profile(s.spec.factors, cuts, c.max_dim);
  if (a.p_fraction) {
    s.spec.p = *a.p_fraction * prof.p_max;
  } else if (c.p) {
    s.spec.p = *c.p;
  } else if (!s.has_p) {
    throw ParseError("spec: no 'p' in the document and neither --p nor --p-fraction given");
  }
  s.spec.validate();

  const auto reports = cut_reports(s.spec, cuts, c.search(), c.max_dim);
  const double et = epsilon_tilde(reports);
  const double used = kEpsilonSafety * et;
  const bool has_witness = s.spec.factors.size() >= 2;
  const double expectation =
      has_witness ? build_W_gen(s.spec.factors, used, c.max_dim).expectation(build_rho_p(s.spec, c.max_dim).matrix) : 0.0;

  json out;
  out["version"] = kVersion;
  out["spec"] = spec_summary(s);
  json table = json::array();
  std::vector<std::string> npt;
  for (const auto& r : reports) {
    json sch = json::array();
    for (const auto& v : r.per_factor_schmidt) sch.push_back(vec_json(v));
    table.push_back({{"cut", r.cut.label()},
                     {"schmidt_coefficients", sch},
                     {"p_gamma", threshold_json(r.p_gamma)},
                     {"ppt", r.ppt_at_p},
                     {"min_pt_eigenvalue", num(r.min_pt_eigenvalue)},
                     {"epsilon_upper_bound", num(r.epsilon.value)},
                     {"epsilon_method", to_string(r.epsilon.method)},
                     {"note", r.epsilon.note}});
    if (!r.ppt_at_p) npt.push_back(r.cut.label());
  }
  out["cuts"] = table;
  out["epsilon_tilde"] = {{"upper_bound", num(et)}, {"used", num(used)}, {"safety_factor", kEpsilonSafety}};
  out["witness_expectation"] = has_witness ? json(num(expectation)) : json(nullptr);
  json npt_all = json::array();
  for (const auto& cut : prof.npt_cuts) npt_all.push_back(cut.label());
  out["ppt_profile"] = {{"p_max", num(prof.p_max)}, {"npt_for_all_p", npt_all}, {"explanation", prof.explanation}};

  bool fully_product = true;
  for (const auto& cut : cuts) fully_product = fully_product && all_separable_across(s.spec.factors, cut);
  std::string verdict;
  if (s.spec.p == 0.0 || fully_product) {
    verdict = "separable; nothing to certify";
  } else if (!npt.empty()) {
    verdict = "NPT on cuts:";
    for (const auto& l : npt) verdict += " " + l;
  } else if (used > 0.0 && expectation < -1e-12) {
    verdict = "PPT all cuts; genuine multipartite entanglement certified";
  } else {
    verdict = "PPT all cuts; not certified";
  }
  out["verdict"] = verdict;
  std::cout << out.dump(2) << '\n';
  return 0;
}

// ---------------------------------------------------------------------------

struct SweepArgs {
  Common common;
  std::string kind;
  std::string out = "-";
  int points = 25;
  int d = 2;
  int max_m = 5;
  double p_min = 0.0, p_max = 1.0;
  int steps = 20;
  double epsilon = 0.0;
};

int cmd_sweep(const SweepArgs& a) {
  const Common& c = a.common;
  SweepOptions opt;
  opt.points = a.points;
  opt.search = c.search();
  SweepTable t;
  if (a.kind == "fig2") {
    t = sweep_fig2(opt);
  } else if (a.kind == "fig3") {
    t = sweep_fig3(opt);
  } else if (a.kind == "realignment_M") {
    t = sweep_realignment_m(a.d, a.max_m, opt, c.max_dim);
  } else {
    if (c.spec_path.empty()) throw ParseError("sweep custom: --spec is required");
    cli::LoadedSpec s = cli::load_spec(c.spec_path);
    for (const auto& w : s.warnings) std::cerr << "warning: " << w << '\n';
    const Bipartition cut = c.cut.empty() ? enumerate_cuts(s.spec.party_count()).front()
                                          : Bipartition::parse(c.cut, s.spec.party_count());
    t = sweep_custom(s.spec, cut, a.p_min, a.p_max, a.steps, a.epsilon, c.max_dim);
  }
  if (a.out == "-") {
    write_csv(std::cout, t);
    return 0;
  }
  std::ofstream f(a.out, std::ios::binary);
  if (!f) throw ResourceError("sweep: cannot write '" + a.out + "'");
  write_csv(f, t);
  f.close();
  if (!f) throw ResourceError("sweep: write to '" + a.out + "' failed");
  json summary{{"version", kVersion}, {"sweep", a.kind}, {"rows", t.rows.size()}, {"columns", t.header}, {"out", a.out}};
  std::cout << summary.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PPT entanglement toolkit for rho_p ensembles"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  Common analyze_args;
  auto* analyze = app.add_subcommand("analyze", "Per-cut PPT, realignment, distillability and witness report");
  add_spec_flags(analyze, analyze_args);

  WitnessArgs witness_args;
  auto* witness = app.add_subcommand("witness", "Fit epsilon for a canonical witness and evaluate it");
  add_spec_flags(witness, witness_args.common);
  witness->add_option("--kind", witness_args.kind, "W_eps, W_tilde or W_gen")
      ->check(CLI::IsMember({"W_eps", "W_tilde", "W_gen"}));
  witness->add_option("--samples", witness_args.common.samples, "Random product vectors for the positivity check")
      ->check(CLI::PositiveNumber);

  MultiArgs multi_args;
  auto* multi = app.add_subcommand("multipartite", "All cuts, eps~ and PPT profile of an N-party ensemble");
  add_spec_flags(multi, multi_args.common);
  multi->add_option("--p-fraction", multi_args.p_fraction, "Use p = fraction * (largest p that is PPT on every cut)")
      ->check(CLI::Range(0.0, 1.0));

  SweepArgs sweep_args;
  sweep_args.common.restarts = 50;
  auto* sweep = app.add_subcommand("sweep", "Tabulate a parameter sweep as CSV");
  sweep->add_option("kind", sweep_args.kind, "fig2, fig3, realignment_M or custom")
      ->required()
      ->check(CLI::IsMember({"fig2", "fig3", "realignment_M", "custom"}));
  sweep->add_option("--out", sweep_args.out, "CSV path, '-' for stdout");
  sweep->add_option("--points", sweep_args.points, "Grid points per axis (fig2, fig3)")->check(CLI::PositiveNumber);
  sweep->add_option("--d", sweep_args.d, "Local dimension (realignment_M)")->check(CLI::Range(2, 16));
  sweep->add_option("--max-m", sweep_args.max_m, "Largest number of factors (realignment_M)")->check(CLI::PositiveNumber);
  sweep->add_option("--spec", sweep_args.common.spec_path, "JSON state spec (custom)");
  sweep->add_option("--cut", sweep_args.common.cut, "Bipartition (custom)");
  sweep->add_option("--p-min", sweep_args.p_min, "Lower end of the p range (custom)");
  sweep->add_option("--p-max", sweep_args.p_max, "Upper end of the p range (custom)");
  sweep->add_option("--steps", sweep_args.steps, "Intervals in the p range (custom)")->check(CLI::PositiveNumber);
  sweep->add_option("--epsilon", sweep_args.epsilon, "Witness epsilon (custom)")->check(CLI::NonNegativeNumber);
  add_search_flags(sweep, sweep_args.common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*analyze) return cmd_analyze(analyze_args);
    if (*witness) return cmd_witness(witness_args);
    if (*multi) return cmd_multipartite(multi_args);
    if (*sweep) return cmd_sweep(sweep_args);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const ShapeError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const DimensionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const ResourceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
  return 4;
}
