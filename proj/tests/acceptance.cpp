// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "pptk/pptk.hpp"

using namespace pptk;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) { return format_number(v); }

const Bipartition kCut = Bipartition::bipartite();

MixedState pure_state(const PureFactorState& psi) {
  return MixedState::bipartite(psi.projector(), psi.party_dims()[0], psi.party_dims()[1]);
}

std::vector<double> to_std(const RealVector& v) { return {v.data(), v.data() + v.size()}; }

std::vector<std::size_t> random_dims(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  std::uniform_int_distribution<std::size_t> u(lo, hi);
  return {u(rng), u(rng)};
}

Outcome c1_pt_spectrum() {
  std::mt19937_64 rng(1);
  double worst = 0;
  for (int t = 0; t < 100; ++t) {
    const auto dims = random_dims(rng, 2, 4);
    const auto psi = random_pure(dims, 1000 + t);
    const int da = int(dims[0]), db = int(dims[1]);
    const auto mu = oracle::schmidt_coefficients(psi.amplitudes(), da, db);
    worst = std::max(worst, oracle::max_diff(to_std(pt_spectrum(pure_state(psi), kCut).eigenvalues),
                                             oracle::pure_pt_spectrum(mu, da * db)));
  }
  return {worst <= 1e-10, "max multiset deviation " + fmt(worst) + " over 100 states"};
}

Outcome c2_realign_pure() {
  std::mt19937_64 rng(2);
  double worst = 0;
  for (int t = 0; t < 100; ++t) {
    const auto dims = random_dims(rng, 2, 4);
    const auto psi = random_pure(dims, 2000 + t);
    const auto mu = oracle::schmidt_coefficients(psi.amplitudes(), int(dims[0]), int(dims[1]));
    double s = 0;
    for (double m : mu) s += m;
    worst = std::max(worst, std::abs(realignment_norm(pure_state(psi), kCut) - s * s));
  }
  return {worst <= 1e-10, "max |‖R(P)‖₁ - (Σμ)²| = " + fmt(worst)};
}

Outcome c3_closed_vs_exact() {
  std::mt19937_64 rng(3);
  double worst = 0;
  int n = 0;
  for (int t = 0; n < 100; ++t) {
    const auto d1 = random_dims(rng, 2, 3)[0], d2 = random_dims(rng, 2, 3)[0];
    const auto f1 = random_pure({d1, d1}, 3000 + t), f2 = random_pure({d2, d2}, 4000 + t);
    if (separable_across(f1, kCut) || separable_across(f2, kCut)) continue;
    ++n;
    worst = std::max(worst, std::abs(p_gamma_closed(f1, f2).p_gamma - p_gamma_exact({f1, f2}, kCut).p_gamma));
  }
  return {worst <= 1e-9, "max deviation " + fmt(worst) + " over 100 entangled pairs"};
}

Outcome c4_named_thresholds() {
  struct Case {
    std::string name;
    std::vector<std::size_t> dims;
    std::int64_t den;
  };
  const std::vector<Case> cases{{"(Ψ⁺₂,Ψ⁺₂)", {2, 2}, 4},
                                {"(Ψ⁺₂,Ψ⁺₃)", {2, 3}, 7},
                                {"ρ_p(2,2)", {2, 2}, 4},
                                {"ρ_p(3,3)", {3, 3}, 9},
                                {"ρ_p(2;3)", {2, 2, 2}, 10}};
  bool ok = true;
  std::ostringstream os;
  for (const auto& c : cases) {
    const Rational r = p_gamma_maxent(c.dims);
    std::vector<PureFactorState> f;
    for (auto d : c.dims) f.push_back(max_entangled(d));
    const double exact = p_gamma_exact(f, kCut).p_gamma;
    const double bisect = p_gamma_bisect(EnsembleSpec{f, 0.0}, kCut).p_gamma;
    double closed = exact;
    if (f.size() == 2) closed = p_gamma_closed(f[0], f[1]).p_gamma;
    const double want = 1.0 / double(c.den);
    const bool good = r.num == 1 && r.den == c.den && std::abs(exact - want) <= 1e-12 &&
                      std::abs(closed - want) <= 1e-12 && std::abs(bisect - want) <= 1e-9;
    ok = ok && good;
    os << c.name << "=" << r.num << "/" << r.den << (good ? "" : "(!)") << " ";
  }
  return {ok, os.str()};
}

Outcome c5_realignment_closed() {
  double worst = 0;
  for (int d : {2, 3})
    for (int M : {1, 2, 3}) {
      const std::vector<PureFactorState> f(std::size_t(M), max_entangled(std::size_t(d)));
      for (int k = 0; k <= 20; ++k) {
        const double p = k / 20.0;
        worst = std::max(worst, std::abs(realignment_norm(build_rho_p(EnsembleSpec{f, p}), kCut) -
                                         realignment_norm_closed(d, M, p)));
      }
    }
  const auto m2 = max_entangled(2);
  const double r3 = realignment_norm(build_rho_p(EnsembleSpec{{m2, m2, m2}, 0.1}), kCut);
  const double r2 = realignment_norm(build_rho_p(EnsembleSpec{{m2, m2}, 0.25}), kCut);
  const double printed = realignment_norm_printed(2, 3, 0.1);
  const bool ok = worst <= 1e-9 && std::abs(r3 - 1.25) <= 1e-9 && std::abs(r2 - 1.0) <= 1e-9 &&
                  std::abs(printed - r3) > 1e-3;
  return {ok, "max grid deviation " + fmt(worst) + "; ‖R(ρ_{1/10}(2;3))‖₁=" + fmt(r3) + ", ‖R(ρ_{1/4}(2;2))‖₁=" +
                  fmt(r2) + "; printed-sign variant gives " + fmt(printed) + " (disagrees)"};
}

Outcome c6_witness_expectation() {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> ue(1e-6, 1.0);
  double worst = 0;
  for (int t = 0; t < 20; ++t) {
    const std::size_t M = 2 + t % 2;
    std::vector<PureFactorState> f;
    for (std::size_t i = 0; i < M; ++i) f.push_back(random_pure(random_dims(rng, 2, 3), 6000 + 10 * t + i));
    const double eps = ue(rng);
    const Witness w = M == 2 ? build_W_eps(f[0], f[1], eps) : build_W_gen(f, eps);
    for (int k = 0; k <= 10; ++k) {
      const double p = k / 10.0;
      worst = std::max(worst, std::abs(w.expectation(build_rho_p(EnsembleSpec{f, p}).matrix) + p * eps));
    }
  }
  return {worst <= 1e-12, "max |tr(Wρ_p)+pε| = " + fmt(worst) + " (M=2,3; 11-point p grid)"};
}

Outcome c7_epsilon_sanity() {
  SearchConfig cfg;
  cfg.restarts = 50;
  double equal_worst = 0;
  for (int t = 0; t < 5; ++t) {
    const auto psi = random_pure({2 + std::size_t(t % 2), 2 + std::size_t(t % 2)}, 7000 + t);
    equal_worst = std::max(equal_worst, epsilon_estimate(psi, psi, WitnessKind::W_eps, cfg).upper_bound);
  }
  equal_worst = std::max(equal_worst, epsilon_estimate(max_entangled(3), max_entangled(3), WitnessKind::W_eps, cfg).upper_bound);
  double distinct_min = 1e300;
  for (int t = 0; t < 20; ++t) {
    const auto f1 = random_pure({2, 2}, 7100 + t), f2 = random_pure({2, 2}, 7200 + t);
    distinct_min = std::min(distinct_min, epsilon_estimate(f1, f2, WitnessKind::W_eps, cfg).upper_bound);
  }
  double tilde_worst = 0;
  for (int t = 0; t < 10; ++t) {
    const std::size_t d1 = 2 + t % 2;
    const auto f1 = random_pure({d1, d1}, 7300 + t), f2 = random_pure({2, 2}, 7400 + t);
    tilde_worst = std::max(tilde_worst, epsilon_estimate(f1, f2, WitnessKind::W_tilde, cfg).upper_bound);
  }
  const bool ok = equal_worst <= 1e-9 && distinct_min > 1e-6 && tilde_worst <= 1e-9;
  return {ok, "equal spectra max " + fmt(equal_worst) + "; 20 distinct qubit pairs min " + fmt(distinct_min) +
                  "; W̃ with rank(ψ₁)≥rank(ψ₂) max " + fmt(tilde_worst)};
}

Outcome c8_ppt_entangled() {
  const auto f1 = max_entangled(2), f2 = max_entangled(3);
  const MixedState rho = build_rho_p(EnsembleSpec{{f1, f2}, 0.1});
  const bool ppt = is_ppt(rho, kCut);
  const bool no_cert = !distillability_certificate(rho, kCut).has_value();
  SearchConfig cfg;
  cfg.restarts = 100;
  const auto est = epsilon_estimate(f1, f2, WitnessKind::W_eps, cfg);
  const double eps = kEpsilonSafety * est.upper_bound;
  const double val = build_W_eps(f1, f2, eps).expectation(rho.matrix);
  const double sampled =
      sampled_product_minimum(cut_major(build_W_eps(f1, f2, eps).matrix, rho.layout, kCut).matrix, 4, 9, 5000, 8);
  return {ppt && no_cert && val < 0 && sampled >= -1e-9,
          std::string("PPT=") + (ppt ? "true" : "false") + ", distillability certificate " +
              (no_cert ? "absent" : "present") + ", ε=" + fmt(eps) + " (0.9×" + fmt(est.upper_bound) +
              "), tr(Wρ)=" + fmt(val) + ", sampled product min " + fmt(sampled)};
}

Outcome c9_npt_distillable() {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int good = 0;
  std::size_t max_rank = 0;
  double worst_val = -1e300;
  for (int t = 0; t < 50; ++t) {
    const std::size_t M = 1 + t % 3;
    std::vector<PureFactorState> f;
    for (std::size_t i = 0; i < M; ++i) f.push_back(random_pure(random_dims(rng, 2, 3), 9000 + 10 * t + i));
    const EnsembleSpec spec{f, 0.0};
    const double pg = p_gamma_exact(spec, kCut).p_gamma;
    const double p = pg + (1.0 - pg) * (0.02 + 0.98 * u(rng));
    const auto cert = distillability_certificate(build_rho_p(spec.with_p(p)), kCut);
    if (cert && cert->value < 0 && cert->schmidt_rank_across_cut <= 2) ++good;
    if (cert) {
      max_rank = std::max(max_rank, cert->schmidt_rank_across_cut);
      worst_val = std::max(worst_val, cert->value);
    }
  }
  return {good == 50, std::to_string(good) + "/50 certificates; max Schmidt rank " + std::to_string(max_rank) +
                          ", largest value " + fmt(worst_val)};
}

Outcome c10_w1_bound() {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int accepted = 0, passed = 0, drawn = 0;
  while (accepted < 1000 && drawn < 200000) {
    ++drawn;
    const auto dims = random_dims(rng, 2, 3);
    const int D = int(dims[0] * dims[1]);
    const double w = u(rng);
    const oracle::Mat r = (1 - w) * oracle::random_density(D, rng, 1 + int(u(rng) * D)) + w * identity(std::size_t(D)) / double(D);
    const auto st = MixedState::bipartite(r, dims[0], dims[1]);
    if (!is_ppt(st, kCut)) continue;
    ++accepted;
    const auto psi = random_pure(dims, 10000 + std::uint64_t(drawn));
    passed += w1_ppt_bound_check(psi, st) ? 1 : 0;
  }
  return {accepted == 1000 && passed == 1000,
          std::to_string(passed) + "/" + std::to_string(accepted) + " PPT samples within μ₁² (" + std::to_string(drawn) +
              " drawn)"};
}

Outcome c11_nondecomposability() {
  const auto phi = max_entangled(2), psi_w = max_entangled(3);
  const auto rep = nondecomposability_certificate(phi, build_W_k(psi_w, 2), 2, psi_w, 1.0 / 7);
  const CutView v = cut_major(rep.tensor_witness.matrix, rep.tensor_witness.layout, kCut);
  const double sampled = sampled_product_minimum(v.matrix, v.dim_a, v.dim_b, 10000, 11);
  const bool ok = rep.state_ppt && std::abs(rep.expectation + 1.0 / 14) <= 1e-12 && sampled >= -1e-12;
  return {ok, "tr(Wρ)=" + fmt(rep.expectation) + " (target -1/14), state PPT, min PT eigenvalue " +
                  fmt(rep.min_pt_eigenvalue) + ", 10⁴ product samples min " + fmt(sampled)};
}

Outcome c12_multipartite() {
  const auto start = std::chrono::steady_clock::now();
  const EnsembleSpec spec{{ghz({2, 2, 2}), w_state(3)}, 0.0};
  const auto cuts = enumerate_cuts(3);
  SearchConfig cfg;
  cfg.restarts = 200;
  const auto reports = cut_reports(spec, cuts, cfg);
  double pmin = 1.0;
  for (const auto& r : reports) pmin = std::min(pmin, r.p_gamma.p_gamma);
  const double et = epsilon_tilde(reports);
  const double p = 0.9 * pmin;
  const MixedState rho = build_rho_p(spec.with_p(p));
  bool all_ppt = true;
  for (const auto& c : cuts) all_ppt = all_ppt && is_ppt(rho, c);
  const double val = build_W_gen(spec.factors, et).expectation(rho.matrix);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {all_ppt && et > 0 && val < 0 && secs <= 300,
          "min-cut p_Γ=" + fmt(pmin) + ", p=" + fmt(p) + ", PPT on all 3 cuts=" + (all_ppt ? "true" : "false") +
              ", ε̃=" + fmt(et) + ", tr(W_ε̃ρ)=" + fmt(val) + ", " + fmt(secs) + " s"};
}

Outcome c13_figures() {
  SweepOptions opt;
  opt.points = 16;
  opt.search.restarts = 20;
  const SweepTable f2 = sweep_fig2(opt);
  const int n = opt.points;
  auto pg = [&](int i, int j) { return f2.rows[std::size_t(i * n + j)][2]; };
  // For each fixed psi1, p_Gamma rises up to the diagonal and falls after it.
  bool unimodal = true;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j + 1 < n; ++j) {
      const double step = pg(i, j + 1) - pg(i, j);
      if (j < i && step < -1e-12) unimodal = false;
      if (j >= i && step > 1e-12) unimodal = false;
    }
  const auto near_one = qubit_schmidt(0.999), max_ent = qubit_schmidt(1 / std::sqrt(2.0));
  const double edge = std::max(p_gamma_closed(near_one, max_ent).p_gamma, p_gamma_closed(max_ent, near_one).p_gamma);
  const bool fig2_ok = unimodal && std::abs(pg(0, 0) - 0.25) < 1e-12 && pg(n - 1, 0) < pg(0, 0) && edge < 1e-3;

  opt.points = 60;
  const SweepTable f3 = sweep_fig3(opt);
  const double first = f3.rows.front()[2];
  int above = 0, below = 0;
  bool above_near_start = false, above_ppt = true;
  for (std::size_t k = 1; k < f3.rows.size(); ++k) {
    const double r = f3.rows[k][2];
    if (r > 1.0 + 1e-12) {
      ++above;
      above_ppt = above_ppt && f3.rows[k][3] >= -1e-10;
      if (k <= 3) above_near_start = true;
    } else if (r < 1.0) {
      ++below;
    }
  }
  const bool fig3_ok = std::abs(first - 1.0) < 1e-9 && above_near_start && above_ppt && below > int(f3.rows.size()) / 2;
  return {fig2_ok && fig3_ok, std::string("fig2 unimodal about the diagonal=") + (unimodal ? "true" : "false") +
                                  ", p_Γ(0.999,1/√2)=" + fmt(edge) + "; fig3 ‖R‖₁ at 1/√2 = " + fmt(first) + ", " +
                                  std::to_string(above) + " points >1 (PPT), " + std::to_string(below) + "/" +
                                  std::to_string(f3.rows.size() - 1) + " points <1"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"pure-state PT spectrum", c1_pt_spectrum},
      {"realignment of pure states", c2_realign_pure},
      {"p_Γ closed form vs factor spectrum", c3_closed_vs_exact},
      {"named thresholds", c4_named_thresholds},
      {"realignment closed form vs reshuffle", c5_realignment_closed},
      {"witness expectation identity", c6_witness_expectation},
      {"ε search sanity", c7_epsilon_sanity},
      {"PPT entangled end-to-end", c8_ppt_entangled},
      {"NPT implies distillable", c9_npt_distillable},
      {"W₁ never detects PPT", c10_w1_bound},
      {"nondecomposability certificate", c11_nondecomposability},
      {"multipartite flagship", c12_multipartite},
      {"figure reproduction", c13_figures},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::printf("[%s] %2zu. %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - std::size_t(failed), criteria.size());
  return failed == 0 ? 0 : 1;
}
