#pragma once

// Parameter sweeps over the two-qubit and maximally entangled families, tabulated for CSV output.

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "pptk/criteria.hpp"
#include "pptk/product_search.hpp"
#include "pptk/witnesses.hpp"

namespace pptk {

struct SweepTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

inline std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline void write_csv(std::ostream& os, const SweepTable& t) {
  for (std::size_t i = 0; i < t.header.size(); ++i) os << (i ? "," : "") << t.header[i];
  os << '\n';
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << format_number(r[i]);
    os << '\n';
  }
}

// Safety margin applied to a searched epsilon before it is used for detection.
inline constexpr double kEpsilonSafety = 0.9;

struct SweepOptions {
  int points = 25;  // grid points per axis
  SearchConfig search;
};

// Two-qubit state with largest Schmidt coefficient mu1.
inline PureFactorState qubit_schmidt(double mu1) {
  return schmidt_state({mu1, std::sqrt(std::max(0.0, 1.0 - mu1 * mu1))});
}

// n points from 1/sqrt(2) (inclusive) towards 1 (exclusive).
inline std::vector<double> mu_grid(int n) {
  if (n < 1) throw PreconditionError("sweep: need at least one grid point");
  const double lo = 1.0 / std::sqrt(2.0);
  std::vector<double> g;
  for (int k = 0; k < n; ++k) g.push_back(lo + (1.0 - lo) * k / n);
  return g;
}

namespace detail {

// Evaluates rho_{p}(f1, f2) at p and the canonical witness with a searched epsilon.
inline std::vector<double> pair_row(const PureFactorState& f1, const PureFactorState& f2, double p,
                                    const SearchConfig& cfg) {
  const auto cut = Bipartition::bipartite();
  const MixedState rho = build_rho_p(EnsembleSpec{{f1, f2}, p});
  double eps = 0.0;
  if (nontrivial_predicate(f1, f2)) eps = kEpsilonSafety * epsilon_estimate(f1, f2, WitnessKind::W_eps, cfg).upper_bound;
  const Witness w = build_W_eps(f1, f2, eps);
  return {realignment_norm(rho, cut), pt_spectrum(rho, cut).min(), eps, w.expectation(rho.matrix)};
}

}  // namespace detail

// p_Gamma over (mu1 of psi1, mu1 of psi2), everything else evaluated at p = p_Gamma.
inline SweepTable sweep_fig2(const SweepOptions& opt) {
  const auto g = mu_grid(opt.points);
  const int n = static_cast<int>(g.size());
  SearchConfig inner = opt.search;
  inner.jobs = 1;
  auto rows = detail::run_indexed<std::vector<double>>(n * n, opt.search.jobs, [&](int k) {
    const double a = g[static_cast<std::size_t>(k / n)], b = g[static_cast<std::size_t>(k % n)];
    const auto f1 = qubit_schmidt(a), f2 = qubit_schmidt(b);
    const double pg = p_gamma_closed(f1, f2).p_gamma;
    std::vector<double> row{a, b, pg};
    for (double v : detail::pair_row(f1, f2, pg, inner)) row.push_back(v);
    return row;
  });
  return {{"mu1_psi1", "mu1_psi2", "p_gamma", "realignment_norm", "min_pt_eigenvalue", "epsilon",
           "witness_expectation"},
          std::move(rows)};
}

// psi1 = psi2 = psi(mu1), evaluated at p = p_Gamma.
inline SweepTable sweep_fig3(const SweepOptions& opt) {
  const auto g = mu_grid(opt.points);
  SearchConfig inner = opt.search;
  inner.jobs = 1;
  auto rows = detail::run_indexed<std::vector<double>>(static_cast<int>(g.size()), opt.search.jobs, [&](int k) {
    const double m = g[static_cast<std::size_t>(k)];
    const auto f = qubit_schmidt(m);
    const double pg = p_gamma_closed(f, f).p_gamma;
    std::vector<double> row{m, pg};
    for (double v : detail::pair_row(f, f, pg, inner)) row.push_back(v);
    return row;
  });
  return {{"mu1", "p_gamma", "realignment_norm", "min_pt_eigenvalue", "epsilon", "witness_expectation"},
          std::move(rows)};
}

// rho_{p_Gamma}(d; M) for M = 1..max_m: direct reshuffle norm next to both closed forms.
// The witness column uses W_gen with the epsilon admissible for the grouping
// {psi_1} | {psi_2 ... psi_M}, which is a lower bound for W_gen's own epsilon.
inline SweepTable sweep_realignment_m(int d, int max_m, const SweepOptions& opt, std::size_t max_dim = kDefaultMaxDim) {
  if (d < 2 || max_m < 1) throw PreconditionError("realignment_M sweep: need d >= 2 and M >= 1");
  SweepTable t{{"M", "p_gamma", "realignment_norm", "realignment_closed", "realignment_printed", "min_pt_eigenvalue",
                "epsilon", "witness_expectation"},
               {}};
  const auto cut = Bipartition::bipartite();
  for (int M = 1; M <= max_m; ++M) {
    const std::vector<PureFactorState> f(static_cast<std::size_t>(M), max_entangled(static_cast<std::size_t>(d)));
    const double pg = p_gamma_maxent(std::vector<std::size_t>(static_cast<std::size_t>(M), static_cast<std::size_t>(d))).value();
    const EnsembleSpec spec{f, pg};
    const MixedState rho = build_rho_p(spec, max_dim);
    double eps = 0.0, expect = 0.0;
    if (M >= 3) {
      const PureFactorState grouped = group_bipartite({f.begin() + 1, f.end()});
      eps = kEpsilonSafety * epsilon_estimate(f[0], grouped, WitnessKind::W_eps, opt.search).upper_bound;
      expect = build_W_gen(f, eps, max_dim).expectation(rho.matrix);
    }
    t.rows.push_back({static_cast<double>(M), pg, realignment_norm(rho, cut), realignment_norm_closed(d, M, pg),
                      realignment_norm_printed(d, M, pg), min_pt_eigenvalue_factored(spec, cut), eps, expect});
  }
  return t;
}

// A fixed ensemble swept over p on one cut.
inline SweepTable sweep_custom(const EnsembleSpec& spec, const Bipartition& cut, double p_lo, double p_hi, int steps,
                               double epsilon, std::size_t max_dim = kDefaultMaxDim) {
  if (steps < 1 || !(p_lo >= 0.0 && p_hi <= 1.0 && p_lo <= p_hi))
    throw PreconditionError("custom sweep: need 0 <= p_min <= p_max <= 1 and steps >= 1");
  const double pg = p_gamma_exact(spec, cut, max_dim).p_gamma;
  const bool has_witness = spec.factors.size() >= 2;
  const Witness w = has_witness ? build_W_gen(spec.factors, epsilon, max_dim) : Witness{};
  SweepTable t{{"p", "p_gamma", "realignment_norm", "min_pt_eigenvalue", "witness_expectation"}, {}};
  for (int k = 0; k <= steps; ++k) {
    const double p = steps == 0 ? p_lo : p_lo + (p_hi - p_lo) * k / steps;
    const EnsembleSpec s = spec.with_p(p);
    const MixedState rho = build_rho_p(s, max_dim);
    t.rows.push_back({p, pg, realignment_norm(rho, cut), min_pt_eigenvalue_factored(s, cut),
                      has_witness ? w.expectation(rho.matrix) : 0.0});
  }
  return t;
}

}  // namespace pptk
