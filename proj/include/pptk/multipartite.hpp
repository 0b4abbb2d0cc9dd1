#pragma once

// Per-cut analysis of N-party ensembles: Schmidt data, PPT threshold and the
// canonical witness parameter for every bipartition, the genuine-multipartite
// parameter eps~ = min over cuts, and PPT profile design.

#include <algorithm>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "pptk/bipartition.hpp"
#include "pptk/criteria.hpp"
#include "pptk/product_search.hpp"
#include "pptk/states.hpp"
#include "pptk/witnesses.hpp"

namespace pptk {

enum class EpsilonMethod { analytic_zero, schmidt_relation, product_search };

inline const char* to_string(EpsilonMethod m) {
  switch (m) {
    case EpsilonMethod::analytic_zero: return "analytic_zero";
    case EpsilonMethod::schmidt_relation: return "schmidt_relation";
    case EpsilonMethod::product_search: return "product_search";
  }
  return "?";
}

struct CutEpsilon {
  double value = 0.0;  // upper bound on the largest admissible epsilon (0 for analytic_zero)
  EpsilonMethod method = EpsilonMethod::analytic_zero;
  int restarts_used = 0;
  bool converged = true;
  std::string note;
};

struct CutReport {
  Bipartition cut;
  std::vector<RealVector> per_factor_schmidt;
  PptThreshold p_gamma;
  CutEpsilon epsilon;
  bool nontrivial = false;  // the canonical witness admits epsilon > 0 on this cut
  bool ppt_at_p = false;
  double min_pt_eigenvalue = 0.0;
};

// psi as a two-party state (d_A, d_B) across the cut.
inline PureFactorState as_bipartite(const PureFactorState& psi, const Bipartition& cut) {
  const ComplexMatrix c = cut_amplitude_matrix(psi, cut);
  ComplexVector v(c.size());
  for (Eigen::Index a = 0; a < c.rows(); ++a)
    for (Eigen::Index b = 0; b < c.cols(); ++b) v(a * c.cols() + b) = c(a, b);
  return PureFactorState::normalized({static_cast<std::size_t>(c.rows()), static_cast<std::size_t>(c.cols())}, v);
}

// Largest-epsilon search for W_gen({psi_i}) restricted to product vectors across `cut`.
inline ProductSearchResult w_gen_product_search(const std::vector<PureFactorState>& factors, const Bipartition& cut,
                                                const SearchConfig& cfg, std::size_t max_dim = kDefaultMaxDim) {
  const Witness w0 = build_W_gen(factors, 0.0, max_dim);
  const CutView n = cut_major(w0.matrix, w0.layout, cut);
  ComplexVector psi = ComplexVector::Ones(1);
  for (const auto& f : factors) psi = kron(psi, f.amplitudes());
  const ComplexVector psi_cut = cut_major(psi, w0.layout, cut);
  return minimize_product_ratio(n.matrix, psi_cut, n.dim_a, n.dim_b, cfg);
}

inline CutReport cut_report(const EnsembleSpec& spec, const Bipartition& cut, const SearchConfig& cfg = {},
                            std::size_t max_dim = kDefaultMaxDim) {
  spec.validate();
  if (cut.party_count() != spec.party_count()) throw ShapeError("cut_report: cut party count differs from spec");
  check_dimension_cap(spec.total_dimension(), max_dim);

  CutReport r{cut, {}, {}, {}, false, false, 0.0};
  std::vector<SchmidtDecomposition> sd;
  std::size_t n_entangled = 0;
  for (const auto& f : spec.factors) {
    sd.push_back(schmidt(f, cut));
    r.per_factor_schmidt.push_back(sd.back().coefficients);
    n_entangled += sd.back().rank > 1 ? 1 : 0;
  }
  r.p_gamma = p_gamma_exact(spec.factors, cut, max_dim);
  r.min_pt_eigenvalue = min_pt_eigenvalue_factored(spec, cut);
  r.ppt_at_p = r.min_pt_eigenvalue >= -kPptTol;

  const std::size_t M = spec.factors.size();
  if (M == 1) {
    r.epsilon.note = "single factor: no canonical witness";
  } else if (M == 2) {
    r.nontrivial = nontrivial_predicate(sd[0], sd[1]);
    if (!r.nontrivial) {
      r.epsilon.note = "equal Schmidt coefficients across the cut: epsilon = 0 (alpha = beta = 1 certificate)";
    } else {
      const auto est = epsilon_estimate(as_bipartite(spec.factors[0], cut), as_bipartite(spec.factors[1], cut),
                                        WitnessKind::W_eps, cfg);
      r.epsilon = CutEpsilon{est.upper_bound, EpsilonMethod::schmidt_relation, est.restarts_used, est.converged,
                             "upper bound from product-state search"};
    }
  } else {
    r.nontrivial = n_entangled > 0;
    if (!r.nontrivial) {
      r.epsilon.note = "every factor separable across the cut: state separable there, epsilon = 0";
    } else {
      const auto res = w_gen_product_search(spec.factors, cut, cfg, max_dim);
      r.epsilon = CutEpsilon{std::max(0.0, res.value), EpsilonMethod::product_search, res.restarts_used,
                             res.converged, "upper bound from product-state search on W_gen"};
    }
  }
  return r;
}

inline std::vector<CutReport> cut_reports(const EnsembleSpec& spec, const std::vector<Bipartition>& cuts,
                                          const SearchConfig& cfg = {}, std::size_t max_dim = kDefaultMaxDim) {
  SearchConfig inner = cfg;
  inner.jobs = 1;
  return detail::run_indexed<CutReport>(static_cast<int>(cuts.size()), cfg.jobs, [&](int k) {
    return cut_report(spec, cuts[static_cast<std::size_t>(k)], inner, max_dim);
  });
}

inline double epsilon_tilde(const std::vector<CutReport>& reports) {
  double e = std::numeric_limits<double>::infinity();
  for (const auto& r : reports) e = std::min(e, r.epsilon.value);
  return reports.empty() ? 0.0 : e;
}

// min over all cuts of the per-cut epsilon of W_gen({psi_i}).
inline double epsilon_tilde(const EnsembleSpec& spec, const SearchConfig& cfg = {},
                            std::size_t max_dim = kDefaultMaxDim) {
  if (spec.party_count() < 3) throw PreconditionError("epsilon_tilde: need N >= 3 parties");
  return epsilon_tilde(cut_reports(spec, enumerate_cuts(spec.party_count()), cfg, max_dim));
}

struct PptProfile {
  double p_max = 0.0;
  std::vector<Bipartition> npt_cuts;  // NPT for every p > 0
  std::vector<double> per_cut_p_gamma;
  std::string explanation;
};

// Largest p that is PPT on every requested cut.
inline PptProfile design_ppt_profile(const std::vector<PureFactorState>& factors,
                                     const std::vector<Bipartition>& requested,
                                     std::size_t max_dim = kDefaultMaxDim) {
  PptProfile prof;
  prof.p_max = 1.0;
  for (const auto& cut : requested) {
    const auto t = p_gamma_exact(factors, cut, max_dim);
    prof.per_cut_p_gamma.push_back(t.p_gamma);
    prof.p_max = std::min(prof.p_max, t.p_gamma);
    if (t.p_gamma == 0.0) prof.npt_cuts.push_back(cut);
  }
  if (requested.empty()) prof.explanation = "no cuts requested";
  else if (!prof.npt_cuts.empty()) {
    prof.explanation = "a factor is separable across";
    for (const auto& c : prof.npt_cuts) prof.explanation += " " + c.label();
    prof.explanation += ": NPT there for all p>0, p_max = 0";
  } else {
    prof.explanation = "PPT on every requested cut for p <= p_max";
  }
  return prof;
}

}  // namespace pptk
