#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pptk/multipartite.hpp"

using namespace pptk;

namespace {

SearchConfig quick(int restarts = 30) {
  SearchConfig c;
  c.restarts = restarts;
  return c;
}

// Relabels parties of a state: new party k is old party perm[k].
PureFactorState relabel(const PureFactorState& psi, const std::vector<std::size_t>& perm) {
  std::vector<std::size_t> dims;
  for (auto p : perm) dims.push_back(psi.party_dims()[p]);
  return PureFactorState(dims, permute_systems(psi.amplitudes(), psi.shape(), perm));
}

}  // namespace

TEST(CutReport, GhzWEveryCut) {
  const EnsembleSpec spec{{ghz({2, 2, 2}), w_state(3)}, 0.0};
  for (const auto& cut : enumerate_cuts(3)) {
    const auto r = cut_report(spec, cut, quick());
    EXPECT_GT(r.p_gamma.p_gamma, 0.0);
    EXPECT_TRUE(r.nontrivial);
    EXPECT_EQ(r.epsilon.method, EpsilonMethod::schmidt_relation);
    EXPECT_GT(r.epsilon.value, 1e-6);
    ASSERT_EQ(r.per_factor_schmidt.size(), 2u);
    EXPECT_NEAR(r.per_factor_schmidt[1](0), std::sqrt(2.0 / 3), 1e-12);
    EXPECT_TRUE(r.ppt_at_p);
  }
}

TEST(CutReport, CutSeparableFactor) {
  // Factor 2 is a product across 0|1,2 but entangled across 0,1|2.
  ComplexVector bell = max_entangled(2).amplitudes();
  ComplexVector e0 = ComplexVector::Zero(2);
  e0(0) = 1.0;
  const auto partial = PureFactorState({2, 2, 2}, kron(e0, bell));
  const EnsembleSpec spec{{ghz({2, 2, 2}), partial}, 0.05};
  const auto r = cut_report(spec, Bipartition(3, {0}), quick());
  EXPECT_EQ(r.p_gamma.p_gamma, 0.0);
  EXPECT_NE(r.p_gamma.reason.find("NPT for all p>0"), std::string::npos);
  EXPECT_FALSE(r.ppt_at_p);
  EXPECT_GT(cut_report(spec, Bipartition(3, {0, 1}), quick()).p_gamma.p_gamma, 0.0);
}

TEST(CutReport, ThreeFactorsOneEntangled) {
  const EnsembleSpec spec{{max_entangled(2), random_product({2, 2}, 1), random_product({2, 2}, 2)}, 0.0};
  const auto r = cut_report(spec, Bipartition::bipartite(), quick(20));
  EXPECT_TRUE(r.nontrivial);
  EXPECT_EQ(r.epsilon.method, EpsilonMethod::product_search);
  EXPECT_GT(r.epsilon.value, 1e-6);
  EXPECT_EQ(r.p_gamma.p_gamma, 0.0);
}

TEST(CutReport, EqualSpectraAnalyticZero) {
  const EnsembleSpec spec{{max_entangled(2), max_entangled(2)}, 0.1};
  const auto r = cut_report(spec, Bipartition::bipartite(), quick());
  EXPECT_FALSE(r.nontrivial);
  EXPECT_EQ(r.epsilon.method, EpsilonMethod::analytic_zero);
  EXPECT_EQ(r.epsilon.value, 0.0);
}

TEST(CutReport, GuardsCapAndPartyCount) {
  const EnsembleSpec spec{{ghz({2, 2, 2}), w_state(3)}, 0.0};
  EXPECT_THROW(cut_report(spec, Bipartition::bipartite()), ShapeError);
  EXPECT_THROW(cut_report(spec, Bipartition(3, {0}), quick(), 32), DimensionError);
}

TEST(EpsilonTilde, ProductAndFlagship) {
  const EnsembleSpec prod{{random_product({2, 2, 2}, 1), random_product({2, 2, 2}, 2)}, 0.0};
  EXPECT_EQ(epsilon_tilde(prod, quick()), 0.0);

  const EnsembleSpec spec{{ghz({2, 2, 2}), w_state(3)}, 0.0};
  const auto cuts = enumerate_cuts(3);
  const auto reports = cut_reports(spec, cuts, quick());
  double lo = 1e300, pmin = 1.0;
  for (const auto& r : reports) {
    lo = std::min(lo, r.epsilon.value);
    pmin = std::min(pmin, r.p_gamma.p_gamma);
  }
  const double et = epsilon_tilde(reports);
  EXPECT_EQ(et, lo);
  EXPECT_GT(et, 0.0);

  const double p = 0.9 * pmin;
  const auto rho = build_rho_p(spec.with_p(p));
  for (const auto& cut : cuts) EXPECT_TRUE(is_ppt(rho, cut));
  const auto w = build_W_gen(spec.factors, et);
  EXPECT_NEAR(w.expectation(rho.matrix), -p * et, 1e-12);
  EXPECT_LT(w.expectation(rho.matrix), 0.0);
  EXPECT_THROW(epsilon_tilde(EnsembleSpec{{max_entangled(2)}, 0.0}), PreconditionError);
}

TEST(EpsilonTilde, WitnessPositiveOnSampledBiseparableProducts) {
  const EnsembleSpec spec{{ghz({2, 2, 2}), w_state(3)}, 0.0};
  const double et = epsilon_tilde(spec, quick());
  const auto w = build_W_gen(spec.factors, et);
  for (const auto& cut : enumerate_cuts(3)) {
    const CutView v = cut_major(w.matrix, w.layout, cut);
    EXPECT_GE(sampled_product_minimum(v.matrix, v.dim_a, v.dim_b, 1500, 3), -1e-9) << cut.label();
  }
}

TEST(Multipartite, PGammaInvariantUnderRelabeling) {
  const auto g = random_pure({2, 2, 2}, 31), h = random_pure({2, 2, 2}, 32);
  const std::vector<std::size_t> perm{2, 0, 1};
  // A cut on the relabeled system holding new party k on side A iff old party perm[k] was.
  for (const auto& cut : enumerate_cuts(3)) {
    std::set<std::size_t> side;
    for (std::size_t k = 0; k < 3; ++k)
      if (cut.on_side_a(perm[k])) side.insert(k);
    const Bipartition moved(3, side);
    EXPECT_NEAR(p_gamma_exact({g, h}, cut).p_gamma, p_gamma_exact({relabel(g, perm), relabel(h, perm)}, moved).p_gamma,
                1e-12);
  }
}

TEST(Multipartite, ReportsDeterministicAcrossJobs) {
  const EnsembleSpec spec{{ghz({2, 2, 2}), w_state(3)}, 0.02};
  auto cfg = quick(8);
  const auto a = cut_reports(spec, enumerate_cuts(3), cfg);
  cfg.jobs = 3;
  const auto b = cut_reports(spec, enumerate_cuts(3), cfg);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].cut, b[i].cut);
    EXPECT_EQ(a[i].epsilon.value, b[i].epsilon.value);
    EXPECT_EQ(a[i].p_gamma.p_gamma, b[i].p_gamma.p_gamma);
  }
}

TEST(PptProfile, Design) {
  const std::vector<PureFactorState> f{ghz({2, 2, 2}), w_state(3)};
  const auto all = design_ppt_profile(f, enumerate_cuts(3));
  EXPECT_GT(all.p_max, 0.0);
  EXPECT_TRUE(all.npt_cuts.empty());
  EXPECT_NEAR(all.p_max, *std::min_element(all.per_cut_p_gamma.begin(), all.per_cut_p_gamma.end()), 0);

  ComplexVector e0 = ComplexVector::Zero(2);
  e0(0) = 1.0;
  const auto partial = PureFactorState({2, 2, 2}, kron(e0, max_entangled(2).amplitudes()));
  const auto bad = design_ppt_profile({ghz({2, 2, 2}), partial}, enumerate_cuts(3));
  EXPECT_EQ(bad.p_max, 0.0);
  ASSERT_EQ(bad.npt_cuts.size(), 1u);
  EXPECT_NE(bad.explanation.find("0|1,2"), std::string::npos);
}
