#pragma once

// Partial transposition and realignment criteria for the rho_p family, PPT
// thresholds (closed form, per-factor spectra, dense bisection), distillability
// certificates and the reduction criterion.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "pptk/bipartition.hpp"
#include "pptk/states.hpp"
#include "pptk/tensor.hpp"

namespace pptk {

inline constexpr double kPptTol = 1e-10;

// Exact p_Gamma for maximally entangled families.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool operator==(const Rational&) const = default;
};

inline Rational make_rational(std::int64_t num, std::int64_t den) {
  const std::int64_t g = std::gcd(num, den);
  return Rational{num / g, den / g};
}

enum class ThresholdMethod { closed_form, factor_spectrum, dense_bisection, maxent_rational };

inline const char* to_string(ThresholdMethod m) {
  switch (m) {
    case ThresholdMethod::closed_form: return "closed_form";
    case ThresholdMethod::factor_spectrum: return "factor_spectrum";
    case ThresholdMethod::dense_bisection: return "dense_bisection";
    case ThresholdMethod::maxent_rational: return "maxent_rational";
  }
  return "?";
}

struct PptThreshold {
  double p_gamma = 0.0;
  ThresholdMethod method = ThresholdMethod::factor_spectrum;
  std::optional<std::vector<double>> witnessing_eigentuple;
  std::optional<Rational> exact;
  std::string reason;  // set when p_gamma is fixed by separability rather than by a crossing
};

// ---------------------------------------------------------------------------
// Partial transposition

// rho^Gamma with side A transposed, in the cut-major (d_A, d_B) layout.
inline CutView partial_transpose_cut(const MixedState& rho, const Bipartition& cut) {
  CutView v = rho.view(cut);
  v.matrix = partial_transpose(v.matrix, v.shape(), {0});
  return v;
}

inline SpectrumReport pt_spectrum(const MixedState& rho, const Bipartition& cut, bool want_vectors = false) {
  return hermitian_spectrum(partial_transpose_cut(rho, cut).matrix, want_vectors);
}

inline bool is_ppt(const MixedState& rho, const Bipartition& cut, double tol = kPptTol) {
  if (tol < 0) throw PreconditionError("is_ppt: tolerance must be >= 0");
  return pt_spectrum(rho, cut).min() >= -tol;
}

// Spectrum of P_psi^Gamma across a cut of the factor's own parties.
inline RealVector factor_pt_spectrum(const PureFactorState& psi, const Bipartition& cut) {
  const MixedState pure{psi.projector(), Layout::factor_major({psi.party_dims()})};
  return pt_spectrum(pure, cut).eigenvalues;
}

inline bool separable_across(const PureFactorState& psi, const Bipartition& cut) {
  return schmidt(psi, cut).rank <= 1;
}

// ---------------------------------------------------------------------------
// PPT thresholds

namespace detail {

inline std::optional<PptThreshold> separability_threshold(const std::vector<PureFactorState>& factors,
                                                          const Bipartition& cut, ThresholdMethod method) {
  std::size_t n_sep = 0;
  for (const auto& f : factors) n_sep += separable_across(f, cut) ? 1 : 0;
  if (n_sep == 0) return std::nullopt;
  PptThreshold t;
  t.method = method;
  if (n_sep == factors.size()) {
    t.p_gamma = 1.0;
    t.reason = "all factors separable across the cut: PPT (indeed separable) for all p";
  } else {
    t.p_gamma = 0.0;
    t.reason = "a factor is separable across the cut: NPT for all p>0";
  }
  return t;
}

}  // namespace detail

// p/((1-p) N1 N2) <= min{ (1-mu1^2)(1+nu1 nu2)/(mu1^2 nu1 nu2), (1-nu1^2)(1+mu1 mu2)/(nu1^2 mu1 mu2) }
// using only the two largest Schmidt coefficients of each bipartite factor.
inline PptThreshold p_gamma_closed(const PureFactorState& psi1, const PureFactorState& psi2) {
  if (psi1.party_count() != 2 || psi2.party_count() != 2)
    throw PreconditionError("p_gamma_closed: factors must be bipartite");
  const auto cut = Bipartition::bipartite();
  if (auto t = detail::separability_threshold({psi1, psi2}, cut, ThresholdMethod::closed_form)) return *t;

  const auto s1 = schmidt(psi1), s2 = schmidt(psi2);
  const double m1 = s1.coefficients(0), m2 = s1.coefficients(1);
  const double n1 = s2.coefficients(0), n2 = s2.coefficients(1);
  const double first = (1 - m1 * m1) * (1 + n1 * n2) / (m1 * m1 * n1 * n2);
  const double second = (1 - n1 * n1) * (1 + m1 * m2) / (n1 * n1 * m1 * m2);
  const double bound = std::min(first, second);
  const double nn = 1.0 / ((static_cast<double>(psi1.dimension()) - 1.0) *
                           (static_cast<double>(psi2.dimension()) - 1.0));
  PptThreshold t;
  t.method = ThresholdMethod::closed_form;
  t.p_gamma = bound * nn / (1.0 + bound * nn);
  if (first <= second)
    t.witnessing_eigentuple = std::vector<double>{m1 * m1, -n1 * n2};
  else
    t.witnessing_eigentuple = std::vector<double>{-m1 * m2, n1 * n1};
  return t;
}

// Each joint eigenvalue of rho_p^Gamma is (1-p) prod N_i (1 - l_i) + p prod l_i over tuples of
// per-factor PT eigenvalues l_i; p_Gamma is the smallest crossing a/(a-b) over tuples with b < 0.
inline PptThreshold p_gamma_exact(const std::vector<PureFactorState>& factors, const Bipartition& cut,
                                  std::size_t max_dim = kDefaultMaxDim) {
  if (factors.empty()) throw PreconditionError("p_gamma_exact: no factors");
  std::size_t tuples = 1;
  for (const auto& f : factors) tuples *= f.dimension();
  check_dimension_cap(tuples, max_dim);
  if (auto t = detail::separability_threshold(factors, cut, ThresholdMethod::factor_spectrum)) return *t;

  std::vector<RealVector> spectra;
  std::vector<double> norms;
  for (const auto& f : factors) {
    spectra.push_back(factor_pt_spectrum(f, cut));
    norms.push_back(1.0 / (static_cast<double>(f.dimension()) - 1.0));
  }
  const std::size_t M = factors.size();
  std::vector<std::size_t> idx(M, 0);
  PptThreshold best;
  best.method = ThresholdMethod::factor_spectrum;
  best.p_gamma = 1.0;
  for (std::size_t t = 0; t < tuples; ++t) {
    double a = 1.0, b = 1.0;
    for (std::size_t i = 0; i < M; ++i) {
      const double l = spectra[i](static_cast<Eigen::Index>(idx[i]));
      a *= norms[i] * (1.0 - l);
      b *= l;
    }
    if (b < -1e-14) {
      const double p = a / (a - b);
      if (p < best.p_gamma) {
        best.p_gamma = p;
        std::vector<double> tuple(M);
        for (std::size_t i = 0; i < M; ++i) tuple[i] = spectra[i](static_cast<Eigen::Index>(idx[i]));
        best.witnessing_eigentuple = tuple;
      }
    }
    for (std::size_t i = M; i-- > 0;) {
      if (++idx[i] < factors[i].dimension()) break;
      idx[i] = 0;
    }
  }
  return best;
}

inline PptThreshold p_gamma_exact(const EnsembleSpec& spec, const Bipartition& cut,
                                  std::size_t max_dim = kDefaultMaxDim) {
  return p_gamma_exact(spec.factors, cut, max_dim);
}

// Minimum eigenvalue of rho_p^Gamma from per-factor PT spectra.
inline double min_pt_eigenvalue_factored(const EnsembleSpec& spec, const Bipartition& cut) {
  std::vector<RealVector> spectra;
  std::vector<double> norms;
  std::size_t tuples = 1;
  for (const auto& f : spec.factors) {
    spectra.push_back(factor_pt_spectrum(f, cut));
    norms.push_back(1.0 / (static_cast<double>(f.dimension()) - 1.0));
    tuples *= f.dimension();
  }
  const std::size_t M = spec.factors.size();
  std::vector<std::size_t> idx(M, 0);
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < tuples; ++t) {
    double a = 1.0, b = 1.0;
    for (std::size_t i = 0; i < M; ++i) {
      const double l = spectra[i](static_cast<Eigen::Index>(idx[i]));
      a *= norms[i] * (1.0 - l);
      b *= l;
    }
    lo = std::min(lo, (1.0 - spec.p) * a + spec.p * b);
    for (std::size_t i = M; i-- > 0;) {
      if (++idx[i] < spec.factors[i].dimension()) break;
      idx[i] = 0;
    }
  }
  return lo;
}

// Largest p with lambda_min((1-p) A + p B) >= 0 where A, B are the partial transposes of the
// separable and entangled parts. lambda_min is concave in p, so the PPT set is an interval [0, p_Gamma].
inline PptThreshold p_gamma_bisect(const EnsembleSpec& spec, const Bipartition& cut, int steps = 60,
                                   std::size_t max_dim = kDefaultMaxDim) {
  const MixedState sep = build_rho_p(spec.with_p(0.0), max_dim);
  const MixedState ent = build_rho_p(spec.with_p(1.0), max_dim);
  const ComplexMatrix A = partial_transpose_cut(sep, cut).matrix;
  const ComplexMatrix B = partial_transpose_cut(ent, cut).matrix;
  auto lmin = [&](double p) { return min_eigenvalue((1.0 - p) * A + p * B); };

  PptThreshold t;
  t.method = ThresholdMethod::dense_bisection;
  if (lmin(1.0) >= 0.0) {
    t.p_gamma = 1.0;
    return t;
  }
  if (lmin(0.0) < -kPptTol) {
    t.p_gamma = 0.0;
    t.reason = "NPT already at p=0";
    return t;
  }
  double lo = 0.0, hi = 1.0;
  for (int s = 0; s < steps && hi - lo > 1e-15; ++s) {
    const double mid = 0.5 * (lo + hi);
    (lmin(mid) >= 0.0 ? lo : hi) = mid;
  }
  t.p_gamma = lo;
  return t;
}

// p_Gamma = 1/(1 + (d_M - 1) prod_{i<M} (d_i + 1)) for maximally entangled factors with sorted dims.
inline Rational p_gamma_maxent(std::vector<std::size_t> dims) {
  if (dims.empty()) throw PreconditionError("p_gamma_maxent: no dimensions");
  for (auto d : dims)
    if (d < 2) throw PreconditionError("p_gamma_maxent: dimensions must be >= 2");
  std::sort(dims.begin(), dims.end());
  std::int64_t prod = 1;
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) prod *= static_cast<std::int64_t>(dims[i] + 1);
  return make_rational(1, 1 + static_cast<std::int64_t>(dims.back() - 1) * prod);
}

// ---------------------------------------------------------------------------
// Realignment

inline double realignment_norm(const MixedState& rho, const Bipartition& cut) {
  const CutView v = rho.view(cut);
  return trace_norm(realign(v.matrix, v.shape()));
}

namespace detail {

inline double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace detail

// ||R(rho_p(d;M))||_1 = d^-M sum_j C(M,j) |1 - p + p (1-d^2)^j|.
inline double realignment_norm_closed(int d, int M, double p) {
  if (d < 2 || M < 1 || !(p >= 0.0 && p <= 1.0))
    throw PreconditionError("realignment_norm_closed: need d>=2, M>=1, p in [0,1]");
  double s = 0.0;
  for (int j = 0; j <= M; ++j)
    s += detail::binomial(M, j) * std::abs(1.0 - p + p * std::pow(1.0 - d * d, j));
  return s / std::pow(static_cast<double>(d), M);
}

// The variant with the opposite sign inside the absolute value, |1 - p - p (1-d^2)^j|.
// It does not match the direct reshuffle computation; kept for comparison only.
inline double realignment_norm_printed(int d, int M, double p) {
  if (d < 2 || M < 1 || !(p >= 0.0 && p <= 1.0))
    throw PreconditionError("realignment_norm_printed: need d>=2, M>=1, p in [0,1]");
  double s = 0.0;
  for (int j = 0; j <= M; ++j)
    s += detail::binomial(M, j) * std::abs(1.0 - p - p * std::pow(1.0 - d * d, j));
  return s / std::pow(static_cast<double>(d), M);
}

// Realignment detects rho_p(Psi+_d1, Psi+_d2) iff p exceeds (d1 d2 - 2)/(d1^2 (d2^2 - 2)), d1 <= d2.
inline double realignment_threshold_maxent(int d1, int d2) {
  if (d1 < 2 || d2 < d1) throw PreconditionError("realignment_threshold_maxent: need 2 <= d1 <= d2");
  return static_cast<double>(d1 * d2 - 2) / (static_cast<double>(d1 * d1) * (d2 * d2 - 2));
}

// ---------------------------------------------------------------------------
// Distillability

struct DistillabilityCertificate {
  ComplexVector vector;  // cut-major (d_A, d_B) layout, unit norm
  double value = 0.0;    // <phi| rho^Gamma |phi> < 0
  std::size_t schmidt_rank_across_cut = 0;
  bool refined = false;  // true when the raw eigenvector had rank > 2 and was replaced
};

namespace detail {

inline ComplexMatrix reshape(const ComplexVector& v, Eigen::Index da, Eigen::Index db) {
  ComplexMatrix c(da, db);
  for (Eigen::Index a = 0; a < da; ++a)
    for (Eigen::Index b = 0; b < db; ++b) c(a, b) = v(a * db + b);
  return c;
}

inline std::size_t vector_schmidt_rank(const ComplexVector& v, Eigen::Index da, Eigen::Index db,
                                       double cutoff = kSchmidtCutoff) {
  const RealVector s = singular_values(reshape(v, da, db));
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) r += s(i) > cutoff * std::max(1.0, s(0)) ? 1 : 0;
  return r;
}

inline ComplexMatrix orthonormal_columns(ComplexMatrix m, std::mt19937_64& rng) {
  for (Eigen::Index k = 0; k < m.cols(); ++k) {
    for (int attempt = 0; attempt < 8; ++attempt) {
      for (Eigen::Index j = 0; j < k; ++j) m.col(k) -= m.col(j).dot(m.col(k)) * m.col(j);
      const double n = m.col(k).norm();
      if (n > 1e-8) {
        m.col(k) /= n;
        break;
      }
      m.col(k) = gaussian_vector(static_cast<std::size_t>(m.rows()), rng);
    }
  }
  return m;
}

// Alternating minimization of <phi|H|phi> over unit phi = a_1 ⊗ b_1 + a_2 ⊗ b_2.
inline std::pair<ComplexVector, double> rank2_minimize(const ComplexMatrix& H, Eigen::Index da, Eigen::Index db,
                                                       ComplexMatrix left, std::mt19937_64& rng, int iters = 200) {
  const Eigen::Index k = std::min<Eigen::Index>({2, da, db});
  left = orthonormal_columns(left.leftCols(k), rng);
  ComplexVector best;
  double best_val = std::numeric_limits<double>::infinity();
  for (int it = 0; it < iters; ++it) {
    // Fix span{a}: phi = (A ⊗ 1) c, c in C^{k d_B}.
    ComplexMatrix lift = ComplexMatrix::Zero(da * db, k * db);
    for (Eigen::Index j = 0; j < k; ++j)
      for (Eigen::Index a = 0; a < da; ++a)
        for (Eigen::Index b = 0; b < db; ++b) lift(a * db + b, j * db + b) = left(a, j);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(lift.adjoint() * H * lift));
    const ComplexVector phi = lift * es.eigenvectors().col(0);
    const double val = es.eigenvalues()(0);

    // Fix span{b} from the new phi and re-solve for the A side.
    Eigen::JacobiSVD<ComplexMatrix> svd(reshape(phi, da, db), Eigen::ComputeFullU | Eigen::ComputeFullV);
    ComplexMatrix right = orthonormal_columns(ComplexMatrix(svd.matrixV().conjugate().leftCols(k)), rng);
    ComplexMatrix lift_b = ComplexMatrix::Zero(da * db, da * k);
    for (Eigen::Index a = 0; a < da; ++a)
      for (Eigen::Index j = 0; j < k; ++j)
        for (Eigen::Index b = 0; b < db; ++b) lift_b(a * db + b, a * k + j) = right(b, j);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es_b(hermitian_part(lift_b.adjoint() * H * lift_b));
    const ComplexVector phi_b = lift_b * es_b.eigenvectors().col(0);
    const double val_b = es_b.eigenvalues()(0);

    const double v = std::min(val, val_b);
    const bool improved = v < best_val - 1e-14;
    if (v < best_val) {
      best_val = v;
      best = val_b <= val ? phi_b : phi;
    }
    Eigen::JacobiSVD<ComplexMatrix> svd2(reshape(phi_b, da, db), Eigen::ComputeFullU);
    left = orthonormal_columns(ComplexMatrix(svd2.matrixU().leftCols(k)), rng);
    if (!improved && it > 2) break;
  }
  return {best / best.norm(), best_val};
}

}  // namespace detail

// Single-copy distillability witness: a Schmidt-rank <= 2 vector with negative PT expectation.
inline std::optional<DistillabilityCertificate> distillability_certificate(const MixedState& rho,
                                                                           const Bipartition& cut,
                                                                           double tol = kPptTol) {
  const CutView pt = partial_transpose_cut(rho, cut);
  const SpectrumReport spec = hermitian_spectrum(pt.matrix, true);
  if (spec.min() >= -tol) return std::nullopt;

  const auto da = static_cast<Eigen::Index>(pt.dim_a), db = static_cast<Eigen::Index>(pt.dim_b);
  const ComplexVector v = spec.eigenvectors->col(0);
  const std::size_t rank = detail::vector_schmidt_rank(v, da, db);
  if (rank <= 2) return DistillabilityCertificate{v, spec.min(), rank, false};

  // Degenerate minimal eigenspace mixed several low-rank eigenvectors; search rank-2 vectors.
  std::mt19937_64 rng(0x5eed);
  Eigen::JacobiSVD<ComplexMatrix> svd(detail::reshape(v, da, db), Eigen::ComputeFullU);
  std::optional<DistillabilityCertificate> best;
  for (int start = 0; start < 16; ++start) {
    ComplexMatrix left = start == 0 ? ComplexMatrix(svd.matrixU().leftCols(2)) : ComplexMatrix::Zero(da, 2);
    if (start > 0) {
      // The lowest-eigenvalue eigenvectors' dominant left vectors, then random spans.
      const Eigen::Index e = std::min<Eigen::Index>(start - 1, spec.eigenvalues.size() - 1);
      Eigen::JacobiSVD<ComplexMatrix> s2(detail::reshape(spec.eigenvectors->col(e), da, db),
                                         Eigen::ComputeFullU);
      left = s2.matrixU().leftCols(2);
      if (start > 8)
        for (Eigen::Index j = 0; j < 2; ++j) left.col(j) = gaussian_vector(static_cast<std::size_t>(da), rng);
    }
    auto [phi, val] = detail::rank2_minimize(pt.matrix, da, db, left, rng);
    const double exact = (phi.adjoint() * pt.matrix * phi)(0, 0).real();
    if (exact < -tol && (!best || exact < best->value)) {
      best = DistillabilityCertificate{phi, exact, detail::vector_schmidt_rank(phi, da, db), true};
    }
    if (best && best->value <= spec.min() + 1e-9) break;
  }
  return best;
}

// ---------------------------------------------------------------------------
// Reduction criterion: rho_A ⊗ 1 - rho >= 0.

inline double reduction_min_eigenvalue(const MixedState& rho, const Bipartition& cut) {
  const CutView v = rho.view(cut);
  const ComplexMatrix rho_a = partial_trace(v.matrix, v.shape(), {0});
  return min_eigenvalue(kron(rho_a, identity(v.dim_b)) - v.matrix);
}

inline bool reduction_check(const MixedState& rho, const Bipartition& cut, double tol = kPptTol) {
  return reduction_min_eigenvalue(rho, cut) >= -tol;
}

}  // namespace pptk
