#pragma once

// Canonical witnesses for the rho_p family, the product-state search for their
// largest admissible epsilon, Schmidt-number witnesses W_k, the Choi-Jamiolkowski
// map of a witness, and tensor-product nondecomposability certificates.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "pptk/bipartition.hpp"
#include "pptk/criteria.hpp"
#include "pptk/product_search.hpp"
#include "pptk/states.hpp"
#include "pptk/tensor.hpp"

namespace pptk {

enum class WitnessKind { W_eps, W_tilde, W_gen, W_k, tensor };

inline const char* to_string(WitnessKind k) {
  switch (k) {
    case WitnessKind::W_eps: return "W_eps";
    case WitnessKind::W_tilde: return "W_tilde";
    case WitnessKind::W_gen: return "W_gen";
    case WitnessKind::W_k: return "W_k";
    case WitnessKind::tensor: return "tensor";
  }
  return "?";
}

struct Witness {
  ComplexMatrix matrix;
  Layout layout;
  WitnessKind kind = WitnessKind::W_eps;
  double epsilon = 0.0;

  double expectation(const ComplexMatrix& rho) const { return (matrix * rho).trace().real(); }
};

namespace detail {

inline void require_eps(double eps) {
  if (!(eps >= 0.0) || !std::isfinite(eps)) throw PreconditionError("witness: epsilon must be >= 0");
}

inline void require_same_parties(const PureFactorState& a, const PureFactorState& b) {
  if (a.party_count() != b.party_count()) throw PreconditionError("witness: factors have different party counts");
}

}  // namespace detail

// P1 ⊗ 1 + 1 ⊗ P2 - (2 + eps) P1 ⊗ P2
inline Witness build_W_eps(const PureFactorState& psi1, const PureFactorState& psi2, double eps) {
  detail::require_eps(eps);
  detail::require_same_parties(psi1, psi2);
  const ComplexMatrix P1 = psi1.projector(), P2 = psi2.projector();
  const ComplexMatrix I1 = identity(psi1.dimension()), I2 = identity(psi2.dimension());
  ComplexMatrix w = kron(P1, I2) + kron(I1, P2) - (2.0 + eps) * kron(P1, P2);
  return Witness{std::move(w), Layout::of({psi1, psi2}), WitnessKind::W_eps, eps};
}

// P1 ⊗ (1 - (1 + eps) P2)
inline Witness build_W_tilde(const PureFactorState& psi1, const PureFactorState& psi2, double eps) {
  detail::require_eps(eps);
  detail::require_same_parties(psi1, psi2);
  const ComplexMatrix P2 = psi2.projector();
  ComplexMatrix w = kron(psi1.projector(), ComplexMatrix(identity(psi2.dimension()) - (1.0 + eps) * P2));
  return Witness{std::move(w), Layout::of({psi1, psi2}), WitnessKind::W_tilde, eps};
}

// 1 - ⊗_i (1 - P_i) - (1 + eps) ⊗_i P_i, which equals W_eps for two factors and has
// expectation -p eps on rho_p({psi_i}).
inline Witness build_W_gen(const std::vector<PureFactorState>& factors, double eps,
                           std::size_t max_dim = kDefaultMaxDim) {
  detail::require_eps(eps);
  if (factors.size() < 2) throw PreconditionError("build_W_gen: need at least two factors");
  std::size_t total = 1;
  for (const auto& f : factors) {
    detail::require_same_parties(factors.front(), f);
    total *= f.dimension();
  }
  check_dimension_cap(total, max_dim);
  ComplexMatrix comp = ComplexMatrix::Ones(1, 1), ent = ComplexMatrix::Ones(1, 1);
  for (const auto& f : factors) {
    const ComplexMatrix P = f.projector();
    comp = kron(comp, ComplexMatrix(identity(f.dimension()) - P));
    ent = kron(ent, P);
  }
  ComplexMatrix w = identity(total) - comp - (1.0 + eps) * ent;
  return Witness{std::move(w), Layout::of(factors), WitnessKind::W_gen, eps};
}

// Bipartite states psi_1 ... psi_k combined into a single state on (A_1...A_k, B_1...B_k).
inline PureFactorState group_bipartite(const std::vector<PureFactorState>& fs) {
  if (fs.empty()) throw PreconditionError("group_bipartite: no states");
  ComplexVector v = fs.front().amplitudes();
  std::vector<std::size_t> dims = fs.front().party_dims();
  if (dims.size() != 2) throw PreconditionError("group_bipartite: states must be bipartite");
  for (std::size_t i = 1; i < fs.size(); ++i) {
    const auto& d = fs[i].party_dims();
    if (d.size() != 2) throw PreconditionError("group_bipartite: states must be bipartite");
    const SubsystemShape sh{dims[0], dims[1], d[0], d[1]};
    v = permute_systems(ComplexVector(kron(v, fs[i].amplitudes())), sh, {0, 2, 1, 3});
    dims = {dims[0] * d[0], dims[1] * d[1]};
  }
  return PureFactorState::normalized(dims, v);
}

// ---------------------------------------------------------------------------
// Largest admissible epsilon
//
// With alpha (d_A1 x d_A2) and beta (d_B1 x d_B2) written in the Schmidt bases of psi1, psi2,
//   <alpha ⊗ beta| W_eps |alpha ⊗ beta> = T1 + T2 - (2 + eps) |T3|^2
//   T1 = ||alpha^T mu1 beta||_F^2,  T2 = ||alpha mu2 beta^T||_F^2,  T3 = sum_ij mu1_i mu2_j alpha_ij beta_ij
// and for W_tilde the expectation is T1 - (1 + eps) |T3|^2. The largest epsilon keeping the
// witness positive on product vectors is the infimum of (T1 + T2)/|T3|^2 - 2 (resp. T1/|T3|^2 - 1).

struct RelationTerms {
  double t1 = 0.0, t2 = 0.0;
  complex t3 = 0.0;
};

struct SchmidtPair {
  SchmidtDecomposition s1, s2;

  ComplexMatrix mu1() const { return diag(s1); }
  ComplexMatrix mu2() const { return diag(s2); }
  Eigen::Index a1() const { return static_cast<Eigen::Index>(s1.dim_a()); }
  Eigen::Index b1() const { return static_cast<Eigen::Index>(s1.dim_b()); }
  Eigen::Index a2() const { return static_cast<Eigen::Index>(s2.dim_a()); }
  Eigen::Index b2() const { return static_cast<Eigen::Index>(s2.dim_b()); }

  static ComplexMatrix diag(const SchmidtDecomposition& s) {
    ComplexMatrix m = ComplexMatrix::Zero(static_cast<Eigen::Index>(s.dim_a()), static_cast<Eigen::Index>(s.dim_b()));
    for (std::size_t i = 0; i < s.rank; ++i) {
      const auto I = static_cast<Eigen::Index>(i);
      m(I, I) = s.coefficients(I);
    }
    return m;
  }
};

inline RelationTerms relation_terms(const SchmidtPair& sp, const ComplexMatrix& alpha, const ComplexMatrix& beta) {
  RelationTerms t;
  t.t1 = (alpha.transpose() * sp.mu1() * beta).squaredNorm();
  t.t2 = (alpha * sp.mu2() * beta.transpose()).squaredNorm();
  for (std::size_t i = 0; i < sp.s1.rank; ++i)
    for (std::size_t j = 0; j < sp.s2.rank; ++j) {
      const auto I = static_cast<Eigen::Index>(i), J = static_cast<Eigen::Index>(j);
      t.t3 += sp.s1.coefficients(I) * sp.s2.coefficients(J) * alpha(I, J) * beta(I, J);
    }
  return t;
}

// <alpha ⊗ beta| W |alpha ⊗ beta> through the T1/T2/T3 terms.
inline double main_relation(const SchmidtPair& sp, const ComplexMatrix& alpha, const ComplexMatrix& beta,
                            double eps, WitnessKind kind = WitnessKind::W_eps) {
  const auto t = relation_terms(sp, alpha, beta);
  if (kind == WitnessKind::W_tilde) return t.t1 - (1.0 + eps) * std::norm(t.t3);
  return t.t1 + t.t2 - (2.0 + eps) * std::norm(t.t3);
}

// alpha ⊗ beta as a vector in the factor-major (A1, B1, A2, B2) layout of W_eps.
inline ComplexVector product_vector(const SchmidtPair& sp, const ComplexMatrix& alpha, const ComplexMatrix& beta) {
  ComplexVector va = ComplexVector::Zero(sp.a1() * sp.a2());
  for (Eigen::Index i = 0; i < sp.a1(); ++i)
    for (Eigen::Index j = 0; j < sp.a2(); ++j)
      va += alpha(i, j) * kron(ComplexVector(sp.s1.left_basis.col(i)), ComplexVector(sp.s2.left_basis.col(j)));
  ComplexVector vb = ComplexVector::Zero(sp.b1() * sp.b2());
  for (Eigen::Index i = 0; i < sp.b1(); ++i)
    for (Eigen::Index j = 0; j < sp.b2(); ++j)
      vb += beta(i, j) * kron(ComplexVector(sp.s1.right_basis.col(i)), ComplexVector(sp.s2.right_basis.col(j)));
  const SubsystemShape cut_major{static_cast<std::size_t>(sp.a1()), static_cast<std::size_t>(sp.a2()),
                                 static_cast<std::size_t>(sp.b1()), static_cast<std::size_t>(sp.b2())};
  return permute_systems(kron(va, vb), cut_major, {0, 2, 1, 3});
}

struct EpsilonEstimate {
  double upper_bound = 0.0;  // max(0, best objective)
  double best_objective = std::numeric_limits<double>::infinity();
  ComplexMatrix alpha, beta;  // certificate, Schmidt bases, unit Frobenius norm
  int restarts_used = 0;
  bool converged = false;
  bool degenerate = false;  // both factors product: nothing to search
  bool analytic = false;    // certificate came from an analytic seed
  WitnessKind kind = WitnessKind::W_eps;
};

namespace detail {

inline double relation_objective(const SchmidtPair& sp, const ComplexMatrix& alpha, const ComplexMatrix& beta,
                                 WitnessKind kind) {
  const auto t = relation_terms(sp, alpha, beta);
  const double den = std::norm(t.t3);
  if (den < 1e-12 * alpha.squaredNorm() * beta.squaredNorm()) return std::numeric_limits<double>::infinity();
  if (kind == WitnessKind::W_tilde) return t.t1 / den - 1.0;
  return (t.t1 + t.t2) / den - 2.0;
}

// Closed-form minimization over beta for fixed alpha.
inline ComplexMatrix relation_step_beta(const SchmidtPair& sp, const ComplexMatrix& alpha, WitnessKind kind) {
  const Eigen::Index b1 = sp.b1(), b2 = sp.b2(), a1 = sp.a1(), a2 = sp.a2();
  const Eigen::Index n = b1 * b2;  // vec(beta)(c, e) = c * b2 + e
  const ComplexMatrix G = alpha.transpose() * sp.mu1();  // a2 x b1
  ComplexMatrix L1 = ComplexMatrix::Zero(a2 * b2, n);
  for (Eigen::Index b = 0; b < a2; ++b)
    for (Eigen::Index e = 0; e < b2; ++e)
      for (Eigen::Index c = 0; c < b1; ++c) L1(b * b2 + e, c * b2 + e) = G(b, c);
  ComplexMatrix A = L1.adjoint() * L1;
  if (kind != WitnessKind::W_tilde) {
    const ComplexMatrix H = alpha * sp.mu2();  // a1 x b2
    ComplexMatrix L2 = ComplexMatrix::Zero(a1 * b1, n);
    for (Eigen::Index a = 0; a < a1; ++a)
      for (Eigen::Index c = 0; c < b1; ++c)
        for (Eigen::Index e = 0; e < b2; ++e) L2(a * b1 + c, c * b2 + e) = H(a, e);
    A += L2.adjoint() * L2;
  }
  ComplexVector t = ComplexVector::Zero(n);
  for (std::size_t i = 0; i < sp.s1.rank; ++i)
    for (std::size_t j = 0; j < sp.s2.rank; ++j) {
      const auto I = static_cast<Eigen::Index>(i), J = static_cast<Eigen::Index>(j);
      t(I * b2 + J) = sp.s1.coefficients(I) * sp.s2.coefficients(J) * alpha(I, J);
    }
  const ComplexVector x = psd_pinv_apply(A, t.conjugate());
  ComplexMatrix beta(b1, b2);
  for (Eigen::Index c = 0; c < b1; ++c)
    for (Eigen::Index e = 0; e < b2; ++e) beta(c, e) = x(c * b2 + e);
  return beta;
}

// Closed-form minimization over alpha for fixed beta.
inline ComplexMatrix relation_step_alpha(const SchmidtPair& sp, const ComplexMatrix& beta, WitnessKind kind) {
  const Eigen::Index b1 = sp.b1(), b2 = sp.b2(), a1 = sp.a1(), a2 = sp.a2();
  const Eigen::Index n = a1 * a2;  // vec(alpha)(a, b) = a * a2 + b
  const ComplexMatrix K = sp.mu1() * beta;  // a1 x b2
  ComplexMatrix L1 = ComplexMatrix::Zero(a2 * b2, n);
  for (Eigen::Index b = 0; b < a2; ++b)
    for (Eigen::Index e = 0; e < b2; ++e)
      for (Eigen::Index a = 0; a < a1; ++a) L1(b * b2 + e, a * a2 + b) = K(a, e);
  ComplexMatrix A = L1.adjoint() * L1;
  if (kind != WitnessKind::W_tilde) {
    const ComplexMatrix J = sp.mu2() * beta.transpose();  // a2 x b1
    ComplexMatrix L2 = ComplexMatrix::Zero(a1 * b1, n);
    for (Eigen::Index a = 0; a < a1; ++a)
      for (Eigen::Index c = 0; c < b1; ++c)
        for (Eigen::Index b = 0; b < a2; ++b) L2(a * b1 + c, a * a2 + b) = J(b, c);
    A += L2.adjoint() * L2;
  }
  ComplexVector t = ComplexVector::Zero(n);
  for (std::size_t i = 0; i < sp.s1.rank; ++i)
    for (std::size_t j = 0; j < sp.s2.rank; ++j) {
      const auto I = static_cast<Eigen::Index>(i), J = static_cast<Eigen::Index>(j);
      t(I * a2 + J) = sp.s1.coefficients(I) * sp.s2.coefficients(J) * beta(I, J);
    }
  const ComplexVector x = psd_pinv_apply(A, t.conjugate());
  ComplexMatrix alpha(a1, a2);
  for (Eigen::Index a = 0; a < a1; ++a)
    for (Eigen::Index b = 0; b < a2; ++b) alpha(a, b) = x(a * a2 + b);
  return alpha;
}

inline ComplexMatrix gaussian_matrix(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng) {
  const ComplexVector v = gaussian_vector(static_cast<std::size_t>(r * c), rng);
  return Eigen::Map<const ComplexMatrix>(v.data(), r, c);
}

}  // namespace detail

// Analytic seeds: aligned identities (exact zero when the Schmidt vectors coincide), and the
// rank-matching scaling alpha_jj = beta_jj = sqrt(mu2_j / mu1_j) (exact zero for W_tilde when
// rank(psi1) >= rank(psi2)).
inline std::vector<std::pair<ComplexMatrix, ComplexMatrix>> analytic_seeds(const SchmidtPair& sp) {
  std::vector<std::pair<ComplexMatrix, ComplexMatrix>> seeds;
  seeds.emplace_back(ComplexMatrix::Identity(sp.a1(), sp.a2()), ComplexMatrix::Identity(sp.b1(), sp.b2()));
  if (sp.s1.rank >= sp.s2.rank) {
    ComplexMatrix a = ComplexMatrix::Zero(sp.a1(), sp.a2()), b = ComplexMatrix::Zero(sp.b1(), sp.b2());
    for (std::size_t j = 0; j < sp.s2.rank; ++j) {
      const auto J = static_cast<Eigen::Index>(j);
      const double s = std::sqrt(sp.s2.coefficients(J) / sp.s1.coefficients(J));
      a(J, J) = s;
      b(J, J) = s;
    }
    seeds.emplace_back(a, b);
  }
  return seeds;
}

inline EpsilonEstimate epsilon_estimate(const PureFactorState& psi1, const PureFactorState& psi2,
                                        WitnessKind kind = WitnessKind::W_eps, const SearchConfig& cfg = {}) {
  if (psi1.party_count() != 2 || psi2.party_count() != 2)
    throw PreconditionError("epsilon_estimate: factors must be bipartite");
  if (kind != WitnessKind::W_eps && kind != WitnessKind::W_tilde)
    throw PreconditionError("epsilon_estimate: kind must be W_eps or W_tilde");
  const SchmidtPair sp{schmidt(psi1), schmidt(psi2)};

  EpsilonEstimate best;
  best.kind = kind;
  best.degenerate = sp.s1.rank == 1 && sp.s2.rank == 1;

  auto consider = [&](ComplexMatrix a, ComplexMatrix b, bool analytic, bool converged) {
    a /= a.norm();
    b /= b.norm();
    const double f = detail::relation_objective(sp, a, b, kind);
    if (f < best.best_objective) {
      best.best_objective = f;
      best.alpha = a;
      best.beta = b;
      best.analytic = analytic;
      best.converged = converged;
    }
  };
  for (auto& [a, b] : analytic_seeds(sp)) consider(a, b, true, true);

  struct Run {
    ComplexMatrix a, b;
    bool converged = false;
  };
  auto one = [&](int k) {
    std::mt19937_64 rng(cfg.seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(k));
    Run r;
    r.a = detail::gaussian_matrix(sp.a1(), sp.a2(), rng);
    r.b = detail::gaussian_matrix(sp.b1(), sp.b2(), rng);
    double cur = detail::relation_objective(sp, r.a, r.b, kind);
    ComplexMatrix best_a = r.a, best_b = r.b;
    int quiet = 0;
    for (int it = 0; it < cfg.max_iters; ++it) {
      ComplexMatrix nb = detail::relation_step_beta(sp, r.a, kind);
      if (nb.norm() < 1e-300) break;
      r.b = nb / nb.norm();
      ComplexMatrix na = detail::relation_step_alpha(sp, r.b, kind);
      if (na.norm() < 1e-300) break;
      r.a = na / na.norm();
      const double f = detail::relation_objective(sp, r.a, r.b, kind);
      quiet = (cur - f < cfg.tol) ? quiet + 1 : 0;
      if (f < cur) {
        cur = f;
        best_a = r.a;
        best_b = r.b;
      }
      if (quiet >= cfg.patience) {
        r.converged = true;
        break;
      }
    }
    r.a = best_a;
    r.b = best_b;
    return r;
  };
  if (!best.degenerate) {
    const auto runs = detail::run_indexed<Run>(cfg.restarts, cfg.jobs, one);
    for (const auto& r : runs) consider(r.a, r.b, false, r.converged);
    best.restarts_used = cfg.restarts;
  }
  best.upper_bound = std::max(0.0, best.best_objective);
  return best;
}

inline SchmidtPair schmidt_pair(const PureFactorState& psi1, const PureFactorState& psi2) {
  return SchmidtPair{schmidt(psi1), schmidt(psi2)};
}

// True iff the sorted, zero-padded Schmidt coefficient vectors differ by more than 1e-9 somewhere.
inline bool nontrivial_predicate(const SchmidtDecomposition& s1, const SchmidtDecomposition& s2) {
  const std::size_t n = std::max({s1.dim_a(), s1.dim_b(), s2.dim_a(), s2.dim_b()});
  return (s1.padded(n) - s2.padded(n)).cwiseAbs().maxCoeff() > 1e-9;
}

inline bool nontrivial_predicate(const PureFactorState& psi1, const PureFactorState& psi2) {
  if (psi1.party_count() != 2 || psi2.party_count() != 2)
    throw PreconditionError("nontrivial_predicate: factors must be bipartite");
  return nontrivial_predicate(schmidt(psi1), schmidt(psi2));
}

// ---------------------------------------------------------------------------
// Schmidt-number witnesses

// max |<psi|phi>|^2 over phi of Schmidt rank <= k: sum of the k largest mu_i^2.
inline double max_overlap_schmidt_k(const PureFactorState& psi, std::size_t k) {
  const auto s = schmidt(psi);
  if (k < 1 || k > s.rank) throw PreconditionError("max_overlap_schmidt_k: need 1 <= k <= Schmidt rank");
  return s.coefficients.head(static_cast<Eigen::Index>(k)).squaredNorm();
}

// 1 - P_psi / sum_{i<=k} mu_i^2, a Schmidt-number (k+1) witness.
inline Witness build_W_k(const PureFactorState& psi, std::size_t k) {
  if (psi.party_count() != 2) throw PreconditionError("build_W_k: state must be bipartite");
  const auto s = schmidt(psi);
  if (k < 1) throw PreconditionError("build_W_k: k must be >= 1");
  if (k >= s.rank)
    throw PreconditionError("build_W_k: k >= Schmidt rank forces epsilon = 0, no witness");
  const double overlap = s.coefficients.head(static_cast<Eigen::Index>(k)).squaredNorm();
  Witness w{identity(psi.dimension()) - psi.projector() / overlap, Layout::of({psi}), WitnessKind::W_k,
            1.0 / overlap - 1.0};
  return w;
}

// ---------------------------------------------------------------------------
// Choi-Jamiolkowski isomorphism

// Lambda_W[X] = Tr_1((X^T ⊗ 1) W) for W on C^{d_in} ⊗ C^{d_out}.
inline ComplexMatrix apply_map_from_witness(const ComplexMatrix& w, std::size_t d_in, std::size_t d_out,
                                            const ComplexMatrix& x) {
  if (static_cast<std::size_t>(w.rows()) != d_in * d_out || w.rows() != w.cols())
    throw ShapeError("apply_map_from_witness: witness does not match (d_in, d_out)");
  if (static_cast<std::size_t>(x.rows()) != d_in || x.rows() != x.cols())
    throw ShapeError("apply_map_from_witness: input dimension does not match the first slot");
  const ComplexMatrix prod = kron(ComplexMatrix(x.transpose()), identity(d_out)) * w;
  return partial_trace(prod, SubsystemShape{d_in, d_out}, {1});
}

// Uses the witness's party-0 : rest cut as (input, output) slots.
inline ComplexMatrix apply_map_from_witness(const Witness& w, const ComplexMatrix& x) {
  const Bipartition cut(w.layout.n_parties, {0});
  const CutView v = cut_major(w.matrix, w.layout, cut);
  return apply_map_from_witness(v.matrix, v.dim_a, v.dim_b, x);
}

// d (id ⊗ Lambda)[P+_d] = sum_ij |i><j| ⊗ Lambda(|i><j|).
inline ComplexMatrix choi_matrix(const std::function<ComplexMatrix(const ComplexMatrix&)>& map, std::size_t d_in) {
  const auto D = static_cast<Eigen::Index>(d_in);
  ComplexMatrix out;
  for (Eigen::Index i = 0; i < D; ++i)
    for (Eigen::Index j = 0; j < D; ++j) {
      ComplexMatrix e = ComplexMatrix::Zero(D, D);
      e(i, j) = 1.0;
      const ComplexMatrix blk = map(e);
      if (out.size() == 0) out = ComplexMatrix::Zero(D * blk.rows(), D * blk.cols());
      out.block(i * blk.rows(), j * blk.cols(), blk.rows(), blk.cols()) = blk;
    }
  return out;
}

// ---------------------------------------------------------------------------
// PPT states and W_1

// <psi|rho|psi> <= mu_1^2 for PPT rho; rho must be a two-party state matching psi's dimensions.
inline bool w1_ppt_bound_check(const PureFactorState& psi, const MixedState& rho, double tol = 1e-9) {
  if (psi.party_count() != 2 || rho.layout.n_parties != 2)
    throw PreconditionError("w1_ppt_bound_check: bipartite state and operator required");
  const auto cut = Bipartition::bipartite();
  const CutView v = rho.view(cut);
  if (v.dim_a != psi.party_dims()[0] || v.dim_b != psi.party_dims()[1])
    throw ShapeError("w1_ppt_bound_check: dimensions differ");
  if (!is_ppt(rho, cut)) throw PreconditionError("w1_ppt_bound_check: rho is not PPT");
  const double overlap = (psi.amplitudes().adjoint() * v.matrix * psi.amplitudes())(0, 0).real();
  const double mu1 = schmidt(psi).coefficients(0);
  return overlap <= mu1 * mu1 + tol;
}

// ---------------------------------------------------------------------------
// Nondecomposability through tensoring

struct NondecomposabilityReport {
  Witness tensor_witness;   // P_phi ⊗ inner, factor-major (A1, B1, A2, B2)
  MixedState state;         // rho_p(phi, psi_w)
  double p = 0.0;
  double p_gamma = 0.0;
  double expectation = 0.0;  // tr(W rho), computed densely
  double predicted = 0.0;    // p <psi_w|inner|psi_w>
  double min_pt_eigenvalue = 0.0;
  bool state_ppt = false;
};

// `inner` must be positive on states of Schmidt number `inner_k`.
inline NondecomposabilityReport nondecomposability_certificate(const PureFactorState& phi, const Witness& inner,
                                                               std::size_t inner_k, const PureFactorState& psi_w,
                                                               double p) {
  if (phi.party_count() != 2 || psi_w.party_count() != 2 || inner.layout.n_parties != 2)
    throw PreconditionError("nondecomposability_certificate: bipartite inputs required");
  if (static_cast<std::size_t>(inner.matrix.rows()) != psi_w.dimension())
    throw ShapeError("nondecomposability_certificate: inner witness does not act on psi_w's space");
  const std::size_t k = schmidt(phi).rank;
  if (k < 2)
    throw PreconditionError("nondecomposability_certificate: phi must be entangled (Schmidt rank >= 2)");
  if (k > inner_k)
    throw PreconditionError("nondecomposability_certificate: Schmidt rank of phi exceeds the inner witness order");
  const double inner_val = (psi_w.amplitudes().adjoint() * inner.matrix * psi_w.amplitudes())(0, 0).real();
  if (!(inner_val < 0.0))
    throw PreconditionError("nondecomposability_certificate: psi_w does not violate the inner witness");
  const PptThreshold pg = p_gamma_closed(phi, psi_w);
  if (!(p > 0.0) || p > pg.p_gamma + 1e-12)
    throw PreconditionError("nondecomposability_certificate: p must satisfy 0 < p <= p_Gamma");

  NondecomposabilityReport r;
  r.tensor_witness = Witness{kron(phi.projector(), inner.matrix), Layout::of({phi, psi_w}), WitnessKind::tensor, 0.0};
  r.state = build_rho_p(EnsembleSpec{{phi, psi_w}, p});
  r.p = p;
  r.p_gamma = pg.p_gamma;
  r.expectation = r.tensor_witness.expectation(r.state.matrix);
  r.predicted = p * inner_val;
  r.min_pt_eigenvalue = pt_spectrum(r.state, Bipartition::bipartite()).min();
  r.state_ppt = r.min_pt_eigenvalue >= -kPptTol;
  return r;
}

}  // namespace pptk
