#pragma once

// Minimization of the ratio <a⊗b| N |a⊗b> / |<Psi|a⊗b>|^2 over product vectors on C^{d_A} ⊗ C^{d_B}.
//
// For a fixed side the ratio is a generalized Rayleigh quotient with a rank-one
// denominator, minimized in closed form by x = N_eff^+ psi_eff with value
// 1 / (psi_eff^† N_eff^+ psi_eff). The search alternates the two sides from
// Gaussian starts and keeps the best value seen.

#include <cstdint>
#include <future>
#include <limits>
#include <optional>
#include <random>
#include <thread>
#include <vector>

#include "pptk/states.hpp"
#include "pptk/tensor.hpp"

namespace pptk {

struct SearchConfig {
  int restarts = 200;
  int max_iters = 500;
  double tol = 1e-12;  // improvement below tol for `patience` iterations counts as converged
  int patience = 5;
  std::uint64_t seed = 1;
  unsigned jobs = 1;
};

namespace detail {

// Pseudo-inverse of a Hermitian positive semidefinite matrix applied to v.
inline ComplexVector psd_pinv_apply(const ComplexMatrix& a, const ComplexVector& v) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(a));
  const RealVector& w = es.eigenvalues();
  const double cut = 1e-12 * std::max(1.0, w.cwiseAbs().maxCoeff());
  ComplexVector y = es.eigenvectors().adjoint() * v;
  for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = w(i) > cut ? y(i) / w(i) : complex(0.0);
  return es.eigenvectors() * y;
}

// Runs `one(k)` for k in [0, n) on up to `jobs` threads; results are indexed by k.
template <typename R, typename F>
std::vector<R> run_indexed(int n, unsigned jobs, F one) {
  std::vector<std::optional<R>> slots(static_cast<std::size_t>(std::max(n, 0)));
  if (jobs <= 1 || n <= 1) {
    for (int k = 0; k < n; ++k) slots[static_cast<std::size_t>(k)].emplace(one(k));
  } else {
    std::vector<std::future<void>> futs;
    const unsigned w = std::min<unsigned>(jobs, static_cast<unsigned>(n));
    for (unsigned t = 0; t < w; ++t)
      futs.push_back(std::async(std::launch::async, [&, t] {
        for (int k = static_cast<int>(t); k < n; k += static_cast<int>(w))
          slots[static_cast<std::size_t>(k)].emplace(one(k));
      }));
    for (auto& f : futs) f.get();
  }
  std::vector<R> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace detail

struct ProductSearchResult {
  double value = std::numeric_limits<double>::infinity();  // best ratio found
  ComplexVector a, b;                                       // unit-norm minimizer
  int restarts_used = 0;
  bool converged = false;
};

// N is Hermitian on the cut-major (d_A, d_B) space; psi lives there too.
inline ProductSearchResult minimize_product_ratio(const ComplexMatrix& N, const ComplexVector& psi,
                                                  std::size_t dim_a, std::size_t dim_b,
                                                  const SearchConfig& cfg) {
  const auto da = static_cast<Eigen::Index>(dim_a), db = static_cast<Eigen::Index>(dim_b);
  if (N.rows() != da * db || psi.size() != da * db)
    throw ShapeError("minimize_product_ratio: operator does not match (d_A, d_B)");

  auto ratio = [&](const ComplexVector& a, const ComplexVector& b) {
    const ComplexVector x = kron(a, b);
    const double num = (x.adjoint() * N * x)(0, 0).real();
    const double den = std::norm((psi.adjoint() * x)(0, 0));
    return den < 1e-12 * x.squaredNorm() ? std::numeric_limits<double>::infinity() : num / den;
  };
  // Effective operator and vector on side B for fixed a (and symmetrically).
  auto step_b = [&](const ComplexVector& a) -> ComplexVector {
    ComplexMatrix lift = kron(ComplexMatrix(a), identity(dim_b));
    const ComplexMatrix n_eff = lift.adjoint() * N * lift;
    const ComplexVector p_eff = lift.adjoint() * psi;
    return detail::psd_pinv_apply(n_eff, p_eff);
  };
  auto step_a = [&](const ComplexVector& b) -> ComplexVector {
    ComplexMatrix lift = kron(identity(dim_a), ComplexMatrix(b));
    const ComplexMatrix n_eff = lift.adjoint() * N * lift;
    const ComplexVector p_eff = lift.adjoint() * psi;
    return detail::psd_pinv_apply(n_eff, p_eff);
  };

  auto one = [&](int k) {
    std::mt19937_64 rng(cfg.seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(k));
    ProductSearchResult r;
    r.restarts_used = 1;
    ComplexVector a = gaussian_vector(dim_a, rng);
    a /= a.norm();
    ComplexVector b = gaussian_vector(dim_b, rng);
    b /= b.norm();
    double cur = ratio(a, b);
    ComplexVector best_a = a, best_b = b;
    int quiet = 0;
    for (int it = 0; it < cfg.max_iters; ++it) {
      ComplexVector nb = step_b(a);
      if (nb.norm() < 1e-300) break;
      b = nb / nb.norm();
      ComplexVector na = step_a(b);
      if (na.norm() < 1e-300) break;
      a = na / na.norm();
      const double nv = ratio(a, b);
      quiet = (cur - nv < cfg.tol) ? quiet + 1 : 0;
      if (nv < cur) {
        cur = nv;
        best_a = a;
        best_b = b;
      }
      if (quiet >= cfg.patience) {
        r.converged = true;
        break;
      }
    }
    r.value = cur;
    r.a = best_a;
    r.b = best_b;
    return r;
  };

  const auto runs = detail::run_indexed<ProductSearchResult>(cfg.restarts, cfg.jobs, one);
  ProductSearchResult best;
  for (const auto& r : runs) {
    best.restarts_used += r.restarts_used;
    if (r.value < best.value) {
      best.value = r.value;
      best.a = r.a;
      best.b = r.b;
      best.converged = r.converged;
    }
  }
  return best;
}

// Smallest <a⊗b|W|a⊗b> over `samples` Haar-like random unit product vectors.
inline double sampled_product_minimum(const ComplexMatrix& W, std::size_t dim_a, std::size_t dim_b,
                                      int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double lo = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    ComplexVector a = gaussian_vector(dim_a, rng);
    ComplexVector b = gaussian_vector(dim_b, rng);
    const ComplexVector x = kron(ComplexVector(a / a.norm()), ComplexVector(b / b.norm()));
    lo = std::min(lo, (x.adjoint() * W * x)(0, 0).real());
  }
  return lo;
}

}  // namespace pptk
