#pragma once

// Dense complex tensor-index algebra.
//
// Index convention: a composite index over subsystems (d_0, d_1, ..., d_{n-1})
// is row-major with subsystem 0 slowest, i.e. |i_0 i_1 ... i_{n-1}> sits at
// ((i_0 * d_1 + i_1) * d_2 + ...) + i_{n-1}. kron(A, B) follows the same rule.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "pptk/errors.hpp"

namespace pptk {

using complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr std::size_t kDefaultMaxDim = 4096;

// Ordered subsystem dimensions annotating a tensor-factor layout.
struct SubsystemShape {
  std::vector<std::size_t> dims;

  SubsystemShape() = default;
  SubsystemShape(std::initializer_list<std::size_t> d) : dims(d) { validate(); }
  explicit SubsystemShape(std::vector<std::size_t> d) : dims(std::move(d)) { validate(); }

  std::size_t size() const { return dims.size(); }
  std::size_t operator[](std::size_t i) const { return dims[i]; }

  std::size_t total() const {
    return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
  }

  void validate() const {
    for (auto d : dims)
      if (d < 1) throw ShapeError("subsystem dimension must be >= 1");
  }

  bool operator==(const SubsystemShape&) const = default;
};

inline std::string to_string(const SubsystemShape& s) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
  os << ')';
  return os.str();
}

struct SpectrumReport {
  RealVector eigenvalues;  // ascending
  std::optional<ComplexMatrix> eigenvectors;  // columns, same order

  double min() const { return eigenvalues(0); }
  double max() const { return eigenvalues(eigenvalues.size() - 1); }
};

namespace detail {

inline void require_square(const ComplexMatrix& m, const SubsystemShape& shape, const char* op) {
  if (m.rows() != m.cols())
    throw ShapeError(std::string(op) + ": matrix is not square");
  if (static_cast<std::size_t>(m.rows()) != shape.total()) {
    std::ostringstream os;
    os << op << ": matrix dimension " << m.rows() << " does not match shape "
       << to_string(shape) << " (product " << shape.total() << ")";
    throw ShapeError(os.str());
  }
}

inline std::vector<std::size_t> strides(const SubsystemShape& shape) {
  std::vector<std::size_t> s(shape.size(), 1);
  for (std::size_t k = shape.size(); k-- > 1;) s[k - 1] = s[k] * shape[k];
  return s;
}

inline std::vector<bool> marker(const std::set<std::size_t>& idx, std::size_t n, const char* op) {
  std::vector<bool> mark(n, false);
  for (auto i : idx) {
    if (i >= n) throw ShapeError(std::string(op) + ": subsystem index out of range");
    mark[i] = true;
  }
  return mark;
}

inline double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace detail

inline bool is_hermitian(const ComplexMatrix& m, double tol = kHermitianTol) {
  if (m.rows() != m.cols()) return false;
  return detail::max_abs(m - m.adjoint()) <= tol * std::max(1.0, detail::max_abs(m));
}

inline ComplexMatrix hermitian_part(const ComplexMatrix& m) { return (m + m.adjoint()) / 2.0; }

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline ComplexVector kron(const ComplexVector& a, const ComplexVector& b) {
  ComplexVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

// Index map for a subsystem reordering: new subsystem k is old subsystem perm[k].
// Returns old composite index for each new composite index.
inline std::vector<std::size_t> permutation_index_map(const SubsystemShape& shape,
                                                      const std::vector<std::size_t>& perm) {
  const std::size_t n = shape.size();
  if (perm.size() != n) throw ShapeError("permute_systems: permutation length differs from shape");
  std::vector<bool> seen(n, false);
  for (auto p : perm) {
    if (p >= n || seen[p]) throw ShapeError("permute_systems: not a permutation");
    seen[p] = true;
  }
  std::vector<std::size_t> new_dims(n);
  for (std::size_t k = 0; k < n; ++k) new_dims[k] = shape[perm[k]];
  const auto old_strides = detail::strides(shape);

  const std::size_t total = shape.total();
  std::vector<std::size_t> map(total);
  std::vector<std::size_t> digit(n, 0);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t old = 0;
    for (std::size_t k = 0; k < n; ++k) old += digit[k] * old_strides[perm[k]];
    map[idx] = old;
    for (std::size_t k = n; k-- > 0;) {
      if (++digit[k] < new_dims[k]) break;
      digit[k] = 0;
    }
  }
  return map;
}

inline ComplexMatrix permute_systems(const ComplexMatrix& m, const SubsystemShape& shape,
                                     const std::vector<std::size_t>& perm) {
  detail::require_square(m, shape, "permute_systems");
  const auto map = permutation_index_map(shape, perm);
  const auto n = static_cast<Eigen::Index>(map.size());
  ComplexMatrix out(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) out(i, j) = m(map[i], map[j]);
  return out;
}

inline ComplexVector permute_systems(const ComplexVector& v, const SubsystemShape& shape,
                                     const std::vector<std::size_t>& perm) {
  if (static_cast<std::size_t>(v.size()) != shape.total())
    throw ShapeError("permute_systems: vector length does not match shape");
  const auto map = permutation_index_map(shape, perm);
  ComplexVector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out(i) = v(map[i]);
  return out;
}

// (|i j><k l|)^Gamma = |k j><i l| for every marked subsystem.
inline ComplexMatrix partial_transpose(const ComplexMatrix& m, const SubsystemShape& shape,
                                       const std::set<std::size_t>& transposed) {
  detail::require_square(m, shape, "partial_transpose");
  const std::size_t n = shape.size();
  const auto mark = detail::marker(transposed, n, "partial_transpose");
  const auto st = detail::strides(shape);
  const auto total = static_cast<Eigen::Index>(shape.total());

  ComplexMatrix out(total, total);
  for (Eigen::Index r = 0; r < total; ++r) {
    for (Eigen::Index c = 0; c < total; ++c) {
      std::size_t rr = 0, cc = 0;
      std::size_t ri = static_cast<std::size_t>(r), ci = static_cast<std::size_t>(c);
      for (std::size_t k = 0; k < n; ++k) {
        const std::size_t rd = ri / st[k], cd = ci / st[k];
        ri %= st[k];
        ci %= st[k];
        if (mark[k]) {
          rr += cd * st[k];
          cc += rd * st[k];
        } else {
          rr += rd * st[k];
          cc += cd * st[k];
        }
      }
      out(rr, cc) = m(r, c);
    }
  }
  return out;
}

// R(|i j><k l|) = |i k><j l| on a two-factor (d_A, d_B) layout; output is d_A^2 x d_B^2.
inline ComplexMatrix realign(const ComplexMatrix& m, const SubsystemShape& shape) {
  if (shape.size() != 2) throw ShapeError("realign: shape must have exactly two factors");
  detail::require_square(m, shape, "realign");
  const auto da = static_cast<Eigen::Index>(shape[0]);
  const auto db = static_cast<Eigen::Index>(shape[1]);
  ComplexMatrix out(da * da, db * db);
  for (Eigen::Index i = 0; i < da; ++i)
    for (Eigen::Index j = 0; j < db; ++j)
      for (Eigen::Index k = 0; k < da; ++k)
        for (Eigen::Index l = 0; l < db; ++l) out(i * da + k, j * db + l) = m(i * db + j, k * db + l);
  return out;
}

// Trace over every subsystem not in `keep`; kept subsystems retain their order.
inline ComplexMatrix partial_trace(const ComplexMatrix& m, const SubsystemShape& shape,
                                   const std::set<std::size_t>& keep) {
  detail::require_square(m, shape, "partial_trace");
  const std::size_t n = shape.size();
  const auto mark = detail::marker(keep, n, "partial_trace");

  std::vector<std::size_t> perm;
  std::size_t dk = 1, dt = 1;
  for (std::size_t k = 0; k < n; ++k)
    if (mark[k]) {
      perm.push_back(k);
      dk *= shape[k];
    }
  for (std::size_t k = 0; k < n; ++k)
    if (!mark[k]) {
      perm.push_back(k);
      dt *= shape[k];
    }
  const ComplexMatrix p = permute_systems(m, shape, perm);
  const auto K = static_cast<Eigen::Index>(dk), T = static_cast<Eigen::Index>(dt);
  ComplexMatrix out = ComplexMatrix::Zero(K, K);
  for (Eigen::Index a = 0; a < K; ++a)
    for (Eigen::Index b = 0; b < K; ++b) {
      complex s = 0;
      for (Eigen::Index t = 0; t < T; ++t) s += p(a * T + t, b * T + t);
      out(a, b) = s;
    }
  return out;
}

// V|phi ⊗ chi> = |chi ⊗ phi> on C^d ⊗ C^d.
inline ComplexMatrix swap_operator(std::size_t d) {
  if (d < 1) throw ShapeError("swap_operator: d must be >= 1");
  const auto D = static_cast<Eigen::Index>(d);
  ComplexMatrix v = ComplexMatrix::Zero(D * D, D * D);
  for (Eigen::Index i = 0; i < D; ++i)
    for (Eigen::Index j = 0; j < D; ++j) v(j * D + i, i * D + j) = 1.0;
  return v;
}

inline SpectrumReport hermitian_spectrum(const ComplexMatrix& m, bool want_vectors = false) {
  if (!is_hermitian(m)) throw PreconditionError("hermitian_spectrum: input is not Hermitian");
  const ComplexMatrix h = hermitian_part(m);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(
      h, want_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericError("hermitian_spectrum: eigensolver failed");
  SpectrumReport rep{es.eigenvalues(), std::nullopt};
  if (want_vectors) rep.eigenvectors = es.eigenvectors();
  return rep;
}

inline double min_eigenvalue(const ComplexMatrix& m) { return hermitian_spectrum(m).min(); }

inline RealVector singular_values(const ComplexMatrix& m) {
  if (m.size() == 0) return RealVector();
  if (std::max(m.rows(), m.cols()) <= 16) return Eigen::JacobiSVD<ComplexMatrix>(m).singularValues();
  return Eigen::BDCSVD<ComplexMatrix>(m).singularValues();
}

// Sum of singular values. Hermitian input goes through the eigensolver instead.
inline double trace_norm(const ComplexMatrix& m) {
  if (m.rows() == m.cols() && is_hermitian(m))
    return hermitian_spectrum(m).eigenvalues.cwiseAbs().sum();
  const double s = singular_values(m).sum();
  if (!std::isfinite(s)) throw NumericError("trace_norm: non-finite result");
  return s;
}

inline ComplexMatrix projector(const ComplexVector& v) { return v * v.adjoint(); }

inline ComplexMatrix identity(std::size_t d) {
  return ComplexMatrix::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
}

}  // namespace pptk
