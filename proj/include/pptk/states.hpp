#pragma once

// Pure factor states, Schmidt decompositions across cuts, and the mixed family
//
//   rho_p = (1-p) ⊗_i (1 - P_i)/(D_i - 1) + p ⊗_i P_i
//
// stored factor-major: subsystems are ordered (factor 0: parties 0..N-1,
// factor 1: parties 0..N-1, ...).

#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pptk/bipartition.hpp"
#include "pptk/errors.hpp"
#include "pptk/tensor.hpp"

namespace pptk {

inline constexpr double kSchmidtCutoff = 1e-9;
inline constexpr double kNormTol = 1e-12;

class PureFactorState {
 public:
  PureFactorState(std::vector<std::size_t> party_dims, ComplexVector amplitudes)
      : dims_(std::move(party_dims)), amps_(std::move(amplitudes)) {
    if (dims_.size() < 2) throw PreconditionError("PureFactorState: need at least two parties");
    const SubsystemShape shape(dims_);
    if (static_cast<std::size_t>(amps_.size()) != shape.total())
      throw ShapeError("PureFactorState: amplitude count does not match party dimensions");
    if (std::abs(amps_.norm() - 1.0) > kNormTol)
      throw PreconditionError("PureFactorState: amplitudes are not normalized");
  }

  // Rescales to unit norm; rejects zero or non-finite vectors.
  static PureFactorState normalized(std::vector<std::size_t> party_dims, ComplexVector amplitudes) {
    const double n = amplitudes.norm();
    if (!(n > 0.0) || !std::isfinite(n))
      throw PreconditionError("PureFactorState: amplitude vector is not normalizable");
    return PureFactorState(std::move(party_dims), amplitudes / n);
  }

  const std::vector<std::size_t>& party_dims() const { return dims_; }
  std::size_t party_count() const { return dims_.size(); }
  std::size_t dimension() const { return static_cast<std::size_t>(amps_.size()); }
  const ComplexVector& amplitudes() const { return amps_; }
  SubsystemShape shape() const { return SubsystemShape(dims_); }
  ComplexMatrix projector() const { return pptk::projector(amps_); }

 private:
  std::vector<std::size_t> dims_;
  ComplexVector amps_;
};

struct SchmidtDecomposition {
  RealVector coefficients;   // descending, all > kSchmidtCutoff
  std::size_t rank = 0;
  // Full unitaries; the first `rank` columns are the Schmidt vectors, the rest complete the basis.
  ComplexMatrix left_basis;
  ComplexMatrix right_basis;

  std::size_t dim_a() const { return static_cast<std::size_t>(left_basis.rows()); }
  std::size_t dim_b() const { return static_cast<std::size_t>(right_basis.rows()); }

  // Coefficients zero-padded to length n.
  RealVector padded(std::size_t n) const {
    RealVector out = RealVector::Zero(static_cast<Eigen::Index>(std::max<std::size_t>(n, rank)));
    out.head(static_cast<Eigen::Index>(rank)) = coefficients;
    return out;
  }
};

// Subsystem order placing the cut's side-A parties first.
inline std::vector<std::size_t> cut_major_order(const Bipartition& cut) {
  std::vector<std::size_t> perm(cut.side_a());
  perm.insert(perm.end(), cut.side_b().begin(), cut.side_b().end());
  return perm;
}

// Amplitudes of psi reshaped to a (d_A x d_B) matrix across the cut.
inline ComplexMatrix cut_amplitude_matrix(const PureFactorState& psi, const Bipartition& cut) {
  if (cut.party_count() != psi.party_count())
    throw ShapeError("cut party count differs from state party count");
  const ComplexVector v = permute_systems(psi.amplitudes(), psi.shape(), cut_major_order(cut));
  std::size_t da = 1, db = 1;
  for (auto p : cut.side_a()) da *= psi.party_dims()[p];
  for (auto p : cut.side_b()) db *= psi.party_dims()[p];
  const auto A = static_cast<Eigen::Index>(da), B = static_cast<Eigen::Index>(db);
  ComplexMatrix c(A, B);
  for (Eigen::Index a = 0; a < A; ++a)
    for (Eigen::Index b = 0; b < B; ++b) c(a, b) = v(a * B + b);
  return c;
}

inline SchmidtDecomposition schmidt(const PureFactorState& psi, const Bipartition& cut) {
  const ComplexMatrix c = cut_amplitude_matrix(psi, cut);
  Eigen::JacobiSVD<ComplexMatrix> svd(c, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RealVector& s = svd.singularValues();
  std::size_t r = 0;
  while (r < static_cast<std::size_t>(s.size()) && s(static_cast<Eigen::Index>(r)) > kSchmidtCutoff) ++r;
  return SchmidtDecomposition{s.head(static_cast<Eigen::Index>(r)), r, svd.matrixU(),
                              svd.matrixV().conjugate()};
}

inline SchmidtDecomposition schmidt(const PureFactorState& psi) {
  if (psi.party_count() != 2) throw PreconditionError("schmidt: state is not bipartite; pass a cut");
  return schmidt(psi, Bipartition::bipartite());
}

// Sum_k mu_k |u_k> ⊗ |v_k> in the cut-major (A, B) layout.
inline ComplexVector reconstruct(const SchmidtDecomposition& s) {
  ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(s.dim_a() * s.dim_b()));
  for (std::size_t k = 0; k < s.rank; ++k) {
    const auto K = static_cast<Eigen::Index>(k);
    v += s.coefficients(K) * kron(ComplexVector(s.left_basis.col(K)), ComplexVector(s.right_basis.col(K)));
  }
  return v;
}

// ---------------------------------------------------------------------------
// Named families

inline PureFactorState max_entangled(std::size_t d) {
  if (d < 2) throw PreconditionError("max_entangled: d must be >= 2");
  const auto D = static_cast<Eigen::Index>(d);
  ComplexVector v = ComplexVector::Zero(D * D);
  for (Eigen::Index i = 0; i < D; ++i) v(i * D + i) = 1.0 / std::sqrt(static_cast<double>(d));
  return PureFactorState({d, d}, v);
}

// (|0...0> + |1...1> + ... ) / sqrt(min dim)
inline PureFactorState ghz(const std::vector<std::size_t>& dims) {
  if (dims.size() < 2) throw PreconditionError("ghz: need at least two parties");
  const SubsystemShape shape(dims);
  const std::size_t m = *std::min_element(dims.begin(), dims.end());
  const auto st = detail::strides(shape);
  ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(shape.total()));
  for (std::size_t k = 0; k < m; ++k) {
    std::size_t idx = 0;
    for (std::size_t s = 0; s < dims.size(); ++s) idx += k * st[s];
    v(static_cast<Eigen::Index>(idx)) = 1.0;
  }
  return PureFactorState::normalized(dims, v);
}

// n-qubit W state.
inline PureFactorState w_state(std::size_t n) {
  if (n < 2) throw PreconditionError("w_state: need n >= 2");
  if (n > 20) throw PreconditionError("w_state: n too large");
  const Eigen::Index D = Eigen::Index{1} << n;
  ComplexVector v = ComplexVector::Zero(D);
  for (std::size_t k = 0; k < n; ++k) v(Eigen::Index{1} << k) = 1.0;
  return PureFactorState::normalized(std::vector<std::size_t>(n, 2), v);
}

// Sum_i mu_i |ii> on C^d ⊗ C^d with d = max(dim, coeffs.size()); coefficients are normalized.
inline PureFactorState schmidt_state(const std::vector<double>& coeffs, std::size_t dim = 0) {
  if (coeffs.empty()) throw PreconditionError("schmidt_state: empty coefficient vector");
  for (double c : coeffs)
    if (!(c >= 0.0) || !std::isfinite(c))
      throw PreconditionError("schmidt_state: coefficients must be finite and non-negative");
  const std::size_t d = std::max(dim, coeffs.size());
  if (d < 2) throw PreconditionError("schmidt_state: local dimension must be >= 2");
  const auto D = static_cast<Eigen::Index>(d);
  ComplexVector v = ComplexVector::Zero(D * D);
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    const auto I = static_cast<Eigen::Index>(i);
    v(I * D + I) = coeffs[i];
  }
  return PureFactorState::normalized({d, d}, v);
}

// |0...0>
inline PureFactorState product_state(const std::vector<std::size_t>& dims) {
  const SubsystemShape shape(dims);
  ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(shape.total()));
  v(0) = 1.0;
  return PureFactorState(dims, v);
}

// Normalized independent standard complex Gaussians.
inline ComplexVector gaussian_vector(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  ComplexVector v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double re = g(rng);
    const double im = g(rng);
    v(i) = complex(re, im);
  }
  return v;
}

inline PureFactorState random_pure(const std::vector<std::size_t>& dims, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return PureFactorState::normalized(dims, gaussian_vector(SubsystemShape(dims).total(), rng));
}

inline PureFactorState random_product(const std::vector<std::size_t>& dims, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ComplexVector v = ComplexVector::Ones(1);
  for (auto d : dims) {
    ComplexVector f = gaussian_vector(d, rng);
    v = kron(v, ComplexVector(f / f.norm()));
  }
  return PureFactorState::normalized(dims, v);
}

// ---------------------------------------------------------------------------
// Mixed family

struct EnsembleSpec {
  std::vector<PureFactorState> factors;
  double p = 0.0;

  std::size_t party_count() const { return factors.front().party_count(); }

  void validate() const {
    if (factors.empty()) throw PreconditionError("EnsembleSpec: need at least one factor");
    if (!(p >= 0.0 && p <= 1.0)) throw PreconditionError("EnsembleSpec: p must lie in [0,1]");
    for (const auto& f : factors)
      if (f.party_count() != factors.front().party_count())
        throw PreconditionError("EnsembleSpec: factors have different party counts");
  }

  // 1/(D_i - 1) for factor i of total dimension D_i.
  double normalization(std::size_t i) const {
    const double d = static_cast<double>(factors.at(i).dimension());
    return 1.0 / (d - 1.0);
  }

  std::size_t total_dimension() const {
    std::size_t d = 1;
    for (const auto& f : factors) d *= f.dimension();
    return d;
  }

  EnsembleSpec with_p(double q) const { return EnsembleSpec{factors, q}; }
};

// Storage layout of a composite operator: subsystem dimensions plus the party each one belongs to.
struct Layout {
  std::vector<std::size_t> dims;
  std::vector<std::size_t> party_of;
  std::size_t n_parties = 0;

  SubsystemShape shape() const { return SubsystemShape(dims); }
  std::size_t total() const { return shape().total(); }

  // Factor-major layout of a list of N-party factors.
  static Layout factor_major(const std::vector<std::vector<std::size_t>>& factor_dims) {
    Layout l;
    l.n_parties = factor_dims.front().size();
    for (const auto& fd : factor_dims) {
      if (fd.size() != l.n_parties) throw ShapeError("Layout: factors have different party counts");
      for (std::size_t j = 0; j < fd.size(); ++j) {
        l.dims.push_back(fd[j]);
        l.party_of.push_back(j);
      }
    }
    return l;
  }

  static Layout of(const std::vector<PureFactorState>& factors) {
    std::vector<std::vector<std::size_t>> fd;
    for (const auto& f : factors) fd.push_back(f.party_dims());
    return factor_major(fd);
  }

  // Subsystems on side A (storage order) followed by side B.
  std::vector<std::size_t> cut_permutation(const Bipartition& cut) const {
    if (cut.party_count() != n_parties) throw ShapeError("cut party count differs from layout");
    std::vector<std::size_t> a, b;
    for (std::size_t s = 0; s < dims.size(); ++s) (cut.on_side_a(party_of[s]) ? a : b).push_back(s);
    a.insert(a.end(), b.begin(), b.end());
    return a;
  }

  std::pair<std::size_t, std::size_t> cut_dims(const Bipartition& cut) const {
    std::size_t da = 1, db = 1;
    for (std::size_t s = 0; s < dims.size(); ++s) (cut.on_side_a(party_of[s]) ? da : db) *= dims[s];
    return {da, db};
  }
};

// Operator on a Layout, reshuffled to the (d_A, d_B) two-factor form of a cut.
struct CutView {
  ComplexMatrix matrix;
  std::size_t dim_a = 0, dim_b = 0;
  SubsystemShape shape() const { return SubsystemShape{dim_a, dim_b}; }
};

inline CutView cut_major(const ComplexMatrix& m, const Layout& layout, const Bipartition& cut) {
  const auto [da, db] = layout.cut_dims(cut);
  return CutView{permute_systems(m, layout.shape(), layout.cut_permutation(cut)), da, db};
}

inline ComplexVector cut_major(const ComplexVector& v, const Layout& layout, const Bipartition& cut) {
  return permute_systems(v, layout.shape(), layout.cut_permutation(cut));
}

struct MixedState {
  ComplexMatrix matrix;
  Layout layout;

  std::size_t dimension() const { return static_cast<std::size_t>(matrix.rows()); }
  CutView view(const Bipartition& cut) const { return cut_major(matrix, layout, cut); }

  // Two-party state with subsystems (d_A, d_B).
  static MixedState bipartite(ComplexMatrix m, std::size_t da, std::size_t db) {
    if (static_cast<std::size_t>(m.rows()) != da * db || m.rows() != m.cols())
      throw ShapeError("MixedState: matrix does not match (d_A, d_B)");
    return MixedState{std::move(m), Layout::factor_major({{da, db}})};
  }
};

inline void check_dimension_cap(std::size_t dim, std::size_t max_dim) {
  if (dim > max_dim) {
    std::ostringstream os;
    os << "composite dimension " << dim << " exceeds cap " << max_dim;
    throw DimensionError(os.str());
  }
}

inline MixedState build_rho_p(const EnsembleSpec& spec, std::size_t max_dim = kDefaultMaxDim) {
  spec.validate();
  check_dimension_cap(spec.total_dimension(), max_dim);
  ComplexMatrix sep = ComplexMatrix::Ones(1, 1);
  ComplexMatrix ent = ComplexMatrix::Ones(1, 1);
  for (std::size_t i = 0; i < spec.factors.size(); ++i) {
    const auto& f = spec.factors[i];
    if (f.dimension() < 2)
      throw PreconditionError("build_rho_p: factor of total dimension 1 (D_i^2 - 1 = 0)");
    const ComplexMatrix P = f.projector();
    sep = kron(sep, ComplexMatrix((identity(f.dimension()) - P) * spec.normalization(i)));
    ent = kron(ent, P);
  }
  return MixedState{(1.0 - spec.p) * sep + spec.p * ent, Layout::of(spec.factors)};
}

}  // namespace pptk
