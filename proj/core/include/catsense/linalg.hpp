#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

namespace catsense {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kDefaultTol = 1e-10;

namespace pauli {
const Eigen::Matrix2cd& identity();
const Eigen::Matrix2cd& x();
const Eigen::Matrix2cd& y();
const Eigen::Matrix2cd& z();
}  // namespace pauli

/// Number of qubits N for a Hilbert-space dimension 2^N; throws
/// std::invalid_argument if dim is not a power of two.
int sites_from_dim(Eigen::Index dim);

/// max_ij |m_ij - conj(m_ji)|
double hermiticity_error(const Matrix& m);
bool is_hermitian(const Matrix& m, double tol = kDefaultTol);

/// Bit of `site` in basis index `index`. Site 0 is the leftmost Kronecker
/// factor, i.e. the most significant bit of the index.
inline int site_bit(std::uint64_t index, int site, int n_sites) {
  return static_cast<int>((index >> (n_sites - 1 - site)) & 1ULL);
}

/// I (x) ... (x) site_op (x) ... (x) I with site_op at position `site`.
Matrix kron_embed(const Eigen::Matrix2cd& site_op, int site, int n_sites);

/// XY - YX. Throws on dimension mismatch.
Matrix commutator(const Matrix& x, const Matrix& y);

/// k-fold nested commutator [X, [X, ... [X, Y]]]; order 0 returns Y.
Matrix nested_commutator(const Matrix& x, const Matrix& y, int order);

struct EighResult {
  RealVector eigenvalues;  // ascending
  Matrix eigenvectors;     // orthonormal columns, paired with eigenvalues
};

/// Hermitian eigendecomposition. Throws std::invalid_argument if the input
/// is not Hermitian within tol.
EighResult eigh(const Matrix& h, double tol = kDefaultTol);

/// Largest singular value (for Hermitian inputs, max |eigenvalue|).
double op_norm(const Matrix& m);

// In-place application of a single-site 2x2 operator to a dim x dim matrix.
// apply_site_left:  m <- (g at site) m;  apply_site_right: m <- m (g at site).
void apply_site_left(Matrix& m, const Eigen::Matrix2cd& g, int site);
void apply_site_right(Matrix& m, const Eigen::Matrix2cd& g, int site);

class PureState {
 public:
  explicit PureState(Vector amplitudes, double tol = kDefaultTol);
  const Vector& amplitudes() const { return amps_; }
  int n_sites() const { return n_sites_; }
  Eigen::Index dim() const { return amps_.size(); }

 private:
  Vector amps_;
  int n_sites_;
};

/// Dense Hermitian unit-trace operator on N qubits. The constructor checks
/// Hermiticity and trace; positivity is spot-checked by callers that need it
/// (min_eigenvalue is a full O(dim^3) eigendecomposition).
class DensityMatrix {
 public:
  explicit DensityMatrix(Matrix rho, double tol = kDefaultTol);
  static DensityMatrix from_pure(const PureState& psi);
  static DensityMatrix maximally_mixed(int n_sites);

  const Matrix& matrix() const { return rho_; }
  int n_sites() const { return n_sites_; }
  Eigen::Index dim() const { return rho_.rows(); }
  double tolerance() const { return tol_; }

  double min_eigenvalue() const;
  /// Tr(rho^2); equals the squared Frobenius norm for Hermitian rho.
  double purity() const { return rho_.squaredNorm(); }

 private:
  Matrix rho_;
  int n_sites_;
  double tol_;
};

/// Hermitian idempotent operator (readout or subspace projector).
class Projector {
 public:
  /// Validates Hermiticity and idempotency (O(dim^3)).
  explicit Projector(Matrix op, double tol = kDefaultTol);

  /// VV^dagger for V with orthonormal columns; only V^dagger V ~ I is
  /// checked. A zero-column V yields the (valid) zero projector.
  static Projector from_span(const Matrix& orthonormal_columns, double tol = kDefaultTol);

  /// Diagonal 0/1 projector from a keep mask.
  static Projector from_diagonal(const std::vector<bool>& keep);

  /// For operators idempotent by construction (diagonal masks, unitary
  /// conjugations of projectors); skips the O(dim^3) validation.
  static Projector trusted(Matrix op);

  static Projector identity(int n_sites);

  const Matrix& matrix() const { return op_; }
  Eigen::Index dim() const { return op_.rows(); }
  Eigen::Index rank() const;  // round(Tr)

 private:
  struct Trusted {};
  Projector(Matrix op, Trusted) : op_(std::move(op)) {}
  Matrix op_;
};

/// Sum of single-site Hermitian involutions A = sum_l a(l), a(l)^2 = 1.
/// Caches the per-site eigenstructure: a(l) = R_l diag(e0, e1) R_l^dagger
/// with eigenvalues snapped to +-1. All of the fast evolution paths work in
/// the product eigenbasis U = (x)_l R_l.
class AdditiveObservable {
 public:
  explicit AdditiveObservable(std::vector<Eigen::Matrix2cd> site_ops,
                              double tol = kDefaultTol);

  static AdditiveObservable mz(int n_sites);
  static AdditiveObservable mx(int n_sites);
  static AdditiveObservable my(int n_sites);
  static AdditiveObservable uniform(const Eigen::Matrix2cd& site_op, int n_sites);

  int n_sites() const { return static_cast<int>(site_ops_.size()); }
  Eigen::Index dim() const { return Eigen::Index(1) << n_sites(); }
  const std::vector<Eigen::Matrix2cd>& site_ops() const { return site_ops_; }

  /// True when every a(l) is diagonal in the computational basis.
  bool is_diagonal() const { return is_diagonal_; }

  /// Exact operator norm from per-site eigenvalues (site terms commute).
  double op_norm() const { return op_norm_; }

  /// Dense sum of embeddings (O(4^N) memory; small-N and test use).
  Matrix total() const;

  /// Eigenvalue of A on basis index x of the product eigenbasis.
  /// Integers in [-N, N]; equals the diagonal of A when is_diagonal().
  const std::vector<int>& spectrum() const { return spectrum_; }

  /// Bitmask (in index bit positions) of sites whose two eigenvalues
  /// differ; sites with a(l) = +-1 are invisible to dephasing.
  std::uint64_t active_mask() const { return active_mask_; }

  /// U^dagger m U resp. U m U^dagger with U = (x)_l R_l. No-ops when
  /// is_diagonal().
  Matrix to_eigenbasis(Matrix m) const;
  Matrix from_eigenbasis(Matrix m) const;
  Vector to_eigenbasis(Vector v) const;

  const std::vector<Eigen::Matrix2cd>& site_rotations() const { return rotations_; }

  /// Snapped eigenvalue (+-1) of site `site` for basis bit `bit` of the
  /// product eigenbasis.
  int site_eigenvalue(int site, int bit) const { return site_eigs_[site][bit]; }

 private:
  std::vector<Eigen::Matrix2cd> site_ops_;
  std::vector<Eigen::Matrix2cd> rotations_;   // columns: eigenvectors of a(l)
  std::vector<std::array<int, 2>> site_eigs_; // snapped to -1/+1, column order
  std::vector<int> spectrum_;
  std::uint64_t active_mask_ = 0;
  double op_norm_ = 0.0;
  bool is_diagonal_ = true;
};

}  // namespace catsense
