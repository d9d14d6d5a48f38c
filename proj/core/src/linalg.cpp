#include "catsense/linalg.hpp"

#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace catsense {

namespace pauli {

const Eigen::Matrix2cd& identity() {
  static const Eigen::Matrix2cd m = Eigen::Matrix2cd::Identity();
  return m;
}

const Eigen::Matrix2cd& x() {
  static const Eigen::Matrix2cd m = (Eigen::Matrix2cd() << 0, 1, 1, 0).finished();
  return m;
}

const Eigen::Matrix2cd& y() {
  static const Eigen::Matrix2cd m =
      (Eigen::Matrix2cd() << 0, Complex(0, -1), Complex(0, 1), 0).finished();
  return m;
}

const Eigen::Matrix2cd& z() {
  static const Eigen::Matrix2cd m = (Eigen::Matrix2cd() << 1, 0, 0, -1).finished();
  return m;
}

}  // namespace pauli

int sites_from_dim(Eigen::Index dim) {
  if (dim < 2 || (dim & (dim - 1)) != 0) {
    std::ostringstream msg;
    msg << "dimension " << dim << " is not 2^N for N >= 1";
    throw std::invalid_argument(msg.str());
  }
  int n = 0;
  while ((Eigen::Index(1) << n) < dim) ++n;
  return n;
}

double hermiticity_error(const Matrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("hermiticity_error: non-square matrix");
  double err = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i <= j; ++i)
      err = std::max(err, std::abs(m(i, j) - std::conj(m(j, i))));
  return err;
}

bool is_hermitian(const Matrix& m, double tol) {
  return m.rows() == m.cols() && hermiticity_error(m) <= tol;
}

Matrix kron_embed(const Eigen::Matrix2cd& site_op, int site, int n_sites) {
  if (site < 0 || site >= n_sites)
    throw std::invalid_argument("kron_embed: site index out of range");
  const Eigen::Index dim = Eigen::Index(1) << n_sites;
  Matrix out = Matrix::Zero(dim, dim);
  const std::uint64_t bit = 1ULL << (n_sites - 1 - site);
  for (std::uint64_t x = 0; x < static_cast<std::uint64_t>(dim); ++x) {
    const int bx = (x & bit) ? 1 : 0;
    out(x, x) = site_op(bx, bx);
    out(x ^ bit, x) = site_op(1 - bx, bx);
  }
  return out;
}

Matrix commutator(const Matrix& x, const Matrix& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols() || x.rows() != x.cols())
    throw std::invalid_argument("commutator: dimension mismatch");
  return x * y - y * x;
}

Matrix nested_commutator(const Matrix& x, const Matrix& y, int order) {
  if (order < 0) throw std::invalid_argument("nested_commutator: negative order");
  Matrix out = y;
  for (int k = 0; k < order; ++k) out = commutator(x, out);
  return out;
}

EighResult eigh(const Matrix& h, double tol) {
  if (!is_hermitian(h, tol)) throw std::invalid_argument("eigh: input is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigh: solver failed");
  return EighResult{solver.eigenvalues(), solver.eigenvectors()};
}

double op_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() == m.cols() && is_hermitian(m, 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff()))) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
  }
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

void apply_site_left(Matrix& m, const Eigen::Matrix2cd& g, int site) {
  const int n = sites_from_dim(m.rows());
  const std::uint64_t bit = 1ULL << (n - 1 - site);
  const Eigen::Index dim = m.rows();
  for (Eigen::Index c = 0; c < dim; ++c) {
    for (std::uint64_t x = 0; x < static_cast<std::uint64_t>(dim); ++x) {
      if (x & bit) continue;
      const Complex a = m(x, c);
      const Complex b = m(x | bit, c);
      m(x, c) = g(0, 0) * a + g(0, 1) * b;
      m(x | bit, c) = g(1, 0) * a + g(1, 1) * b;
    }
  }
}

void apply_site_right(Matrix& m, const Eigen::Matrix2cd& g, int site) {
  const int n = sites_from_dim(m.cols());
  const std::uint64_t bit = 1ULL << (n - 1 - site);
  const Eigen::Index dim = m.cols();
  for (std::uint64_t c = 0; c < static_cast<std::uint64_t>(dim); ++c) {
    if (c & bit) continue;
    for (Eigen::Index x = 0; x < m.rows(); ++x) {
      const Complex a = m(x, c);
      const Complex b = m(x, c | bit);
      m(x, c) = a * g(0, 0) + b * g(1, 0);
      m(x, c | bit) = a * g(0, 1) + b * g(1, 1);
    }
  }
}

PureState::PureState(Vector amplitudes, double tol) : amps_(std::move(amplitudes)) {
  n_sites_ = sites_from_dim(amps_.size());
  const double norm = amps_.norm();
  if (std::abs(norm - 1.0) > tol) {
    std::ostringstream msg;
    msg << "PureState: norm " << norm << " deviates from 1 beyond tol " << tol;
    throw std::invalid_argument(msg.str());
  }
}

DensityMatrix::DensityMatrix(Matrix rho, double tol) : rho_(std::move(rho)), tol_(tol) {
  if (rho_.rows() != rho_.cols()) throw std::invalid_argument("DensityMatrix: non-square");
  n_sites_ = sites_from_dim(rho_.rows());
  const double herm = hermiticity_error(rho_);
  if (herm > tol_) {
    std::ostringstream msg;
    msg << "DensityMatrix: Hermiticity error " << herm << " exceeds tol " << tol_;
    throw std::invalid_argument(msg.str());
  }
  const Complex tr = rho_.trace();
  if (std::abs(tr - Complex(1.0, 0.0)) > tol_) {
    std::ostringstream msg;
    msg << "DensityMatrix: trace " << tr.real() << " deviates from 1 beyond tol " << tol_;
    throw std::invalid_argument(msg.str());
  }
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi) {
  const Vector& a = psi.amplitudes();
  return DensityMatrix(a * a.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(int n_sites) {
  const Eigen::Index dim = Eigen::Index(1) << n_sites;
  return DensityMatrix(Matrix::Identity(dim, dim) / static_cast<double>(dim));
}

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(rho_, Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

Projector::Projector(Matrix op, double tol) : op_(std::move(op)) {
  if (op_.rows() != op_.cols()) throw std::invalid_argument("Projector: non-square");
  const double herm = hermiticity_error(op_);
  if (herm > tol) throw std::invalid_argument("Projector: not Hermitian within tol");
  const double idem = (op_ * op_ - op_).cwiseAbs().maxCoeff();
  if (idem > tol) {
    std::ostringstream msg;
    msg << "Projector: idempotency error " << idem << " exceeds tol " << tol;
    throw std::invalid_argument(msg.str());
  }
}

Projector Projector::from_span(const Matrix& v, double tol) {
  if (v.cols() == 0) return Projector(Matrix::Zero(v.rows(), v.rows()), Trusted{});
  const double ortho = (v.adjoint() * v - Matrix::Identity(v.cols(), v.cols()))
                           .cwiseAbs()
                           .maxCoeff();
  if (ortho > tol * static_cast<double>(v.rows()))
    throw std::invalid_argument("Projector::from_span: columns are not orthonormal");
  return Projector(v * v.adjoint(), Trusted{});
}

Projector Projector::from_diagonal(const std::vector<bool>& keep) {
  const Eigen::Index dim = static_cast<Eigen::Index>(keep.size());
  Matrix m = Matrix::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    if (keep[i]) m(i, i) = 1.0;
  return Projector(std::move(m), Trusted{});
}

Projector Projector::trusted(Matrix op) { return Projector(std::move(op), Trusted{}); }

Projector Projector::identity(int n_sites) {
  const Eigen::Index dim = Eigen::Index(1) << n_sites;
  return Projector(Matrix::Identity(dim, dim), Trusted{});
}

Eigen::Index Projector::rank() const {
  return static_cast<Eigen::Index>(std::llround(op_.trace().real()));
}

namespace {

// Eigendecomposition of a Hermitian involution, snapping eigenvalues to +-1.
// Diagonal inputs keep the computational order (rotation = identity) so that
// diagonal observables stay diagonal-fast.
struct SiteEig {
  Eigen::Matrix2cd rotation;
  std::array<int, 2> eigs;
  bool diagonal;
};

SiteEig site_eig(const Eigen::Matrix2cd& a, double tol, int site) {
  const double herm = (a - a.adjoint()).cwiseAbs().maxCoeff();
  if (herm > tol) {
    std::ostringstream msg;
    msg << "AdditiveObservable: site operator " << site << " is not Hermitian";
    throw std::invalid_argument(msg.str());
  }
  const double invol = (a * a - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff();
  if (invol > tol) {
    std::ostringstream msg;
    msg << "AdditiveObservable: site operator " << site
        << " is not an involution (a^2 != 1), error " << invol;
    throw std::invalid_argument(msg.str());
  }

  SiteEig out;
  if (std::abs(a(0, 1)) <= tol && std::abs(a(1, 0)) <= tol) {
    out.rotation = Eigen::Matrix2cd::Identity();
    out.eigs = {a(0, 0).real() >= 0 ? 1 : -1, a(1, 1).real() >= 0 ? 1 : -1};
    out.diagonal = true;
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> solver(a);
  out.rotation = solver.eigenvectors();
  out.eigs = {solver.eigenvalues()(0) >= 0 ? 1 : -1,
              solver.eigenvalues()(1) >= 0 ? 1 : -1};
  out.diagonal = false;
  return out;
}

}  // namespace

AdditiveObservable::AdditiveObservable(std::vector<Eigen::Matrix2cd> site_ops, double tol)
    : site_ops_(std::move(site_ops)) {
  const int n = n_sites();
  if (n < 1) throw std::invalid_argument("AdditiveObservable: needs at least one site");
  if (n > 24) throw std::invalid_argument("AdditiveObservable: dense workflows cap at 24 sites");

  rotations_.reserve(n);
  site_eigs_.reserve(n);
  int max_sum = 0, min_sum = 0;
  for (int l = 0; l < n; ++l) {
    SiteEig se = site_eig(site_ops_[l], tol, l);
    rotations_.push_back(se.rotation);
    site_eigs_.push_back(se.eigs);
    is_diagonal_ = is_diagonal_ && se.diagonal;
    max_sum += std::max(se.eigs[0], se.eigs[1]);
    min_sum += std::min(se.eigs[0], se.eigs[1]);
    if (se.eigs[0] != se.eigs[1]) active_mask_ |= 1ULL << (n - 1 - l);
  }
  op_norm_ = std::max(std::abs(max_sum), std::abs(min_sum));

  const std::uint64_t dim = 1ULL << n;
  spectrum_.resize(dim);
  for (std::uint64_t x = 0; x < dim; ++x) {
    int d = 0;
    for (int l = 0; l < n; ++l) d += site_eigs_[l][site_bit(x, l, n)];
    spectrum_[x] = d;
  }
}

AdditiveObservable AdditiveObservable::mz(int n_sites) {
  return uniform(pauli::z(), n_sites);
}
AdditiveObservable AdditiveObservable::mx(int n_sites) {
  return uniform(pauli::x(), n_sites);
}
AdditiveObservable AdditiveObservable::my(int n_sites) {
  return uniform(pauli::y(), n_sites);
}

AdditiveObservable AdditiveObservable::uniform(const Eigen::Matrix2cd& site_op, int n_sites) {
  return AdditiveObservable(std::vector<Eigen::Matrix2cd>(n_sites, site_op));
}

Matrix AdditiveObservable::total() const {
  const Eigen::Index d = dim();
  Matrix out = Matrix::Zero(d, d);
  for (int l = 0; l < n_sites(); ++l) out += kron_embed(site_ops_[l], l, n_sites());
  return out;
}

Matrix AdditiveObservable::to_eigenbasis(Matrix m) const {
  if (is_diagonal_) return m;
  for (int l = 0; l < n_sites(); ++l) {
    const Eigen::Matrix2cd rd = rotations_[l].adjoint();
    apply_site_left(m, rd, l);
    apply_site_right(m, rotations_[l], l);
  }
  return m;
}

Matrix AdditiveObservable::from_eigenbasis(Matrix m) const {
  if (is_diagonal_) return m;
  for (int l = 0; l < n_sites(); ++l) {
    apply_site_left(m, rotations_[l], l);
    const Eigen::Matrix2cd rd = rotations_[l].adjoint();
    apply_site_right(m, rd, l);
  }
  return m;
}

Vector AdditiveObservable::to_eigenbasis(Vector v) const {
  if (is_diagonal_) return v;
  const int n = n_sites();
  for (int l = 0; l < n; ++l) {
    const Eigen::Matrix2cd rd = rotations_[l].adjoint();
    const std::uint64_t bit = 1ULL << (n - 1 - l);
    for (std::uint64_t x = 0; x < static_cast<std::uint64_t>(v.size()); ++x) {
      if (x & bit) continue;
      const Complex a = v(x);
      const Complex b = v(x | bit);
      v(x) = rd(0, 0) * a + rd(0, 1) * b;
      v(x | bit) = rd(1, 0) * a + rd(1, 1) * b;
    }
  }
  return v;
}

}  // namespace catsense
