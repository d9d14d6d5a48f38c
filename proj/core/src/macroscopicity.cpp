#include "catsense/macroscopicity.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "catsense/errors.hpp"

namespace catsense {

Matrix double_commutator_operator(const DensityMatrix& rho, const AdditiveObservable& a) {
  if (rho.dim() != a.dim())
    throw std::invalid_argument("double_commutator: dimension mismatch");
  Matrix m = a.to_eigenbasis(rho.matrix());
  const std::vector<int>& d = a.spectrum();
  const Eigen::Index dim = m.rows();
  for (Eigen::Index y = 0; y < dim; ++y)
    for (Eigen::Index x = 0; x < dim; ++x) {
      const double gap = static_cast<double>(d[x] - d[y]);
      m(x, y) *= gap * gap;
    }
  return a.from_eigenbasis(std::move(m));
}

EighResult double_commutator_spectrum(const DensityMatrix& rho, const AdditiveObservable& a) {
  Matrix d = double_commutator_operator(rho, a);
  const double scale = std::max(1.0, d.cwiseAbs().maxCoeff());
  EighResult res = eigh(d, 1e-9 * scale * static_cast<double>(d.rows()));
  const double trace = res.eigenvalues.sum();
  if (std::abs(trace) > 1e-8 * scale * static_cast<double>(d.rows()))
    throw NumericalError("double_commutator_spectrum: nonzero trace " + std::to_string(trace));
  return res;
}

EighResult double_commutator_spectrum_low_rank(const LowRankState& state,
                                               const AdditiveObservable& a) {
  const Eigen::Index dim = a.dim();
  const std::vector<int>& d = a.spectrum();
  const std::size_t r = state.vectors.size();
  if (r == 0) return EighResult{RealVector(0), Matrix(dim, 0)};

  // Basis of the invariant subspace: {v, Dv, D^2 v} per vector, in the
  // observable eigenbasis where D = diag(spectrum).
  Matrix basis(dim, 3 * r);
  Matrix p(dim, r), q(dim, r), s(dim, r);
  for (std::size_t i = 0; i < r; ++i) {
    Vector v = a.to_eigenbasis(Vector(state.vectors[i]));
    if (v.size() != dim)
      throw std::invalid_argument("double_commutator_spectrum_low_rank: dimension mismatch");
    p.col(i) = v;
    for (Eigen::Index x = 0; x < dim; ++x) {
      q(x, i) = v(x) * static_cast<double>(d[x]);
      s(x, i) = v(x) * static_cast<double>(d[x]) * static_cast<double>(d[x]);
    }
    basis.col(3 * i) = p.col(i);
    basis.col(3 * i + 1) = q.col(i);
    basis.col(3 * i + 2) = s.col(i);
  }

  Eigen::ColPivHouseholderQR<Matrix> qr(basis);
  qr.setThreshold(1e-12);
  const Eigen::Index rank = qr.rank();
  Matrix sub = qr.householderQ() * Matrix::Identity(dim, rank);

  // D restricted to the subspace: sum_i w_i (s p^+ - 2 q q^+ + p s^+).
  Matrix ps = sub.adjoint() * p;
  Matrix qs = sub.adjoint() * q;
  Matrix ss = sub.adjoint() * s;
  Matrix dsmall = Matrix::Zero(rank, rank);
  for (std::size_t i = 0; i < r; ++i) {
    const double w = state.weights[i];
    dsmall += w * (ss.col(i) * ps.col(i).adjoint() - 2.0 * qs.col(i) * qs.col(i).adjoint() +
                   ps.col(i) * ss.col(i).adjoint());
  }
  dsmall = 0.5 * (dsmall + dsmall.adjoint().eval());

  Eigen::SelfAdjointEigenSolver<Matrix> solver(dsmall);
  Matrix vecs_eigenbasis = sub * solver.eigenvectors();

  // Rotate eigenvectors back to the computational basis, column by column.
  Matrix vecs(dim, rank);
  if (a.is_diagonal()) {
    vecs = vecs_eigenbasis;
  } else {
    const int n = a.n_sites();
    for (Eigen::Index c = 0; c < rank; ++c) {
      Vector col = vecs_eigenbasis.col(c);
      for (int l = 0; l < n; ++l) {
        const Eigen::Matrix2cd& rot = a.site_rotations()[l];
        const std::uint64_t bit = 1ULL << (n - 1 - l);
        for (std::uint64_t x = 0; x < static_cast<std::uint64_t>(dim); ++x) {
          if (x & bit) continue;
          const Complex lo = col(x);
          const Complex hi = col(x | bit);
          col(x) = rot(0, 0) * lo + rot(0, 1) * hi;
          col(x | bit) = rot(1, 0) * lo + rot(1, 1) * hi;
        }
      }
      vecs.col(c) = col;
    }
  }
  return EighResult{solver.eigenvalues(), std::move(vecs)};
}

double positive_cutoff(const EighResult& spectrum, Eigen::Index dim) {
  if (spectrum.eigenvalues.size() == 0) return 0.0;
  const double norm = spectrum.eigenvalues.cwiseAbs().maxCoeff();
  return static_cast<double>(dim) * std::numeric_limits<double>::epsilon() * norm;
}

double positive_eigensum(const EighResult& spectrum, double cutoff) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < spectrum.eigenvalues.size(); ++i)
    if (spectrum.eigenvalues(i) > cutoff) sum += spectrum.eigenvalues(i);
  return sum;
}

Projector optimal_eta_from_spectrum(const EighResult& spectrum, Eigen::Index dim) {
  const double cutoff = positive_cutoff(spectrum, dim);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < spectrum.eigenvalues.size(); ++i)
    if (spectrum.eigenvalues(i) > cutoff) keep.push_back(i);
  Matrix v(dim, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) v.col(k) = spectrum.eigenvectors.col(keep[k]);
  return Projector::from_span(v, 1e-9);
}

Projector optimal_eta(const DensityMatrix& rho, const AdditiveObservable& a) {
  return optimal_eta_from_spectrum(double_commutator_spectrum(rho, a), rho.dim());
}

double cat_value(const DensityMatrix& rho, const AdditiveObservable& a, const Projector& eta,
                 double tol) {
  if (rho.dim() != a.dim() || eta.dim() != a.dim())
    throw std::invalid_argument("cat_value: dimension mismatch");
  const Matrix rho_e = a.to_eigenbasis(rho.matrix());
  const Matrix eta_e = a.to_eigenbasis(eta.matrix());
  const std::vector<int>& d = a.spectrum();
  const Eigen::Index dim = rho_e.rows();

  // Tr(rho [A,[A,eta]]) = sum_xy (d_x - d_y)^2 eta_yx rho_xy with
  // eta_yx = conj(eta_xy) for Hermitian eta.
  Complex acc(0.0, 0.0);
  for (Eigen::Index y = 0; y < dim; ++y)
    for (Eigen::Index x = 0; x < dim; ++x) {
      const double gap = static_cast<double>(d[x] - d[y]);
      acc += gap * gap * std::conj(eta_e(x, y)) * rho_e(x, y);
    }
  if (std::abs(acc.imag()) > tol * (1.0 + std::abs(acc.real()))) {
    std::ostringstream msg;
    msg << "cat_value: imaginary residual " << acc.imag() << " exceeds tolerance";
    throw NumericalError(msg.str());
  }
  return acc.real();
}

nlohmann::json CatDiagnostic::to_json() const {
  nlohmann::json j;
  j["state"] = state_label;
  j["observable"] = observable_label;
  j["n"] = n_sites;
  j["positive_eigensum"] = positive_eigensum;
  j["cat_value"] = cat_value;
  j["eta_rank"] = static_cast<long long>(eta_rank);
  return j;
}

CatDiagnostic diagnose(const DensityMatrix& rho, const AdditiveObservable& a,
                       const std::string& state_label, const std::string& observable_label) {
  EighResult spec = double_commutator_spectrum(rho, a);
  const double cutoff = positive_cutoff(spec, rho.dim());
  Projector eta = optimal_eta_from_spectrum(spec, rho.dim());
  CatDiagnostic diag;
  diag.state_label = state_label;
  diag.observable_label = observable_label;
  diag.n_sites = rho.n_sites();
  diag.positive_eigensum = positive_eigensum(spec, cutoff);
  diag.cat_value = cat_value(rho, a, eta);
  diag.eta_rank = eta.rank();
  return diag;
}

CatDiagnostic diagnose_low_rank(const LowRankState& state, const AdditiveObservable& a,
                                const std::string& state_label,
                                const std::string& observable_label) {
  EighResult spec = double_commutator_spectrum_low_rank(state, a);
  const double cutoff = positive_cutoff(spec, a.dim());
  Projector eta = optimal_eta_from_spectrum(spec, a.dim());

  // cat_value = Tr(rho [A,[A,eta]]) evaluated through the decomposition:
  // sum_i w_i <v_i|[A,[A,eta]]|v_i>; the identity part contributes zero.
  const Matrix eta_e = a.to_eigenbasis(eta.matrix());
  const std::vector<int>& d = a.spectrum();
  const Eigen::Index dim = a.dim();
  Complex acc(0.0, 0.0);
  for (std::size_t i = 0; i < state.vectors.size(); ++i) {
    const Vector v = a.to_eigenbasis(Vector(state.vectors[i]));
    // <v|[A,[A,eta]]|v> = sum_xy conj(v_x) (d_x - d_y)^2 eta_xy v_y
    Complex term(0.0, 0.0);
    for (Eigen::Index y = 0; y < dim; ++y)
      for (Eigen::Index x = 0; x < dim; ++x) {
        const double gap = static_cast<double>(d[x] - d[y]);
        term += std::conj(v(x)) * gap * gap * eta_e(x, y) * v(y);
      }
    acc += state.weights[i] * term;
  }
  if (std::abs(acc.imag()) > 1e-8 * (1.0 + std::abs(acc.real())))
    throw NumericalError("diagnose_low_rank: imaginary residual in cat value");

  CatDiagnostic diag;
  diag.state_label = state_label;
  diag.observable_label = observable_label;
  diag.n_sites = state.n_sites;
  diag.positive_eigensum = positive_eigensum(spec, cutoff);
  diag.cat_value = acc.real();
  diag.eta_rank = eta.rank();
  return diag;
}

nlohmann::json QFit::to_json() const {
  nlohmann::json j;
  j["n_values"] = n_values;
  j["values"] = values;
  j["slope"] = slope;
  j["intercept"] = intercept;
  j["r_squared"] = r_squared;
  return j;
}

QFit q_fit(const std::vector<int>& n_values, const std::vector<double>& positive_eigensums) {
  if (n_values.size() < 3 || n_values.size() != positive_eigensums.size())
    throw std::invalid_argument("q_fit: needs >= 3 matched (N, value) points");
  QFit fit;
  fit.n_values = n_values;
  fit.values.reserve(n_values.size());

  const std::size_t m = n_values.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double clamped = std::max(static_cast<double>(n_values[i]), positive_eigensums[i]);
    fit.values.push_back(clamped);
    const double x = std::log(static_cast<double>(n_values[i]));
    const double y = std::log(clamped);
    sx += x; sy += y; sxx += x * x; sxy += x * y; syy += y * y;
  }
  const double n = static_cast<double>(m);
  const double denom = n * sxx - sx * sx;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  const double ss_tot = syy - sy * sy / n;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double x = std::log(static_cast<double>(n_values[i]));
    const double y = std::log(fit.values[i]);
    const double e = y - (fit.intercept + fit.slope * x);
    ss_res += e * e;
  }
  fit.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

}  // namespace catsense
