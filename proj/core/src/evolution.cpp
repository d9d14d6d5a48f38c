#include "catsense/evolution.hpp"

#include <bit>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace catsense {

void NoiseModel::validate() const {
  if (lambda < 0.0) throw std::invalid_argument("NoiseModel: lambda must be >= 0");
  if (tau_c <= 0.0) throw std::invalid_argument("NoiseModel: tau_c must be > 0");
}

void NoiseModel::check_regime(double t) const {
  if (regime_check && t > tau_c / 10.0) {
    std::ostringstream msg;
    msg << "NoiseModel: t = " << t << " is outside the Zeno regime (tau_c/10 = " << tau_c / 10.0
        << ")";
    throw std::domain_error(msg.str());
  }
}

double NoiseModel::coherence_factor(double t) const {
  validate();
  check_regime(t);
  return std::exp(-2.0 * lambda * lambda * t * t);
}

double t2_from_lambda(double lambda) {
  if (lambda <= 0.0) throw std::invalid_argument("t2_from_lambda: lambda must be > 0");
  return 1.0 / (std::sqrt(2.0) * lambda);
}

double lambda_from_t2(double t2) {
  if (t2 <= 0.0) throw std::invalid_argument("lambda_from_t2: T2 must be > 0");
  return 1.0 / (std::sqrt(2.0) * t2);
}

void EvolutionConfig::validate() const {
  if (t < 0.0) throw std::invalid_argument("EvolutionConfig: t must be >= 0");
  if (noise) {
    noise->validate();
    noise->check_regime(t);
  }
}

namespace {

void require_time(double t) {
  if (t < 0.0) throw std::invalid_argument("evolution: t must be >= 0");
}

// Shared elementwise kernel in the observable eigenbasis. Applies
// rho_xy *= c^flips(x,y) * exp(-i omega t (d_x - d_y)).
DensityMatrix evolve_elementwise(const DensityMatrix& rho, const AdditiveObservable& a,
                                 double omega, double lambda, double t) {
  if (rho.dim() != a.dim()) throw std::invalid_argument("evolution: dimension mismatch");
  require_time(t);
  const double c = std::exp(-2.0 * lambda * lambda * t * t);

  Matrix m = a.to_eigenbasis(rho.matrix());
  const Eigen::Index dim = m.rows();
  const std::vector<int>& d = a.spectrum();
  const std::uint64_t mask = a.active_mask();

  std::vector<double> cpow(static_cast<std::size_t>(a.n_sites()) + 1, 1.0);
  for (std::size_t k = 1; k < cpow.size(); ++k) cpow[k] = cpow[k - 1] * c;

  std::vector<Complex> phase(dim);
  for (Eigen::Index x = 0; x < dim; ++x)
    phase[x] = std::polar(1.0, -omega * t * static_cast<double>(d[x]));

  for (std::uint64_t y = 0; y < static_cast<std::uint64_t>(dim); ++y)
    for (std::uint64_t x = 0; x < static_cast<std::uint64_t>(dim); ++x) {
      const int flips = std::popcount((x ^ y) & mask);
      m(x, y) *= cpow[flips] * phase[x] * std::conj(phase[y]);
    }

  return DensityMatrix(a.from_eigenbasis(std::move(m)), rho.tolerance());
}

}  // namespace

DensityMatrix phase_evolve(const DensityMatrix& rho, const AdditiveObservable& a, double omega,
                           double t) {
  return evolve_elementwise(rho, a, omega, 0.0, t);
}

DensityMatrix dephase(const DensityMatrix& rho, const AdditiveObservable& a, double lambda,
                      double t) {
  if (lambda < 0.0) throw std::invalid_argument("dephase: lambda must be >= 0");
  return evolve_elementwise(rho, a, 0.0, lambda, t);
}

DensityMatrix dephase_sequential(const DensityMatrix& rho, const AdditiveObservable& a,
                                 double lambda, double t) {
  if (rho.dim() != a.dim()) throw std::invalid_argument("dephase: dimension mismatch");
  if (lambda < 0.0) throw std::invalid_argument("dephase: lambda must be >= 0");
  require_time(t);
  const double c = std::exp(-2.0 * lambda * lambda * t * t);
  const double p = (1.0 + c) / 2.0;

  Matrix m = rho.matrix();
  for (int l = 0; l < a.n_sites(); ++l) {
    Matrix flipped = m;
    apply_site_left(flipped, a.site_ops()[l], l);
    apply_site_right(flipped, a.site_ops()[l], l);
    m = p * m + (1.0 - p) * flipped;
  }
  return DensityMatrix(std::move(m), rho.tolerance());
}

DensityMatrix evolve_full(const DensityMatrix& rho, const AdditiveObservable& a, double omega,
                          double lambda, double t) {
  if (lambda < 0.0) throw std::invalid_argument("evolve_full: lambda must be >= 0");
  return evolve_elementwise(rho, a, omega, lambda, t);
}

DensityMatrix evolve_full(const DensityMatrix& rho, const AdditiveObservable& a,
                          const EvolutionConfig& config) {
  config.validate();
  const double lambda = config.noise ? config.noise->lambda : 0.0;
  return evolve_elementwise(rho, a, config.omega, lambda, config.t);
}

PhaseSeries bch_phase_series(const Projector& eta, const AdditiveObservable& a, double omega,
                             double t, int k_max) {
  if (k_max < 0) throw std::invalid_argument("bch_phase_series: k_max must be >= 0");
  if (eta.dim() != a.dim()) throw std::invalid_argument("bch_phase_series: dimension mismatch");
  require_time(t);

  const Matrix atot = a.total();
  Matrix term = eta.matrix();  // [A, eta]_0
  Matrix sum = term;
  Complex coef(1.0, 0.0);
  const Complex iwt(0.0, omega * t);
  for (int k = 1; k <= k_max; ++k) {
    term = commutator(atot, term);
    coef *= iwt / static_cast<double>(k);
    sum += coef * term;
  }

  // Tail of sum_k z^k / k! past k_max, z = 2 |omega| t ||A||, using
  // |Tr(rho [A, eta]_k)| <= 2^k ||A||^k scaling of the terms.
  const double z = 2.0 * std::abs(omega) * t * a.op_norm();
  double head = 1.0, factorial_term = 1.0;
  for (int k = 1; k <= k_max; ++k) {
    factorial_term *= z / static_cast<double>(k);
    head += factorial_term;
  }
  const double remainder = std::exp(z) - head;
  return PhaseSeries{std::move(sum), std::max(remainder, 0.0)};
}

}  // namespace catsense
