#pragma once

// Test-only oracles, all independent of the library's fast evolution and
// bound paths: dense spectral evolution, explicit Kraus-subset enumeration,
// Richardson finite differences, nested quadrature, and a reference
// golden-section minimizer.

#include <cstdint>
#include <functional>
#include <random>

#include "catsense/linalg.hpp"

namespace oracles {

using catsense::AdditiveObservable;
using catsense::Complex;
using catsense::DensityMatrix;
using catsense::Matrix;
using catsense::Projector;
using catsense::Vector;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform(double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
  Complex cnormal() { return Complex(normal(), normal()); }

 private:
  std::mt19937_64 engine_;
};

Matrix random_hermitian(Rng& rng, Eigen::Index dim);
DensityMatrix random_density(Rng& rng, int n_sites);
catsense::PureState random_pure(Rng& rng, int n_sites);
Projector random_projector(Rng& rng, Eigen::Index dim, Eigen::Index rank);

/// Spectral-decomposition evolution U rho U^+, U = exp(-i omega H t), built
/// from a dense Hermitian H via eigh. Independent of the elementwise path.
Matrix evolve_spectral(const Matrix& rho, const Matrix& h, double omega, double t);

/// Full Kraus expansion of the independent dephasing channel: the sum over
/// all 2^N site subsets S of p^(N-|S|) (1-p)^|S| a_S rho a_S.
Matrix dephase_kraus_enumeration(const Matrix& rho, const AdditiveObservable& a, double p);

/// Richardson-extrapolated central difference of f at x with base step h.
double richardson_derivative(const std::function<double(double)>& f, double x, double h);

/// Nested Gauss-Legendre quadrature of the OU covariance
/// int_0^t int_0^t exp(-|u - v| / tau_c) du dv, splitting the inner
/// integral at the |u - v| kink.
double covariance_double_integral(double tau_c, double t, int points = 64);

/// Reference golden-section minimizer on [lo, hi] (assumes unimodal).
double golden_minimize(const std::function<double(double)>& f, double lo, double hi,
                       double tol = 1e-10);

}  // namespace oracles
