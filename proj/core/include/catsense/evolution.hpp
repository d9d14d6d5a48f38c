#pragma once

#include <optional>

#include "catsense/linalg.hpp"

namespace catsense {

/// Classical Gaussian noise: amplitude lambda (rad/s per unit f) and
/// correlation time tau_c (s). With regime_check on, time arguments are
/// required to sit in the Zeno regime t <= tau_c / 10.
struct NoiseModel {
  double lambda = 0.0;
  double tau_c = 1.0;
  bool regime_check = false;

  void validate() const;
  void check_regime(double t) const;

  /// Per-site coherence factor c(t) = exp(-2 lambda^2 t^2) (Zeno form).
  double coherence_factor(double t) const;
};

/// T2 <-> lambda: single-site coherence decays as exp(-(t/T2)^2) with
/// T2 = 1 / (sqrt(2) lambda).
double t2_from_lambda(double lambda);
double lambda_from_t2(double t2);

/// One evolution leg: total Zeeman frequency omega = omega0 + omega_prime,
/// interaction time, and an optional noise model.
struct EvolutionConfig {
  double omega = 0.0;
  double t = 0.0;
  std::optional<NoiseModel> noise;

  void validate() const;
};

/// exp(-i omega A t) rho exp(+i omega A t); elementwise phases in the
/// observable eigenbasis.
DensityMatrix phase_evolve(const DensityMatrix& rho, const AdditiveObservable& a, double omega,
                           double t);

/// Independent dephasing of every site: in the observable eigenbasis the
/// entry rho_xy is scaled by c^k, k the number of sites whose eigenvalues
/// differ between x and y. Trace-preserving, completely positive, unital.
DensityMatrix dephase(const DensityMatrix& rho, const AdditiveObservable& a, double lambda,
                      double t);

/// Reference form of the same channel: sequential per-site Kraus maps
/// eps_j(rho) = p rho + (1-p) a(j) rho a(j), p = (1 + c)/2. Quadratically
/// slower; kept as the cross-check route.
DensityMatrix dephase_sequential(const DensityMatrix& rho, const AdditiveObservable& a,
                                 double lambda, double t);

/// Dephase then phase-evolve (the two maps commute).
DensityMatrix evolve_full(const DensityMatrix& rho, const AdditiveObservable& a, double omega,
                          double lambda, double t);
DensityMatrix evolve_full(const DensityMatrix& rho, const AdditiveObservable& a,
                          const EvolutionConfig& config);

struct PhaseSeries {
  Matrix series;
  double remainder_bound;  // tail bound sum_{k>k_max} (2 |omega| t ||A||)^k / k!
};

/// Truncation of exp(i omega A t) eta exp(-i omega A t)
///   = sum_k ((i omega t)^k / k!) [A, eta]_k.
PhaseSeries bch_phase_series(const Projector& eta, const AdditiveObservable& a, double omega,
                             double t, int k_max);

}  // namespace catsense
