#pragma once

#include <cstdint>
#include <vector>

#include "catsense/linalg.hpp"

namespace catsense {

/// Stationary Ornstein-Uhlenbeck samples f(k dt), k = 0..n_steps-1, with
/// unit variance and autocorrelation exp(-|t - t'| / tau_c). Exact AR(1)
/// discretization: f_{k+1} = alpha f_k + sqrt(1 - alpha^2) xi_k,
/// alpha = exp(-dt / tau_c), f_0 ~ N(0, 1).
struct OUTrajectory {
  double dt;
  std::vector<double> values;
  std::uint64_t seed;
};

OUTrajectory ou_sample(double tau_c, double dt, int n_steps, std::uint64_t seed);

/// Monte Carlo mean with its standard error. For complex means the error
/// combines both components: sqrt((var_re + var_im) / n_traj).
struct MCEstimate {
  Complex mean;
  double std_err;
  int n_traj;
};

/// E[exp(-2 i lambda Phi)], Phi the left-Riemann integral of one OU path
/// over [0, t]. The exact Gaussian value is exp(-2 lambda^2 chi(t)) with
/// chi(t) = 2 [tau_c t - tau_c^2 (1 - exp(-t / tau_c))]; chi -> t^2 in the
/// Zeno regime and -> 2 tau_c t in the Markovian limit.
MCEstimate coherence_mc(double lambda, double tau_c, double t, double dt, int n_traj,
                        std::uint64_t seed);

double chi_correlation_integral(double tau_c, double t);
double coherence_closed_form(double lambda, double tau_c, double t);
double coherence_zeno(double lambda, double t);

/// Trajectory-averaged dephasing: per trajectory one independent OU path
/// per site, a phase unitary (x)_l exp(-i lambda Phi_l a(l)), then the
/// plain average of the resulting states. Capped at N <= 6.
/// Statistics are reported in the observable eigenbasis (where the channel
/// acts elementwise); for sigma_z sites that is the computational basis.
struct MCChannelStats {
  Matrix mean_eigenbasis;
  Eigen::MatrixXd stderr_re;
  Eigen::MatrixXd stderr_im;
  int n_traj;
};

MCChannelStats mc_dephase_stats(const DensityMatrix& rho0, const AdditiveObservable& a,
                                double lambda, double tau_c, double t, double dt, int n_traj,
                                std::uint64_t seed);

DensityMatrix mc_dephase(const DensityMatrix& rho0, const AdditiveObservable& a, double lambda,
                         double tau_c, double t, double dt, int n_traj, std::uint64_t seed);

}  // namespace catsense
