#pragma once

#include <functional>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "catsense/evolution.hpp"
#include "catsense/linalg.hpp"

namespace catsense {

/// Ramsey working point. omega = omega0 + omega_prime with the target shift
/// omega_prime probed in the ->0 limit; p2 = omega * t_int * N is the phase
/// budget of the protocol.
struct RamseyConfig {
  double omega0 = 0.0;
  double omega_prime = 0.0;
  double t_int = 0.1;
  double T_total = 1.0;
  double p2 = 0.1;

  double omega() const { return omega0 + omega_prime; }
  void validate() const;
};

struct SensitivityReport {
  double probability = 0.0;
  double dP_domega = 0.0;
  double delta_omega_sqrtT = 0.0;
  double bound_lower_dPdw = 0.0;
  std::optional<double> bound_upper_delta;
  std::optional<double> t_opt;

  nlohmann::json to_json() const;
};

/// P = Tr(eta rho(t)) with rho(t) the dephased, phase-evolved input.
/// Clamped to [0, 1]; throws NumericalError if it falls outside by more
/// than tol.
double ramsey_probability(const DensityMatrix& rho0, const AdditiveObservable& a,
                          const Projector& eta, double omega, double lambda, double t,
                          double tol = 1e-8);

/// Exact derivative dP/domega = Re(i t Tr(rho(t) [A, eta])); valid because
/// the dephasing channel commutes with the phase unitary.
double dPdw_analytic(const DensityMatrix& rho0, const AdditiveObservable& a,
                     const Projector& eta, double omega, double lambda, double t,
                     double tol = 1e-8);

/// delta_omega = sqrt(P(1-P)) / |dP/dw| / sqrt(T/t). Throws NumericalError
/// on a degenerate working point (dPdw == 0).
double uncertainty(double probability, double dPdw, double t, double T);

/// Noiseless lower bound on |dP/domega|:
///   | |w t^2 Tr(rho[A,[A,eta]])| - |i t Tr(rho[A,eta])| |
///   - 2 t ||A|| (e^{2 w t ||A||} - 1 - 2 w t ||A||).
/// May be negative (vacuous). Evaluated on the initial state.
double dPdw_lower_bound(const DensityMatrix& rho0, const AdditiveObservable& a,
                        const Projector& eta, double omega, double t);

enum class UMode { Numeric, P1P2 };

/// Dephased upper bound on delta_omega * sqrt(T):
///   (N sqrt(t))^{-1} [ U W^N - 2 e^{2wt||A||} (||A||/N)(1 - W^N) ]^{-1},
/// W = (1 + e^{-2 lambda^2 t^2})/2. UMode::Numeric computes U from the
/// state's commutator traces; UMode::P1P2 uses the constant-budget form
/// U = p1 * p2^2 with an externally estimated p1. Returns nullopt when the
/// bracket is not positive (vacuous bound).
std::optional<double> delta_upper_bound_dephasing(const DensityMatrix& rho0,
                                                  const AdditiveObservable& a,
                                                  const Projector& eta, double omega,
                                                  double lambda, double t,
                                                  UMode mode = UMode::Numeric, double p1 = 0.0);

/// Same bound from precomputed initial-state traces Tr(rho [A, eta]) and
/// Tr(rho [A,[A, eta]]) (e.g. straight off a RamseyResponse).
std::optional<double> delta_upper_bound_from_traces(Complex trace_comm, double trace_dcomm,
                                                    int n_sites, double a_norm, double omega,
                                                    double lambda, double t,
                                                    UMode mode = UMode::Numeric,
                                                    double p1 = 0.0);

/// Closed-form dephased GHZ uncertainty delta_omega = e^{N t^2 / T2^2} / (N sqrt(T t)).
double ghz_closed_form(int n_sites, double t, double t2, double T);

struct GhzOptimum {
  double t_opt;             // T2 / (2 sqrt(N))
  double min_delta_sqrtT;   // sqrt(2) e^{1/4} / (N^{3/4} sqrt(T2))
};
GhzOptimum ghz_optimum(int n_sites, double t2);

/// Convention adapter for comparing this simulator (site eigenvalues +-1,
/// GHZ phase 2 N w t) against the half-spin closed form above (phase N w t):
/// relabeling w by a factor 2 doubles the uncertainty.
inline double adapt_delta_to_half_spin_convention(double delta_simulator) {
  return 2.0 * delta_simulator;
}

/// Field-units conversion: delta_B sqrt(T) = delta_omega sqrt(T) / gamma for
/// a user-supplied gyromagnetic constant gamma (rad/s per field unit).
double field_uncertainty(double delta_omega_sqrtT, double gyromagnetic);

/// Pure-state quantum Fisher information for phase estimation:
/// 4 t^2 Var_psi(A). Lower-bounds the single-shot uncertainty via
/// Cramer-Rao: delta_omega * sqrt(T / t_int) >= 1 / sqrt(QFI).
double qfi_pure(const PureState& psi, const AdditiveObservable& a, double t);

/// Precomputed Ramsey response of a (state, observable, readout) triple.
/// In the observable eigenbasis,
///   P(w, lambda, t) = sum_{k,g} B_{k,g} c(t)^k e^{-i w t g},
/// with k the dephasing flip distance, g the eigenvalue gap, and
/// B_{k,g} = sum over matrix-element pairs in that bucket. One O(4^N) pass
/// at construction; every working-point evaluation afterwards is O(N^2).
class RamseyResponse {
 public:
  RamseyResponse(const DensityMatrix& rho0, const AdditiveObservable& a, const Projector& eta);

  int n_sites() const { return n_sites_; }
  double observable_norm() const { return op_norm_; }

  double probability(double omega, double lambda, double t) const;
  double dP_domega(double omega, double lambda, double t) const;
  /// sqrt(P(1-P)) sqrt(t) / |dP/dw|; +inf on a degenerate working point.
  double delta_sqrtT(double omega, double lambda, double t) const;

  /// Tr(rho0 [A, eta]) and Tr(rho0 [A,[A, eta]]) of the *initial* state.
  Complex trace_commutator() const;
  double trace_double_commutator() const;

  struct WorkingPoint {
    double omega;
    double delta_sqrtT;
  };
  /// Minimizes delta over omega at fixed (lambda, t); scans the phase
  /// u = omega t over (0, pi/2] and golden-refines the best bracket.
  WorkingPoint best_working_point(double lambda, double t, int grid_points = 96) const;

 private:
  struct Slice;  // coefficients at fixed (lambda, t)
  Slice slice(double lambda, double t) const;

  int n_sites_ = 0;
  int max_flips_ = 0;
  int gap_min_ = 0;
  int gap_max_ = 0;
  double op_norm_ = 0.0;
  // buckets_[k][g - gap_min_]
  std::vector<std::vector<Complex>> buckets_;
};

/// Derivative-free minimizer: log-spaced coarse grid on [t_lo, t_hi]
/// followed by golden-section refinement to 1e-6 relative. When the grid
/// minimum sits on the boundary the edge value is returned with
/// interior_minimum = false. Throws NumericalError if the objective is not
/// finite anywhere on the grid.
struct OptimizeResult {
  double t_opt;
  double value;
  bool interior_minimum;
};
OptimizeResult optimize_t(const std::function<double(double)>& objective, double t_lo,
                          double t_hi, int grid_points = 60, double rel_tol = 1e-6);

/// omega(t) rules for sweeps.
std::function<double(double)> omega_rule_fixed_p2(double p2, int n_sites);
/// Fixes the extremal phase 2 ||A|| w t = theta.
std::function<double(double)> omega_rule_fixed_phase(double theta, double a_norm);

struct ScalingPoint {
  int n = 0;
  double t_opt = 0.0;
  double omega = 0.0;
  double delta_sqrtT = 0.0;
  std::optional<double> bound_upper;
  std::optional<double> bound_lower;  // Cramer-Rao floor, pure states only
};

struct ScalingFit {
  std::vector<int> n_values;
  std::vector<double> delta_values;
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
  double r_squared = 0.0;

  nlohmann::json to_json() const;
};

struct ScalingStudy {
  std::vector<ScalingPoint> points;
  ScalingFit fit;
};

enum class WorkingPointRule { FixedP2, FixedPhase, Scan };

struct ScalingStudyConfig {
  std::vector<int> n_values;
  double lambda = 0.0;
  double T_total = 1.0;
  WorkingPointRule rule = WorkingPointRule::Scan;
  double rule_value = 0.1;  // p2 or phase theta
  double t_lo = 0.0;        // <= 0: auto from T2 and N
  double t_hi = 0.0;
  int grid_points = 60;
  bool compute_bounds = false;

  std::function<DensityMatrix(int)> state_for_n;
  std::function<AdditiveObservable(int)> observable_for_n;
  std::function<Projector(int, const DensityMatrix&, const AdditiveObservable&)> eta_for_n;
  /// Optional Cramer-Rao floor: variance of A in the (pure) probe state.
  std::function<std::optional<double>(int)> variance_for_n;
};

/// Per-N optimized uncertainty followed by a log-log fit; needs >= 4 sizes.
ScalingStudy scaling_study(const ScalingStudyConfig& config);

/// Log-log fit of closed-form GHZ optima (finite t2) or of the fixed-t
/// noiseless curve (t2 = infinity).
ScalingStudy ghz_closed_form_scaling(const std::vector<int>& n_values, double t2,
                                     double fixed_t = 1.0);

ScalingFit fit_loglog(const std::vector<int>& n_values, const std::vector<double>& values);

/// Empirical estimate of the existential constant p1: the minimum observed
/// |dP/dw| / (p2^2 t N) over a set of working points.
struct P1Sample {
  double dPdw_abs;
  double p2;
  double t;
  int n_sites;
};
double estimate_p1(const std::vector<P1Sample>& samples);

}  // namespace catsense
