#include "catsense/metrology.hpp"

#include <bit>
#include <mutex>
#include <cmath>
#include <limits>
#include <sstream>

#include "catsense/errors.hpp"
#include "catsense/parallel.hpp"

namespace catsense {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct SensingTraces {
  Complex commutator;       // Tr(rho [A, eta])
  double double_commutator; // Tr(rho [A, [A, eta]])
};

// Both traces via elementwise sums in the observable eigenbasis:
// Tr(rho [A,eta])      = sum_xy (d_y - d_x)   conj(eta_xy) rho_xy
// Tr(rho [A,[A,eta]])  = sum_xy (d_x - d_y)^2 conj(eta_xy) rho_xy
SensingTraces sensing_traces(const DensityMatrix& rho, const AdditiveObservable& a,
                             const Projector& eta) {
  if (rho.dim() != a.dim() || eta.dim() != a.dim())
    throw std::invalid_argument("sensing_traces: dimension mismatch");
  const Matrix rho_e = a.to_eigenbasis(rho.matrix());
  const Matrix eta_e = a.to_eigenbasis(eta.matrix());
  const std::vector<int>& d = a.spectrum();
  const Eigen::Index dim = rho_e.rows();

  Complex comm(0.0, 0.0);
  Complex dcomm(0.0, 0.0);
  for (Eigen::Index y = 0; y < dim; ++y)
    for (Eigen::Index x = 0; x < dim; ++x) {
      const Complex z = std::conj(eta_e(x, y)) * rho_e(x, y);
      const double gap = static_cast<double>(d[x] - d[y]);
      comm += -gap * z;
      dcomm += gap * gap * z;
    }
  return SensingTraces{comm, dcomm.real()};
}

}  // namespace

void RamseyConfig::validate() const {
  if (t_int <= 0.0) throw std::invalid_argument("RamseyConfig: t_int must be > 0");
  if (T_total <= 0.0) throw std::invalid_argument("RamseyConfig: T_total must be > 0");
  if (T_total / t_int < 1.0)
    throw std::invalid_argument("RamseyConfig: needs at least one repetition (T >= t_int)");
  if (!(p2 > 0.0 && p2 < 1.0)) throw std::invalid_argument("RamseyConfig: p2 must be in (0, 1)");
}

nlohmann::json SensitivityReport::to_json() const {
  nlohmann::json j;
  j["P"] = probability;
  j["dP_domega"] = dP_domega;
  j["delta_omega_sqrtT"] = delta_omega_sqrtT;
  j["bound_lower_dPdw"] = bound_lower_dPdw;
  j["bound_upper_delta"] = bound_upper_delta ? nlohmann::json(*bound_upper_delta)
                                             : nlohmann::json();
  j["t_opt"] = t_opt ? nlohmann::json(*t_opt) : nlohmann::json();
  return j;
}

double ramsey_probability(const DensityMatrix& rho0, const AdditiveObservable& a,
                          const Projector& eta, double omega, double lambda, double t,
                          double tol) {
  const DensityMatrix rho_t = evolve_full(rho0, a, omega, lambda, t);
  // Tr(eta rho) = sum_xy eta_xy rho_yx = sum_xy eta_xy conj(rho_xy)
  const Complex tr = eta.matrix().cwiseProduct(rho_t.matrix().conjugate()).sum();
  const double p = tr.real();
  if (std::abs(tr.imag()) > tol || p < -tol || p > 1.0 + tol) {
    std::ostringstream msg;
    msg << "ramsey_probability: value " << p << " (imag " << tr.imag()
        << ") outside [0,1] beyond tolerance";
    throw NumericalError(msg.str());
  }
  return std::min(1.0, std::max(0.0, p));
}

double dPdw_analytic(const DensityMatrix& rho0, const AdditiveObservable& a,
                     const Projector& eta, double omega, double lambda, double t, double tol) {
  const DensityMatrix rho_t = evolve_full(rho0, a, omega, lambda, t);
  const SensingTraces traces = sensing_traces(rho_t, a, eta);
  // dP/dw = i t Tr(rho(t) [A, eta]); the trace is purely imaginary for
  // Hermitian inputs, so the derivative is real.
  const Complex val = Complex(0.0, t) * traces.commutator;
  if (std::abs(val.imag()) > tol * (1.0 + std::abs(val.real())))
    throw NumericalError("dPdw_analytic: imaginary residual exceeds tolerance");
  return val.real();
}

double uncertainty(double probability, double dPdw, double t, double T) {
  if (t <= 0.0 || T <= 0.0) throw std::invalid_argument("uncertainty: t and T must be > 0");
  if (dPdw == 0.0)
    throw NumericalError("uncertainty: degenerate working point (dP/domega = 0)");
  const double var = std::max(0.0, probability * (1.0 - probability));
  return std::sqrt(var) / std::abs(dPdw) / std::sqrt(T / t);
}

double dPdw_lower_bound(const DensityMatrix& rho0, const AdditiveObservable& a,
                        const Projector& eta, double omega, double t) {
  const SensingTraces traces = sensing_traces(rho0, a, eta);
  const double u = std::abs(omega) * t * t * std::abs(traces.double_commutator);
  const double v = t * std::abs(traces.commutator);
  const double norm = a.op_norm();
  const double z = 2.0 * std::abs(omega) * t * norm;
  const double remainder = 2.0 * t * norm * (std::exp(z) - 1.0 - z);
  return std::abs(u - v) - remainder;
}

std::optional<double> delta_upper_bound_from_traces(Complex trace_comm, double trace_dcomm,
                                                    int n_sites, double a_norm, double omega,
                                                    double lambda, double t, UMode mode,
                                                    double p1) {
  if (t <= 0.0) throw std::invalid_argument("delta_upper_bound: t must be > 0");
  const double n = static_cast<double>(n_sites);
  const double w_site = (1.0 + std::exp(-2.0 * lambda * lambda * t * t)) / 2.0;
  const double weight = std::pow(w_site, n);
  const double z = 2.0 * std::abs(omega) * t * a_norm;

  double u;
  if (mode == UMode::Numeric) {
    const double lead = std::abs(omega) * t * std::abs(trace_dcomm) / n;
    const double sub = std::abs(trace_comm) / n;
    u = std::abs(lead - sub) - 2.0 * (a_norm / n) * (std::exp(z) - 1.0 - z);
  } else {
    const double p2 = std::abs(omega) * t * n;
    u = p1 * p2 * p2;
  }

  const double bracket = u * weight - 2.0 * std::exp(z) * (a_norm / n) * (1.0 - weight);
  if (bracket <= 0.0) return std::nullopt;
  return 1.0 / (n * std::sqrt(t) * bracket);
}

std::optional<double> delta_upper_bound_dephasing(const DensityMatrix& rho0,
                                                  const AdditiveObservable& a,
                                                  const Projector& eta, double omega,
                                                  double lambda, double t, UMode mode,
                                                  double p1) {
  const SensingTraces traces = sensing_traces(rho0, a, eta);
  return delta_upper_bound_from_traces(traces.commutator, traces.double_commutator,
                                       a.n_sites(), a.op_norm(), omega, lambda, t, mode, p1);
}

double ghz_closed_form(int n_sites, double t, double t2, double T) {
  if (n_sites < 1 || t <= 0.0 || t2 <= 0.0 || T <= 0.0)
    throw std::invalid_argument("ghz_closed_form: all arguments must be positive");
  const double n = static_cast<double>(n_sites);
  return std::exp(n * t * t / (t2 * t2)) / (n * std::sqrt(T * t));
}

GhzOptimum ghz_optimum(int n_sites, double t2) {
  if (n_sites < 1 || t2 <= 0.0)
    throw std::invalid_argument("ghz_optimum: arguments must be positive");
  const double n = static_cast<double>(n_sites);
  GhzOptimum out;
  out.t_opt = t2 / (2.0 * std::sqrt(n));
  out.min_delta_sqrtT = std::sqrt(2.0) * std::exp(0.25) / (std::pow(n, 0.75) * std::sqrt(t2));
  return out;
}

double field_uncertainty(double delta_omega_sqrtT, double gyromagnetic) {
  if (gyromagnetic <= 0.0)
    throw std::invalid_argument("field_uncertainty: gyromagnetic constant must be > 0");
  return delta_omega_sqrtT / gyromagnetic;
}

double qfi_pure(const PureState& psi, const AdditiveObservable& a, double t) {
  if (psi.dim() != a.dim()) throw std::invalid_argument("qfi_pure: dimension mismatch");
  const Vector v = a.to_eigenbasis(Vector(psi.amplitudes()));
  const std::vector<int>& d = a.spectrum();
  double mean = 0.0, second = 0.0;
  for (Eigen::Index x = 0; x < v.size(); ++x) {
    const double w = std::norm(v(x));
    mean += w * static_cast<double>(d[x]);
    second += w * static_cast<double>(d[x]) * static_cast<double>(d[x]);
  }
  const double var = std::max(0.0, second - mean * mean);
  return 4.0 * t * t * var;
}

// ---------------------------------------------------------------------------
// RamseyResponse

struct RamseyResponse::Slice {
  double t;
  int gap_min;
  std::vector<Complex> coeffs;  // per gap, dephasing already folded in

  double probability(double omega) const {
    Complex acc(0.0, 0.0);
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
      const double gap = static_cast<double>(gap_min + static_cast<int>(i));
      acc += coeffs[i] * std::polar(1.0, -omega * t * gap);
    }
    return acc.real();
  }

  double dP_domega(double omega) const {
    Complex acc(0.0, 0.0);
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
      const double gap = static_cast<double>(gap_min + static_cast<int>(i));
      acc += coeffs[i] * Complex(0.0, -t * gap) * std::polar(1.0, -omega * t * gap);
    }
    return acc.real();
  }
};

RamseyResponse::RamseyResponse(const DensityMatrix& rho0, const AdditiveObservable& a,
                               const Projector& eta) {
  if (rho0.dim() != a.dim() || eta.dim() != a.dim())
    throw std::invalid_argument("RamseyResponse: dimension mismatch");
  n_sites_ = a.n_sites();
  op_norm_ = a.op_norm();
  max_flips_ = std::popcount(a.active_mask());

  const Matrix rho_e = a.to_eigenbasis(rho0.matrix());
  const Matrix eta_e = a.to_eigenbasis(eta.matrix());
  const std::vector<int>& d = a.spectrum();
  const std::uint64_t mask = a.active_mask();
  const Eigen::Index dim = rho_e.rows();

  int dmin = d[0], dmax = d[0];
  for (int v : d) {
    dmin = std::min(dmin, v);
    dmax = std::max(dmax, v);
  }
  gap_min_ = dmin - dmax;
  gap_max_ = dmax - dmin;

  buckets_.assign(max_flips_ + 1,
                  std::vector<Complex>(gap_max_ - gap_min_ + 1, Complex(0.0, 0.0)));
  for (std::uint64_t y = 0; y < static_cast<std::uint64_t>(dim); ++y)
    for (std::uint64_t x = 0; x < static_cast<std::uint64_t>(dim); ++x) {
      const Complex z = std::conj(eta_e(x, y)) * rho_e(x, y);
      if (z == Complex(0.0, 0.0)) continue;
      const int flips = std::popcount((x ^ y) & mask);
      const int gap = d[x] - d[y];
      buckets_[flips][gap - gap_min_] += z;
    }
}

RamseyResponse::Slice RamseyResponse::slice(double lambda, double t) const {
  const double c = std::exp(-2.0 * lambda * lambda * t * t);
  Slice s;
  s.t = t;
  s.gap_min = gap_min_;
  s.coeffs.assign(buckets_[0].size(), Complex(0.0, 0.0));
  double cpow = 1.0;
  for (int k = 0; k <= max_flips_; ++k) {
    for (std::size_t g = 0; g < s.coeffs.size(); ++g) s.coeffs[g] += buckets_[k][g] * cpow;
    cpow *= c;
  }
  return s;
}

double RamseyResponse::probability(double omega, double lambda, double t) const {
  return slice(lambda, t).probability(omega);
}

double RamseyResponse::dP_domega(double omega, double lambda, double t) const {
  return slice(lambda, t).dP_domega(omega);
}

double RamseyResponse::delta_sqrtT(double omega, double lambda, double t) const {
  const Slice s = slice(lambda, t);
  const double p = std::min(1.0, std::max(0.0, s.probability(omega)));
  const double dp = s.dP_domega(omega);
  // Working points with vanishing binomial variance are degenerate: both
  // sqrt(P(1-P)) and dP/dw hit zero together (dark fringe) and the
  // linearized estimator is undefined there.
  if (dp == 0.0 || p * (1.0 - p) < 1e-14) return std::numeric_limits<double>::infinity();
  return std::sqrt(p * (1.0 - p)) * std::sqrt(t) / std::abs(dp);
}

Complex RamseyResponse::trace_commutator() const {
  // Tr(rho [A, eta]) = sum_g (-g) B_g with the dephasing factor at c = 1.
  Complex acc(0.0, 0.0);
  for (int k = 0; k <= max_flips_; ++k)
    for (std::size_t g = 0; g < buckets_[k].size(); ++g) {
      const double gap = static_cast<double>(gap_min_ + static_cast<int>(g));
      acc += -gap * buckets_[k][g];
    }
  return acc;
}

double RamseyResponse::trace_double_commutator() const {
  Complex acc(0.0, 0.0);
  for (int k = 0; k <= max_flips_; ++k)
    for (std::size_t g = 0; g < buckets_[k].size(); ++g) {
      const double gap = static_cast<double>(gap_min_ + static_cast<int>(g));
      acc += gap * gap * buckets_[k][g];
    }
  return acc.real();
}

RamseyResponse::WorkingPoint RamseyResponse::best_working_point(double lambda, double t,
                                                                int grid_points) const {
  const Slice s = slice(lambda, t);
  auto delta_at_phase = [&](double u) {
    const double omega = u / t;
    const double p = std::min(1.0, std::max(0.0, s.probability(omega)));
    const double dp = s.dP_domega(omega);
    if (dp == 0.0 || p * (1.0 - p) < 1e-14) return std::numeric_limits<double>::infinity();
    return std::sqrt(p * (1.0 - p)) * std::sqrt(t) / std::abs(dp);
  };

  // Scan the accumulated phase u = omega * t over (0, pi/2].
  const double u_hi = kPi / 2.0;
  int best = 1;
  double best_val = std::numeric_limits<double>::infinity();
  std::vector<double> us(grid_points + 1), vals(grid_points + 1);
  for (int i = 1; i <= grid_points; ++i) {
    us[i] = u_hi * static_cast<double>(i) / grid_points;
    vals[i] = delta_at_phase(us[i]);
    if (vals[i] < best_val) {
      best_val = vals[i];
      best = i;
    }
  }
  if (!std::isfinite(best_val))
    return WorkingPoint{us[1] / t, std::numeric_limits<double>::infinity()};

  // Golden-section refinement on the bracketing interval.
  double lo = us[std::max(1, best - 1)];
  double hi = us[std::min(grid_points, best + 1)];
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c1 = hi - gr * (hi - lo);
  double c2 = lo + gr * (hi - lo);
  double f1 = delta_at_phase(c1);
  double f2 = delta_at_phase(c2);
  for (int it = 0; it < 80 && (hi - lo) > 1e-10 * u_hi; ++it) {
    if (f1 <= f2) {
      hi = c2;
      c2 = c1;
      f2 = f1;
      c1 = hi - gr * (hi - lo);
      f1 = delta_at_phase(c1);
    } else {
      lo = c1;
      c1 = c2;
      f1 = f2;
      c2 = lo + gr * (hi - lo);
      f2 = delta_at_phase(c2);
    }
  }
  const double u_best = (f1 <= f2) ? c1 : c2;
  const double v_best = std::min(f1, f2);
  if (v_best <= best_val) return WorkingPoint{u_best / t, v_best};
  return WorkingPoint{us[best] / t, best_val};
}

// ---------------------------------------------------------------------------
// Optimizer and scaling fits

OptimizeResult optimize_t(const std::function<double(double)>& objective, double t_lo,
                          double t_hi, int grid_points, double rel_tol) {
  if (!(t_lo > 0.0) || !(t_hi > t_lo))
    throw std::invalid_argument("optimize_t: need 0 < t_lo < t_hi");
  if (grid_points < 3) throw std::invalid_argument("optimize_t: need >= 3 grid points");

  const double log_lo = std::log(t_lo);
  const double log_hi = std::log(t_hi);
  std::vector<double> ts(grid_points), vals(grid_points);
  int best = 0;
  for (int i = 0; i < grid_points; ++i) {
    ts[i] = std::exp(log_lo + (log_hi - log_lo) * i / (grid_points - 1));
    vals[i] = objective(ts[i]);
    if (!std::isfinite(vals[i])) {
      std::ostringstream msg;
      msg << "optimize_t: objective not finite at t = " << ts[i];
      throw NumericalError(msg.str());
    }
    if (vals[i] < vals[best]) best = i;
  }

  if (best == 0 || best == grid_points - 1)
    return OptimizeResult{ts[best], vals[best], false};

  // Golden section in log t on the bracketing interval.
  double lo = std::log(ts[best - 1]);
  double hi = std::log(ts[best + 1]);
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c1 = hi - gr * (hi - lo);
  double c2 = lo + gr * (hi - lo);
  double f1 = objective(std::exp(c1));
  double f2 = objective(std::exp(c2));
  for (int it = 0; it < 200 && (hi - lo) > rel_tol; ++it) {
    if (f1 <= f2) {
      hi = c2;
      c2 = c1;
      f2 = f1;
      c1 = hi - gr * (hi - lo);
      f1 = objective(std::exp(c1));
    } else {
      lo = c1;
      c1 = c2;
      f1 = f2;
      c2 = lo + gr * (hi - lo);
      f2 = objective(std::exp(c2));
    }
  }
  const double t_best = std::exp((f1 <= f2) ? c1 : c2);
  const double v_best = std::min(f1, f2);
  if (v_best <= vals[best]) return OptimizeResult{t_best, v_best, true};
  return OptimizeResult{ts[best], vals[best], true};
}

std::function<double(double)> omega_rule_fixed_p2(double p2, int n_sites) {
  return [p2, n = static_cast<double>(n_sites)](double t) { return p2 / (t * n); };
}

std::function<double(double)> omega_rule_fixed_phase(double theta, double a_norm) {
  return [theta, a_norm](double t) { return theta / (2.0 * a_norm * t); };
}

nlohmann::json ScalingFit::to_json() const {
  nlohmann::json j;
  j["n_values"] = n_values;
  j["delta_values"] = delta_values;
  j["slope"] = slope;
  j["intercept"] = intercept;
  j["stderr"] = stderr_slope;
  j["r_squared"] = r_squared;
  return j;
}

ScalingFit fit_loglog(const std::vector<int>& n_values, const std::vector<double>& values) {
  if (n_values.size() < 4 || n_values.size() != values.size())
    throw std::invalid_argument("fit_loglog: needs >= 4 matched points");
  ScalingFit fit;
  fit.n_values = n_values;
  fit.delta_values = values;

  const std::size_t m = n_values.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double x = std::log(static_cast<double>(n_values[i]));
    const double y = std::log(values[i]);
    sx += x; sy += y; sxx += x * x; sxy += x * y; syy += y * y;
  }
  const double n = static_cast<double>(m);
  const double denom = n * sxx - sx * sx;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;

  double ss_res = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double x = std::log(static_cast<double>(n_values[i]));
    const double y = std::log(values[i]);
    const double e = y - (fit.intercept + fit.slope * x);
    ss_res += e * e;
  }
  const double ss_tot = syy - sy * sy / n;
  fit.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  fit.stderr_slope =
      m > 2 ? std::sqrt(ss_res / (n - 2.0) / (sxx - sx * sx / n)) : 0.0;
  return fit;
}

ScalingStudy scaling_study(const ScalingStudyConfig& config) {
  if (config.n_values.size() < 4)
    throw std::invalid_argument("scaling_study: needs >= 4 system sizes");
  const std::size_t count = config.n_values.size();

  // Response tables are built serially (they briefly hold dense matrices);
  // the per-N optimizations afterwards touch only the compact tables and run
  // on the worker pool. Results land in indexed slots, so the aggregation
  // order is fixed regardless of the thread count.
  struct Prepared {
    int n;
    RamseyResponse response;
    std::optional<double> variance;
  };
  std::vector<Prepared> prepared;
  prepared.reserve(count);
  for (int n : config.n_values) {
    const DensityMatrix rho = config.state_for_n(n);
    const AdditiveObservable a = config.observable_for_n(n);
    const Projector eta = config.eta_for_n(n, rho, a);
    prepared.push_back(Prepared{n, RamseyResponse(rho, a, eta),
                                config.variance_for_n ? config.variance_for_n(n)
                                                      : std::nullopt});
  }

  std::vector<ScalingPoint> points(count);
  std::exception_ptr failure;
  std::mutex failure_mutex;
  parallel_for_chunks(count, 1, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      try {
        const Prepared& prep = prepared[i];
        const int n = prep.n;
        const RamseyResponse& response = prep.response;

        double t_lo = config.t_lo;
        double t_hi = config.t_hi;
        if (t_lo <= 0.0 || t_hi <= 0.0) {
          if (config.lambda > 0.0) {
            const double scale =
                t2_from_lambda(config.lambda) / std::sqrt(static_cast<double>(n));
            t_lo = 0.02 * scale;
            t_hi = 20.0 * scale;
          } else {
            t_lo = 0.01;
            t_hi = 1.0;
          }
        }

        std::function<double(double)> objective;
        std::function<double(double)> omega_of_t;
        switch (config.rule) {
          case WorkingPointRule::FixedP2:
            omega_of_t = omega_rule_fixed_p2(config.rule_value, n);
            break;
          case WorkingPointRule::FixedPhase:
            omega_of_t = omega_rule_fixed_phase(config.rule_value, response.observable_norm());
            break;
          case WorkingPointRule::Scan:
            break;
        }
        if (omega_of_t) {
          objective = [&response, &config, omega_of_t](double t) {
            return response.delta_sqrtT(omega_of_t(t), config.lambda, t);
          };
        } else {
          objective = [&response, &config](double t) {
            return response.best_working_point(config.lambda, t).delta_sqrtT;
          };
        }

        const OptimizeResult opt = optimize_t(objective, t_lo, t_hi, config.grid_points);

        ScalingPoint point;
        point.n = n;
        point.t_opt = opt.t_opt;
        point.delta_sqrtT = opt.value;
        point.omega = omega_of_t
                          ? omega_of_t(opt.t_opt)
                          : response.best_working_point(config.lambda, opt.t_opt).omega;

        if (config.compute_bounds) {
          // Reported upper bound: the dephased-bound expression minimized
          // over its own interaction time at a small fixed phase budget.
          // The bound only certifies the small-budget window, so evaluating
          // it at the scanned optimum (phase ~ pi/2) would be vacuous; the
          // minimized value still upper-bounds the scanned optimum.
          const double budget =
              config.rule == WorkingPointRule::FixedP2 ? config.rule_value : 0.1;
          const Complex comm = response.trace_commutator();
          const double dcomm = response.trace_double_commutator();
          std::optional<double> best_bound;
          const double b_lo = t_lo / 20.0;
          for (int k = 0; k < 240; ++k) {
            const double tb = b_lo * std::pow(t_hi / b_lo, k / 239.0);
            const double omega_b = budget / (tb * n);
            const auto b = delta_upper_bound_from_traces(
                comm, dcomm, n, response.observable_norm(), omega_b, config.lambda, tb);
            if (b && (!best_bound || *b < *best_bound)) best_bound = b;
          }
          point.bound_upper = best_bound;
          if (prep.variance && *prep.variance > 0.0)
            point.bound_lower = 1.0 / (2.0 * std::sqrt(opt.t_opt * *prep.variance));
        }
        points[i] = std::move(point);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  });
  if (failure) std::rethrow_exception(failure);

  ScalingStudy study;
  study.points = std::move(points);
  std::vector<double> deltas;
  deltas.reserve(study.points.size());
  for (const auto& p : study.points) deltas.push_back(p.delta_sqrtT);
  study.fit = fit_loglog(config.n_values, deltas);
  return study;
}

ScalingStudy ghz_closed_form_scaling(const std::vector<int>& n_values, double t2,
                                     double fixed_t) {
  ScalingStudy study;
  for (int n : n_values) {
    ScalingPoint point;
    point.n = n;
    if (std::isfinite(t2)) {
      const GhzOptimum opt = ghz_optimum(n, t2);
      point.t_opt = opt.t_opt;
      point.delta_sqrtT = opt.min_delta_sqrtT;
    } else {
      point.t_opt = fixed_t;
      point.delta_sqrtT = 1.0 / (static_cast<double>(n) * std::sqrt(fixed_t));
    }
    study.points.push_back(point);
  }
  std::vector<double> deltas;
  for (const auto& p : study.points) deltas.push_back(p.delta_sqrtT);
  study.fit = fit_loglog(n_values, deltas);
  return study;
}

double estimate_p1(const std::vector<P1Sample>& samples) {
  if (samples.empty()) throw std::invalid_argument("estimate_p1: no samples");
  double p1 = std::numeric_limits<double>::infinity();
  for (const auto& s : samples) {
    const double denom = s.p2 * s.p2 * s.t * static_cast<double>(s.n_sites);
    if (denom <= 0.0) throw std::invalid_argument("estimate_p1: invalid sample");
    p1 = std::min(p1, s.dPdw_abs / denom);
  }
  return p1;
}

}  // namespace catsense
