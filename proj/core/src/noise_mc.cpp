#include "catsense/noise_mc.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "catsense/parallel.hpp"
#include "catsense/rng.hpp"

namespace catsense {

namespace {

int steps_for(double t, double dt) {
  if (dt <= 0.0) throw std::invalid_argument("noise_mc: dt must be > 0");
  const double ratio = t / dt;
  const int n = static_cast<int>(std::llround(ratio));
  if (n < 1 || std::abs(n - ratio) > 1e-9 * std::max(1.0, ratio))
    throw std::invalid_argument("noise_mc: t must be an integer multiple of dt");
  return n;
}

constexpr std::size_t kChunk = 64;  // fixed chunking keeps reductions thread-count independent

}  // namespace

OUTrajectory ou_sample(double tau_c, double dt, int n_steps, std::uint64_t seed) {
  if (tau_c <= 0.0) throw std::invalid_argument("ou_sample: tau_c must be > 0");
  if (dt <= 0.0) throw std::invalid_argument("ou_sample: dt must be > 0");
  if (n_steps < 1) throw std::invalid_argument("ou_sample: n_steps must be >= 1");

  const double alpha = std::exp(-dt / tau_c);
  const double drive = std::sqrt(1.0 - alpha * alpha);
  GaussianStream gauss(seed);

  OUTrajectory traj;
  traj.dt = dt;
  traj.seed = seed;
  traj.values.resize(n_steps);
  traj.values[0] = gauss.next();
  for (int k = 1; k < n_steps; ++k)
    traj.values[k] = alpha * traj.values[k - 1] + drive * gauss.next();
  return traj;
}

double chi_correlation_integral(double tau_c, double t) {
  if (tau_c <= 0.0 || t < 0.0)
    throw std::invalid_argument("chi_correlation_integral: bad arguments");
  return 2.0 * (tau_c * t - tau_c * tau_c * (1.0 - std::exp(-t / tau_c)));
}

double coherence_closed_form(double lambda, double tau_c, double t) {
  return std::exp(-2.0 * lambda * lambda * chi_correlation_integral(tau_c, t));
}

double coherence_zeno(double lambda, double t) {
  return std::exp(-2.0 * lambda * lambda * t * t);
}

MCEstimate coherence_mc(double lambda, double tau_c, double t, double dt, int n_traj,
                        std::uint64_t seed) {
  if (n_traj < 2) throw std::invalid_argument("coherence_mc: n_traj must be >= 2");
  const int n_steps = steps_for(t, dt);
  const double alpha = std::exp(-dt / tau_c);
  const double drive = std::sqrt(1.0 - alpha * alpha);

  const std::size_t n = static_cast<std::size_t>(n_traj);
  const std::size_t n_chunks = (n + kChunk - 1) / kChunk;
  struct Partial {
    Complex sum{0.0, 0.0};
    double sum_re2 = 0.0;
    double sum_im2 = 0.0;
  };
  std::vector<Partial> partials(n_chunks);

  parallel_for_chunks(n, kChunk, [&](std::size_t begin, std::size_t end) {
    Partial acc;
    for (std::size_t j = begin; j < end; ++j) {
      GaussianStream gauss(stream_seed(seed, j));
      double f = gauss.next();
      double phi = 0.0;
      for (int k = 0; k < n_steps; ++k) {
        phi += f * dt;
        f = alpha * f + drive * gauss.next();
      }
      const Complex v = std::polar(1.0, -2.0 * lambda * phi);
      acc.sum += v;
      acc.sum_re2 += v.real() * v.real();
      acc.sum_im2 += v.imag() * v.imag();
    }
    partials[begin / kChunk] = acc;
  });

  Partial total;
  for (const Partial& p : partials) {
    total.sum += p.sum;
    total.sum_re2 += p.sum_re2;
    total.sum_im2 += p.sum_im2;
  }
  const double count = static_cast<double>(n);
  const Complex mean = total.sum / count;
  const double var_re =
      std::max(0.0, (total.sum_re2 - count * mean.real() * mean.real()) / (count - 1.0));
  const double var_im =
      std::max(0.0, (total.sum_im2 - count * mean.imag() * mean.imag()) / (count - 1.0));
  return MCEstimate{mean, std::sqrt((var_re + var_im) / count), n_traj};
}

MCChannelStats mc_dephase_stats(const DensityMatrix& rho0, const AdditiveObservable& a,
                                double lambda, double tau_c, double t, double dt, int n_traj,
                                std::uint64_t seed) {
  if (rho0.dim() != a.dim()) throw std::invalid_argument("mc_dephase: dimension mismatch");
  const int n_sites = a.n_sites();
  if (n_sites > 6) {
    std::ostringstream msg;
    msg << "mc_dephase: budget cap is N <= 6 sites, got " << n_sites;
    throw std::invalid_argument(msg.str());
  }
  if (n_traj < 2) throw std::invalid_argument("mc_dephase: n_traj must be >= 2");
  const int n_steps = steps_for(t, dt);
  const double alpha = std::exp(-dt / tau_c);
  const double drive = std::sqrt(1.0 - alpha * alpha);

  const Matrix rho_e = a.to_eigenbasis(rho0.matrix());
  const Eigen::Index dim = rho_e.rows();

  struct Partial {
    Matrix sum;
    Eigen::MatrixXd sum_re2;
    Eigen::MatrixXd sum_im2;
  };
  const std::size_t n = static_cast<std::size_t>(n_traj);
  const std::size_t n_chunks = (n + kChunk - 1) / kChunk;
  std::vector<Partial> partials(n_chunks);

  parallel_for_chunks(n, kChunk, [&](std::size_t begin, std::size_t end) {
    Partial acc;
    acc.sum = Matrix::Zero(dim, dim);
    acc.sum_re2 = Eigen::MatrixXd::Zero(dim, dim);
    acc.sum_im2 = Eigen::MatrixXd::Zero(dim, dim);
    std::vector<double> phi(n_sites);
    std::vector<Complex> u(dim);
    for (std::size_t j = begin; j < end; ++j) {
      // One independent OU path per site; stream index j * n_sites + l.
      for (int l = 0; l < n_sites; ++l) {
        GaussianStream gauss(stream_seed(seed, j * static_cast<std::size_t>(n_sites) + l));
        double f = gauss.next();
        double p = 0.0;
        for (int k = 0; k < n_steps; ++k) {
          p += f * dt;
          f = alpha * f + drive * gauss.next();
        }
        phi[l] = p;
      }
      // Diagonal (in the observable eigenbasis) trajectory unitary:
      // theta_x = lambda sum_l Phi_l s_l(x).
      for (Eigen::Index x = 0; x < dim; ++x) {
        double theta = 0.0;
        for (int l = 0; l < n_sites; ++l) {
          const int bit = site_bit(static_cast<std::uint64_t>(x), l, n_sites);
          theta += phi[l] * a.site_eigenvalue(l, bit);
        }
        u[x] = std::polar(1.0, -lambda * theta);
      }
      for (Eigen::Index y = 0; y < dim; ++y)
        for (Eigen::Index x = 0; x < dim; ++x) {
          const Complex v = rho_e(x, y) * u[x] * std::conj(u[y]);
          acc.sum(x, y) += v;
          acc.sum_re2(x, y) += v.real() * v.real();
          acc.sum_im2(x, y) += v.imag() * v.imag();
        }
    }
    partials[begin / kChunk] = std::move(acc);
  });

  Matrix sum = Matrix::Zero(dim, dim);
  Eigen::MatrixXd sum_re2 = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::MatrixXd sum_im2 = Eigen::MatrixXd::Zero(dim, dim);
  for (const Partial& p : partials) {
    sum += p.sum;
    sum_re2 += p.sum_re2;
    sum_im2 += p.sum_im2;
  }

  const double count = static_cast<double>(n);
  MCChannelStats stats;
  stats.n_traj = n_traj;
  stats.mean_eigenbasis = sum / count;
  stats.stderr_re.resize(dim, dim);
  stats.stderr_im.resize(dim, dim);
  for (Eigen::Index y = 0; y < dim; ++y)
    for (Eigen::Index x = 0; x < dim; ++x) {
      const double mre = stats.mean_eigenbasis(x, y).real();
      const double mim = stats.mean_eigenbasis(x, y).imag();
      stats.stderr_re(x, y) =
          std::sqrt(std::max(0.0, (sum_re2(x, y) - count * mre * mre) / (count - 1.0)) / count);
      stats.stderr_im(x, y) =
          std::sqrt(std::max(0.0, (sum_im2(x, y) - count * mim * mim) / (count - 1.0)) / count);
    }
  return stats;
}

DensityMatrix mc_dephase(const DensityMatrix& rho0, const AdditiveObservable& a, double lambda,
                         double tau_c, double t, double dt, int n_traj, std::uint64_t seed) {
  MCChannelStats stats = mc_dephase_stats(rho0, a, lambda, tau_c, t, dt, n_traj, seed);
  Matrix mean = a.from_eigenbasis(std::move(stats.mean_eigenbasis));
  // Trajectory states are exactly Hermitian/unit-trace; the average can
  // carry only rounding noise, but PSD holds only within Monte Carlo error.
  return DensityMatrix(std::move(mean), 1e-9);
}

}  // namespace catsense
