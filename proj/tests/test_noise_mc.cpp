#include <doctest.h>

#include <cmath>

#include "catsense/evolution.hpp"
#include "catsense/noise_mc.hpp"
#include "catsense/rng.hpp"
#include "catsense/states.hpp"
#include "oracles.hpp"

using namespace catsense;

TEST_SUITE_BEGIN("noise_mc");

TEST_CASE("OU sampling is stationary with the right autocorrelation") {
  const double tau_c = 1.0, dt = 0.05;
  const int n_steps = 40, n_traj = 10000;

  std::vector<double> lag_sums(4, 0.0);
  double mean_sum = 0.0;
  long mean_count = 0;
  for (int j = 0; j < n_traj; ++j) {
    const OUTrajectory traj = ou_sample(tau_c, dt, n_steps, stream_seed(999, j));
    for (double v : traj.values) {
      mean_sum += v;
      ++mean_count;
    }
    for (std::size_t m = 0; m < lag_sums.size(); ++m)
      lag_sums[m] += traj.values[0] * traj.values[m * 5];
  }
  // mean ~ 0 within 3 sigma (unit-variance samples, correlated within a path)
  CHECK(std::abs(mean_sum / mean_count) < 3.0 / std::sqrt(static_cast<double>(n_traj)));
  for (std::size_t m = 0; m < lag_sums.size(); ++m) {
    const double expected = std::exp(-static_cast<double>(m * 5) * dt / tau_c);
    const double got = lag_sums[m] / n_traj;
    CHECK(std::abs(got - expected) < 3.0 / std::sqrt(static_cast<double>(n_traj)));
  }

  // determinism
  const OUTrajectory a = ou_sample(tau_c, dt, n_steps, 1234);
  const OUTrajectory b = ou_sample(tau_c, dt, n_steps, 1234);
  CHECK(a.values == b.values);
  const OUTrajectory c = ou_sample(tau_c, dt, n_steps, 1235);
  CHECK(a.values != c.values);
}

TEST_CASE("chi integral matches nested quadrature") {
  for (double t : {0.3, 1.0, 4.0}) {
    const double analytic = chi_correlation_integral(0.7, t);
    const double numeric = oracles::covariance_double_integral(0.7, t);
    CHECK(std::abs(analytic - numeric) / analytic < 1e-10);
  }
}

TEST_CASE("coherence estimator: exact at lambda = 0") {
  const MCEstimate est = coherence_mc(0.0, 1.0, 0.1, 0.002, 200, 42);
  CHECK(est.mean.real() == 1.0);
  CHECK(est.mean.imag() == 0.0);
  CHECK(est.std_err == 0.0);
}

TEST_CASE("coherence estimator agrees with the Gaussian closed form") {
  const double tau_c = 1.0;

  // Zeno regime: chi -> t^2
  {
    const double t = tau_c / 100.0;
    const double lambda = 0.8 / t;
    const double dt = t / 50.0;
    const MCEstimate est = coherence_mc(lambda, tau_c, t, dt, 10000, 7);
    CHECK(std::abs(est.mean.real() - coherence_zeno(lambda, t)) < 3.0 * est.std_err);
    CHECK(std::abs(est.mean.real() - coherence_closed_form(lambda, tau_c, t)) <
          3.0 * est.std_err);
  }

  // Markovian limit: chi -> 2 tau_c t
  {
    const double t = 100.0 * tau_c;
    const double lambda = 0.03 / tau_c;
    const double dt = tau_c / 100.0;
    const MCEstimate est = coherence_mc(lambda, tau_c, t, dt, 10000, 11);
    const double markov = std::exp(-4.0 * lambda * lambda * tau_c * t);
    CHECK(std::abs(est.mean.real() - markov) < 3.0 * est.std_err);
    CHECK(std::abs(est.mean.real() - coherence_closed_form(lambda, tau_c, t)) <
          3.0 * est.std_err);
  }
}

TEST_CASE("Zeno-form deviation shrinks with t / tau_c") {
  const double tau_c = 1.0;
  double previous = std::numeric_limits<double>::infinity();
  for (double ratio : {0.1, 0.03, 0.01}) {
    const double t = ratio * tau_c;
    const double lambda = 0.8 / t;
    const double exact = coherence_closed_form(lambda, tau_c, t);
    const double zeno = coherence_zeno(lambda, t);
    const double deviation = std::abs(exact - zeno) / (1.0 - zeno);
    CHECK(deviation < previous);
    previous = deviation;

    const MCEstimate est = coherence_mc(lambda, tau_c, t, t / 50.0, 4000, 13);
    CHECK(std::abs(est.mean.real() - exact) < 4.0 * est.std_err);
  }
}

TEST_CASE("trajectory-averaged channel: identities") {
  const DensityMatrix g = DensityMatrix::from_pure(ghz(3));
  const AdditiveObservable mz = AdditiveObservable::mz(3);

  const DensityMatrix nothing = mc_dephase(g, mz, 0.0, 1.0, 0.01, 0.0005, 100, 5);
  CHECK((nothing.matrix() - g.matrix()).cwiseAbs().maxCoeff() < 1e-12);

  CHECK_THROWS_AS(mc_dephase(DensityMatrix::maximally_mixed(7), AdditiveObservable::mz(7), 0.1,
                             1.0, 0.01, 0.0005, 10, 1),
                  std::invalid_argument);
}

TEST_CASE("trajectory-averaged channel agrees with the closed form in the Zeno regime") {
  const int n = 3;
  const double tau_c = 1.0;
  const double t = tau_c / 100.0;
  const double lambda = 50.0;  // 2 lambda^2 t^2 = 0.5
  const double dt = t / 50.0;
  const int n_traj = 2000;

  const DensityMatrix g = DensityMatrix::from_pure(ghz(n));
  const AdditiveObservable mz = AdditiveObservable::mz(n);
  const MCChannelStats stats = mc_dephase_stats(g, mz, lambda, tau_c, t, dt, n_traj, 2024);
  const Matrix closed = dephase(g, mz, lambda, t).matrix();

  for (Eigen::Index y = 0; y < 8; ++y)
    for (Eigen::Index x = 0; x < 8; ++x) {
      const double dre = stats.mean_eigenbasis(x, y).real() - closed(x, y).real();
      const double dim_ = stats.mean_eigenbasis(x, y).imag() - closed(x, y).imag();
      const double sre = std::max(stats.stderr_re(x, y), 1e-12);
      const double sim = std::max(stats.stderr_im(x, y), 1e-12);
      if (std::abs(dre) > 1e-12) CHECK(std::abs(dre) / sre < 4.0);
      if (std::abs(dim_) > 1e-12) CHECK(std::abs(dim_) / sim < 4.0);
    }

  // populations of the average equal the input populations
  for (Eigen::Index i = 0; i < 8; ++i)
    CHECK(std::abs(stats.mean_eigenbasis(i, i) - g.matrix()(i, i)) < 1e-12);
}

TEST_CASE("trajectory states average to a valid density matrix") {
  oracles::Rng rng(404);
  const DensityMatrix rho = oracles::random_density(rng, 2);
  const AdditiveObservable mx = AdditiveObservable::mx(2);
  const DensityMatrix avg = mc_dephase(rho, mx, 3.0, 1.0, 0.02, 0.0005, 500, 77);
  CHECK(std::abs(avg.matrix().trace().real() - 1.0) < 1e-12);
  CHECK(hermiticity_error(avg.matrix()) < 1e-12);
  CHECK(avg.min_eigenvalue() > -1e-9);
}

TEST_SUITE_END();
