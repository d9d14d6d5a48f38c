#include <doctest.h>

#include <cmath>

#include "catsense/macroscopicity.hpp"
#include "catsense/states.hpp"
#include "oracles.hpp"

using namespace catsense;

namespace {

double variance(const PureState& psi, const AdditiveObservable& a) {
  const Matrix atot = a.total();
  const Vector& v = psi.amplitudes();
  const double mean = (v.adjoint() * atot * v)(0).real();
  const double second = (v.adjoint() * atot * atot * v)(0).real();
  return second - mean * mean;
}

}  // namespace

TEST_SUITE_BEGIN("states");

TEST_CASE("spin-label convention") {
  CHECK(mz_eigenvalue(0b000, 3) == 3);
  CHECK(mz_eigenvalue(0b111, 3) == -3);
  CHECK(mz_eigenvalue(0b101, 3) == -1);
}

TEST_CASE("ghz") {
  const PureState g1 = ghz(1);
  CHECK(g1.amplitudes()(0).real() == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(g1.amplitudes()(1).real() == doctest::Approx(1.0 / std::sqrt(2.0)));

  const PureState bell = ghz(2);
  CHECK(bell.amplitudes()(0).real() == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(bell.amplitudes()(3).real() == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(std::abs(bell.amplitudes()(1)) == 0.0);
  CHECK(std::abs(bell.amplitudes()(2)) == 0.0);

  for (int n : {2, 4, 7, 10})
    CHECK(variance(ghz(n), AdditiveObservable::mz(n)) ==
          doctest::Approx(static_cast<double>(n) * n).epsilon(1e-10));
}

TEST_CASE("staircase") {
  const PureState s1 = staircase(1);
  CHECK(s1.amplitudes()(0).real() == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(s1.amplitudes()(1).real() == doctest::Approx(1.0 / std::sqrt(2.0)));

  const PureState s2 = staircase(2);
  // (|downdown> + |updown> + |upup>)/sqrt(3) = indices 11, 01, 00
  CHECK(s2.amplitudes()(0b11).real() == doctest::Approx(1.0 / std::sqrt(3.0)));
  CHECK(s2.amplitudes()(0b01).real() == doctest::Approx(1.0 / std::sqrt(3.0)));
  CHECK(s2.amplitudes()(0b00).real() == doctest::Approx(1.0 / std::sqrt(3.0)));
  CHECK(std::abs(s2.amplitudes()(0b10)) == 0.0);

  for (int n : {2, 4, 6, 8, 10})
    CHECK(variance(staircase(n), AdditiveObservable::mz(n)) ==
          doctest::Approx(n * (n + 2) / 3.0).epsilon(1e-10));
}

TEST_CASE("rho_ex") {
  CHECK_THROWS_AS(rho_ex(2), std::invalid_argument);
  for (int n : {3, 4, 6}) {
    const DensityMatrix rho = rho_ex(n);
    CHECK(rho.matrix().trace().real() == doctest::Approx(1.0));
    CHECK(rho.min_eigenvalue() > -1e-12);
    // rank N: N eigenvalues at 1/N
    const EighResult spec = eigh(rho.matrix());
    int rank = 0;
    for (Eigen::Index i = 0; i < spec.eigenvalues.size(); ++i)
      if (spec.eigenvalues(i) > 1e-10) ++rank;
    CHECK(rank == n);
  }
}

TEST_CASE("product_plus") {
  const PureState plus = product_plus(1);
  CHECK(plus.amplitudes()(0).real() == doctest::Approx(1.0 / std::sqrt(2.0)));
  for (int n : {2, 5, 8}) {
    CHECK(variance(product_plus(n), AdditiveObservable::mz(n)) ==
          doctest::Approx(static_cast<double>(n)).epsilon(1e-10));
    CHECK(variance(product_plus(n), AdditiveObservable::mx(n)) ==
          doctest::Approx(0.0).epsilon(1e-10));
  }
}

TEST_CASE("thermal_x") {
  const int n = 4;
  const DensityMatrix mixed = thermal_x(n, 0.0);
  CHECK((mixed.matrix() - Matrix::Identity(16, 16) / 16.0).cwiseAbs().maxCoeff() < 1e-14);

  const DensityMatrix cold = thermal_x(n, 20.0);
  const DensityMatrix plus = DensityMatrix::from_pure(product_plus(n));
  CHECK((cold.matrix() - plus.matrix()).cwiseAbs().maxCoeff() < 1e-8);

  const double b = std::atanh(0.6);
  const DensityMatrix th = thermal_x(1, b);
  const double pol = (th.matrix() * Matrix(pauli::x())).trace().real();
  CHECK(pol == doctest::Approx(0.6).epsilon(1e-12));

  CHECK(thermal_weight_b(280.0, 208.0) == doctest::Approx(280.0 / 416.0));

  // negative b flips the polarization
  const DensityMatrix anti = thermal_x(1, -b);
  CHECK((anti.matrix() * Matrix(pauli::x())).trace().real() == doctest::Approx(-0.6));
}

TEST_CASE("mz_projected_thermal") {
  // b = 0, M = N: the one-dimensional all-up sector
  const DensityMatrix top = mz_projected_thermal(3, 0.0, 3);
  CHECK(top.matrix()(0, 0).real() == doctest::Approx(1.0));
  CHECK(top.matrix().cwiseAbs().sum() == doctest::Approx(1.0));

  // support stays inside the sector: eta rho eta == rho
  const int n = 6;
  const DensityMatrix rho = mz_projected_thermal(n, std::atanh(0.6), 0);
  const Matrix eta = hamming_projector(n, 0).matrix();
  CHECK((eta * rho.matrix() * eta - rho.matrix()).cwiseAbs().maxCoeff() < 1e-12);

  // all z-sector weights of the transverse Gibbs state are C(N,k)/2^N, so
  // only invalid sectors are rejected
  CHECK_THROWS_AS(mz_projected_thermal(4, 0.3, 3), std::invalid_argument);
  CHECK_THROWS_AS(mz_projected_thermal(4, 0.3, 6), std::invalid_argument);
}

TEST_CASE("projected thermal state is a generalized cat for M_x") {
  // cat value grows >= c N^2 across N in {4,6,8,10} for a fitted c > 0; the
  // prefactor carries a slowly decaying finite-size transient, so the
  // operational checks are the N^2 floor and superlinearity (value/N grows).
  const double b = std::atanh(0.6);
  std::vector<int> ns = {4, 6, 8, 10};
  std::vector<double> values;
  for (int n : ns) {
    const DensityMatrix rho = mz_projected_thermal(n, b, 0);
    const AdditiveObservable mx = AdditiveObservable::mx(n);
    values.push_back(cat_value(rho, mx, optimal_eta(rho, mx)));
  }
  double c_fit = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ns.size(); ++i)
    c_fit = std::min(c_fit, values[i] / (ns[i] * ns[i]));
  CHECK(c_fit > 0.5);
  for (std::size_t i = 1; i < ns.size(); ++i)
    CHECK(values[i] / ns[i] > values[i - 1] / ns[i - 1]);
  CHECK(q_fit(ns, values).slope > 1.4);
}

TEST_CASE("mixture") {
  const DensityMatrix cat = DensityMatrix::from_pure(ghz(3));
  const DensityMatrix sep = DensityMatrix::maximally_mixed(3);
  CHECK((mixture(1.0, cat, sep).matrix() - cat.matrix()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((mixture(0.0, cat, sep).matrix() - sep.matrix()).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(mixture(1.5, cat, sep), std::invalid_argument);
  CHECK_THROWS_AS(mixture(-0.1, cat, sep), std::invalid_argument);
}

TEST_CASE("hamming projector") {
  const Projector p20 = hamming_projector(2, 0);
  CHECK(p20.rank() == 2);
  CHECK(p20.matrix()(0b01, 0b01).real() == 1.0);
  CHECK(p20.matrix()(0b10, 0b10).real() == 1.0);
  CHECK(p20.matrix()(0b00, 0b00).real() == 0.0);

  const Projector p33 = hamming_projector(3, 3);
  CHECK(p33.rank() == 1);
  CHECK(p33.matrix()(0, 0).real() == 1.0);

  for (int n : {3, 5, 6}) {
    Eigen::Index total = 0;
    for (int m = -n; m <= n; m += 2) total += hamming_projector(n, m).rank();
    CHECK(total == (Eigen::Index(1) << n));
  }

  CHECK_THROWS_AS(hamming_projector(3, 2), std::invalid_argument);
}

TEST_CASE("positive half projector of M_y") {
  const int n = 3;
  const Projector maj = positive_half_projector(AdditiveObservable::my(n));
  // Hermitian, idempotent, commutes with M_y, selects its positive part
  CHECK(hermiticity_error(maj.matrix()) < 1e-13);
  CHECK((maj.matrix() * maj.matrix() - maj.matrix()).cwiseAbs().maxCoeff() < 1e-12);
  const Matrix my = AdditiveObservable::my(n).total();
  CHECK((maj.matrix() * my - my * maj.matrix()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(maj.rank() == 4);  // half of the 8 states have positive eigenvalue (none at zero)

  // positive part recovered: eta M eta has only positive eigenvalues
  const EighResult spec = eigh(maj.matrix() * my * maj.matrix(), 1e-10);
  for (Eigen::Index i = 0; i < spec.eigenvalues.size(); ++i)
    CHECK(spec.eigenvalues(i) > -1e-12);
}

TEST_CASE("pure factory outputs satisfy the double-commutator variance identity") {
  // Tr(rho [A,[A,rho]]) = 2 Var(A) for pure rho
  for (int n : {2, 3, 5}) {
    for (const auto& a : {AdditiveObservable::mz(n), AdditiveObservable::mx(n)}) {
      for (const PureState& psi : {ghz(n), staircase(n), product_plus(n)}) {
        const DensityMatrix rho = DensityMatrix::from_pure(psi);
        const Matrix atot = a.total();
        const double lhs =
            (rho.matrix() * commutator(atot, commutator(atot, rho.matrix()))).trace().real();
        CHECK(lhs == doctest::Approx(2.0 * variance(psi, a)).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("state spec JSON round trip") {
  const StateSpec mix = StateSpec::make_mixture(
      0.3, StateSpec::make_ghz(4), StateSpec::make_thermal_x(4, 0.0));
  const nlohmann::json j = mix.to_json();
  CHECK(j.at("kind") == "mixture");
  CHECK(j.at("n") == 4);
  const StateSpec back = StateSpec::from_json(j);
  CHECK(back.kind == StateKind::Mixture);
  CHECK(back.params.at("w").get<double>() == doctest::Approx(0.3));

  const DensityMatrix direct =
      mixture(0.3, DensityMatrix::from_pure(ghz(4)), DensityMatrix::maximally_mixed(4));
  CHECK((make_density(back).matrix() - direct.matrix()).cwiseAbs().maxCoeff() < 1e-14);

  const StateSpec pol = StateSpec::make_product_polarized(2, 1.0, 0.5);
  CHECK((make_density(StateSpec::from_json(pol.to_json())).matrix() -
         DensityMatrix::from_pure(product_polarized(2, 1.0, 0.5)).matrix())
            .cwiseAbs()
            .maxCoeff() < 1e-14);
}

TEST_CASE("low rank decomposition matches the dense state") {
  const StateSpec mix = StateSpec::make_mixture(
      0.4, StateSpec::make_rho_ex(4), StateSpec::make_thermal_x(4, 0.0));
  const auto lr = low_rank_decomposition(mix);
  REQUIRE(lr.has_value());

  Matrix rebuilt = Matrix::Zero(16, 16);
  for (std::size_t i = 0; i < lr->vectors.size(); ++i)
    rebuilt += lr->weights[i] * lr->vectors[i] * lr->vectors[i].adjoint();
  rebuilt += lr->identity_weight * Matrix::Identity(16, 16) / 16.0;
  CHECK((rebuilt - make_density(mix).matrix()).cwiseAbs().maxCoeff() < 1e-13);

  CHECK_FALSE(low_rank_decomposition(StateSpec::make_thermal_x(4, 0.5)).has_value());
}

TEST_SUITE_END();
