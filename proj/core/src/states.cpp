#include "catsense/states.hpp"

#include <bit>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace catsense {

namespace {

std::uint64_t dim_of(int n_sites) {
  if (n_sites < 1) throw std::invalid_argument("state factory: N must be >= 1");
  if (n_sites > 24) throw std::invalid_argument("state factory: dense workflows cap at 24 sites");
  return 1ULL << n_sites;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace

int mz_eigenvalue(std::uint64_t basis_index, int n_sites) {
  return n_sites - 2 * std::popcount(basis_index);
}

PureState ghz(int n_sites) {
  const std::uint64_t dim = dim_of(n_sites);
  Vector amps = Vector::Zero(dim);
  const double a = 1.0 / std::sqrt(2.0);
  amps(0) = a;
  amps(dim - 1) = a;
  return PureState(std::move(amps));
}

PureState staircase(int n_sites) {
  const std::uint64_t dim = dim_of(n_sites);
  Vector amps = Vector::Zero(dim);
  const double a = 1.0 / std::sqrt(static_cast<double>(n_sites) + 1.0);
  // k up-spins followed by N-k down-spins: index 2^(N-k) - 1.
  for (int k = 0; k <= n_sites; ++k) amps((dim >> k) - 1) = a;
  return PureState(std::move(amps));
}

namespace {

// (|down...up_l...down> + |up...down_l...up>) / sqrt(2), l = 0..N-1.
Vector flipped_cat(int n_sites, int l) {
  const std::uint64_t dim = 1ULL << n_sites;
  const std::uint64_t bit = 1ULL << (n_sites - 1 - l);
  Vector v = Vector::Zero(dim);
  const double a = 1.0 / std::sqrt(2.0);
  v((dim - 1) ^ bit) = a;  // all down, up at l
  v(bit) = a;              // all up, down at l
  return v;
}

}  // namespace

DensityMatrix rho_ex(int n_sites) {
  if (n_sites < 3)
    throw std::invalid_argument("rho_ex: needs N >= 3 (flipped-spin states degenerate)");
  const std::uint64_t dim = dim_of(n_sites);
  Matrix rho = Matrix::Zero(dim, dim);
  for (int l = 0; l < n_sites; ++l) {
    const Vector v = flipped_cat(n_sites, l);
    rho += v * v.adjoint();
  }
  rho /= static_cast<double>(n_sites);
  return DensityMatrix(std::move(rho));
}

PureState product_plus(int n_sites) {
  const std::uint64_t dim = dim_of(n_sites);
  const double a = std::pow(2.0, -0.5 * n_sites);
  return PureState(Vector::Constant(dim, Complex(a, 0.0)));
}

PureState product_polarized(int n_sites, double theta, double phi) {
  const std::uint64_t dim = dim_of(n_sites);
  const Complex c0(std::cos(theta / 2.0), 0.0);
  const Complex c1 = std::polar(std::sin(theta / 2.0), phi);
  Vector amps(dim);
  for (std::uint64_t x = 0; x < dim; ++x) {
    Complex a(1.0, 0.0);
    for (int l = 0; l < n_sites; ++l) a *= site_bit(x, l, n_sites) ? c1 : c0;
    amps(x) = a;
  }
  return PureState(std::move(amps));
}

DensityMatrix thermal_x(int n_sites, double b) {
  dim_of(n_sites);
  const double p = std::tanh(b);
  Eigen::Matrix2cd site;
  site << 0.5, 0.5 * p, 0.5 * p, 0.5;
  Matrix rho = site;
  for (int l = 1; l < n_sites; ++l) rho = kron(rho, site);
  return DensityMatrix(std::move(rho));
}

double thermal_weight_b(double zeeman_frequency, double thermal_frequency) {
  if (thermal_frequency <= 0.0)
    throw std::invalid_argument("thermal_weight_b: thermal frequency must be positive");
  return zeeman_frequency / (2.0 * thermal_frequency);
}

DensityMatrix mz_projected_thermal(int n_sites, double b, int sector_m, double weight_tol) {
  const Projector eta = hamming_projector(n_sites, sector_m);
  const DensityMatrix th = thermal_x(n_sites, b);
  const std::uint64_t dim = dim_of(n_sites);

  const int ones = (n_sites - sector_m) / 2;
  std::vector<bool> in_sector(dim);
  double weight = 0.0;
  for (std::uint64_t x = 0; x < dim; ++x) {
    in_sector[x] = std::popcount(x) == ones;
    if (in_sector[x]) weight += th.matrix()(x, x).real();
  }
  if (weight <= weight_tol) {
    std::ostringstream msg;
    msg << "mz_projected_thermal: sector M=" << sector_m << " has thermal weight " << weight
        << " below tolerance";
    throw std::domain_error(msg.str());
  }
  (void)eta;  // construction validates the sector

  Matrix rho = Matrix::Zero(dim, dim);
  for (std::uint64_t y = 0; y < dim; ++y) {
    if (!in_sector[y]) continue;
    for (std::uint64_t x = 0; x < dim; ++x)
      if (in_sector[x]) rho(x, y) = th.matrix()(x, y) / weight;
  }
  return DensityMatrix(std::move(rho));
}

DensityMatrix mixture(double w, const DensityMatrix& cat, const DensityMatrix& sep) {
  if (!(w >= 0.0 && w <= 1.0))
    throw std::invalid_argument("mixture: weight must lie in [0, 1]");
  if (cat.dim() != sep.dim()) throw std::invalid_argument("mixture: dimension mismatch");
  return DensityMatrix(w * cat.matrix() + (1.0 - w) * sep.matrix());
}

Projector hamming_projector(int n_sites, int sector_m) {
  const std::uint64_t dim = dim_of(n_sites);
  if (std::abs(sector_m) > n_sites || (n_sites + sector_m) % 2 != 0) {
    std::ostringstream msg;
    msg << "hamming_projector: M=" << sector_m << " is not a valid M_z sector for N=" << n_sites;
    throw std::invalid_argument(msg.str());
  }
  const int ones = (n_sites - sector_m) / 2;
  std::vector<bool> keep(dim);
  for (std::uint64_t x = 0; x < dim; ++x) keep[x] = std::popcount(x) == ones;
  return Projector::from_diagonal(keep);
}

Projector positive_half_projector(const AdditiveObservable& a) {
  const std::uint64_t dim = static_cast<std::uint64_t>(a.dim());
  std::vector<bool> keep(dim);
  for (std::uint64_t x = 0; x < dim; ++x) keep[x] = a.spectrum()[x] > 0;
  Projector diag = Projector::from_diagonal(keep);
  if (a.is_diagonal()) return diag;
  return Projector::trusted(a.from_eigenbasis(diag.matrix()));
}

std::string to_string(StateKind kind) {
  switch (kind) {
    case StateKind::Ghz: return "ghz";
    case StateKind::Staircase: return "staircase";
    case StateKind::RhoEx: return "rho_ex";
    case StateKind::ProductPlus: return "product_plus";
    case StateKind::ProductPolarized: return "product_polarized";
    case StateKind::ThermalX: return "thermal_x";
    case StateKind::MzProjectedThermal: return "mz_projected_thermal";
    case StateKind::Mixture: return "mixture";
  }
  throw std::logic_error("unknown StateKind");
}

StateKind state_kind_from_string(const std::string& name) {
  if (name == "ghz") return StateKind::Ghz;
  if (name == "staircase") return StateKind::Staircase;
  if (name == "rho_ex") return StateKind::RhoEx;
  if (name == "product_plus") return StateKind::ProductPlus;
  if (name == "product_polarized") return StateKind::ProductPolarized;
  if (name == "thermal_x") return StateKind::ThermalX;
  if (name == "mz_projected_thermal" || name == "projected_thermal")
    return StateKind::MzProjectedThermal;
  if (name == "mixture") return StateKind::Mixture;
  throw std::invalid_argument("unknown state kind: " + name);
}

bool is_pure_kind(StateKind kind) {
  switch (kind) {
    case StateKind::Ghz:
    case StateKind::Staircase:
    case StateKind::ProductPlus:
    case StateKind::ProductPolarized:
      return true;
    default:
      return false;
  }
}

StateSpec StateSpec::make_ghz(int n) { return StateSpec{StateKind::Ghz, n, {}}; }
StateSpec StateSpec::make_staircase(int n) { return StateSpec{StateKind::Staircase, n, {}}; }
StateSpec StateSpec::make_rho_ex(int n) { return StateSpec{StateKind::RhoEx, n, {}}; }
StateSpec StateSpec::make_product_plus(int n) { return StateSpec{StateKind::ProductPlus, n, {}}; }

StateSpec StateSpec::make_product_polarized(int n, double theta, double phi) {
  nlohmann::json p;
  p["theta"] = theta;
  p["phi"] = phi;
  return StateSpec{StateKind::ProductPolarized, n, std::move(p)};
}

StateSpec StateSpec::make_thermal_x(int n, double b) {
  nlohmann::json p;
  p["b"] = b;
  return StateSpec{StateKind::ThermalX, n, std::move(p)};
}

StateSpec StateSpec::make_mz_projected_thermal(int n, double b, int sector_m) {
  nlohmann::json p;
  p["b"] = b;
  p["m"] = sector_m;
  return StateSpec{StateKind::MzProjectedThermal, n, std::move(p)};
}

StateSpec StateSpec::make_mixture(double w, const StateSpec& cat, const StateSpec& sep) {
  if (cat.n_sites != sep.n_sites)
    throw std::invalid_argument("StateSpec::make_mixture: site-count mismatch");
  nlohmann::json p;
  p["w"] = w;
  p["cat"] = cat.to_json();
  p["sep"] = sep.to_json();
  return StateSpec{StateKind::Mixture, cat.n_sites, std::move(p)};
}

nlohmann::json StateSpec::to_json() const {
  nlohmann::json j;
  j["kind"] = to_string(kind);
  j["n"] = n_sites;
  j["params"] = params.is_null() ? nlohmann::json::object() : params;
  return j;
}

StateSpec StateSpec::from_json(const nlohmann::json& j) {
  StateSpec spec;
  spec.kind = state_kind_from_string(j.at("kind").get<std::string>());
  spec.n_sites = j.at("n").get<int>();
  spec.params = j.value("params", nlohmann::json::object());
  return spec;
}

PureState make_pure(const StateSpec& spec) {
  switch (spec.kind) {
    case StateKind::Ghz: return ghz(spec.n_sites);
    case StateKind::Staircase: return staircase(spec.n_sites);
    case StateKind::ProductPlus: return product_plus(spec.n_sites);
    case StateKind::ProductPolarized:
      return product_polarized(spec.n_sites, spec.params.at("theta").get<double>(),
                               spec.params.at("phi").get<double>());
    default:
      throw std::invalid_argument("make_pure: " + to_string(spec.kind) + " is not a pure kind");
  }
}

DensityMatrix make_density(const StateSpec& spec) {
  switch (spec.kind) {
    case StateKind::RhoEx: return rho_ex(spec.n_sites);
    case StateKind::ThermalX:
      return thermal_x(spec.n_sites, spec.params.at("b").get<double>());
    case StateKind::MzProjectedThermal:
      return mz_projected_thermal(spec.n_sites, spec.params.at("b").get<double>(),
                                  spec.params.at("m").get<int>());
    case StateKind::Mixture: {
      const double w = spec.params.at("w").get<double>();
      const DensityMatrix cat = make_density(StateSpec::from_json(spec.params.at("cat")));
      const DensityMatrix sep = make_density(StateSpec::from_json(spec.params.at("sep")));
      return mixture(w, cat, sep);
    }
    default:
      return DensityMatrix::from_pure(make_pure(spec));
  }
}

std::optional<LowRankState> low_rank_decomposition(const StateSpec& spec) {
  LowRankState out;
  out.n_sites = spec.n_sites;
  if (is_pure_kind(spec.kind)) {
    out.vectors.push_back(make_pure(spec).amplitudes());
    out.weights.push_back(1.0);
    return out;
  }
  switch (spec.kind) {
    case StateKind::RhoEx: {
      if (spec.n_sites < 3) throw std::invalid_argument("rho_ex: needs N >= 3");
      const double w = 1.0 / spec.n_sites;
      for (int l = 0; l < spec.n_sites; ++l) {
        out.vectors.push_back(flipped_cat(spec.n_sites, l));
        out.weights.push_back(w);
      }
      return out;
    }
    case StateKind::ThermalX: {
      if (spec.params.at("b").get<double>() != 0.0) return std::nullopt;
      out.identity_weight = 1.0;
      return out;
    }
    case StateKind::Mixture: {
      const double w = spec.params.at("w").get<double>();
      auto cat = low_rank_decomposition(StateSpec::from_json(spec.params.at("cat")));
      auto sep = low_rank_decomposition(StateSpec::from_json(spec.params.at("sep")));
      if (!cat || !sep) return std::nullopt;
      for (std::size_t i = 0; i < cat->vectors.size(); ++i) {
        out.vectors.push_back(std::move(cat->vectors[i]));
        out.weights.push_back(w * cat->weights[i]);
      }
      for (std::size_t i = 0; i < sep->vectors.size(); ++i) {
        out.vectors.push_back(std::move(sep->vectors[i]));
        out.weights.push_back((1.0 - w) * sep->weights[i]);
      }
      out.identity_weight = w * cat->identity_weight + (1.0 - w) * sep->identity_weight;
      return out;
    }
    default:
      return std::nullopt;
  }
}

}  // namespace catsense
