#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "catsense/macroscopicity.hpp"
#include "catsense/metrology.hpp"
#include "catsense/states.hpp"

namespace catsense {

/// "A..B" (inclusive, default step 2 to preserve sector parity) or
/// "A..B:step" or a single value.
std::vector<int> parse_n_range(const std::string& text);

struct TimeGrid {
  double lo = 0.01;
  double hi = 10.0;
  int points = 60;

  std::vector<double> log_points() const;
};

/// "lo..hi/points", log-spaced.
TimeGrid parse_t_grid(const std::string& text);

inline constexpr int kAutoSector = std::numeric_limits<int>::min();

struct RunConfig {
  std::string command;
  std::string family = "ghz";
  std::string observable;        // empty: per-family default
  std::string n_range;           // empty: per-command default
  double b = 0.6931471805599453; // atanh(0.6)
  int sector_m = kAutoSector;
  double lambda = 0.7071067811865476;  // T2 = 1
  double tau_c = 1.0;
  double p2 = 0.1;
  double T_total = 1.0;
  std::string working_point = "scan";  // scan | p2 | phase
  double phase = 1.5707963267948966;   // pi/2, used by working_point=phase
  std::string t_range;                 // empty: auto
  double t_int = 0.1;
  double omega0 = 0.0;                 // 0: derive from p2
  std::uint64_t seed = 20260809;
  int n_traj = 10000;
  std::string out_path;                // empty: stdout
  std::string format = "csv";

  nlohmann::json to_json() const;
  static RunConfig from_json(const nlohmann::json& j);
  void validate() const;
};

struct ExperimentResult {
  nlohmann::json config_echo;
  std::vector<std::string> columns;
  std::vector<nlohmann::json> records;  // objects keyed by column name
  nlohmann::json summary;
  double wall_seconds = 0.0;
};

ExperimentResult cmd_qindex(const RunConfig& config);
ExperimentResult cmd_ghz_curve(const RunConfig& config);
ExperimentResult cmd_scaling(const RunConfig& config);
ExperimentResult cmd_thermal_demo(const RunConfig& config);
ExperimentResult cmd_mc_validate(const RunConfig& config);
ExperimentResult cmd_ramsey(const RunConfig& config);
ExperimentResult cmd_optimize(const RunConfig& config);

/// Dispatch by config.command; fills wall_seconds.
ExperimentResult run_command(const RunConfig& config);

/// `#`-prefixed JSON config line, a timestamp line, a header row, records
/// sorted as produced, then a `# summary` line. Byte-identical across reruns
/// apart from the timestamp line.
void write_csv(const ExperimentResult& result, std::ostream& out);
void write_json(const ExperimentResult& result, std::ostream& out);

/// Writes to config.out_path ("" or "-" means stdout) in config.format.
void emit_result(const ExperimentResult& result, const RunConfig& config);

/// One named probe family at size n: state, observable, readout, and the
/// observable variance when the state is pure (Cramer-Rao floor).
struct FamilyInstance {
  StateSpec spec;
  DensityMatrix state;
  AdditiveObservable observable;
  Projector eta;
  std::optional<double> variance;
};

FamilyInstance make_family_instance(const std::string& family, int n, const RunConfig& config);

AdditiveObservable observable_by_label(const std::string& label, int n);
int default_sector(int n);

}  // namespace catsense
