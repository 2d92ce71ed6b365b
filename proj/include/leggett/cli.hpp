#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "leggett/expsim.hpp"
#include "leggett/inequality_kind.hpp"
#include "leggett/qstate.hpp"

namespace leggett::cli {

enum ExitCode : int { kOk = 0, kVerificationFailed = 1, kUsageError = 2, kIoError = 3 };

// Bad configuration value; `field` names the offending key or flag.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class OutputFormat { csv, json };

struct RunConfig {
  InequalityKind kind = InequalityKind::i26();
  double visibility = 1.0;
  BellKind bell = BellKind::phi_minus;
  double phi_start_deg = 0.0;
  double phi_stop_deg = 90.0;
  int steps = 61;
  std::uint64_t shots = 0;  // 0 = analytic only
  std::uint64_t seed = 0;
  ReadoutModel readout;
  bool correct = false;
  std::string out;  // empty = stdout
  OutputFormat format = OutputFormat::csv;
};

// Reads a JSON config document. Missing keys keep their defaults.
RunConfig config_from_json(const nlohmann::json& j, RunConfig base = {});

// Throws ConfigError when a RunConfig invariant fails.
void validate(const RunConfig& config);

std::vector<double> sweep_angles_deg(const RunConfig& config);

struct SweepRow {
  double phi_deg = 0.0;
  double analytic = 0.0;
  double bound = 0.0;
  std::optional<double> raw, sigma_raw, corrected, sigma_corrected;
  std::optional<double> sigmas_raw, sigmas_corrected;
  bool violated = false;
  bool marginal = false;  // |I - bound| < 3 sigma
};

// One row per grid angle, in angle order. With shots == 0 no sampling happens.
std::vector<SweepRow> run_sweep(const RunConfig& config);

std::string sweep_csv(const std::vector<SweepRow>& rows);
nlohmann::json sweep_json(const RunConfig& config, const std::vector<SweepRow>& rows);

struct PublishedValue {
  std::string label;
  InequalityKind kind;
  double value;
  double sigma;
};

// The four published maxima (raw and readout-corrected, both inequalities).
std::vector<PublishedValue> published_values();

// Entry point shared by the leggett_cli binary and the tests. args[0] is the
// program name. Diagnostics go to err as a single "error: ..." line.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace leggett::cli
