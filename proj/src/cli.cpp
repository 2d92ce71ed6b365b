#include "leggett/cli.hpp"

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "leggett/errors.hpp"
#include "leggett/format.hpp"
#include "leggett/geometry.hpp"
#include "leggett/inequalities.hpp"
#include "leggett/nlhv_oracle.hpp"
#include "leggett/parallel.hpp"

namespace leggett::cli {

namespace {

constexpr std::size_t kMinOracleGrid = 50;

template <typename T>
T field(const nlohmann::json& j, const char* key, const std::string& path, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(path + key, "has the wrong type");
  }
}

QubitReadout readout_from_json(const nlohmann::json& j, const std::string& path,
                               QubitReadout base) {
  if (!j.is_object()) throw ConfigError(path, "must be an object");
  base.f0 = field(j, "f0", path + ".", base.f0);
  base.f1 = field(j, "f1", path + ".", base.f1);
  return base;
}

std::string opt_field(const std::optional<double>& x) { return x ? format_double(*x) : ""; }

nlohmann::json opt_json(const std::optional<double>& x) {
  return x ? nlohmann::json(*x) : nlohmann::json(nullptr);
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open '" + path + "' for writing");
  file << text;
  if (!file) throw IoError("failed writing '" + path + "'");
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw IoError("cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(file);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path, std::string("invalid JSON: ") + e.what());
  }
}

// Flags shared by sweep and simulate; each overrides the config file value.
struct RunFlags {
  std::string config_path;
  std::optional<std::string> inequality, bell, out, format;
  std::optional<double> visibility, phi_start, phi_stop;
  std::optional<int> steps;
  std::optional<std::uint64_t> shots, seed;
  std::optional<double> electron_f0, electron_f1, nuclear_f0, nuclear_f1;
  bool correct = false;

  void attach(CLI::App& app, bool sweep_grid) {
    app.add_option("--config", config_path, "JSON run configuration");
    app.add_option("--inequality", inequality, "i26 or i28");
    app.add_option("--visibility", visibility, "Werner visibility V");
    app.add_option("--bell", bell, "phi_minus, phi_plus, psi_minus or psi_plus");
    if (sweep_grid) {
      app.add_option("--phi-start", phi_start, "first angle (degrees)");
      app.add_option("--phi-stop", phi_stop, "last angle (degrees)");
      app.add_option("--steps", steps, "number of grid angles");
    }
    app.add_option("--shots", shots, "shots per setting (0 = analytic only)");
    app.add_option("--seed", seed, "master seed");
    app.add_option("--electron-f0", electron_f0);
    app.add_option("--electron-f1", electron_f1);
    app.add_option("--nuclear-f0", nuclear_f0);
    app.add_option("--nuclear-f1", nuclear_f1);
    app.add_flag("--correct", correct, "also report readout-corrected values");
    app.add_option("--out", out, "output path (default stdout)");
    app.add_option("--format", format, "csv or json");
  }

  RunConfig resolve() const {
    RunConfig cfg;
    if (!config_path.empty()) cfg = config_from_json(read_json_file(config_path));
    try {
      if (inequality) cfg.kind = parse_inequality_kind(*inequality);
    } catch (const DomainError& e) {
      throw ConfigError("--inequality", e.what());
    }
    try {
      if (bell) cfg.bell = parse_bell_kind(*bell);
    } catch (const DomainError& e) {
      throw ConfigError("--bell", e.what());
    }
    if (visibility) cfg.visibility = *visibility;
    if (phi_start) cfg.phi_start_deg = *phi_start;
    if (phi_stop) cfg.phi_stop_deg = *phi_stop;
    if (steps) cfg.steps = *steps;
    if (shots) cfg.shots = *shots;
    if (seed) cfg.seed = *seed;
    if (electron_f0) cfg.readout.bob.f0 = *electron_f0;
    if (electron_f1) cfg.readout.bob.f1 = *electron_f1;
    if (nuclear_f0) cfg.readout.alice.f0 = *nuclear_f0;
    if (nuclear_f1) cfg.readout.alice.f1 = *nuclear_f1;
    if (correct) cfg.correct = true;
    if (out) cfg.out = *out;
    if (format) {
      if (*format == "csv")
        cfg.format = OutputFormat::csv;
      else if (*format == "json")
        cfg.format = OutputFormat::json;
      else
        throw ConfigError("--format", "must be csv or json");
    }
    validate(cfg);
    return cfg;
  }
};

std::vector<double> parse_angle_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("--phi", "'" + item + "' is not a number");
    }
  }
  if (out.empty()) throw ConfigError("--phi", "needs at least one angle");
  for (double d : out)
    if (!(d >= 0.0 && d <= 180.0)) throw ConfigError("--phi", "angles must lie in [0, 180]");
  return out;
}

std::string fixed2(double x) {
  std::ostringstream s;
  s.imbue(std::locale::classic());
  s << std::fixed << std::setprecision(2) << x;
  return s.str();
}

std::string fixed3(double x) {
  std::ostringstream s;
  s.imbue(std::locale::classic());
  s << std::fixed << std::setprecision(3) << x;
  return s.str();
}

std::vector<PublishedValue> values_from_file(const std::string& path) {
  const auto doc = read_json_file(path);
  if (!doc.is_array()) throw ConfigError(path, "expected an array of values");
  std::vector<PublishedValue> out;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& e = doc[i];
    const std::string where = path + "[" + std::to_string(i) + "]";
    try {
      out.push_back({e.value("label", "value" + std::to_string(i + 1)),
                     parse_inequality_kind(e.at("kind").get<std::string>()),
                     e.at("value").get<double>(), e.at("sigma").get<double>()});
    } catch (const nlohmann::json::exception&) {
      throw ConfigError(where, "needs kind, value and sigma");
    } catch (const DomainError& err) {
      throw ConfigError(where, err.what());
    }
    if (!(out.back().sigma > 0.0)) throw ConfigError(where + ".sigma", "must be positive");
  }
  return out;
}

}  // namespace

RunConfig config_from_json(const nlohmann::json& j, RunConfig cfg) {
  if (!j.is_object()) throw ConfigError("<root>", "config must be a JSON object");
  try {
    if (j.contains("inequality"))
      cfg.kind = parse_inequality_kind(field<std::string>(j, "inequality", "", "i26"));
  } catch (const DomainError& e) {
    throw ConfigError("inequality", e.what());
  }
  if (j.contains("state")) {
    const auto& s = j.at("state");
    if (!s.is_object()) throw ConfigError("state", "must be an object");
    cfg.visibility = field(s, "visibility", "state.", cfg.visibility);
    try {
      if (s.contains("bell")) cfg.bell = parse_bell_kind(field<std::string>(s, "bell", "state.", ""));
    } catch (const DomainError& e) {
      throw ConfigError("state.bell", e.what());
    }
  }
  if (j.contains("phi")) {
    const auto& p = j.at("phi");
    if (!p.is_object()) throw ConfigError("phi", "must be an object");
    cfg.phi_start_deg = field(p, "start_deg", "phi.", cfg.phi_start_deg);
    cfg.phi_stop_deg = field(p, "stop_deg", "phi.", cfg.phi_stop_deg);
    cfg.steps = field(p, "steps", "phi.", cfg.steps);
  }
  if (j.contains("shots")) {
    const auto& s = j.at("shots");
    if (!s.is_number_integer() || s.get<long long>() < 0)
      throw ConfigError("shots", "must be a non-negative integer");
    cfg.shots = s.get<std::uint64_t>();
  }
  cfg.seed = field(j, "seed", "", cfg.seed);
  if (j.contains("readout")) {
    const auto& r = j.at("readout");
    if (!r.is_object()) throw ConfigError("readout", "must be an object");
    if (r.contains("electron"))
      cfg.readout.bob = readout_from_json(r.at("electron"), "readout.electron", cfg.readout.bob);
    if (r.contains("nuclear"))
      cfg.readout.alice =
          readout_from_json(r.at("nuclear"), "readout.nuclear", cfg.readout.alice);
  }
  cfg.correct = field(j, "correct", "", cfg.correct);
  cfg.out = field(j, "out", "", cfg.out);
  if (j.contains("format")) {
    const auto f = field<std::string>(j, "format", "", "csv");
    if (f == "csv")
      cfg.format = OutputFormat::csv;
    else if (f == "json")
      cfg.format = OutputFormat::json;
    else
      throw ConfigError("format", "must be csv or json");
  }
  return cfg;
}

void validate(const RunConfig& c) {
  if (!(c.visibility >= 0.0 && c.visibility <= 1.0))
    throw ConfigError("visibility", "must lie in [0, 1]");
  if (!(c.phi_start_deg >= 0.0 && c.phi_start_deg <= c.phi_stop_deg && c.phi_stop_deg <= 180.0))
    throw ConfigError("phi", "need 0 <= start_deg <= stop_deg <= 180");
  if (c.steps < 1) throw ConfigError("steps", "must be >= 1");
  auto check = [](double f, const char* name) {
    if (!(f > 0.5 && f <= 1.0)) throw ConfigError(name, "readout fidelity must lie in (0.5, 1]");
  };
  check(c.readout.bob.f0, "readout.electron.f0");
  check(c.readout.bob.f1, "readout.electron.f1");
  check(c.readout.alice.f0, "readout.nuclear.f0");
  check(c.readout.alice.f1, "readout.nuclear.f1");
}

std::vector<double> sweep_angles_deg(const RunConfig& c) {
  std::vector<double> out;
  if (c.steps == 1) return {c.phi_start_deg};
  const double step = (c.phi_stop_deg - c.phi_start_deg) / (c.steps - 1);
  for (int i = 0; i < c.steps; ++i)
    out.push_back(i + 1 == c.steps ? c.phi_stop_deg : c.phi_start_deg + i * step);
  return out;
}

std::vector<SweepRow> run_sweep(const RunConfig& c) {
  validate(c);
  const auto angles = sweep_angles_deg(c);
  const auto& kind = c.kind;
  std::optional<TwoQubitState> state;
  std::optional<CorrelationTensor> tensor;
  if (c.shots > 0) {
    state = werner(c.visibility, c.bell);
    tensor = correlation_tensor(*state);
  }
  return detail::parallel_map<SweepRow>(angles.size(), [&](std::size_t i) {
    SweepRow row;
    const double phi = deg_to_rad(angles[i]);
    row.phi_deg = angles[i];
    row.analytic = quantum_value(kind, phi, c.visibility);
    row.bound = kind.bound;
    double value = row.analytic;
    std::optional<double> sigma;
    if (c.shots > 0) {
      const auto config = adapt_to_state(*tensor, canonical_config(kind, phi));
      const auto result =
          run_experiment(*state, config, kind, c.shots, sub_seed(c.seed, i), c.readout, c.correct);
      row.raw = result.raw.value.value;
      row.sigma_raw = result.raw.sigma;
      row.sigmas_raw = result.raw.sigmas_violation;
      value = *row.raw;
      sigma = row.sigma_raw;
      if (result.corrected) {
        row.corrected = result.corrected->value.value;
        row.sigma_corrected = result.corrected->sigma;
        row.sigmas_corrected = result.corrected->sigmas_violation;
        value = *row.corrected;
        sigma = row.sigma_corrected;
      }
    }
    row.violated = value > kind.bound;
    row.marginal = sigma.has_value() && std::abs(value - kind.bound) < 3.0 * *sigma;
    return row;
  });
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out =
      "phi_deg,I_analytic,bound,I_raw,sigma_raw,I_corrected,sigma_corrected,"
      "sigmas_violation_raw,sigmas_violation_corrected,violated,marginal\n";
  for (const auto& r : rows) {
    out += format_double(r.phi_deg) + "," + format_double(r.analytic) + "," +
           format_double(r.bound) + "," + opt_field(r.raw) + "," + opt_field(r.sigma_raw) + "," +
           opt_field(r.corrected) + "," + opt_field(r.sigma_corrected) + "," +
           opt_field(r.sigmas_raw) + "," + opt_field(r.sigmas_corrected) + "," +
           (r.violated ? "true" : "false") + "," + (r.marginal ? "true" : "false") + "\n";
  }
  return out;
}

nlohmann::json sweep_json(const RunConfig& c, const std::vector<SweepRow>& rows) {
  nlohmann::json out_rows = nlohmann::json::array();
  for (const auto& r : rows)
    out_rows.push_back({{"phi_deg", r.phi_deg},
                        {"I_analytic", r.analytic},
                        {"bound", r.bound},
                        {"I_raw", opt_json(r.raw)},
                        {"sigma_raw", opt_json(r.sigma_raw)},
                        {"I_corrected", opt_json(r.corrected)},
                        {"sigma_corrected", opt_json(r.sigma_corrected)},
                        {"sigmas_violation_raw", opt_json(r.sigmas_raw)},
                        {"sigmas_violation_corrected", opt_json(r.sigmas_corrected)},
                        {"violated", r.violated},
                        {"marginal", r.marginal}});
  return {{"kind", std::string(c.kind.name())},
          {"visibility", c.visibility},
          {"bell", std::string(to_string(c.bell))},
          {"shots", c.shots},
          {"seed", c.seed},
          {"rows", out_rows}};
}

std::vector<PublishedValue> published_values() {
  return {{"i26_raw", InequalityKind::i26(), 6.136, 0.034},
          {"i26_corrected", InequalityKind::i26(), 6.382, 0.035},
          {"i28_raw", InequalityKind::i28(), 8.323, 0.045},
          {"i28_corrected", InequalityKind::i28(), 8.729, 0.047}};
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Leggett-inequality simulation toolkit"};
  app.require_subcommand(1);

  RunFlags sweep_flags;
  auto* sweep = app.add_subcommand("sweep", "tabulate the inequality over a phi grid");
  sweep_flags.attach(*sweep, true);

  RunFlags sim_flags;
  double sim_phi = 0.0;
  auto* simulate = app.add_subcommand("simulate", "simulate the experiment at one phi");
  sim_flags.attach(*simulate, false);
  simulate->add_option("--phi", sim_phi, "angle between paired settings (degrees)")->required();

  std::string verify_kind = "i26", verify_phis, verify_out;
  std::size_t verify_grid = 500;
  auto* verify = app.add_subcommand("verify", "certify the hidden-variable bound by grid search");
  verify->add_option("--inequality", verify_kind, "i26 or i28");
  verify->add_option("--phi", verify_phis, "comma-separated angles (degrees)")->required();
  verify->add_option("--grid", verify_grid, "Fibonacci points per sphere (>= 50)");
  verify->add_option("--out", verify_out, "output path (default stdout)");

  std::string thresholds_kind;
  auto* thresholds = app.add_subcommand("thresholds", "visibility and fidelity thresholds");
  thresholds->add_option("--inequality", thresholds_kind, "i26 or i28")->required();

  bool report_json = false;
  std::string report_file;
  auto* report = app.add_subcommand("report", "sigma-violation arithmetic on published values");
  report->add_flag("--json", report_json, "emit JSON");
  report->add_option("--from-file", report_file, "JSON array of {label, kind, value, sigma}");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
      out << app.help();
      return kOk;
    } catch (const CLI::CallForAllHelp&) {
      out << app.help("", CLI::AppFormatMode::All);
      return kOk;
    } catch (const CLI::ParseError& e) {
      err << "error: " << e.what() << "\n";
      return kUsageError;
    }

    if (sweep->parsed()) {
      const RunConfig cfg = sweep_flags.resolve();
      const auto rows = run_sweep(cfg);
      const std::string text =
          cfg.format == OutputFormat::csv ? sweep_csv(rows) : sweep_json(cfg, rows).dump(2) + "\n";
      write_output(cfg.out, text, out);
      return kOk;
    }

    if (simulate->parsed()) {
      const RunConfig cfg = sim_flags.resolve();
      if (cfg.shots < 1) throw ConfigError("shots", "simulate needs shots >= 1");
      if (!(sim_phi >= 0.0 && sim_phi <= 180.0)) throw ConfigError("--phi", "must lie in [0, 180]");
      const auto state = werner(cfg.visibility, cfg.bell);
      const auto config = adapt_to_state(correlation_tensor(state),
                                         canonical_config(cfg.kind, deg_to_rad(sim_phi)));
      const auto result =
          run_experiment(state, config, cfg.kind, cfg.shots, cfg.seed, cfg.readout, cfg.correct);
      const std::string text = cfg.format == OutputFormat::csv ? counts_csv(result)
                                                               : to_json(result).dump(2) + "\n";
      write_output(cfg.out, text, out);
      return kOk;
    }

    if (verify->parsed()) {
      InequalityKind kind = InequalityKind::i26();
      try {
        kind = parse_inequality_kind(verify_kind);
      } catch (const DomainError& e) {
        throw ConfigError("--inequality", e.what());
      }
      if (verify_grid < kMinOracleGrid) throw ConfigError("--grid", "must be >= 50");
      bool all_passed = true;
      nlohmann::json reports = nlohmann::json::array();
      for (double deg : parse_angle_list(verify_phis)) {
        const auto r = verify_bound(canonical_config(kind, deg_to_rad(deg)), verify_grid);
        all_passed = all_passed && r.passed();
        reports.push_back(to_json(r));
      }
      const nlohmann::json doc = {{"reports", reports}, {"all_passed", all_passed}};
      write_output(verify_out, doc.dump(2) + "\n", out);
      if (!all_passed) {
        err << "error: oracle value exceeds the bound; the oracle or geometry is broken\n";
        return kVerificationFailed;
      }
      return kOk;
    }

    if (thresholds->parsed()) {
      InequalityKind kind = InequalityKind::i26();
      try {
        kind = parse_inequality_kind(thresholds_kind);
      } catch (const DomainError& e) {
        throw ConfigError("--inequality", e.what());
      }
      const auto peak = max_violation(kind, 1.0);
      const nlohmann::json doc = {{"kind", std::string(kind.name())},
                                  {"v_min", v_min(kind)},
                                  {"f_min", f_min(kind)},
                                  {"phi_star_deg", rad_to_deg(peak.phi_star)},
                                  {"max_value", peak.value}};
      out << doc.dump(2) << "\n";
      return kOk;
    }

    if (report->parsed()) {
      const auto values = report_file.empty() ? published_values() : values_from_file(report_file);
      if (report_json) {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& v : values)
          rows.push_back({{"label", v.label},
                          {"kind", std::string(v.kind.name())},
                          {"value", v.value},
                          {"sigma", v.sigma},
                          {"bound", v.kind.bound},
                          {"sigmas_violation", sigma_violation(v.value, v.sigma, v.kind)}});
        out << rows.dump(2) << "\n";
      } else {
        out << std::left << std::setw(16) << "label" << std::setw(6) << "kind" << std::setw(8)
            << "value" << std::setw(7) << "sigma" << std::setw(7) << "bound"
            << "sigmas_violation\n";
        for (const auto& v : values)
          out << std::left << std::setw(16) << v.label << std::setw(6) << v.kind.name()
              << std::setw(8) << fixed3(v.value) << std::setw(7) << fixed3(v.sigma)
              << std::setw(7) << format_double(v.kind.bound)
              << fixed2(sigma_violation(v.value, v.sigma, v.kind)) << "\n";
      }
      return kOk;
    }
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const ConfigError& e) {
    err << "error: " << e.field() << ": " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }
  return kUsageError;
}

}  // namespace leggett::cli
