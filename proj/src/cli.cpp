#include "qsink/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

namespace qsink::cli {

using nlohmann::json;

namespace {

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

json matrix_json(const ComplexMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.dim(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.dim(); ++j) {
      row.push_back(complex_json(m(i, j)));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

json ptm_json(const PauliTransferMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < 4; ++i) {
    rows.push_back(json::array({m(i, 0), m(i, 1), m(i, 2), m(i, 3)}));
  }
  return rows;
}

json lambdas_json(const UnitalParameters& l) {
  return {{"lambda_x", l.lambda_x}, {"lambda_y", l.lambda_y}, {"lambda_z", l.lambda_z}};
}

json params_json(const ChannelParams& p) {
  return {{"gamma_h", p.gamma_h}, {"gamma_v", p.gamma_v}, {"gamma", p.gamma}};
}

ChannelParams params_from_json(const json& j) {
  ChannelParams p;
  for (const auto& [key, value] : j.items()) {
    if (key == "gamma_h") {
      p.gamma_h = value.get<double>();
    } else if (key == "gamma_v") {
      p.gamma_v = value.get<double>();
    } else if (key == "gamma") {
      p.gamma = value.get<double>();
    } else {
      throw std::invalid_argument("unknown channel key '" + key + "'");
    }
  }
  return p;
}

ComplexMatrix custom_state_from_json(const json& j) {
  if (!j.is_array() || j.size() != 4) {
    throw std::invalid_argument("custom_state must be a 4x4 array of [re, im] pairs");
  }
  ComplexMatrix m(4);
  for (std::size_t i = 0; i < 4; ++i) {
    if (!j[i].is_array() || j[i].size() != 4) {
      throw std::invalid_argument("custom_state must be a 4x4 array of [re, im] pairs");
    }
    for (std::size_t k = 0; k < 4; ++k) {
      const auto& z = j[i][k];
      if (z.is_number()) {
        m(i, k) = z.get<double>();
      } else if (z.is_array() && z.size() == 2) {
        m(i, k) = cplx(z[0].get<double>(), z[1].get<double>());
      } else {
        throw std::invalid_argument("custom_state entries must be numbers or [re, im] pairs");
      }
    }
  }
  return m;
}

ComplexMatrix custom_state_from_list(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    values.push_back(std::stod(item, &used));
  }
  if (values.size() != 32) {
    throw std::invalid_argument("--rho expects 32 comma-separated numbers (re, im of 16 entries)");
  }
  ComplexMatrix m(4);
  for (std::size_t k = 0; k < 16; ++k) {
    m(k / 4, k % 4) = cplx(values[2 * k], values[2 * k + 1]);
  }
  return m;
}

InitialState parse_initial_state(const std::string& s) {
  if (s == "max_entangled") return InitialState::max_entangled;
  if (s == "optimal") return InitialState::optimal;
  if (s == "custom") return InitialState::custom;
  throw std::invalid_argument("unknown initial state '" + s + "'");
}

OutputFormat parse_format(const std::string& s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  throw std::invalid_argument("unknown format '" + s + "'");
}

void emit(const JobConfig& config, const std::string& text, std::ostream& out) {
  if (config.output_path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(config.output_path, std::ios::binary | std::ios::trunc);
  if (!file) {
    throw std::runtime_error("cannot open '" + config.output_path + "' for writing");
  }
  file << text;
  if (!file.flush()) {
    throw std::runtime_error("failed writing '" + config.output_path + "'");
  }
}

// Runs a command body, mapping input errors to kExitUsage.
int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

LifetimeResult lifetime_for(const JobConfig& config, double horizon) {
  return max_lifetime(config.line1, config.line2, horizon);
}

double search_horizon(const JobConfig& config) {
  return config.t_max.value_or(default_lifetime_horizon(config.line1, config.line2));
}

std::string no_lifetime_message(double horizon) {
  return "no finite lifetime up to t_max = " + format_number(horizon);
}

} // namespace

void JobConfig::validate() const {
  line1.validate();
  line2.validate();
  if (t_max && (!(*t_max > 0.0) || !std::isfinite(*t_max))) {
    throw std::invalid_argument("t_max must be positive and finite");
  }
  if (steps < 2) {
    throw std::invalid_argument("steps must be at least 2");
  }
  if (time && (!(*time >= 0.0) || !std::isfinite(*time))) {
    throw std::invalid_argument("t must be finite and non-negative");
  }
  if (initial_state == InitialState::custom) {
    if (!custom_state) {
      throw std::invalid_argument("initial state 'custom' requires a custom state");
    }
    if (!TwoQubitState(*custom_state).normalized()) {
      throw std::invalid_argument("custom state must have unit trace");
    }
  }
}

JobConfig config_from_json(const json& j) {
  if (!j.is_object()) {
    throw std::invalid_argument("config must be a JSON object");
  }
  JobConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "line1") {
      c.line1 = params_from_json(value);
    } else if (key == "line2") {
      c.line2 = params_from_json(value);
    } else if (key == "t_max") {
      c.t_max = value.get<double>();
    } else if (key == "steps") {
      c.steps = value.get<int>();
    } else if (key == "t") {
      c.time = value.get<double>();
    } else if (key == "initial_state") {
      c.initial_state = parse_initial_state(value.get<std::string>());
    } else if (key == "custom_state") {
      c.custom_state = custom_state_from_json(value);
    } else if (key == "output_path") {
      c.output_path = value.get<std::string>();
    } else if (key == "format") {
      c.format = parse_format(value.get<std::string>());
    } else {
      throw std::invalid_argument("unknown config key '" + key + "'");
    }
  }
  return c;
}

JobConfig load_config_file(const std::string& path) {
  std::ifstream file(path);
  if (!file) {
    throw std::runtime_error("cannot open config '" + path + "'");
  }
  return config_from_json(json::parse(file));
}

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

int cmd_lifetime(const JobConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    config.validate();
    const double horizon = search_horizon(config);
    const LifetimeResult r = lifetime_for(config, horizon);

    json report;
    report["t_max"] = horizon;
    report["tau"] = r.tau ? json(*r.tau) : json(nullptr);
    report["bracket"] = json::array({r.bracket.first, r.bracket.second});
    report["residual"] = r.residual;
    report["iterations"] = r.iterations;
    report["lhs_at_zero"] = r.lhs_at_zero;
    report["sign_reversal"] = r.sign_reversal;
    if (r.tau) {
      report["lambdas_at_tau"] = {{"line1", lambdas_json(unital_parameters(config.line1, *r.tau))},
                                  {"line2", lambdas_json(unital_parameters(config.line2, *r.tau))}};
    }
    emit(config, report.dump(2) + "\n", out);
    if (!r.tau) {
      err << no_lifetime_message(horizon) << '\n';
      return static_cast<int>(kExitNoLifetime);
    }
    if (r.sign_reversal) {
      err << "warning: lifetime equation changes sign again after tau\n";
    }
    return static_cast<int>(kExitOk);
  });
}

int cmd_optimal_state(const JobConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    config.validate();
    const double horizon = search_horizon(config);
    const LifetimeResult r = lifetime_for(config, horizon);
    if (!r.tau) {
      err << no_lifetime_message(horizon) << '\n';
      return static_cast<int>(kExitNoLifetime);
    }
    const OptimalState opt = optimal_state(config.line1, config.line2, *r.tau);

    json psi = json::array();
    for (const auto& z : opt.psi) {
      psi.push_back(complex_json(z));
    }
    json report;
    report["tau"] = *r.tau;
    report["psi"] = psi;
    report["rho"] = matrix_json(opt.rho);
    report["schmidt_coefficients"] =
        json::array({opt.schmidt_coefficients.first, opt.schmidt_coefficients.second});
    report["b_diagonal_1"] = json::array({opt.b_diagonal_1[0], opt.b_diagonal_1[1]});
    report["b_diagonal_2"] = json::array({opt.b_diagonal_2[0], opt.b_diagonal_2[1]});
    emit(config, report.dump(2) + "\n", out);
    return static_cast<int>(kExitOk);
  });
}

int cmd_evolve(const JobConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    config.validate();
    const LifetimeResult r =
        lifetime_for(config, default_lifetime_horizon(config.line1, config.line2));
    if (!r.tau) {
      err << "optimal state undefined: "
          << no_lifetime_message(default_lifetime_horizon(config.line1, config.line2)) << '\n';
      return static_cast<int>(kExitNoLifetime);
    }
    const double horizon = config.t_max.value_or(2.0 * *r.tau);

    std::vector<std::string> names = {"psi_plus", "optimal"};
    std::vector<TwoQubitState> states = {
        TwoQubitState::pure(psi_plus()),
        TwoQubitState(optimal_state(config.line1, config.line2, *r.tau).rho)};
    if (config.initial_state == InitialState::custom) {
      names.emplace_back("custom");
      states.emplace_back(*config.custom_state);
    }

    std::vector<std::string> columns = {"t"};
    for (const auto& n : names) columns.push_back("negativity_" + n);
    for (const auto& n : names) columns.push_back("detection_prob_" + n);

    std::vector<std::vector<double>> rows;
    rows.reserve(static_cast<std::size_t>(config.steps));
    for (int i = 0; i < config.steps; ++i) {
      const double t = horizon * static_cast<double>(i) / static_cast<double>(config.steps - 1);
      const PauliTransferMatrix m1 = ptm_at(config.line1, t);
      const PauliTransferMatrix m2 = ptm_at(config.line2, t);
      std::vector<double> row(columns.size());
      row[0] = t;
      for (std::size_t k = 0; k < states.size(); ++k) {
        const ConditionalState cs = conditional_state(m1, m2, states[k]);
        row[1 + k] = negativity(cs.state);
        row[1 + states.size() + k] = cs.detection_probability;
      }
      rows.push_back(std::move(row));
    }

    std::string text;
    if (config.format == OutputFormat::csv) {
      for (std::size_t k = 0; k < columns.size(); ++k) {
        text += (k ? "," : "") + columns[k];
      }
      text += '\n';
      for (const auto& row : rows) {
        for (std::size_t k = 0; k < row.size(); ++k) {
          text += (k ? "," : "") + format_number(row[k]);
        }
        text += '\n';
      }
    } else {
      json report;
      report["tau"] = *r.tau;
      report["t_max"] = horizon;
      report["columns"] = columns;
      json jrows = json::array();
      for (const auto& row : rows) {
        json obj = json::object();
        for (std::size_t k = 0; k < row.size(); ++k) {
          obj[columns[k]] = row[k];
        }
        jrows.push_back(std::move(obj));
      }
      report["rows"] = std::move(jrows);
      text = report.dump(2) + "\n";
    }
    emit(config, text, out);
    return static_cast<int>(kExitOk);
  });
}

int cmd_sinkhorn(const JobConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    config.validate();
    if (!config.time) {
      throw std::invalid_argument("sinkhorn needs an evaluation time (--t)");
    }
    const double t = *config.time;
    const SinkhornDecomposition d = decompose(config.line1, t);
    const PauliTransferMatrix lambda = ptm_at(config.line1, t);

    const ComplexMatrix s_op = ComplexMatrix::identity(2) + pauli::z() * cplx(d.s);
    const double unital = std::max({std::abs(d.upsilon(0, 0) - 1.0), std::abs(d.upsilon(1, 0)),
                                    std::abs(d.upsilon(2, 0)), std::abs(d.upsilon(3, 0))});
    const double trace_preserving =
        std::max({std::abs(d.upsilon(0, 0) - 1.0), std::abs(d.upsilon(0, 1)),
                  std::abs(d.upsilon(0, 2)), std::abs(d.upsilon(0, 3))});

    json report;
    report["line"] = params_json(config.line1);
    report["t"] = t;
    report["s"] = d.s;
    report["a_op"] = matrix_json(d.a_op);
    report["b_op"] = matrix_json(d.b_op);
    report["a_diagonal"] = json::array({d.a_op(0, 0).real(), d.a_op(1, 1).real()});
    report["b_diagonal"] = json::array({d.b_op(0, 0).real(), d.b_op(1, 1).real()});
    report["lambda_x"] = d.lambda_x;
    report["lambda_y"] = d.lambda_y;
    report["lambda_z"] = d.lambda_z;
    report["upsilon"] = ptm_json(d.upsilon);
    report["residuals"] = {
        {"unital", unital},
        {"trace_preserving", trace_preserving},
        {"reconstruction", max_abs_diff(reconstruct(d), lambda)},
        {"fixed_point",
         t > 0.0 ? max_abs_diff(sinkhorn_fixed_point_map(lambda, s_op), s_op) : 0.0}};
    emit(config, report.dump(2) + "\n", out);
    return static_cast<int>(kExitOk);
  });
}

namespace {

struct SuiteOutcome {
  std::string name;
  double max_deviation = 0.0;
  double tolerance = 0.0;
  int cases = 0;
  std::string failure; ///< empty when every case passed
};

std::string describe(const ChannelParams& p, double t) {
  return "gamma_h=" + format_number(p.gamma_h) + " gamma_v=" + format_number(p.gamma_v) +
         " gamma=" + format_number(p.gamma) + " t=" + format_number(t);
}

struct ValidationGrid {
  std::vector<double> rates;
  std::vector<double> times;
};

ValidationGrid validation_grid(bool dense) {
  if (dense) {
    return {{0.0, 0.25, 0.5, 1.0, 2.0, 5.0}, {0.05, 0.1, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0}};
  }
  return {{0.0, 0.5, 1.0, 5.0}, {0.1, 0.25, 0.5, 1.0, 2.0}};
}

std::vector<ChannelParams> grid_params(const ValidationGrid& g, bool require_depolarization) {
  std::vector<ChannelParams> out;
  for (double gh : g.rates) {
    for (double gv : g.rates) {
      for (double gamma : g.rates) {
        if (gh == 0.0 && gv == 0.0 && gamma == 0.0) continue;
        if (require_depolarization && gamma == 0.0) continue;
        out.push_back({gh, gv, gamma});
      }
    }
  }
  return out;
}

void record(SuiteOutcome& s, double deviation, const std::string& where) {
  ++s.cases;
  const double d = std::isnan(deviation) ? std::numeric_limits<double>::infinity() : deviation;
  s.max_deviation = std::max(s.max_deviation, d);
  if (d > s.tolerance && s.failure.empty()) {
    s.failure = where + " deviation=" + format_number(d);
  }
}

SuiteOutcome suite_ptm_oracle(const ValidationGrid& g) {
  SuiteOutcome s{"ptm_oracle", 0.0, 1e-8, 0, {}};
  for (const auto& p : grid_params(g, false)) {
    const double dt = default_integration_step(p, g.times.back());
    const auto reference = ptm_trajectory_via_integration(p, g.times, dt);
    for (std::size_t k = 0; k < g.times.size(); ++k) {
      record(s, max_abs_diff(ptm_at(p, g.times[k]), reference[k]), describe(p, g.times[k]));
    }
  }
  return s;
}

SuiteOutcome suite_sinkhorn_roundtrip(const ValidationGrid& g) {
  SuiteOutcome s{"sinkhorn_roundtrip", 0.0, 1e-9, 0, {}};
  for (const auto& p : grid_params(g, true)) {
    for (double t : g.times) {
      double dev = 0.0;
      try {
        const SinkhornDecomposition d = decompose(p, t);
        dev = max_abs_diff(reconstruct(d), ptm_at(p, t));
        if (!is_unital(d.upsilon) || !is_trace_preserving(d.upsilon) ||
            !(d.lambda_x == d.lambda_y && d.lambda_y >= d.lambda_z && d.lambda_z >= 0.0)) {
          dev = std::numeric_limits<double>::infinity();
        }
      } catch (const std::exception&) {
        dev = std::numeric_limits<double>::infinity();
      }
      record(s, dev, describe(p, t));
    }
  }
  return s;
}

SuiteOutcome suite_fixed_point(const ValidationGrid& g) {
  SuiteOutcome s{"sinkhorn_fixed_point", 0.0, 1e-9, 0, {}};
  for (const auto& p : grid_params(g, true)) {
    for (double t : g.times) {
      double dev = 0.0;
      try {
        const ComplexMatrix iterated = fixed_point_iterate(ptm_at(p, t));
        const double s_closed = closed_form_s(abcd(p, t));
        const ComplexMatrix closed = ComplexMatrix::identity(2) + pauli::z() * cplx(s_closed);
        dev = max_abs_diff(iterated, closed);
      } catch (const std::exception&) {
        dev = std::numeric_limits<double>::infinity();
      }
      record(s, dev, describe(p, t));
    }
  }
  return s;
}

SuiteOutcome suite_lifetime_closed_forms(const ValidationGrid& g) {
  SuiteOutcome s{"lifetime_closed_forms", 0.0, 1e-9, 0, {}};
  for (double gamma : g.rates) {
    if (gamma == 0.0) continue;
    const ChannelParams depol{0.0, 0.0, gamma};
    const LifetimeResult r = max_lifetime(depol, depol, default_lifetime_horizon(depol, depol));
    const double expected = std::log(3.0) / (2.0 * gamma);
    const double dev = r.tau ? std::abs(*r.tau - expected) / expected
                             : std::numeric_limits<double>::infinity();
    record(s, dev, "depolarizing " + describe(depol, expected));

    const ChannelParams pdl{gamma, 5.0 * gamma, 0.0};
    const LifetimeResult none = max_lifetime(pdl, pdl, default_lifetime_horizon(pdl, pdl));
    record(s, none.tau ? std::numeric_limits<double>::infinity() : 0.0,
           "pure loss " + describe(pdl, 0.0));
  }
  return s;
}

} // namespace

int cmd_validate(bool dense, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ValidationGrid grid = validation_grid(dense);
    const std::vector<SuiteOutcome> suites = {
        suite_ptm_oracle(grid), suite_sinkhorn_roundtrip(grid), suite_fixed_point(grid),
        suite_lifetime_closed_forms(grid)};
    bool ok = true;
    for (const auto& s : suites) {
      const bool pass = s.failure.empty();
      ok = ok && pass;
      out << (pass ? "[PASS] " : "[FAIL] ") << s.name << " cases=" << s.cases
          << " max_deviation=" << format_number(s.max_deviation)
          << " tolerance=" << format_number(s.tolerance) << '\n';
      if (!pass) {
        out << "       first failure: " << s.failure << '\n';
      }
    }
    return static_cast<int>(ok ? kExitOk : kExitValidation);
  });
}

namespace {

struct FlagValues {
  std::string config_path;
  double gh1 = 0.0, gv1 = 0.0, g1 = 0.0, gh2 = 0.0, gv2 = 0.0, g2 = 0.0;
  double t_max = 0.0;
  double time = 0.0;
  int steps = 0;
  std::string state;
  std::string rho;
  std::string out;
  std::string format;
  std::vector<std::pair<std::string, CLI::Option*>> options;
};

void add_job_options(CLI::App& sub, FlagValues& f, bool with_time) {
  auto add = [&](const std::string& name, auto& target, const std::string& help) {
    f.options.emplace_back(name, sub.add_option(name, target, help));
  };
  add("--config", f.config_path, "JSON config file; flags override its values");
  add("--gh1", f.gh1, "line 1 attenuation rate of |H>");
  add("--gv1", f.gv1, "line 1 attenuation rate of |V>");
  add("--g1", f.g1, "line 1 depolarization rate");
  add("--gh2", f.gh2, "line 2 attenuation rate of |H>");
  add("--gv2", f.gv2, "line 2 attenuation rate of |V>");
  add("--g2", f.g2, "line 2 depolarization rate");
  add("--t-max", f.t_max, "lifetime search horizon / trajectory length");
  add("--steps", f.steps, "number of trajectory samples (>= 2)");
  add("--state", f.state, "max_entangled | optimal | custom");
  add("--rho", f.rho, "custom state: 32 comma-separated numbers, re/im of 16 row-major entries");
  add("--out", f.out, "output file (default: stdout)");
  add("--format", f.format, "csv | json");
  if (with_time) {
    add("--t", f.time, "evaluation time");
  }
}

JobConfig build_config(const FlagValues& f) {
  const auto given = [&](const std::string& name) {
    for (const auto& [n, opt] : f.options) {
      if (n == name) return opt->count() > 0;
    }
    return false;
  };
  JobConfig c = given("--config") ? load_config_file(f.config_path) : JobConfig{};
  if (given("--gh1")) c.line1.gamma_h = f.gh1;
  if (given("--gv1")) c.line1.gamma_v = f.gv1;
  if (given("--g1")) c.line1.gamma = f.g1;
  if (given("--gh2")) c.line2.gamma_h = f.gh2;
  if (given("--gv2")) c.line2.gamma_v = f.gv2;
  if (given("--g2")) c.line2.gamma = f.g2;
  if (given("--t-max")) c.t_max = f.t_max;
  if (given("--steps")) c.steps = f.steps;
  if (given("--state")) c.initial_state = parse_initial_state(f.state);
  if (given("--rho")) c.custom_state = custom_state_from_list(f.rho);
  if (given("--out")) c.output_path = f.out;
  if (given("--format")) c.format = parse_format(f.format);
  if (given("--t")) c.time = f.time;
  return c;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Entanglement lifetime and optimal states for lossy, depolarizing qubit lines",
               "qsink"};
  app.require_subcommand(1);

  FlagValues lifetime_f, optimal_f, evolve_f, sinkhorn_f;
  auto* lifetime = app.add_subcommand("lifetime", "maximal entanglement lifetime");
  add_job_options(*lifetime, lifetime_f, false);
  auto* optimal = app.add_subcommand("optimal-state", "initial state attaining the lifetime");
  add_job_options(*optimal, optimal_f, false);
  auto* evolve = app.add_subcommand("evolve", "negativity trajectories of psi_plus and the optimal state");
  add_job_options(*evolve, evolve_f, false);
  auto* sinkhorn = app.add_subcommand("sinkhorn", "Sinkhorn normal form of line 1 at time t");
  add_job_options(*sinkhorn, sinkhorn_f, true);
  auto* validate = app.add_subcommand("validate", "run the oracle cross-check suites");
  bool dense = false;
  validate->add_flag("--dense", dense, "extended parameter grid");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? static_cast<int>(kExitOk) : static_cast<int>(kExitUsage);
  }

  try {
    if (*lifetime) return cmd_lifetime(build_config(lifetime_f), out, err);
    if (*optimal) return cmd_optimal_state(build_config(optimal_f), out, err);
    if (*evolve) return cmd_evolve(build_config(evolve_f), out, err);
    if (*sinkhorn) return cmd_sinkhorn(build_config(sinkhorn_f), out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  if (const char* grid = std::getenv("QSINK_VALIDATE_GRID"); grid && std::string(grid) == "dense") {
    dense = true;
  }
  return cmd_validate(dense, out, err);
}

} // namespace qsink::cli
