#include "tdnqs/config.hpp"

#include <charconv>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "tdnqs/io.hpp"

namespace tdnqs {

std::string to_string(Protocol p) {
  switch (p) {
    case Protocol::coherent:
      return "coherent";
    case Protocol::breathing:
      return "breathing";
    case Protocol::none:
      break;
  }
  return "none";
}

Protocol parse_protocol(const std::string& name) {
  if (name == "coherent") return Protocol::coherent;
  if (name == "breathing") return Protocol::breathing;
  throw ConfigError(0, "unknown protocol '" + name + "' (expected coherent or breathing)");
}

EvolutionConfig RunConfig::ground_state_config() const {
  EvolutionConfig cfg = EvolutionConfig::ground_state_defaults();
  cfg.dt = gs_dt;
  cfg.lambda = Complex(gs_lambda, 0.0);
  cfg.record_every = gs_record_every;
  cfg.amplitude_map = amplitude_map;
  return cfg;
}

ConvergenceCriterion RunConfig::convergence() const {
  return ConvergenceCriterion{gs_tol, gs_patience, gs_max_steps};
}

EvolutionConfig RunConfig::evolution_config() const {
  EvolutionConfig cfg;
  cfg.mode = EvolutionMode::real_time;
  cfg.dt = evolve_dt;
  cfg.t_max = evolve_t_max;
  cfg.lambda = Complex(evolve_lambda_re, evolve_lambda_im);
  cfg.record_every = evolve_record_every;
  cfg.amplitude_map = amplitude_map;
  return cfg;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_real(const std::string& v, int line, const std::string& key) {
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
    throw ConfigError(line, key + ": expected a number, got '" + v + "'");
  }
  return out;
}

template <typename Int>
Int to_int(const std::string& v, int line, const std::string& key) {
  Int out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
    throw ConfigError(line, key + ": expected an integer, got '" + v + "'");
  }
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string&, int)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    auto real = [&t](const std::string& key, double RunConfig::*field, bool evolve = false) {
      t[key] = [key, field, evolve](RunConfig& c, const std::string& v, int line) {
        c.*field = to_real(v, line, key);
        if (evolve) c.has_evolve = true;
      };
    };
    real("grid.x_min", &RunConfig::grid_x_min);
    real("grid.x_max", &RunConfig::grid_x_max);
    t["grid.n"] = [](RunConfig& c, const std::string& v, int line) {
      c.grid_n = to_int<std::int64_t>(v, line, "grid.n");
    };
    t["net.hidden"] = [](RunConfig& c, const std::string& v, int line) {
      std::vector<int> widths;
      std::istringstream parts(v);
      std::string part;
      while (std::getline(parts, part, ',')) widths.push_back(to_int<int>(trim(part), line, "net.hidden"));
      if (widths.empty()) throw ConfigError(line, "net.hidden: empty list");
      c.net.hidden_widths = widths;
    };
    t["run.seed"] = [](RunConfig& c, const std::string& v, int line) {
      c.seed = to_int<std::uint64_t>(v, line, "run.seed");
    };
    t["run.amplitude_map"] = [](RunConfig& c, const std::string& v, int line) {
      try {
        c.amplitude_map = parse_amplitude_map(v);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(line, e.what());
      }
    };
    t["run.output_dir"] = [](RunConfig& c, const std::string& v, int) { c.output_dir = v; };
    t["run.protocol"] = [](RunConfig& c, const std::string& v, int line) {
      try {
        c.protocol = parse_protocol(v);
      } catch (const ConfigError& e) {
        throw ConfigError(line, "run.protocol: unknown protocol '" + v + "'");
      }
    };
    t["prepare.omega"] = [](RunConfig& c, const std::string& v, int line) {
      c.prepare.omega = to_real(v, line, "prepare.omega");
    };
    t["prepare.x0"] = [](RunConfig& c, const std::string& v, int line) {
      c.prepare.x0 = to_real(v, line, "prepare.x0");
    };
    t["evolve.omega"] = [](RunConfig& c, const std::string& v, int line) {
      c.evolve_ham.omega = to_real(v, line, "evolve.omega");
      c.has_evolve = true;
    };
    t["evolve.x0"] = [](RunConfig& c, const std::string& v, int line) {
      c.evolve_ham.x0 = to_real(v, line, "evolve.x0");
      c.has_evolve = true;
    };
    real("evolve.dt", &RunConfig::evolve_dt, true);
    real("evolve.t_max", &RunConfig::evolve_t_max, true);
    real("evolve.lambda_re", &RunConfig::evolve_lambda_re, true);
    real("evolve.lambda_im", &RunConfig::evolve_lambda_im, true);
    t["evolve.record_every"] = [](RunConfig& c, const std::string& v, int line) {
      c.evolve_record_every = to_int<int>(v, line, "evolve.record_every");
      c.has_evolve = true;
    };
    real("gs.tol", &RunConfig::gs_tol);
    t["gs.patience"] = [](RunConfig& c, const std::string& v, int line) {
      c.gs_patience = to_int<int>(v, line, "gs.patience");
    };
    t["gs.max_steps"] = [](RunConfig& c, const std::string& v, int line) {
      c.gs_max_steps = to_int<std::int64_t>(v, line, "gs.max_steps");
    };
    real("gs.lambda", &RunConfig::gs_lambda);
    real("gs.dt", &RunConfig::gs_dt);
    t["gs.record_every"] = [](RunConfig& c, const std::string& v, int line) {
      c.gs_record_every = to_int<int>(v, line, "gs.record_every");
    };
    return t;
  }();
  return table;
}

}  // namespace

RunConfig parse_config(const std::string& text, const RunConfig& base) {
  RunConfig cfg = base;
  std::istringstream in(text);
  std::string raw;
  std::set<std::string> seen;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = trim(raw);
    if (s.empty() || s.front() == '#') continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(line, "expected 'section.key = value'");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.find('.') == std::string::npos) {
      throw ConfigError(line, "key '" + key + "' is not of the form section.key");
    }
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError(line, "unknown key '" + key + "'");
    if (!seen.insert(key).second) throw ConfigError(line, "duplicate key '" + key + "'");
    it->second(cfg, value, line);
  }
  validate(cfg);
  return cfg;
}

void validate(const RunConfig& cfg) {
  auto check = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError(0, what);
  };
  check(cfg.grid_n >= 3, "grid.n must be >= 3 (got " + std::to_string(cfg.grid_n) + ")");
  check(cfg.grid_x_min < cfg.grid_x_max, "grid.x_min must be < grid.x_max");
  try {
    validate(cfg.net);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(0, std::string("net.hidden: ") + e.what());
  }
  check(cfg.prepare.omega > 0.0, "prepare.omega must be > 0");
  check(cfg.evolve_ham.omega > 0.0, "evolve.omega must be > 0");
  check(cfg.evolve_dt > 0.0, "evolve.dt must be > 0");
  check(cfg.evolve_t_max >= cfg.evolve_dt, "evolve.t_max must be >= evolve.dt");
  check(std::abs(Complex(cfg.evolve_lambda_re, cfg.evolve_lambda_im)) < kMaxShiftMagnitude,
        "|evolve.lambda| must be < 0.1");
  check(cfg.evolve_record_every >= 1, "evolve.record_every must be >= 1");
  check(cfg.gs_tol > 0.0, "gs.tol must be > 0");
  check(cfg.gs_patience >= 1, "gs.patience must be >= 1");
  check(cfg.gs_max_steps >= 1, "gs.max_steps must be >= 1");
  check(cfg.gs_lambda >= 0.0 && cfg.gs_lambda < kMaxShiftMagnitude, "gs.lambda must be in [0, 0.1)");
  check(cfg.gs_dt > 0.0, "gs.dt must be > 0");
  check(cfg.gs_record_every >= 1, "gs.record_every must be >= 1");
}

std::string to_text(const RunConfig& cfg) {
  std::ostringstream out;
  auto real = [&out](const char* key, double v) { out << key << " = " << format_double(v) << '\n'; };
  out << "# effective configuration\n";
  real("grid.x_min", cfg.grid_x_min);
  real("grid.x_max", cfg.grid_x_max);
  out << "grid.n = " << cfg.grid_n << '\n';
  out << "net.hidden = ";
  for (std::size_t i = 0; i < cfg.net.hidden_widths.size(); ++i) {
    out << (i ? "," : "") << cfg.net.hidden_widths[i];
  }
  out << '\n';
  out << "run.seed = " << cfg.seed << '\n';
  out << "run.amplitude_map = " << to_string(cfg.amplitude_map) << '\n';
  if (!cfg.output_dir.empty()) out << "run.output_dir = " << cfg.output_dir << '\n';
  if (cfg.protocol != Protocol::none) out << "run.protocol = " << to_string(cfg.protocol) << '\n';
  real("prepare.omega", cfg.prepare.omega);
  real("prepare.x0", cfg.prepare.x0);
  if (cfg.has_evolve) {
    real("evolve.omega", cfg.evolve_ham.omega);
    real("evolve.x0", cfg.evolve_ham.x0);
    real("evolve.dt", cfg.evolve_dt);
    real("evolve.t_max", cfg.evolve_t_max);
    real("evolve.lambda_re", cfg.evolve_lambda_re);
    real("evolve.lambda_im", cfg.evolve_lambda_im);
    out << "evolve.record_every = " << cfg.evolve_record_every << '\n';
  }
  real("gs.tol", cfg.gs_tol);
  out << "gs.patience = " << cfg.gs_patience << '\n';
  out << "gs.max_steps = " << cfg.gs_max_steps << '\n';
  real("gs.lambda", cfg.gs_lambda);
  real("gs.dt", cfg.gs_dt);
  out << "gs.record_every = " << cfg.gs_record_every << '\n';
  return out.str();
}

RunConfig preset(Protocol p) {
  RunConfig cfg;
  cfg.protocol = p;
  cfg.has_evolve = true;
  cfg.evolve_t_max = 50.0;
  switch (p) {
    case Protocol::coherent:
      cfg.prepare = HamiltonianSpec{1.0, 1.0};
      cfg.evolve_ham = HamiltonianSpec{1.0, 0.0};
      break;
    case Protocol::breathing:
      cfg.prepare = HamiltonianSpec{1.0, 0.0};
      cfg.evolve_ham = HamiltonianSpec{0.5, 0.0};
      break;
    case Protocol::none:
      throw ConfigError(0, "no protocol selected");
  }
  return cfg;
}

}  // namespace tdnqs
