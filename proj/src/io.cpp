#include "tdnqs/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace tdnqs {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

namespace {

std::string format_double17(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

double parse_real(const std::string& token, int line) {
  double v = 0.0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
  if (res.ec != std::errc{} || res.ptr != token.data() + token.size()) {
    throw std::runtime_error("checkpoint line " + std::to_string(line) + ": bad number '" + token +
                             "'");
  }
  return v;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string network_string(const NetworkSpec& spec) {
  std::string s = std::to_string(spec.input_dim);
  for (int w : spec.hidden_widths) s += "-" + std::to_string(w);
  return s + "-" + std::to_string(spec.output_dim) + " sigmoid";
}

NetworkSpec parse_network(const std::string& value, int line) {
  std::istringstream in(value);
  std::string dims, activation;
  in >> dims >> activation;
  if (activation != "sigmoid") {
    throw std::runtime_error("checkpoint line " + std::to_string(line) +
                             ": unsupported activation '" + activation + "'");
  }
  std::vector<int> widths;
  std::istringstream parts(dims);
  std::string part;
  while (std::getline(parts, part, '-')) {
    try {
      widths.push_back(std::stoi(part));
    } catch (const std::exception&) {
      throw std::runtime_error("checkpoint line " + std::to_string(line) + ": bad network '" +
                               value + "'");
    }
  }
  if (widths.size() < 3) {
    throw std::runtime_error("checkpoint line " + std::to_string(line) + ": bad network '" + value +
                             "'");
  }
  NetworkSpec spec;
  spec.input_dim = widths.front();
  spec.output_dim = widths.back();
  spec.hidden_widths.assign(widths.begin() + 1, widths.end() - 1);
  return spec;
}

}  // namespace

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << contents;
    if (!out.flush()) throw std::runtime_error("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string to_text(const Checkpoint& ckpt) {
  std::ostringstream out;
  out << "# tdnqs checkpoint\n";
  out << "format_version = " << ckpt.format_version << "\n";
  out << "network = " << network_string(ckpt.spec) << "\n";
  out << "seed = " << ckpt.seed << "\n";
  out << "amplitude_map = " << to_string(ckpt.amplitude_map) << "\n";
  out << "parameters = " << ckpt.theta.size() << "\n";
  for (Eigen::Index i = 0; i < ckpt.theta.size(); ++i) {
    out << i << " " << format_double17(ckpt.theta(i).real()) << " "
        << format_double17(ckpt.theta(i).imag()) << "\n";
  }
  return out.str();
}

Checkpoint parse_checkpoint(const std::string& text) {
  Checkpoint ckpt;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  Eigen::Index expected = -1;
  Eigen::Index next = 0;
  bool have_version = false;
  auto fail = [&line](const std::string& what) {
    throw std::runtime_error("checkpoint line " + std::to_string(line) + ": " + what);
  };
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = trim(raw);
    if (s.empty() || s.front() == '#') continue;
    const auto eq = s.find('=');
    if (eq != std::string::npos) {
      const std::string key = trim(s.substr(0, eq));
      const std::string value = trim(s.substr(eq + 1));
      if (key == "format_version") {
        ckpt.format_version = std::stoi(value);
        if (ckpt.format_version != Checkpoint::kFormatVersion) {
          fail("unsupported format_version " + value);
        }
        have_version = true;
      } else if (key == "network") {
        ckpt.spec = parse_network(value, line);
      } else if (key == "seed") {
        ckpt.seed = std::stoull(value);
      } else if (key == "amplitude_map") {
        try {
          ckpt.amplitude_map = parse_amplitude_map(value);
        } catch (const std::invalid_argument& e) {
          fail(e.what());
        }
      } else if (key == "parameters") {
        expected = std::stoll(value);
        if (expected < 1) fail("parameter count must be positive");
        ckpt.theta = Parameters::Zero(expected);
      } else {
        fail("unknown key '" + key + "'");
      }
      continue;
    }
    if (expected < 0) fail("parameter line before 'parameters' header");
    std::istringstream fields(s);
    std::string idx, re, im, extra;
    if (!(fields >> idx >> re >> im) || (fields >> extra)) fail("expected 'index re im'");
    if (std::stoll(idx) != next) fail("parameter index out of order");
    if (next >= expected) fail("more parameter lines than declared");
    ckpt.theta(next) = Complex(parse_real(re, line), parse_real(im, line));
    ++next;
  }
  if (!have_version) throw std::runtime_error("checkpoint: missing format_version");
  if (expected < 0 || next != expected) {
    throw std::runtime_error("checkpoint: expected " + std::to_string(expected) +
                             " parameter lines, found " + std::to_string(next));
  }
  validate(ckpt.spec);
  if (parameter_count(ckpt.spec) != expected) {
    throw std::runtime_error("checkpoint: parameter count does not match network");
  }
  return ckpt;
}

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  write_file_atomic(path, to_text(ckpt));
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  return parse_checkpoint(read_file(path));
}

std::string trajectory_csv(const TrajectoryRecord& traj) {
  std::ostringstream out;
  out << "t,energy,norm,x_mean,x2_mean,variance,solve_residual,cond_estimate\n";
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const Observables& o = traj.observables[k];
    const StepDiagnostics& d = traj.diagnostics[k];
    out << format_double(traj.times[k]) << ',' << format_double(o.energy) << ','
        << format_double(o.norm) << ',' << format_double(o.x_mean) << ','
        << format_double(o.x2_mean) << ',' << format_double(o.variance) << ','
        << format_double(d.solve_residual) << ',' << format_double(d.cond_estimate) << '\n';
  }
  return out.str();
}

std::string density_csv(const TrajectoryRecord& traj, const Grid& grid) {
  std::ostringstream out;
  out << "t,x,density\n";
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const std::string t = format_double(traj.times[k]);
    const Eigen::VectorXd& rho = traj.observables[k].density;
    for (Eigen::Index i = 0; i < grid.n; ++i) {
      out << t << ',' << format_double(grid.points(i)) << ',' << format_double(rho(i)) << '\n';
    }
  }
  return out.str();
}

std::string energy_history_csv(const TrajectoryRecord& traj, double dt) {
  std::ostringstream out;
  out << "step,tau,energy,delta_energy,solve_residual,cond_estimate\n";
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const double e = traj.observables[k].energy;
    const double de = k == 0 ? 0.0 : e - traj.observables[k - 1].energy;
    const auto step = static_cast<long long>(std::llround(traj.times[k] / dt));
    out << step << ',' << format_double(traj.times[k]) << ',' << format_double(e) << ','
        << format_double(de) << ',' << format_double(traj.diagnostics[k].solve_residual) << ','
        << format_double(traj.diagnostics[k].cond_estimate) << '\n';
  }
  return out.str();
}

std::string final_density_csv(const Observables& obs, const Grid& grid) {
  std::ostringstream out;
  out << "x,density\n";
  for (Eigen::Index i = 0; i < grid.n; ++i) {
    out << format_double(grid.points(i)) << ',' << format_double(obs.density(i)) << '\n';
  }
  return out.str();
}

}  // namespace tdnqs
