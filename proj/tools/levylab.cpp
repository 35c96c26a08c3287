// levylab: command-line harness over the library. See docs/cli.md.
//
// Exit status: 0 success, 1 failed check or numerical failure, 2 usage or
// input error.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "levylab/acceptance.hpp"
#include "levylab/errors.hpp"
#include "levylab/field_io.hpp"
#include "levylab/heatkernel.hpp"
#include "levylab/levy.hpp"
#include "levylab/linear_solver.hpp"
#include "levylab/measure_io.hpp"
#include "levylab/norms.hpp"
#include "levylab/quasilinear.hpp"
#include "levylab/stochastic.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace levylab;

namespace {

constexpr int kCheckFailed = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(path.string() + " is not valid JSON: " + e.what());
  }
}

void write_json(const fs::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

// "N,L" -> Grid of the given dimension.
Grid parse_grid(const std::string& text, int dim) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw UsageError("--grid expects N,L");
  try {
    return Grid(dim, std::stoi(text.substr(0, comma)), std::stod(text.substr(comma + 1)));
  } catch (const std::logic_error&) {
    throw UsageError("--grid expects N,L");
  }
}

json grid_json(const Grid& g) { return {{"dim", g.dim()}, {"N", g.points()}, {"L", g.side()}}; }

LevyMeasure measure_from(const json& problem, const fs::path& base) {
  if (problem.contains("measure")) return measure_from_json(problem.at("measure"));
  if (problem.contains("measure_file")) return load_measure(base / problem.at("measure_file").get<std::string>());
  throw InvalidArgument("problem needs \"measure\" or \"measure_file\"");
}

// The isotropic alpha = 1 measure whose operator is -(-Delta)^(1/2).
LevyMeasure half_laplacian(int dim) {
  const double mass = 1.0 / (radial_constant(1.0) * isotropic_moment(dim, 1.0));
  return LevyMeasure::stable(1.0, SphericalMeasure::isotropic(dim, mass));
}

// Field spec: "path" | {"file": path} | {"grid": [dim, N, L], "constant": c,
// "modes": [[k_0, .., k_{d-1}, amplitude, phase], ...]}. Modes add
// amplitude cos(2 pi k.x / L + phase) to the constant.
GridField field_from(const json& spec, const fs::path& base) {
  if (spec.is_string()) return read_field(base / spec.get<std::string>());
  if (spec.contains("file")) return read_field(base / spec.at("file").get<std::string>());
  const auto g = spec.at("grid").get<std::vector<double>>();
  if (g.size() != 3) throw InvalidArgument("field grid is [dim, N, L]");
  const Grid grid(static_cast<int>(g[0]), static_cast<int>(g[1]), g[2]);
  const double c = spec.value("constant", 0.0);
  std::vector<std::vector<double>> modes;
  if (spec.contains("modes")) modes = spec.at("modes").get<std::vector<std::vector<double>>>();
  for (const auto& m : modes)
    if (static_cast<int>(m.size()) != grid.dim() + 2) throw InvalidArgument("mode rows are [k..., amplitude, phase]");
  return GridField::sample_scalar(grid, [&](std::span<const double> x) {
    double v = c;
    for (const auto& m : modes) {
      double phase = m[grid.dim() + 1];
      for (int a = 0; a < grid.dim(); ++a) phase += 2 * std::numbers::pi * m[a] * x[a] / grid.side();
      v += m[grid.dim()] * std::cos(phase);
    }
    return v;
  });
}

SolverConfig solver_config_from(const json& doc) {
  SolverConfig cfg;
  cfg.time_step = doc.value("time_step", cfg.time_step);
  cfg.mollifier_width = doc.value("mollifier_width", cfg.mollifier_width);
  cfg.picard_tol = doc.value("picard_tol", cfg.picard_tol);
  cfg.max_iterations = doc.value("max_iterations", cfg.max_iterations);
  return cfg;
}

json solver_config_json(const SolverConfig& cfg) {
  return {{"time_step", cfg.time_step},
          {"mollifier_width", cfg.mollifier_width},
          {"picard_tol", cfg.picard_tol},
          {"max_iterations", cfg.max_iterations}};
}

class Manifest {
 public:
  Manifest(std::string command_line, std::string subcommand) {
    doc_["command_line"] = std::move(command_line);
    doc_["subcommand"] = std::move(subcommand);
    doc_["measure_digests"] = json::array();
    doc_["artifacts"] = json::array();
    doc_["seeds"] = json::array();
    doc_["fitted_constants"] = json::object();
    doc_["tolerances"] = json::object();
  }
  json& operator[](const std::string& key) { return doc_[key]; }
  void inputs(const json& config) {
    doc_["config"] = config;
    doc_["config_digest"] = fnv1a_hex(config.dump());
  }
  void measure(const LevyMeasure& m) { doc_["measure_digests"].push_back(m.digest()); }
  void artifact(const fs::path& p) { doc_["artifacts"].push_back(p.string()); }
  void write(const fs::path& path, double seconds) {
    doc_["timings"] = {{"wall_seconds", seconds}};
    write_json(path, doc_);
  }

 private:
  json doc_;
};

// frames/frame_NNNNN.bin plus observables.csv (t, l2, linf, mean per component).
void write_trajectory(const fs::path& dir, const SpaceTimeField& u, Manifest& manifest) {
  fs::create_directories(dir / "frames");
  std::ofstream csv(dir / "observables.csv");
  if (!csv) throw IoError("cannot write " + (dir / "observables.csv").string());
  csv << "t,l2,linf";
  for (int c = 0; c < u.components(); ++c) csv << ",mean" << c;
  csv << '\n';
  csv.precision(17);
  for (std::size_t k = 0; k < u.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "frame_%05zu.bin", k);
    write_field_binary(dir / "frames" / name, u.frame(k));
    manifest.artifact(fs::path("frames") / name);
    const auto& f = u.frame(k);
    csv << static_cast<double>(k) * u.time_step() << ',' << lp_norm(f, 2.0) << ',' << lp_norm(f, kInfinity);
    for (int c = 0; c < f.components(); ++c) {
      double s = 0.0;
      for (double v : f.component(c)) s += v;
      csv << ',' << s / static_cast<double>(f.grid().size());
    }
    csv << '\n';
  }
  manifest.artifact("observables.csv");
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int run_symbol(const fs::path& measure_path, const std::vector<std::string>& xis, const std::string& out,
               const std::string& command_line) {
  const auto start = Clock::now();
  const auto m = load_measure(measure_path);
  std::vector<std::vector<double>> points;
  for (const auto& text : xis) {
    std::vector<double> xi;
    std::stringstream ss(text);
    std::string item;
    try {
      while (std::getline(ss, item, ',')) xi.push_back(std::stod(item));
    } catch (const std::logic_error&) {
      throw UsageError("--xi expects comma-separated numbers");
    }
    if (static_cast<int>(xi.size()) != m.dim()) throw UsageError("--xi needs " + std::to_string(m.dim()) + " entries");
    points.push_back(std::move(xi));
  }
  std::ofstream csv;
  if (!out.empty()) {
    csv.open(out);
    if (!csv) throw IoError("cannot write " + out);
    for (int a = 0; a < m.dim(); ++a) csv << "xi" << a << ',';
    csv << "re,im\n";
  }
  for (const auto& xi : points) {
    const Complex psi = symbol(m, xi);
    std::cout << format_double(psi.real()) << (psi.imag() < 0 ? "-" : "+") << format_double(std::abs(psi.imag()))
              << "i\n";
    if (csv.is_open()) {
      for (double v : xi) csv << format_double(v) << ',';
      csv << format_double(psi.real()) << ',' << format_double(psi.imag()) << '\n';
    }
  }
  if (!out.empty()) {
    Manifest manifest(command_line, "symbol");
    manifest.inputs({{"measure", measure_to_json(m)}, {"xi", points}});
    manifest.measure(m);
    manifest.artifact(out);
    manifest.write(out + ".manifest.json", seconds_since(start));
  }
  return 0;
}

int run_kernel(const fs::path& measure_path, double t, const std::string& grid_text, const fs::path& out,
               const std::string& command_line) {
  const auto start = Clock::now();
  const auto m = load_measure(measure_path);
  const Grid grid = parse_grid(grid_text, m.dim());
  const auto p = kernel(m, t, grid);
  write_field(out, p);
  double mass = 0.0;
  for (double v : p.values()) mass += v * grid.cell_volume();
  Manifest manifest(command_line, "kernel");
  manifest.inputs({{"measure", measure_to_json(m)}, {"t", t}, {"grid", grid_json(grid)}});
  manifest.measure(m);
  manifest["grid"] = grid_json(grid);
  manifest["tolerances"] = {{"mass", 1e-6}, {"min", -1e-6}};
  manifest["observables"] = {{"mass", mass}};
  manifest.artifact(out);
  manifest.write(out.string() + ".manifest.json", seconds_since(start));
  return 0;
}

// The document's drift is b in d_t u = L u + b . grad u. duhamel_solve takes
// theta = -b as a schedule; drift_solve takes b as a vector field.
std::variant<DriftSchedule, VectorField> drift_from(const json& problem, int dim, bool for_duhamel) {
  const double sign = for_duhamel ? -1.0 : 1.0;
  double step = 1.0, bound = 0.0;
  bool constant = true;
  std::vector<std::vector<double>> values;
  if (!problem.contains("drift")) {
    values = {std::vector<double>(dim, 0.0)};
  } else if (const auto& d = problem.at("drift"); d.contains("constant")) {
    values = {d.at("constant").get<std::vector<double>>()};
  } else if (d.contains("schedule")) {
    const auto& s = d.at("schedule");
    step = s.at("step").get<double>();
    values = s.at("values").get<std::vector<std::vector<double>>>();
    bound = s.at("bound").get<double>();
    constant = false;
  } else {
    throw InvalidArgument("drift is {\"constant\": [...]} or {\"schedule\": {...}}");
  }
  for (auto& v : values) {
    if (static_cast<int>(v.size()) != dim) throw InvalidArgument("drift dimension differs from the grid");
    for (double& c : v) c *= sign;
  }
  auto schedule = constant ? DriftSchedule::constant(values.front()) : DriftSchedule::piecewise(step, values, bound);
  if (for_duhamel) return schedule;
  return VectorField::from_schedule(schedule);
}

int run_evolve(const fs::path& problem_path, const fs::path& config_path, const fs::path& out,
               const std::string& command_line) {
  const auto start = Clock::now();
  const json problem = read_json(problem_path);
  const json config = config_path.empty() ? json::object() : read_json(config_path);
  const fs::path base = problem_path.parent_path();
  const auto m = measure_from(problem, base);
  const auto phi = field_from(problem.at("initial"), base);
  const double horizon = problem.value("horizon", 1.0);
  const SolverConfig cfg = solver_config_from(config);

  const std::string solver = problem.value("solver", "duhamel");
  if (solver != "duhamel" && solver != "drift") throw InvalidArgument("solver is \"duhamel\" or \"drift\"");
  LinearProblem pb{m, drift_from(problem, phi.grid().dim(), solver == "duhamel"), problem.value("lambda", 0.0),
                   std::nullopt, phi, horizon};
  if (problem.contains("forcing")) {
    const auto f = field_from(problem.at("forcing"), base);
    pb.forcing = SpaceTimeField(horizon, {f, f});
  }
  const SpaceTimeField u = solver == "drift" ? drift_solve(pb, cfg) : duhamel_solve(pb, cfg);
  fs::create_directories(out);
  Manifest manifest(command_line, "evolve");
  manifest.inputs({{"problem", problem}, {"config", config}});
  manifest.measure(m);
  manifest["grid"] = grid_json(phi.grid());
  manifest["tolerances"] = solver_config_json(cfg);
  manifest["solver"] = solver;
  write_trajectory(out, u, manifest);
  manifest.write(out / "manifest.json", seconds_since(start));
  return 0;
}

struct PdeOptions {
  fs::path phi, measure, config, out;
  std::string grid;
  double horizon = 1.0;
  double dt = 0.0;
};

GridField load_phi(const PdeOptions& o) {
  auto phi = read_field(o.phi);
  if (!o.grid.empty()) {
    const Grid g = parse_grid(o.grid, phi.grid().dim());
    if (!(g == phi.grid())) throw UsageError("--grid does not match the grid stored in --phi");
  }
  return phi;
}

SolverConfig pde_config(const PdeOptions& o) {
  SolverConfig cfg = o.config.empty() ? SolverConfig{} : solver_config_from(read_json(o.config));
  if (o.dt > 0.0) cfg.time_step = o.dt;
  return cfg;
}

int run_burgers(const PdeOptions& o, const std::string& command_line) {
  const auto start = Clock::now();
  const auto phi = load_phi(o);
  const auto m = o.measure.empty() ? half_laplacian(phi.grid().dim()) : load_measure(o.measure);
  const auto cfg = pde_config(o);
  PicardTrace trace;
  const auto u = burgers_solve(phi, m, o.horizon, cfg, &trace);
  fs::create_directories(o.out);
  Manifest manifest(command_line, "burgers");
  manifest.inputs({{"phi", o.phi.string()}, {"measure", measure_to_json(m)}, {"T", o.horizon},
                   {"config", solver_config_json(cfg)}});
  manifest.measure(m);
  manifest["grid"] = grid_json(phi.grid());
  manifest["tolerances"] = solver_config_json(cfg);
  manifest["picard_residuals"] = trace.residuals;
  write_trajectory(o.out, u, manifest);
  manifest.write(o.out / "manifest.json", seconds_since(start));
  return 0;
}

int run_hj(const PdeOptions& o, const std::string& hamiltonian, const std::string& command_line) {
  const auto start = Clock::now();
  const auto phi = load_phi(o);
  const auto m = o.measure.empty() ? half_laplacian(phi.grid().dim()) : load_measure(o.measure);
  const auto cfg = pde_config(o);
  const auto H = make_hamiltonian(hamiltonian, phi.grid().dim());
  HamiltonJacobiReport report;
  const auto u = hamilton_jacobi_solve(H, phi, m, o.horizon, cfg, &report);
  fs::create_directories(o.out);
  Manifest manifest(command_line, "hj");
  manifest.inputs({{"phi", o.phi.string()}, {"measure", measure_to_json(m)}, {"T", o.horizon},
                   {"hamiltonian", hamiltonian}, {"config", solver_config_json(cfg)}});
  manifest.measure(m);
  manifest["grid"] = grid_json(phi.grid());
  manifest["tolerances"] = solver_config_json(cfg);
  manifest["tolerances"]["gradient_defect"] = 1e-3;
  manifest["gradient_defect"] = report.defect;
  manifest["picard_residuals"] = report.trace.residuals;
  write_trajectory(o.out, u, manifest);
  manifest.write(o.out / "manifest.json", seconds_since(start));
  return 0;
}

// Path dump in the field binary layout, read as a 1-d field over the time
// axis: dim = 1, N = number of Euler steps, L = t, m = n_paths * d. Node k
// holds time (k + 1) t / N (the shared start x is omitted) and component
// i * d + a is coordinate a of path i.
void write_paths(const fs::path& path, const PathEnsemble& ens, double t) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  const std::size_t steps = ens.time_grid.size() - 1;
  const std::int32_t dim = 1, n = static_cast<std::int32_t>(steps);
  const std::int32_t m = static_cast<std::int32_t>(ens.n_paths) * ens.dim;
  out.write(reinterpret_cast<const char*>(&dim), sizeof dim);
  out.write(reinterpret_cast<const char*>(&n), sizeof n);
  out.write(reinterpret_cast<const char*>(&t), sizeof t);
  out.write(reinterpret_cast<const char*>(&m), sizeof m);
  std::vector<double> row(steps);
  for (std::size_t i = 0; i < ens.n_paths; ++i)
    for (int a = 0; a < ens.dim; ++a) {
      for (std::size_t k = 0; k < steps; ++k) row[k] = ens.state(i, k + 1)[a];
      out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(steps * sizeof(double)));
    }
  if (!out) throw IoError("cannot write " + path.string());
}

int run_sde(const fs::path& problem_path, std::size_t paths, std::uint64_t seed, const fs::path& out,
            const fs::path& dump, const std::string& command_line) {
  const auto start = Clock::now();
  const json problem = read_json(problem_path);
  const fs::path base = problem_path.parent_path();
  const auto m = measure_from(problem, base);
  const auto phi = field_from(problem.at("phi"), base);
  const double t = problem.at("t").get<double>();
  const auto x = problem.at("x").get<std::vector<double>>();
  if (static_cast<int>(x.size()) != m.dim()) throw InvalidArgument("x has the wrong dimension");
  VectorField b = VectorField::constant(problem.contains("drift")
                                            ? problem.at("drift").at("constant").get<std::vector<double>>()
                                            : std::vector<double>(m.dim(), 0.0));
  if (b.dim != m.dim()) throw InvalidArgument("drift dimension differs from the measure");
  std::optional<SpaceTimeField> f;
  if (problem.contains("forcing")) {
    const auto fr = field_from(problem.at("forcing"), base);
    f = SpaceTimeField(t, {fr, fr});
  }
  MonteCarloConfig cfg;
  cfg.paths = paths;
  cfg.seed = seed;
  cfg.steps = problem.value("steps", cfg.steps);
  cfg.lambda = problem.value("lambda", cfg.lambda);
  const auto est = feynman_kac(phi, f, b, m, t, x, cfg);

  Manifest manifest(command_line, "sde");
  manifest.inputs({{"problem", problem}, {"paths", paths}, {"seed", seed}});
  manifest.measure(m);
  manifest["grid"] = grid_json(phi.grid());
  manifest["seeds"].push_back(seed);
  json summary = {{"estimate", est.estimate},     {"std_error", est.std_error}, {"exit_fraction", est.exit_fraction},
                  {"exit_warning", est.exit_warning}, {"paths", est.paths},       {"seed", seed},
                  {"steps", cfg.steps},            {"t", t},                     {"x", x}};
  if (!dump.empty()) {
    std::vector<double> grid(cfg.steps + 1);
    for (int k = 0; k <= cfg.steps; ++k) grid[k] = t * k / cfg.steps;
    write_paths(dump, simulate_ensemble(b, m, x, grid, paths, seed), t);
    manifest.artifact(dump);
  }
  summary["wall_seconds"] = seconds_since(start);
  write_json(out, summary);
  manifest.artifact(out);
  manifest.write(out.string() + ".manifest.json", seconds_since(start));
  return 0;
}

int run_verify(const std::vector<std::string>& checks, bool all, const std::string& out,
               const std::string& command_line) {
  const auto start = Clock::now();
  std::vector<std::string> names = all ? check_names() : checks;
  if (names.empty()) throw UsageError("verify needs --check NAME or --all");
  const auto known = check_names();
  for (const auto& n : names)
    if (std::find(known.begin(), known.end(), n) == known.end()) throw UsageError("unknown check '" + n + "'");
  bool ok = true;
  json results = json::array();
  for (const auto& n : names) {
    const auto r = run_check(n);
    std::cout << format_result(r) << std::endl;
    ok = ok && r.pass;
    results.push_back({{"name", r.name}, {"pass", r.pass}, {"detail", r.detail}, {"seconds", r.seconds},
                       {"budget_seconds", r.budget_seconds}});
  }
  if (!out.empty()) {
    Manifest manifest(command_line, "verify");
    manifest.inputs({{"checks", names}});
    manifest["results"] = results;
    manifest.write(out, seconds_since(start));
  }
  return ok ? 0 : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  std::string command_line;
  for (int i = 0; i < argc; ++i) command_line += (i ? " " : "") + std::string(argv[i]);

  CLI::App app{"levylab: nonlocal operators, heat kernels, linear and quasilinear solvers, Monte Carlo checks"};
  app.require_subcommand(1);

  auto* symbol_cmd = app.add_subcommand("symbol", "Evaluate the Levy symbol psi(xi)");
  std::string measure_file, out_file, grid_text;
  std::vector<std::string> xis;
  symbol_cmd->add_option("--measure", measure_file, "Measure document (JSON)")->required()->check(CLI::ExistingFile);
  symbol_cmd->add_option("--xi", xis, "Frequency as comma-separated components; repeatable")->required();
  symbol_cmd->add_option("--out", out_file, "Also write a CSV table and manifest");

  auto* kernel_cmd = app.add_subcommand("kernel", "Periodized transition density p_t on a grid");
  double t = 0.0;
  std::string kernel_out;
  kernel_cmd->add_option("--measure", measure_file, "Measure document (JSON)")->required()->check(CLI::ExistingFile);
  kernel_cmd->add_option("--t", t, "Time")->required();
  kernel_cmd->add_option("--grid", grid_text, "N,L")->required();
  kernel_cmd->add_option("--out", kernel_out, "Output field (.csv or binary)")->required();

  auto* evolve_cmd = app.add_subcommand("evolve", "Solve a linear problem");
  std::string problem_file, config_file, out_dir;
  evolve_cmd->add_option("--problem", problem_file, "Problem document (JSON)")->required()->check(CLI::ExistingFile);
  evolve_cmd->add_option("--config", config_file, "Solver config (JSON)")->check(CLI::ExistingFile);
  evolve_cmd->add_option("--out", out_dir, "Output directory")->required();

  PdeOptions pde;
  std::string hamiltonian;
  std::string phi_file, pde_measure, pde_config_file, pde_out;
  auto add_pde = [&](CLI::App* cmd) {
    cmd->add_option("--phi", phi_file, "Initial field (.csv or binary)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--grid", pde.grid, "N,L; must match the grid stored in --phi");
    cmd->add_option("--T", pde.horizon, "Horizon, at most 1")->required();
    cmd->add_option("--measure", pde_measure, "alpha = 1 measure; default -(-Delta)^(1/2)")->check(CLI::ExistingFile);
    cmd->add_option("--config", pde_config_file, "Solver config (JSON)")->check(CLI::ExistingFile);
    cmd->add_option("--dt", pde.dt, "Time step; overrides the config");
    cmd->add_option("--out", pde_out, "Output directory")->required();
  };
  auto* burgers_cmd = app.add_subcommand("burgers", "Critical Burgers equation");
  add_pde(burgers_cmd);
  auto* hj_cmd = app.add_subcommand("hj", "Critical Hamilton-Jacobi equation");
  add_pde(hj_cmd);
  hj_cmd->add_option("--hamiltonian", hamiltonian, "quadratic | anisotropic-quadratic | smooth-bounded")
      ->required()
      ->check(CLI::IsMember(hamiltonian_names()));

  auto* sde_cmd = app.add_subcommand("sde", "Feynman-Kac Monte Carlo estimate");
  std::size_t paths = 100000;
  std::uint64_t seed = 1;
  std::string sde_out, dump_file;
  sde_cmd->add_option("--problem", problem_file, "Problem document (JSON)")->required()->check(CLI::ExistingFile);
  sde_cmd->add_option("--paths", paths, "Number of paths")->required();
  sde_cmd->add_option("--seed", seed, "RNG seed")->required();
  sde_cmd->add_option("--out", sde_out, "Summary document (JSON)")->required();
  sde_cmd->add_option("--dump-paths", dump_file, "Raw path dump");

  auto* verify_cmd = app.add_subcommand("verify", "Run named acceptance checks");
  std::vector<std::string> checks;
  bool all = false;
  std::string verify_out;
  verify_cmd->add_option("--check", checks, "Check name; repeatable");
  verify_cmd->add_flag("--all", all, "Run every check");
  verify_cmd->add_option("--out", verify_out, "Write a manifest with the results");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n";
    const auto subs = app.get_subcommands();
    std::cerr << (subs.empty() ? app.help() : subs.front()->help());
    return kUsage;
  }

  try {
    pde.phi = phi_file;
    pde.measure = pde_measure;
    pde.config = pde_config_file;
    pde.out = pde_out;
    if (symbol_cmd->parsed()) return run_symbol(measure_file, xis, out_file, command_line);
    if (kernel_cmd->parsed()) return run_kernel(measure_file, t, grid_text, kernel_out, command_line);
    if (evolve_cmd->parsed()) return run_evolve(problem_file, config_file, out_dir, command_line);
    if (burgers_cmd->parsed()) return run_burgers(pde, command_line);
    if (hj_cmd->parsed()) return run_hj(pde, hamiltonian, command_line);
    if (sde_cmd->parsed()) return run_sde(problem_file, paths, seed, sde_out, dump_file, command_line);
    if (verify_cmd->parsed()) return run_verify(checks, all, verify_out, command_line);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.get_subcommands().front()->help();
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    const bool input = e.kind() == ErrorKind::InvalidArgument || e.kind() == ErrorKind::Io;
    return input ? kUsage : kCheckFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kCheckFailed;
  }
  return kUsage;
}
