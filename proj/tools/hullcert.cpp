// hullcert: convex hull exactness checks for the Shor relaxation of QCQPs.

#include <chrono>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <omp.h>

#include "hullcert/certify.hpp"
#include "hullcert/oracle.hpp"
#include "hullcert/problem_io.hpp"

using namespace hullcert;
using io::Json;

namespace {

enum Exit { kExact = 0, kNotExact = 1, kInconclusive = 2, kInputError = 3, kNumerical = 4 };

struct Common {
  std::string file;
  bool csv = false;
  int threads = 0;
  std::uint64_t seed = 1;
};

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

std::string csv_number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void emit(const Common& c, Json j, const std::string& header, const std::string& row,
          std::chrono::steady_clock::time_point start) {
  if (c.csv) {
    std::cout << header << "\n" << row << "\n";
    return;
  }
  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  j["timings"] = Json{{"total_ms", ms}};
  std::cout << j.dump(2) << "\n";
}

int run_check(const Common& c, const std::string& method, double tol, int samples) {
  const auto start = std::chrono::steady_clock::now();
  const io::ProblemFile f = io::load_problem(c.file);
  certify::Options opts;
  opts.seed = c.seed;
  opts.box.seed = c.seed;
  if (tol > 0) opts.tol = tol;
  if (samples > 0) opts.samples = samples;
  certify::Verdict v;
  if (method == "auto") v = certify::automatic(f.problem, opts);
  else if (method == "two-constraint") v = certify::two_constraint(f.problem, opts);
  else if (method == "qmp") v = certify::qmp(f.problem, opts);
  else if (method == "polyhedral") v = certify::polyhedral(f.problem, opts);
  else v = certify::sampled(f.problem, opts);
  Json j{{"command", "check"}};
  j.update(io::to_json(v));
  emit(c, j, "file,method,status,grade,reason",
       csv_field(c.file) + "," + v.method + "," + certify::to_string(v.status) + "," +
           certify::to_string(v.grade) + "," + csv_field(v.reason),
       start);
  switch (v.status) {
    case certify::Status::Exact: return kExact;
    case certify::Status::NotExact: return kNotExact;
    default: return kInconclusive;
  }
}

int run_relax(const Common& c, const std::vector<double>& direction) {
  const auto start = std::chrono::steady_clock::now();
  const io::ProblemFile f = io::load_problem(c.file);
  std::optional<Vector> d;
  if (!direction.empty()) {
    if (static_cast<int>(direction.size()) != f.problem.n() + 1) {
      throw io::InputError("--direction", "expected n+1 entries");
    }
    d = Eigen::Map<const Vector>(direction.data(), static_cast<int>(direction.size()));
  }
  const sdp::SdpSolution s = sdp::solve_relaxation(f.problem, d);
  Json j{{"command", "relax"}};
  j.update(io::to_json(s));
  emit(c, j, "file,status,opt_sdp",
       csv_field(c.file) + "," + sdp::to_string(s.status) + "," +
           (s.status == sdp::Status::Optimal ? csv_number(s.objective) : std::string()),
       start);
  return s.status == sdp::Status::NumericalFailure ? kNumerical : 0;
}

int run_decompose(const Common& c, const std::string& point, int depth, bool seeded) {
  const auto start = std::chrono::steady_clock::now();
  const io::ProblemFile f = io::load_problem(c.file);
  const EpigraphPoint pt = io::load_point(point, f.problem.n());
  const gamma::GammaDescription desc = gamma::describe(f.problem);
  rounding::DecomposeOptions opts;
  opts.depth_cap = depth;
  if (seeded) opts.seed = c.seed;
  const rounding::DecomposeResult r = rounding::decompose(f.problem, desc, pt, opts);
  Json j{{"command", "decompose"}};
  j.update(io::to_json(r));
  emit(c, j, "file,status,points,vertical_ray,reconstruction_error",
       csv_field(c.file) + "," + rounding::to_string(r.status) + "," +
           std::to_string(r.decomposition.points.size()) + "," +
           csv_number(r.decomposition.vertical_ray) + "," +
           csv_number(r.decomposition.reconstruction_error),
       start);
  switch (r.status) {
    case rounding::DecomposeStatus::Success: return 0;
    case rounding::DecomposeStatus::NotExact: return kNotExact;
    default: return kInconclusive;
  }
}

int run_gamma(const Common& c) {
  const auto start = std::chrono::steady_clock::now();
  const io::ProblemFile f = io::load_problem(c.file);
  const gamma::DefiniteWitness w = gamma::check_assumption_definite(f.problem);
  Json j{{"command", "gamma"}, {"assumption_definite", io::to_json(w)}};
  std::string kind = "none", source = "none";
  int gens = 0;
  if (w.ok) {
    const gamma::GammaDescription d = gamma::describe(f.problem);
    j["description"] = io::to_json(d);
    kind = gamma::to_string(d.kind);
    source = d.source;
    gens = d.polyhedral() ? d.cone.num_generators() : 0;
  } else {
    j["description"] = nullptr;
    j["failure"] = "no aggregation with a positive definite quadratic part in the search box";
  }
  emit(c, j, "file,kind,source,generators",
       csv_field(c.file) + "," + kind + "," + source + "," + std::to_string(gens), start);
  return w.ok ? 0 : kInconclusive;
}

int run_oracle(const Common& c, double half_width, int grid, int dirs, bool global_min) {
  const auto start = std::chrono::steady_clock::now();
  const io::ProblemFile f = io::load_problem(c.file);
  oracle::GapOptions opts;
  opts.box = half_width > 0 ? oracle::Box::cube(f.problem.n(), half_width)
                            : f.box.value_or(oracle::Box::cube(f.problem.n(), 3.0));
  opts.resolution = grid;
  opts.directions = dirs;
  opts.seed = c.seed;
  const auto directions = oracle::default_directions(f.problem.n(), dirs, c.seed);
  oracle::OracleReport r = oracle::hull_support_gap(f.problem, directions, opts);
  if (r.empty) throw io::InputError("$", "feasible sample is empty in the box");
  if (global_min) r.global_min = oracle::global_min_bruteforce(f.problem, opts.box, grid);
  Json j{{"command", "oracle"}};
  j.update(io::to_json(r));
  emit(c, j, "file,max_gap,max_gap_raw,grid_error_bound,boundary_flag,directions",
       csv_field(c.file) + "," + csv_number(r.max_gap) + "," + csv_number(r.max_gap_raw) + "," +
           csv_number(r.grid_error_bound) + "," + (r.boundary_flag ? "true" : "false") + "," +
           std::to_string(r.directions),
       start);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Convex hull exactness of Shor relaxations for QCQPs"};
  app.require_subcommand(1);
  Common c;
  app.add_flag("--csv", c.csv, "Emit CSV instead of JSON");
  app.add_option("--threads", c.threads, "Worker threads (0 = runtime default)")
      ->check(CLI::NonNegativeNumber);

  std::string method = "auto";
  double tol = 0.0;
  int samples = 0;
  auto* check = app.add_subcommand("check", "Certify convex hull exactness");
  check->add_option("file", c.file, "Problem file")->required();
  check->add_option("--method", method, "Certifier")
      ->check(CLI::IsMember({"auto", "two-constraint", "qmp", "polyhedral", "sampled"}));
  check->add_option("--seed", c.seed, "Seed for searches and sampling");
  check->add_option("--tol", tol, "Eigenvalue tolerance");
  check->add_option("--samples", samples, "Sampled points for the sampled certifier");

  std::vector<double> direction;
  auto* relax = app.add_subcommand("relax", "Solve the SDP relaxation");
  relax->add_option("file", c.file, "Problem file")->required();
  relax->add_option("--direction", direction, "Minimize <d, (x, t)> instead of 2t")
      ->delimiter(',');

  std::string point;
  int depth = -1;
  bool seeded = false;
  auto* decompose = app.add_subcommand("decompose", "Decompose a relaxation point");
  decompose->add_option("file", c.file, "Problem file")->required();
  decompose->add_option("--point", point, "Point file {\"x\": [...], \"t\": ...}")->required();
  decompose->add_option("--depth", depth, "Recursion cap (default n+2)");
  decompose->add_option("--seed", c.seed, "Seed for randomized directions")
      ->each([&](const std::string&) { seeded = true; });

  auto* gamma_cmd = app.add_subcommand("gamma", "Describe the cone of convex multipliers");
  gamma_cmd->add_option("file", c.file, "Problem file")->required();

  double half_width = 0.0;
  int grid = 101;
  int dirs = 64;
  bool global_min = false;
  auto* oracle_cmd = app.add_subcommand("oracle", "Brute-force hull support gaps");
  oracle_cmd->add_option("file", c.file, "Problem file")->required();
  oracle_cmd->add_option("--box", half_width, "Half width of the sampling cube");
  oracle_cmd->add_option("--grid", grid, "Grid points per axis")->check(CLI::Range(2, 100000));
  oracle_cmd->add_option("--dirs", dirs, "Number of directions")->check(CLI::PositiveNumber);
  oracle_cmd->add_option("--seed", c.seed, "Direction seed");
  oracle_cmd->add_flag("--global-min", global_min, "Also estimate the global minimum");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return e.get_exit_code() == 0 ? app.exit(e) : (app.exit(e), kInputError);
  }
  if (c.threads > 0) omp_set_num_threads(c.threads);

  try {
    if (*check) return run_check(c, method, tol, samples);
    if (*relax) return run_relax(c, direction);
    if (*decompose) return run_decompose(c, point, depth, seeded);
    if (*gamma_cmd) return run_gamma(c);
    if (*oracle_cmd) return run_oracle(c, half_width, grid, dirs, global_min);
  } catch (const io::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const PreconditionError& e) {
    std::cerr << "precondition: " << e.what() << "\n";
    return kInputError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  }
  return kInputError;
}
