// dgml: meshes, assembly, split solves, preconditioner tables and spectra.

#include "dgml/assembly.hpp"
#include "dgml/basis_split.hpp"
#include "dgml/experiments.hpp"
#include "dgml/json_io.hpp"
#include "dgml/mesh.hpp"
#include "dgml/precond.hpp"
#include "dgml/verify.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace dgml;

constexpr int kExitOk = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Flags shared by the commands. Unset optionals fall back to the config file,
// then to the table defaults.
struct Options {
  std::string config_path;
  std::string table;
  std::optional<std::string> eps;
  std::optional<std::string> levels;
  std::optional<int> level;
  std::optional<int> theta;
  std::optional<double> alpha;
  std::optional<std::string> variant;
  std::optional<std::string> precond;
  std::optional<int> ratio;
  std::optional<int> sweeps;
  std::optional<std::string> smoother;
  std::optional<double> tol;
  std::optional<int> maxit;
  std::optional<int> m;
  std::optional<std::uint64_t> seed;
  std::optional<int> lanczos_steps;
  std::optional<std::string> out_dir;
  bool split = false;
  bool mesh_dump = false;
};

std::vector<double> parse_eps_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t pos = 0;
      const double v = std::stod(item, &pos);
      if (pos != item.size()) throw UsageError("bad eps value: " + item);
      out.push_back(v);
    } catch (const std::logic_error&) {
      throw UsageError("bad eps value: " + item);
    }
  }
  if (out.empty()) throw UsageError("empty eps list");
  return out;
}

// "N" means 0..N, "a-b" or "a:b" means a..b.
std::pair<int, int> parse_levels(const std::string& s) {
  const auto sep = s.find_first_of("-:");
  try {
    if (sep == std::string::npos) return {0, std::stoi(s)};
    return {std::stoi(s.substr(0, sep)), std::stoi(s.substr(sep + 1))};
  } catch (const std::logic_error&) {
    throw UsageError("bad level range: " + s);
  }
}

nlohmann::json read_config_file(const std::string& path) {
  if (path.empty()) return nlohmann::json::object();
  std::ifstream f(path);
  if (!f) throw UsageError("cannot read config file " + path);
  try {
    nlohmann::json j = nlohmann::json::parse(f);
    if (!j.is_object()) throw UsageError("config file must hold a JSON object");
    return j;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("config file: ") + e.what());
  }
}

// Copies config-file keys into unset options.
void merge_file(Options& o, const nlohmann::json& j) {
  auto str = [&](const char* key, std::optional<std::string>& dst) {
    if (!dst && j.contains(key)) {
      const auto& v = j.at(key);
      if (v.is_string()) {
        dst = v.get<std::string>();
      } else if (v.is_array()) {
        std::ostringstream os;
        os.precision(17);
        for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i].get<double>();
        dst = os.str();
      } else {
        std::ostringstream os;
        os.precision(17);
        os << v.dump();
        dst = os.str();
      }
    }
  };
  auto num = [&](const char* key, auto& dst) {
    using T = typename std::decay_t<decltype(dst)>::value_type;
    if (!dst && j.contains(key)) {
      if (!j.at(key).is_number()) throw UsageError(std::string("config key '") + key + "' must be a number");
      dst = j.at(key).get<T>();
    }
  };
  try {
    str("eps", o.eps);
    str("levels", o.levels);
    str("variant", o.variant);
    str("precond", o.precond);
    str("smoother", o.smoother);
    str("out_dir", o.out_dir);
    num("level", o.level);
    num("theta", o.theta);
    num("alpha", o.alpha);
    num("ratio", o.ratio);
    num("sweeps", o.sweeps);
    num("tol", o.tol);
    num("maxit", o.maxit);
    num("m", o.m);
    num("seed", o.seed);
    num("lanczos_steps", o.lanczos_steps);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("config file: ") + e.what());
  }
}

std::string out_dir(const Options& o) {
  if (const char* env = std::getenv("DG_PRECOND_OUT"); env != nullptr && *env != '\0') return env;
  return o.out_dir.value_or(".");
}

std::string ensure_dir(const Options& o) {
  const std::string dir = out_dir(o);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir + ": " + ec.message());
  return dir;
}

ExperimentConfig build_config(TableKind kind, const Options& o) {
  ExperimentConfig c = default_config(kind);
  if (o.eps) c.eps_list = parse_eps_list(*o.eps);
  if (o.levels) std::tie(c.min_level, c.max_level) = parse_levels(*o.levels);
  if (o.level) c.min_level = c.max_level = *o.level;
  if (o.theta) c.theta = *o.theta;
  if (o.alpha) c.alpha = *o.alpha;
  if (o.ratio) c.ratio = *o.ratio;
  if (o.sweeps) c.smoother.sweeps = *o.sweeps;
  if (o.smoother) {
    if (*o.smoother == "sym-gs")
      c.smoother.kind = SmootherKind::SymGS;
    else if (*o.smoother == "jacobi")
      c.smoother.kind = SmootherKind::Jacobi;
    else
      throw UsageError("unknown smoother " + *o.smoother);
  }
  if (o.precond && kind == TableKind::SIPG1) {
    if (*o.precond == "bpx")
      c.cr_precond = CrPreconditioner::BPX;
    else if (*o.precond == "two-level")
      c.cr_precond = CrPreconditioner::TwoLevel;
    else
      throw UsageError("sipg1 CR preconditioner must be bpx or two-level");
  }
  if (o.tol) c.tol = *o.tol;
  if (o.maxit) c.maxit = *o.maxit;
  if (o.m) c.m = *o.m;
  if (o.seed) c.seed = *o.seed;
  if (o.lanczos_steps) c.lanczos_steps = *o.lanczos_steps;
  try {
    validate(c);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (c.max_level > 6) throw UsageError("levels above 6 are not supported");
  return c;
}

Variant parse_variant(const std::optional<std::string>& v) {
  if (!v || *v == "ip0") return Variant::IP0;
  if (*v == "ip1") return Variant::IP1;
  throw UsageError("variant must be ip0 or ip1");
}

std::string eps_tag(double eps) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", eps);
  return buf;
}

int single_level(const Options& o, int fallback) {
  int l = fallback;
  if (o.levels) l = parse_levels(*o.levels).second;
  if (o.level) l = *o.level;
  if (l < 0 || l > 6) throw UsageError("level must be in 0..6");
  return l;
}

double single_eps(const Options& o) {
  if (!o.eps) return 1.0;
  const auto list = parse_eps_list(*o.eps);
  if (list.size() != 1) throw UsageError("this command takes a single eps");
  if (!(list[0] > 0.0)) throw UsageError("eps must be positive");
  return list[0];
}

int cmd_mesh_info(const Options& o) {
  const auto [lo, hi] = o.level ? std::pair{*o.level, *o.level} : parse_levels(o.levels.value_or("0"));
  if (lo < 0 || hi < lo || hi > 6) throw UsageError("bad level range");
  const MeshHierarchy h = build_hierarchy(hi);
  for (int l = lo; l <= hi; ++l) {
    const Mesh& m = h[l];
    std::printf("level=%d vertices=%d triangles=%d edges=%d interior_edges=%d boundary_edges=%d dofs=%d h=%g\n", l,
                m.num_vertices(), m.num_triangles(), m.num_edges(), m.num_interior_edges(), m.num_boundary_edges(),
                m.num_dg_dofs(), m.mesh_size());
  }
  if (o.mesh_dump) {
    const std::string dir = ensure_dir(o);
    for (int l = lo; l <= hi; ++l) {
      const std::string path = dir + "/mesh_" + std::to_string(l) + ".txt";
      std::ofstream f(path);
      write_mesh(f, h[l]);
      std::fprintf(stderr, "wrote %s\n", path.c_str());
    }
  }
  return kExitOk;
}

int cmd_assemble(const Options& o) {
  const int level = single_level(o, 0);
  const double eps = single_eps(o);
  const Variant variant = parse_variant(o.variant);
  const int theta = o.theta.value_or(-1);
  const double alpha = o.alpha.value_or(8.0);
  if (theta < -1 || theta > 1 || !(alpha > 0.0)) throw UsageError("bad theta or alpha");
  const MeshHierarchy h = build_hierarchy(level);
  const Problem p = make_problem(h[level], eps);
  SparseOperator a = assemble_dg(h[level], p.coeff, p.weights, {theta, alpha, variant});
  if (o.split) a = split_operator(a, p.basis);
  const std::string dir = ensure_dir(o);
  const std::string path = dir + "/matrix_" + to_string(variant) + "_theta" + std::to_string(theta) + "_eps" +
                           eps_tag(eps) + "_level" + std::to_string(level) + (o.split ? "_split" : "") + ".coo";
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  write_coo(f, a.matrix);
  std::printf("rows=%lld nonzeros=%lld symmetric=%d file=%s\n", static_cast<long long>(a.rows()),
              static_cast<long long>(a.matrix.nonZeros()), a.symmetric ? 1 : 0, path.c_str());
  return kExitOk;
}

// IP0 system with f = 1, solved by block forward substitution.
int cmd_solve(const Options& o) {
  const int level = single_level(o, 1);
  const double eps = single_eps(o);
  const int theta = o.theta.value_or(-1);
  const double alpha = o.alpha.value_or(8.0);
  const double tol = o.tol.value_or(1e-10);
  const std::string precond = o.precond.value_or("two-level");
  if (theta < -1 || theta > 1 || !(alpha > 0.0) || !(tol > 0.0)) throw UsageError("bad theta, alpha or tol");
  if (precond != "two-level" && precond != "bpx") throw UsageError("solve: --precond must be two-level or bpx");
  SmootherSpec spec;
  if (o.sweeps) spec.sweeps = *o.sweeps;

  const MeshHierarchy h = build_hierarchy(level);
  const Problem p = make_problem(h[level], eps);
  const SparseOperator a = assemble_ip0(h[level], p.coeff, p.weights, {theta, alpha, Variant::IP0});
  const BlockOperator blocks = extract_blocks(a, p.basis, theta);
  const Vector f = assemble_rhs(h[level], [](const Point&) { return 1.0; });
  const Vector fs = p.basis.transform.transpose() * f;

  int zz_it = 0, vv_it = 0;
  auto zz_solver = [&](const SparseOperator& op, const Vector& b) {
    const SolveResult r = pcg(op.matrix, b, diag_precond(op), tol, 10000);
    zz_it = r.report.iterations;
    if (!r.report.converged) throw NumericalError("solve: zz block did not converge");
    return r.x;
  };
  auto vv_solver = [&](const SparseOperator& op, const Vector& b) {
    const Preconditioner prec =
        precond == "bpx" ? bpx(op, h, spec, level) : two_level(op, cr_prolongation(h, level, level), spec);
    const SolveResult r = pcg(op.matrix, b, prec, tol, 10000);
    vv_it = r.report.iterations;
    if (!r.report.converged) throw NumericalError("solve: CR block did not converge");
    return r.x;
  };
  const SplitVector u = forward_substitution_solve(blocks, split_parts(fs, p.basis), zz_solver, vv_solver);
  const Vector x = from_split(u, p.basis);
  const double res = (a.matrix * x - f).norm() / f.norm();
  std::printf("level=%d eps=%g theta=%d dofs=%d zz_iterations=%d vv_iterations=%d relative_residual=%.3e\n", level,
              eps, theta, h[level].num_dg_dofs(), zz_it, vv_it, res);
  return kExitOk;
}

int cmd_table(const Options& o) {
  const auto kind = parse_table_kind(o.table);
  if (!kind) throw UsageError("unknown table '" + o.table + "' (zz, two-level, bpx, sipg1, iipg-propagator)");
  const ExperimentConfig cfg = build_config(*kind, o);
  const std::string dir = ensure_dir(o);
  const TableResult t = run_table(cfg);
  const std::string md = format_table_markdown(t);
  const std::string base = dir + "/" + t.name;
  {
    std::ofstream f(base + ".json");
    f << to_json(t).dump(2) << "\n";
  }
  {
    std::ofstream f(base + ".csv");
    write_table_csv(f, t);
  }
  {
    std::ofstream f(base + ".md");
    f << md;
  }
  std::cout << md;
  return t.passed() ? kExitOk : kExitFail;
}

int cmd_spectrum(const Options& o) {
  const std::string which = o.precond.value_or("two-level");
  TableKind kind;
  if (which == "two-level")
    kind = TableKind::TwoLevel;
  else if (which == "bpx")
    kind = TableKind::BPX;
  else if (which == "zz")
    kind = TableKind::ZZ;
  else if (which == "sipg1")
    kind = TableKind::SIPG1;
  else
    throw UsageError("spectrum: --precond must be two-level, bpx, zz or sipg1");
  Options local = o;
  local.precond.reset();
  ExperimentConfig cfg = build_config(kind, local);
  const int level = single_level(o, 2);
  const double eps = single_eps(o);
  const std::string dir = ensure_dir(o);
  const SpectrumEstimate s = cell_spectrum(cfg, eps, level);
  const std::string path = dir + "/" + spectrum_file_name(eps, level);
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  write_spectrum_csv(f, s.values);
  std::printf("values=%zu method=%s lambda_min=%.6e lambda_2=%.6e lambda_max=%.6e isolated=%d file=%s\n",
              s.values.size(), s.dense ? "dense" : "lanczos", s.values.front(),
              s.values.size() > 1 ? s.values[1] : s.values.front(), s.values.back(), count_isolated_small(s.values),
              path.c_str());
  return kExitOk;
}

int cmd_verify(const Options& o) {
  const int level = single_level(o, 1);
  const double eps = single_eps(o);
  const double alpha = o.alpha.value_or(8.0);
  if (!(alpha > 0.0)) throw UsageError("alpha must be positive");
  const MeshHierarchy h = build_hierarchy(level);
  bool ok = true;
  for (const PropertyCheck& c : verify_properties(h[level], eps, alpha)) {
    std::printf("%s %s: %.3e (limit %.1e)\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.value, c.threshold);
    ok = ok && c.pass;
  }
  std::printf("%s\n", ok ? "PASS" : "FAIL");
  return ok ? kExitOk : kExitFail;
}

void add_common(CLI::App* app, Options& o) {
  app->add_option("--config", o.config_path, "JSON file with flat keys (overridden by flags)");
  app->add_option("--eps", o.eps, "Background coefficient(s), comma separated");
  app->add_option("--levels", o.levels, "Level range: N (0..N) or a-b");
  app->add_option("--level", o.level, "Single mesh level");
  app->add_option("--theta", o.theta, "Symmetrization parameter: -1, 0 or 1");
  app->add_option("--alpha", o.alpha, "Penalty parameter");
  app->add_option("--precond", o.precond, "Preconditioner choice (command specific)");
  app->add_option("--ratio", o.ratio, "Coarse/fine mesh-size ratio of the two-level method: 1, 2 or 4");
  app->add_option("--sweeps", o.sweeps, "Smoother sweeps");
  app->add_option("--smoother", o.smoother, "Smoother: sym-gs or jacobi");
  app->add_option("--tol", o.tol, "Relative residual tolerance");
  app->add_option("--maxit", o.maxit, "Iteration limit");
  app->add_option("-m", o.m, "Number of small eigenvalues dropped in K_m");
  app->add_option("--seed", o.seed, "Random seed");
  app->add_option("--lanczos-steps", o.lanczos_steps, "Lanczos steps beyond the dense limit");
  app->add_option("--out-dir", o.out_dir, "Output directory (DG_PRECOND_OUT overrides)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted interior penalty DG: assembly, space splitting and preconditioners"};
  app.require_subcommand(1);
  Options o;

  auto* mesh_info = app.add_subcommand("mesh-info", "Mesh statistics per level");
  auto* assemble = app.add_subcommand("assemble", "Export a DG matrix in coordinate format");
  auto* solve = app.add_subcommand("solve", "Solve an IP0 system by block forward substitution");
  auto* table = app.add_subcommand("table", "Run a preconditioner experiment table");
  auto* spectrum = app.add_subcommand("spectrum", "Dump the spectrum of a preconditioned system");
  auto* verify = app.add_subcommand("verify", "Check the structural properties of the split discretization");
  for (auto* s : {mesh_info, assemble, solve, table, spectrum, verify}) add_common(s, o);
  mesh_info->add_flag("--dump", o.mesh_dump, "Write mesh_<level>.txt files");
  assemble->add_option("--variant", o.variant, "ip0 or ip1");
  assemble->add_flag("--split", o.split, "Export the matrix in the split basis");
  table->add_option("name", o.table, "zz | two-level | bpx | sipg1 | iipg-propagator")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    merge_file(o, read_config_file(o.config_path));
    if (mesh_info->parsed()) return cmd_mesh_info(o);
    if (assemble->parsed()) return cmd_assemble(o);
    if (solve->parsed()) return cmd_solve(o);
    if (table->parsed()) return cmd_table(o);
    if (spectrum->parsed()) return cmd_spectrum(o);
    if (verify->parsed()) return cmd_verify(o);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitFail;
  }
  return kExitUsage;
}
