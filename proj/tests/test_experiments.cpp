#include "dgml/experiments.hpp"
#include "dgml/json_io.hpp"
#include "dgml/reference_values.hpp"
#include "dgml/verify.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace dgml;

namespace {

ExperimentConfig small(TableKind kind) {
  ExperimentConfig c = default_config(kind);
  c.eps_list = {1.0, 1e-3};
  c.max_level = 1;
  return c;
}

}  // namespace

TEST(Config, DefaultsAndValidation) {
  const ExperimentConfig z = default_config(TableKind::ZZ);
  EXPECT_EQ(z.theta, -1);
  EXPECT_EQ(z.alpha, 8.0);
  EXPECT_EQ(z.tol, 1e-7);
  EXPECT_EQ(z.smoother.sweeps, 5);
  EXPECT_EQ(z.eps_list.size(), 7u);
  EXPECT_EQ(default_config(TableKind::BPX).max_level, 4);
  const ExperimentConfig p = default_config(TableKind::IIPGPropagator);
  EXPECT_EQ(p.theta, 0);
  EXPECT_EQ(p.alpha, 32.0);
  EXPECT_EQ(p.eps_list.size(), 11u);
  EXPECT_NO_THROW(validate(z));
  ExperimentConfig bad = z;
  bad.ratio = 3;
  EXPECT_THROW(validate(bad), std::invalid_argument);
  bad = z;
  bad.eps_list = {-1.0};
  EXPECT_THROW(validate(bad), std::invalid_argument);
  bad = z;
  bad.min_level = 2;
  bad.max_level = 1;
  EXPECT_THROW(validate(bad), std::invalid_argument);
  EXPECT_EQ(parse_table_kind("two-level"), TableKind::TwoLevel);
  EXPECT_FALSE(parse_table_kind("nope").has_value());
}

TEST(Config, HashTracksEveryField) {
  const ExperimentConfig a = default_config(TableKind::BPX);
  ExperimentConfig b = a;
  EXPECT_EQ(config_hash(a), config_hash(b));
  EXPECT_EQ(config_hash(a).size(), 16u);
  b.seed += 1;
  EXPECT_NE(config_hash(a), config_hash(b));
  b = a;
  b.smoother.sweeps = 4;
  EXPECT_NE(config_hash(a), config_hash(b));
}

TEST(Tables, CellsAreConsistent) {
  for (TableKind kind : {TableKind::ZZ, TableKind::TwoLevel, TableKind::BPX, TableKind::SIPG1}) {
    const TableResult t = run_table(small(kind));
    EXPECT_EQ(t.cells.size(), 4u);
    for (const TableCell& c : t.cells) {
      ASSERT_TRUE(c.feasible);
      EXPECT_TRUE(c.converged);
      EXPECT_TRUE(c.energy_monotone);
      EXPECT_EQ(c.residuals.size(), static_cast<std::size_t>(c.iterations + 1));
      EXPECT_LT(c.residuals.back(), 1e-7);
      EXPECT_EQ(c.spectrum_method, "dense");
      EXPECT_GE(c.K, c.K_m);
      EXPECT_NEAR(c.K, c.lambda_max / c.lambda_min, 1e-12 * c.K);
    }
    EXPECT_TRUE(t.golden_applicable);
  }
}

TEST(Tables, ZzCellMatchesIndependentDenseCondition) {
  ExperimentConfig c = small(TableKind::ZZ);
  c.eps_list = {1e-3};
  c.min_level = 1;
  const TableResult t = run_table(c);
  const MeshHierarchy h = build_hierarchy(1);
  const CoefficientField k = assign_coefficient(h[1], 1e-3);
  const EdgeWeights w = edge_weights(h[1], k);
  const BlockOperator b = extract_blocks(assemble_ip0(h[1], k, w, {-1, 8.0, Variant::IP0}), build_transform(h[1], w), -1);
  const DenseMatrix zz(b.zz.matrix);
  const DenseMatrix d = zz.diagonal().asDiagonal();
  const auto ev = oracle::generalized_eigenvalues(zz, d);
  EXPECT_NEAR(t.cells[0].K, ev.back() / ev.front(), 1e-9 * t.cells[0].K);
}

TEST(Tables, IipgZBlockIsExactlyPreconditioned) {
  ExperimentConfig c = small(TableKind::ZZ);
  c.theta = 0;
  const TableResult t = run_table(c);
  EXPECT_FALSE(t.golden_applicable);
  for (const TableCell& cell : t.cells) {
    EXPECT_NEAR(cell.K, 1.0, 1e-12);
    EXPECT_EQ(cell.iterations, 1);
  }
}

TEST(Tables, InfeasibleCoarseMesh) {
  ExperimentConfig c = small(TableKind::TwoLevel);
  c.ratio = 4;
  const TableResult t = run_table(c);
  for (const TableCell& cell : t.cells) EXPECT_FALSE(cell.feasible);
  EXPECT_TRUE(t.all_converged());
  const std::string md = format_table_markdown(t);
  EXPECT_NE(md.find("| X |"), std::string::npos);
  EXPECT_EQ(t.name, "two-level-r4");
}

TEST(Tables, NoIsolatedEigenvalueWithoutJump) {
  ExperimentConfig c = default_config(TableKind::TwoLevel);
  c.eps_list = {1.0, 1e-5};
  c.min_level = c.max_level = 2;
  const TableResult t = run_table(c);
  const TableCell* smooth = t.find(1.0, 2);
  const TableCell* jump = t.find(1e-5, 2);
  EXPECT_LT(smooth->lambda_2 / smooth->lambda_min, 10.0);
  EXPECT_EQ(smooth->isolated, 0);
  EXPECT_EQ(jump->isolated, 1);
  EXPECT_GT(jump->K, 1e3);
  EXPECT_LT(jump->K_m, 5.0);
}

TEST(Tables, PropagatorTable) {
  ExperimentConfig c = default_config(TableKind::IIPGPropagator);
  c.eps_list = {1.0, 1e-5};
  c.max_level = 1;
  const TableResult t = run_table(c);
  for (const TableCell& cell : t.cells) {
    EXPECT_TRUE(cell.norm_converged);
    EXPECT_GT(cell.norm, 0.09);
    EXPECT_LT(cell.norm, 0.27);
  }
  const std::string md = format_table_markdown(t);
  EXPECT_NE(md.find("RESULT:"), std::string::npos);
}

TEST(Tables, ReferenceComparison) {
  ExperimentConfig c = small(TableKind::BPX);
  c.eps_list = {1.0};
  const TableResult t = run_table(c);
  ASSERT_FALSE(t.golden.empty());
  for (const GoldenCheck& g : t.golden) EXPECT_TRUE(g.pass) << g.quantity << " " << g.level;
  // Non-default parameters disable the comparison.
  c.smoother.sweeps = 2;
  EXPECT_FALSE(run_table(c).golden_applicable);
}

TEST(Tables, Deterministic) {
  const ExperimentConfig c = small(TableKind::SIPG1);
  EXPECT_EQ(to_json(run_table(c)).dump(), to_json(run_table(c)).dump());
  EXPECT_EQ(format_table_markdown(run_table(c)), format_table_markdown(run_table(c)));
}

TEST(Reference, TablesAreComplete) {
  EXPECT_EQ(reference::zz_block().size(), 7u * 4u);
  EXPECT_EQ(reference::bpx().size(), 7u * 5u);
  EXPECT_EQ(reference::sipg1_block_jacobi().size(), 7u * 4u);
  EXPECT_EQ(reference::iipg_propagator().size(), 11u * 4u);
  int infeasible = 0;
  for (const auto& r : reference::two_level(4)) infeasible += r.infeasible ? 1 : 0;
  EXPECT_EQ(infeasible, 2 * 7);
}

TEST(Output, JsonAndCsv) {
  const TableResult t = run_table(small(TableKind::ZZ));
  const nlohmann::json j = to_json(t);
  EXPECT_EQ(j["name"], "zz");
  EXPECT_EQ(j["config_hash"], t.hash);
  EXPECT_EQ(j["cells"].size(), 4u);
  EXPECT_EQ(j["config"]["seed"], 20240601u);
  EXPECT_TRUE(j["cells"][0]["K"].is_number());
  EXPECT_TRUE(detail::number(std::nan("")).is_null());
  std::ostringstream csv;
  write_table_csv(csv, t);
  std::istringstream is(csv.str());
  std::string line;
  int lines = 0;
  std::getline(is, line);
  EXPECT_EQ(line.rfind("eps,level,", 0), 0u);
  while (std::getline(is, line)) ++lines;
  EXPECT_EQ(lines, 4);
}

TEST(Output, SpectrumDump) {
  const auto dir = std::filesystem::temp_directory_path() / "dgml_spectrum_test";
  std::filesystem::create_directories(dir);
  ExperimentConfig c = default_config(TableKind::TwoLevel);
  const std::string path = dump_spectrum(c, 1e-3, 1, dir.string());
  EXPECT_EQ(std::filesystem::path(path).filename(), "spectrum_0.001_1.csv");
  std::ifstream f(path);
  std::string line;
  std::getline(f, line);
  EXPECT_EQ(line, "index,value");
  double prev = 0.0;
  int n = 0;
  while (std::getline(f, line)) {
    const double v = std::stod(line.substr(line.find(',') + 1));
    EXPECT_GE(v, prev);
    prev = v;
    ++n;
  }
  EXPECT_EQ(n, build_hierarchy(1)[1].num_interior_edges());
  std::filesystem::remove_all(dir);
}

TEST(Verify, AllPropertiesHold) {
  const MeshHierarchy h = build_hierarchy(1);
  for (double eps : {1e-5, 1.0, 1e5})
    for (const PropertyCheck& p : verify_properties(h[1], eps)) EXPECT_TRUE(p.pass) << p.name << " " << p.value;
}
