#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "support.hpp"

namespace depcache {
namespace {

std::string temp_path(const std::string& name) { return ::testing::TempDir() + name; }

ExperimentConfig tree_config() {
  ExperimentConfig cfg;
  cfg.dag.tree_height = 5;
  cfg.trace.length = 300;
  cfg.policies = {"bucketing", "bypass", "det"};
  cfg.ks = {3, 5};
  cfg.repetitions = 3;
  cfg.base_seed = 10;
  return cfg;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

TEST(Harness, EmptyTraceGivesZeroCostRow) {
  const auto path = temp_path("empty_trace.txt");
  std::ofstream(path) << "# nothing\n";
  ExperimentConfig cfg;
  cfg.dag.tree_height = 3;
  cfg.trace.kind = TraceSource::Kind::File;
  cfg.trace.path = path;
  cfg.policies = {"bucketing"};
  cfg.ks = {2};
  cfg.repetitions = 1;
  const auto rows = run_experiment(cfg);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].total_cost, 0u);
  EXPECT_EQ(rows[0].trace_len, 0u);
  EXPECT_EQ(rows[0].cost_per_request, 0.0);
  std::remove(path.c_str());
}

TEST(Harness, RowsOrderedAndSeeded) {
  const auto rows = run_experiment(tree_config());
  ASSERT_EQ(rows.size(), 3u * 2u * 3u);
  std::size_t i = 0;
  for (const std::string policy : {"bucketing", "bypass", "det"}) {
    for (std::size_t k : {3u, 5u}) {
      for (std::uint64_t t = 0; t < 3; ++t, ++i) {
        EXPECT_EQ(rows[i].policy, policy);
        EXPECT_EQ(rows[i].k, k);
        EXPECT_EQ(rows[i].seed, 10 + t);
        EXPECT_DOUBLE_EQ(rows[i].cost_per_request, double(rows[i].total_cost) / double(rows[i].trace_len));
        EXPECT_FALSE(rows[i].opt_cost.has_value());
      }
    }
  }
}

TEST(Harness, CsvIsByteStable) {
  const auto a = to_csv(run_experiment(tree_config()));
  const auto b = to_csv(run_experiment(tree_config()));
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.substr(0, a.find('\n')), kCsvHeader);
  std::istringstream lines(a);
  std::string line;
  std::getline(lines, line);
  while (std::getline(lines, line)) {
    const auto f = split(line);
    ASSERT_EQ(f.size(), 12u) << line;
    EXPECT_TRUE(f[10].empty());
    EXPECT_TRUE(f[11].empty());
    EXPECT_EQ(f[5].size() - f[5].find('.') - 1, 6u);
  }
}

TEST(Harness, OracleRatiosAtLeastOne) {
  ExperimentConfig cfg;
  cfg.dag.kind = DagSource::Kind::File;
  const auto path = temp_path("example.dag");
  {
    std::ofstream out(path);
    write_dag(out, testing::example_dag());
  }
  cfg.dag.path = path;
  const auto trace_path = temp_path("example_trace.txt");
  {
    std::ofstream out(trace_path);
    Trace t;
    RandomSource rng(2);
    t.requests = random_trace(testing::example_dag(), 4, 60, rng);
    write_trace(out, t);
  }
  cfg.trace.kind = TraceSource::Kind::File;
  cfg.trace.path = trace_path;
  cfg.policies = {"bucketing", "bypass", "det"};
  cfg.ks = {4, 6};
  cfg.repetitions = 2;
  cfg.oracle = true;
  const auto rows = run_experiment(cfg);
  ASSERT_EQ(rows.size(), 12u);
  for (const auto& r : rows) {
    ASSERT_TRUE(r.opt_cost.has_value());
    ASSERT_TRUE(r.ratio.has_value());
    EXPECT_GE(*r.ratio, 1.0);
  }
  std::remove(path.c_str());
  std::remove(trace_path.c_str());
}

TEST(Harness, SummedCostsMatchTotals) {
  auto cfg = tree_config();
  cfg.trace.kind = TraceSource::Kind::Geometric;
  cfg.trace.geometric_p = 0.1;
  EXPECT_NO_THROW(run_experiment(cfg));
}

TEST(Harness, LowerBoundWorkload) {
  ExperimentConfig cfg;
  cfg.dag.kind = DagSource::Kind::LowerBound;
  cfg.trace.kind = TraceSource::Kind::LowerBound;
  cfg.trace.lb_subsequences = 20;
  cfg.policies = {"bucketing", "det"};
  cfg.ks = {8};
  cfg.repetitions = 2;
  cfg.oracle = true;
  const auto rows = run_experiment(cfg);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].trace_len, 120u);
}

TEST(Harness, ConfigValidation) {
  auto cfg = tree_config();
  cfg.repetitions = 0;
  EXPECT_THROW(run_experiment(cfg), Error);
  cfg = tree_config();
  cfg.policies.clear();
  EXPECT_THROW(run_experiment(cfg), Error);
  cfg = tree_config();
  cfg.ks.clear();
  EXPECT_THROW(run_experiment(cfg), Error);
  cfg = tree_config();
  cfg.policies = {"fifo"};
  EXPECT_THROW(run_experiment(cfg), Error);
  cfg = tree_config();
  cfg.policies = {"lru"};
  EXPECT_THROW(run_experiment(cfg), Error);  // the tree has dependencies
}

TEST(ConfigFile, ParsesAllKeys) {
  std::istringstream in(
      "# sweep\n"
      "tree_height = 6\n"
      "tree_orientation = subtree\n"
      "workload = geometric\n"
      "geometric_p = 0.25\n"
      "trace_len = 123\n"
      "policies = bypass, det\n"
      "k = 4, 8,16\n"
      "repetitions = 7\n"
      "seed = 99\n"
      "oracle = false\n"
      "output = out.csv  # trailing comment\n");
  const auto cfg = parse_config(in);
  EXPECT_EQ(cfg.dag.kind, DagSource::Kind::Tree);
  EXPECT_EQ(cfg.dag.tree_height, 6u);
  EXPECT_EQ(cfg.dag.orientation, TreeOrientation::NodeDependsOnSubtree);
  EXPECT_EQ(cfg.trace.kind, TraceSource::Kind::Geometric);
  EXPECT_DOUBLE_EQ(cfg.trace.geometric_p, 0.25);
  EXPECT_EQ(cfg.trace.length, 123u);
  EXPECT_EQ(cfg.policies, (std::vector<std::string>{"bypass", "det"}));
  EXPECT_EQ(cfg.ks, (std::vector<std::size_t>{4, 8, 16}));
  EXPECT_EQ(cfg.repetitions, 7u);
  EXPECT_EQ(cfg.base_seed, 99u);
  EXPECT_FALSE(cfg.oracle);
  EXPECT_EQ(cfg.output, "out.csv");
}

TEST(ConfigFile, Errors) {
  std::istringstream unknown("colour = blue\n");
  EXPECT_THROW(parse_config(unknown), Error);
  std::istringstream no_eq("tree_height 5\n");
  EXPECT_THROW(parse_config(no_eq), Error);
  std::istringstream bad_number("k = 4, x\n");
  EXPECT_THROW(parse_config(bad_number), Error);
}

TEST(MakePolicy, Names) {
  const auto flat = DependencyDag::edge_free(4);
  for (const auto& name : policy_names()) EXPECT_EQ(make_policy(name, flat, 2, 1)->name(), name);
  EXPECT_THROW(make_policy("nope", flat, 2, 1), Error);
}

}  // namespace
}  // namespace depcache
