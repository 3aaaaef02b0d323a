#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "qcmi/cli.hpp"
#include "qcmi/synthgen.hpp"

using namespace qcmi;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "qcmi_cli_tests";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "qcmi");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return cli::main(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("run config json round trip") {
  cli::RunConfig c;
  c.command = cli::Command::Experiment;
  c.preset = "zero-inflation";
  c.grid = {0, 100};
  c.generator.name = "beta-gaussian";
  c.generator.samples = 321;
  c.generator.sigma = 0.7;
  c.estimator_config.k = 7;
  c.estimator_config.norm = Norm::Euclidean;
  c.estimator_config.strict = false;
  c.estimator_config.bandwidth = 0.2;
  c.estimator_config.z_weights = ZCountWeights::Center;
  c.estimator_config.ties = TiePolicy::FixedK;
  c.estimator_config.self_normalize = true;
  c.potential.kind = PotentialKind::Gaussian;
  c.potential.mean = std::vector<double>{0.5};
  c.potential.bounds = std::vector<double>{0, 1, 0, 2};
  c.bins = 9;
  c.seed = 12;
  c.seeds = {1, 2, 3};
  c.output = "out.csv";
  c.format = cli::OutputFormat::Csv;
  const json j = cli::to_json(c);
  CHECK(cli::to_json(cli::run_config_from_json(j)) == j);
  CHECK(cli::to_json(cli::run_config_from_json(json::parse(j.dump()))) == j);
  CHECK_THROWS(cli::run_config_from_json(json{{"command", "plot"}}));
}

TEST_CASE("gen twice gives identical bytes") {
  const auto a = scratch("gen_a.csv"), b = scratch("gen_b.csv");
  CHECK(invoke({"gen", "mod1", "--samples", "500", "--degree", "3", "--seed", "9", "--output", a.string()}) == 0);
  CHECK(invoke({"gen", "mod1", "--samples", "500", "--degree", "3", "--seed", "9", "--output", b.string()}) == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(a).rfind("x0,y0,z0\n", 0) == 0);
  const Dataset d = read_dataset_csv(a.string());
  const Dataset direct = gen_mod1(500, 3, 0.2, 9);
  CHECK(d.x == direct.x);
  CHECK(d.y == direct.y);
}

TEST_CASE("estimate writes a full report") {
  const auto data = scratch("est.csv"), out = scratch("est.json");
  write_dataset_csv(data.string(), gen_mod1(600, 2, 0.2, 1));
  REQUIRE(invoke({"estimate", "--input", data.string(), "--bounds", "0,1,0,1", "--output", out.string()}) == 0);
  const json r = json::parse(slurp(out));
  CHECK(r.at("version").get<std::string>().rfind("qcmi-", 0) == 0);
  CHECK(r.at("rng") == "mt19937_64");
  CHECK(r.at("duration_seconds").get<double>() >= 0.0);
  CHECK(r.at("config").at("command") == "estimate");
  CHECK(r.at("config").at("potential").at("bounds") == json::array({0, 1, 0, 1}));
  const json& res = r.at("result");
  CHECK(res.at("method") == "qcmi");
  CHECK(res.at("samples") == 600);
  CHECK(res.at("terms").size() == 600);
  CHECK(res.at("weights").at("mean").get<double>() > 0.0);
  CHECK(res.at("residual").get<double>() < 1e-9);

  const Dataset d = read_dataset_csv(data.string());
  const Potential q = make_uniform_potential(1, 1, Box{Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 1)});
  CHECK(res.at("estimate").get<double>() == qcmi_knn(d, q).estimate);

  for (const char* est : {"cmi", "entropy", "partition"}) {
    const auto o = scratch(std::string("est_") + est + ".csv");
    CHECK(invoke({"estimate", "--input", data.string(), "--estimator", est, "--bins", "3", "--format", "csv", "--output",
                  o.string()}) == 0);
    CHECK(slurp(o).rfind("method,estimate,samples,k,norm,duration_seconds\n" + std::string(est) + ",", 0) == 0);
  }
}

TEST_CASE("output directory from the environment") {
  const auto dir = scratch("envdir");
  fs::create_directories(dir);
  ::setenv(cli::kOutputDirEnv, dir.string().c_str(), 1);
  CHECK(invoke({"gen", "beta-gaussian", "--samples", "20", "--seed", "4"}) == 0);
  ::unsetenv(cli::kOutputDirEnv);
  CHECK(fs::exists(dir / "beta-gaussian-seed4.csv"));
}

TEST_CASE("generator sigma defaults") {
  const auto a = scratch("decay_default.csv"), b = scratch("decay_01.csv");
  REQUIRE(invoke({"gen", "linear-decay", "--steps", "40", "--seed", "2", "--output", a.string()}) == 0);
  REQUIRE(invoke({"gen", "linear-decay", "--steps", "40", "--sigma", "0.1", "--seed", "2", "--output", b.string()}) == 0);
  CHECK(slurp(a) == slurp(b));
  const auto c = scratch("bg_default.csv"), d = scratch("bg_03.csv");
  REQUIRE(invoke({"gen", "beta-gaussian", "--samples", "30", "--seed", "2", "--output", c.string()}) == 0);
  REQUIRE(invoke({"gen", "beta-gaussian", "--samples", "30", "--sigma", "0.3", "--seed", "2", "--output", d.string()}) == 0);
  CHECK(slurp(c) == slurp(d));
}

TEST_CASE("infer with truth reports an auc") {
  const auto series = scratch("ts.csv"), truth = scratch("ts.csv.adjacency.csv"), out = scratch("infer.json");
  REQUIRE(invoke({"gen", "linear-decay", "--steps", "150", "--sigma", "0.1", "--seed", "3", "--output", series.string()}) == 0);
  CHECK(fs::exists(truth));
  REQUIRE(invoke({"infer", "--input", series.string(), "--truth", truth.string(), "--method", "rdi", "--output",
                  out.string()}) == 0);
  const json r = json::parse(slurp(out));
  CHECK(r.at("result").at("scores").size() == 13);
  CHECK(r.at("result").at("scores").at(0).at(0).is_null());
  const double a = r.at("result").at("auc").get<double>();
  CHECK(a >= 0.0);
  CHECK(a <= 1.0);
  const auto csv = scratch("infer.csv");
  REQUIRE(invoke({"infer", "--input", series.string(), "--truth", truth.string(), "--format", "csv", "--output",
                  csv.string()}) == 0);
  CHECK(slurp(csv).rfind("i,j,score,truth\n", 0) == 0);
}

TEST_CASE("experiment writes rows and an envelope") {
  const auto out = scratch("exp.csv");
  REQUIRE(invoke({"experiment", "mod1-sweep-N", "--grid", "300,600", "--seeds", "1,2", "--output", out.string()}) == 0);
  const std::string text = slurp(out);
  CHECK(text.rfind("samples,seed,truth,qcmi_knn,cmi_knn,qcmi_partition\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 5);
  // 300 samples are too few for two partition bins per axis.
  CHECK(text.find(",nan\n") != std::string::npos);
  const json env = json::parse(slurp(out.string() + ".json"));
  CHECK(env.at("config").at("preset") == "mod1-sweep-N");
  CHECK(env.at("config").at("seeds") == json::array({1, 2}));

  const auto zi = scratch("zi.csv");
  REQUIRE(invoke({"experiment", "zero-inflation", "--samples", "200", "--grid", "0,300", "--seeds", "1", "--output",
                  zi.string()}) == 0);
  const std::string zi_text = slurp(zi);
  CHECK(std::count(zi_text.begin(), zi_text.end(), '\n') == 3);
}

TEST_CASE("failed experiment leaves a marker and a nonzero status") {
  const auto out = scratch("exp_fail.csv");
  // 4 samples cannot support k = 5.
  CHECK(invoke({"experiment", "mod1-sweep-N", "--grid", "4", "--seeds", "1", "--output", out.string()}) == 1);
  CHECK(slurp(out).find("# FAILED:") != std::string::npos);
}

TEST_CASE("error exit codes") {
  CHECK(invoke({"estimate", "--input", scratch("missing.csv").string(), "--output", "-"}) == 1);
  CHECK(invoke({"estimate"}) != 0);
  CHECK(invoke({"estimate", "--input", "x.csv", "--norm", "l7"}) != 0);
  CHECK(invoke({"bogus"}) != 0);
  CHECK(invoke({"experiment", "fig9"}) != 0);
  const auto bad = scratch("bad.csv");
  std::ofstream(bad) << "x0,y0,z0\n1,2\n";
  CHECK(invoke({"estimate", "--input", bad.string(), "--output", "-"}) == 1);
}

TEST_CASE("config file drives a run") {
  cli::RunConfig c;
  c.command = cli::Command::Gen;
  c.generator.samples = 40;
  c.seed = 2;
  c.output = scratch("from_config.csv").string();
  const auto path = scratch("config.json");
  std::ofstream(path) << cli::to_json(c).dump();
  CHECK(invoke({"--config", path.string(), "gen"}) == 0);
  CHECK(read_dataset_csv(c.output).size() == 40);
}

}
