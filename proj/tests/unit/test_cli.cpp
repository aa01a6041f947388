// SPDX-License-Identifier: Apache-2.0
#include "fixtures.hpp"

#include "hetnas/cli/cli.hpp"
#include "hetnas/graph/graph.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace hetnas;
using namespace hetnas::cli;
namespace fs = std::filesystem;
using hetnas::testing::TempDir;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), "missing " << p.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

void write(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

/// Small synthetic bundle written through the CLI.
std::string synth_bundle(const TempDir& dir, double h, int nodes = 60) {
  const std::string path = (dir.path() / ("synth_" + std::to_string(nodes))).string();
  REQUIRE(run_cli({"synth", "--out", path, "--nodes", std::to_string(nodes), "--classes", "3", "--homophily",
                   std::to_string(h), "--feature-dim", "6", "--seed", "3"}) == kOk);
  return path;
}

std::vector<std::string> quick(std::vector<std::string> args) {
  for (const char* a : {"--layers", "1", "--hidden", "4", "--workers", "1"}) args.emplace_back(a);
  return args;
}

std::size_t count_files(const fs::path& dir, const std::string& prefix) {
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(dir)) n += e.path().filename().string().rfind(prefix, 0) == 0;
  return n;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("synth then homophily") {
  TempDir dir("cli_homophily");
  const auto data = synth_bundle(dir, 1.0);
  const auto out = dir.path() / "h";
  REQUIRE(run_cli({"homophily", "--dataset", data, "--out", out.string()}) == kOk);
  const auto j = read_json(out / "homophily.json");
  CHECK(j.at("h_edge") == 1.0);
  CHECK(j.at("h_node") == 1.0);
  CHECK(j.at("nodes") == 60);
  CHECK(j.at("tool") == "hetnas");
  CHECK(j.contains("version"));
  CHECK(j.at("config").at("dataset") == data);
  const auto csv = slurp(out / "homophily_nodes.csv");
  CHECK(csv.rfind("node,label,degree,h_node\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 61);
}

TEST_CASE("exit codes") {
  TempDir dir("cli_codes");
  CHECK(run_cli({"--version"}) == kOk);
  CHECK(run_cli({}) == kConfigError);
  CHECK(run_cli({"homophily", "--no-such-flag"}) == kConfigError);
  CHECK(run_cli({"homophily", "--dataset", (dir.path() / "absent").string()}) == kDataError);

  const auto data = synth_bundle(dir, 0.3);
  CHECK(run_cli({"search", "--dataset", data, "--layers", "0"}) == kConfigError);
  CHECK(run_cli({"search", "--dataset", data, "--fractions", "0.6", "0.3", "0.3"}) == kConfigError);
  CHECK(run_cli({"search", "--dataset", data, "--layer-weights", "both"}) == kConfigError);
  CHECK(run_cli({"train", "--dataset", data, "--out", dir.str()}) == kConfigError);
  CHECK(run_cli({"train", "--dataset", data, "--fixed", "nope", "--out", dir.str()}) == kConfigError);

  write(dir.path() / "broken.json", "{\"layers\": ");
  CHECK(run_cli({"search", "--config", (dir.path() / "broken.json").string(), "--dataset", data}) == kConfigError);
  write(dir.path() / "typed.json", R"({"splits": "ten"})");
  CHECK(run_cli({"search", "--config", (dir.path() / "typed.json").string(), "--dataset", data}) == kConfigError);
  CHECK(run_cli({"search", "--config", (dir.path() / "none.json").string(), "--dataset", data}) == kConfigError);

  // Edgeless graph: homophily is undefined.
  const auto empty = dir.path() / "edgeless";
  graph::save_dataset(graph::Graph::build("edgeless", 4, {}, diff::Matrix::Ones(4, 2), {0, 1, 0, 1}, false),
                      empty);
  CHECK(run_cli({"homophily", "--dataset", empty.string(), "--out", dir.str()}) == kNumericalError);

  // Malformed bundle.
  const auto bad = dir.path() / "bad";
  fs::create_directories(bad);
  fs::copy(fs::path(data), bad, fs::copy_options::recursive | fs::copy_options::overwrite_existing);
  write(bad / "edges.txt", "0 1\nzero two\n");
  CHECK(run_cli({"homophily", "--dataset", bad.string(), "--out", dir.str()}) == kDataError);
}

TEST_CASE("search writes one file per split and reruns byte-identically") {
  TempDir dir("cli_search");
  const auto data = synth_bundle(dir, 0.3);
  const auto out = dir.path() / "s";
  const auto args = quick({"search", "--dataset", data, "--out", out.string(), "--splits", "1", "--epochs", "3"});
  REQUIRE(run_cli(args) == kOk);
  CHECK(count_files(out, "arch_split") == 1);
  CHECK(count_files(out, "trace_split") == 1);
  const auto first = slurp(out / "arch_split0.json");
  const auto arch = read_json(out / "arch_split0.json");
  CHECK(arch.at("split") == 0);
  CHECK(arch.at("architecture").at("num_nodes") == 60);
  CHECK(arch.at("config").at("search").at("epochs") == 3);
  CHECK(slurp(out / "trace_split0.csv").rfind("epoch,", 0) == 0);

  REQUIRE(run_cli(args) == kOk);
  CHECK(slurp(out / "arch_split0.json") == first);

  const auto three = dir.path() / "s3";
  REQUIRE(run_cli(quick({"search", "--dataset", data, "--out", three.string(), "--splits", "3", "--epochs", "2"})) ==
          kOk);
  CHECK(count_files(three, "arch_split") == 3);
  const auto only = dir.path() / "s1";
  REQUIRE(run_cli(quick({"search", "--dataset", data, "--out", only.string(), "--splits", "3", "--split-index", "2",
                         "--epochs", "2"})) == kOk);
  CHECK(count_files(only, "arch_split") == 1);
  CHECK(fs::exists(only / "arch_split2.json"));
}

TEST_CASE("search divergence is reported per split") {
  TempDir dir("cli_diverge");
  const auto data = synth_bundle(dir, 0.3);
  const auto out = dir.path() / "s";
  CHECK(run_cli(quick({"search", "--dataset", data, "--out", out.string(), "--splits", "2", "--epochs", "10",
                       "--model-lr", "1e200"})) == kNumericalError);
  const auto summary = read_json(out / "search_summary.json");
  REQUIRE(summary.at("splits").size() == 2);
  for (const auto& s : summary.at("splits")) CHECK(s.at("status") == "diverged");
  CHECK(count_files(out, "trace_split") == 2);
  CHECK(count_files(out, "arch_split") == 0);
}

TEST_CASE("config file with flag overrides") {
  TempDir dir("cli_config");
  const auto data = synth_bundle(dir, 0.3);
  const auto cfg = dir.path() / "run.json";
  write(cfg, R"({"splits": 1, "supernet": {"layers": 1, "hidden": 4}, "search": {"epochs": 2}, "workers": 1})");
  const auto out = dir.path() / "s";
  REQUIRE(run_cli({"search", "--config", cfg.string(), "--dataset", data, "--out", out.string(), "--hidden", "6"}) ==
          kOk);
  const auto config = read_json(out / "arch_split0.json").at("config");
  CHECK(config.at("supernet").at("layers") == 1);
  CHECK(config.at("supernet").at("hidden") == 6);
  CHECK(config.at("search").at("epochs") == 2);
  CHECK(config.at("splits") == 1);
  CHECK(RunConfig::from_json(config).to_json() == config);
}

TEST_CASE("train, eval, hiir and report pipeline") {
  TempDir dir("cli_pipeline");
  const auto data = synth_bundle(dir, 0.3, 80);
  const auto search_dir = dir.path() / "search";
  REQUIRE(run_cli(quick({"search", "--dataset", data, "--out", search_dir.string(), "--splits", "2", "--epochs",
                         "3"})) == kOk);

  const auto searched = dir.path() / "train";
  REQUIRE(run_cli(quick({"train", "--dataset", data, "--out", searched.string(), "--splits", "2", "--arch-dir",
                         search_dir.string(), "--max-epochs", "20", "--hiir", "--bins", "4", "--plots"})) == kOk);
  const auto metrics = read_json(searched / "metrics.json");
  REQUIRE(metrics.at("splits").size() == 2);
  double sum = 0.0;
  for (const auto& s : metrics.at("splits")) {
    sum += s.at("test_accuracy").get<double>();
    CHECK(s.at("h_iir").get<double>() >= 0.0);
    CHECK(s.at("h_iir").get<double>() <= 1.0);
    CHECK(s.at("homophily_bins").size() == 4);
  }
  CHECK(metrics.at("mean").get<double>() == doctest::Approx(sum / 2.0));
  CHECK(fs::exists(searched / "op_distribution.svg"));
  CHECK(fs::exists(searched / "accuracy_bins.svg"));
  CHECK(fs::exists(searched / "model_split1.json"));
  CHECK(slurp(searched / "metrics.csv").rfind("split,test_accuracy,val_accuracy,h_iir\n", 0) == 0);

  const auto fixed = dir.path() / "fixed";
  REQUIRE(run_cli(quick({"train", "--dataset", data, "--out", fixed.string(), "--splits", "2", "--fixed",
                         "bare_sum", "--max-epochs", "20", "--hiir"})) == kOk);

  // Saved models reproduce the recorded test accuracies.
  const auto evald = dir.path() / "eval";
  REQUIRE(run_cli(quick({"eval", "--dataset", data, "--out", evald.string(), "--splits", "2", "--model-dir",
                         searched.string()})) == kOk);
  const auto again = read_json(evald / "eval_metrics.json");
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(again.at("splits")[k].at("test_accuracy") == metrics.at("splits")[k].at("test_accuracy"));
  }

  const auto hiir = dir.path() / "hiir";
  REQUIRE(run_cli(quick({"hiir", "--dataset", data, "--out", hiir.string(), "--splits", "2", "--model-dir",
                         searched.string()})) == kOk);
  const auto h = read_json(hiir / "hiir.json");
  CHECK(h.at("mean_h_iir").get<double>() ==
        doctest::Approx((metrics.at("splits")[0].at("h_iir").get<double>() +
                         metrics.at("splits")[1].at("h_iir").get<double>()) / 2.0));
  CHECK(fs::exists(hiir / "hiir_split0.csv"));

  const auto report = dir.path() / "report";
  REQUIRE(run_cli({"report", "--out", report.string(), "--runs", searched.string(), fixed.string(), "--labels",
                   "searched", "bare_sum", "--plots"}) == kOk);
  const auto r = read_json(report / "report.json");
  CHECK(r.at("runs").size() == 2);
  CHECK(slurp(report / "report.csv").find("bare_sum") != std::string::npos);
  CHECK(fs::exists(report / "accuracy_vs_hiir.svg"));

  CHECK(run_cli({"report", "--out", report.string(), "--runs", (dir.path() / "nowhere").string()}) == kDataError);
  CHECK(run_cli(quick({"eval", "--dataset", data, "--out", evald.string(), "--splits", "2", "--model-dir",
                       (dir.path() / "nowhere").string()})) == kDataError);
}

TEST_CASE("training reruns are identical") {
  TempDir dir("cli_rerun");
  const auto data = synth_bundle(dir, 0.3);
  const auto a = dir.path() / "a";
  const auto args =
      quick({"train", "--dataset", data, "--out", a.string(), "--splits", "2", "--fixed", "gcn", "--max-epochs", "15"});
  REQUIRE(run_cli(args) == kOk);
  const auto first = slurp(a / "metrics.json");
  const auto model = slurp(a / "model_split0.json");
  REQUIRE(run_cli(args) == kOk);
  CHECK(slurp(a / "metrics.json") == first);
  CHECK(slurp(a / "model_split0.json") == model);
}

}  // TEST_SUITE
