// Copyright 2026 The segcert Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <set>
#include <sstream>

#include "segcert/cli.hpp"
#include "segcert/data.hpp"
#include "segcert/errors.hpp"

using namespace segcert;
using namespace segcert::cli;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "segcert_cli" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SEGCERT_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("config parsing") {
  const auto c = KeyValueConfig::parse(
      "seed = 5   # top level\n"
      "[scene]\n"
      "height = 12\n"
      "; comment\n"
      "means = 0.2, 0.5 ,0.8\n"
      "[smoothing]\n"
      "denoise = multi_step\n");
  CHECK(c.get_u64("seed", 0) == 5);
  CHECK(c.get_int("scene.height", 0) == 12);
  CHECK(c.get_doubles("scene.means", {}) == std::vector<double>{0.2, 0.5, 0.8});
  CHECK(c.get_string("smoothing.denoise", "") == "multi_step");
  CHECK(c.get_int("scene.width", 7) == 7);
  CHECK(c.has("scene.height"));
  CHECK(!c.has("scene.width"));
}

TEST_CASE("config errors name the problem") {
  CHECK_THROWS_AS(KeyValueConfig::parse("[scene\nx = 1\n"), ConfigError);
  CHECK_THROWS_AS(KeyValueConfig::parse("justtext\n"), ConfigError);
  CHECK_THROWS_AS(KeyValueConfig::parse("a = 1\na = 2\n"), ConfigError);
  const auto c = KeyValueConfig::parse("[scene]\nheight = tall\n");
  try {
    c.get_int("scene.height", 1);
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("scene.height") != std::string::npos);
  }
  try {
    c.require_int("scene.width");
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("scene.width") != std::string::npos);
  }
  CHECK_THROWS_AS(KeyValueConfig::load("/nonexistent/segcert.cfg"), IoError);
}

TEST_CASE("echo replays to the same resolved run") {
  auto c = KeyValueConfig::parse("[smoothing]\nsigma = 0.5\n[scene]\nclasses = 3\n");
  const RunConfig a = RunConfig::resolve(c);
  const auto replay = KeyValueConfig::parse(c.echo());
  const RunConfig b = RunConfig::resolve(replay);
  CHECK(b.smoothing.sigma == a.smoothing.sigma);
  CHECK(b.scene.classes == 3);
  CHECK(b.model_means == a.model_means);
  CHECK(replay.echo() == c.echo());
  CHECK(c.echo().find("[smoothing]\n") != std::string::npos);
}

TEST_CASE("run config resolution") {
  const auto c = KeyValueConfig::parse("[model]\ntype = constant\nlabel = 2\n[scene]\nclasses = 3\n");
  const auto r = RunConfig::resolve(c);
  CHECK(r.model == ModelKind::constant);
  CHECK(r.model_classes == 3);
  CHECK(r.constant_label == 2);
  CHECK_THROWS_AS(RunConfig::resolve(KeyValueConfig::parse("[model]\ntype = neural\n")), ConfigError);
  CHECK_THROWS_AS(RunConfig::resolve(KeyValueConfig::parse("[model]\ntype = constant\nlabel = 9\n")), ConfigError);
}

TEST_CASE("gen requires its scene keys") {
  const auto out = fresh_dir("gen_missing");
  std::ostringstream log;
  try {
    cmd_gen(KeyValueConfig::parse("[scene]\nheight = 8\nclasses = 3\n"), out, log);
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("scene.width") != std::string::npos);
  }
}

TEST_CASE("gen writes deterministic files") {
  const auto cfg = KeyValueConfig::parse("seed = 4\n[scene]\nheight = 64\nwidth = 64\nclasses = 4\n");
  const auto a = fresh_dir("gen_a");
  const auto b = fresh_dir("gen_b");
  std::ostringstream log;
  cmd_gen(cfg, a, log);
  cmd_gen(cfg, b, log);
  for (const char* f : {"image.pgm", "labels.pgm", "manifest.txt", "config.txt"}) {
    CHECK(data::read_file(a / f) == data::read_file(b / f));
  }
  const auto labels = data::read_labels(a / "labels.pgm", 4);
  std::set<Label> distinct(labels.values().begin(), labels.values().end());
  CHECK(distinct.size() == 4);
}

TEST_CASE("certify writes its outputs") {
  const auto out = fresh_dir("certify");
  auto cfg = KeyValueConfig::parse(
      "[scene]\nheight = 16\nwidth = 16\n[model]\ntype = constant\n[smoothing]\nsigma = 0.25\n");
  std::ostringstream log;
  cmd_certify(cfg, out, log);
  const auto labels = data::read_labels(out / "certified.pgm", 4);
  for (Label l : labels.values()) CHECK(l == 0);
  const std::string csv = data::read_file(out / "metrics.csv");
  CHECK(csv.find("0.25,0.168622,") != std::string::npos);
  const Image pv = data::read_pnm(out / "pvalues.pgm");
  CHECK(std::lround(pv.at(0, 0) * 65535) == std::lround(-std::log10(3.2072021853815e-13) * 1000));
  CHECK(data::read_file(out / "run.log").find("t_star = 0") != std::string::npos);
  CHECK(fs::exists(out / "config.txt"));
}

TEST_CASE("pvalue map clamps") {
  const Image m = pvalue_map({1.0, 0.1, 0.0, 1e-80}, 2, 2);
  CHECK(m.at(0, 0) == 0.0);
  CHECK(m.at(0, 1) * 65535 == doctest::Approx(1000));
  CHECK(m.at(1, 0) == 1.0);
  CHECK(m.at(1, 1) == 1.0);
  CHECK_THROWS_AS(pvalue_map({0.5}, 2, 2), DomainError);
}

TEST_CASE("sweep needs sigmas and keeps duplicate rows identical") {
  std::ostringstream log;
  CHECK_THROWS_AS(cmd_sweep(KeyValueConfig::parse("[sweep]\nsigmas =\n"), fresh_dir("sweep_empty"), log),
                  ConfigError);
  const auto out = fresh_dir("sweep_dup");
  cmd_sweep(KeyValueConfig::parse("[scene]\nheight = 12\nwidth = 12\n[smoothing]\nn = 40\n[sweep]\nsigmas = 0.3, 0.3\n"),
            out, log);
  std::istringstream csv(data::read_file(out / "metrics.csv"));
  std::string header, first, second;
  std::getline(csv, header);
  std::getline(csv, first);
  std::getline(csv, second);
  CHECK(first == second);
  CHECK(!first.empty());
}

TEST_CASE("exit codes") {
  CHECK(exit_code_for(ConfigError("x")) == 2);
  CHECK(exit_code_for(IoError("x", "p")) == 3);
  CHECK(exit_code_for(ParseError("x", 1)) == 3);
  CHECK(exit_code_for(DomainError("x")) == 4);
  CHECK(exit_code_for(RangeError("x")) == 4);
  CHECK(exit_code_for(std::runtime_error("x")) == 1);
}

TEST_CASE("cli binary exit codes") {
  const auto out = fresh_dir("binary");
  CHECK(run_cli("timestep --sigma 1.0") == 0);
  CHECK(run_cli("timestep --sigma 100000") == 4);
  CHECK(run_cli("timestep") == 2);
  CHECK(run_cli("--out " + out.string() + " gen --height 8 --classes 3") == 2);
  CHECK(run_cli("--out " + out.string() + " eval --pred /nonexistent.pgm --gt /nonexistent.pgm") == 3);
  CHECK(run_cli("--out " + out.string() + " gen --height 8 --width 8 --classes 3") == 0);
  CHECK(run_cli("--out " + out.string() + " render --labels " + (out / "labels.pgm").string() + " --classes 3") == 0);
  CHECK(run_cli("--out " + out.string() + " eval --pred " + (out / "labels.pgm").string() + " --gt " +
                (out / "labels.pgm").string() + " --classes 3") == 0);
  CHECK(data::read_file(out / "eval.csv").find(",1.000000,1.000000,1.000000,0.000000,") != std::string::npos);
  CHECK(run_cli("--out " + out.string() + " eval --pred " + (out / "labels.pgm").string() + " --gt " +
                (out / "labels.pgm").string() + " --classes 2") == 4);
  CHECK(run_cli("--bogus") == 2);
}
