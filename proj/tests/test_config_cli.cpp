#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "doctest.h"
#include "fwmix/common.hpp"
#include "fwmix/pipeline_config.hpp"
#include "fwmix/synthgen.hpp"
#include "test_util.hpp"

using namespace fwmix;

TEST_CASE("pipeline config text round-trips") {
  const PipelineConfig config = PipelineConfig::defaults(77);
  const std::string text = config_to_json_text(config);
  const PipelineConfig back = config_from_json_text(text);
  CHECK(config_to_json_text(back) == text);
  CHECK(back.master_seed == 77);
  CHECK(back.models.size() == 4);
  CHECK(back.evaluation.k == 10);
  CHECK(back.evaluation.test_fraction == 0.2);
  CHECK(back.generator.regions.size() == 3);
  CHECK(back.generator.regions[0].n == 765);
}

TEST_CASE("config parsing names unknown keys by path") {
  try {
    config_from_json_text(R"({"master_seed": 1, "generator": {"bogus": 2}})");
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("generator") != std::string::npos);
    CHECK(msg.find("bogus") != std::string::npos);
  }
  CHECK_THROWS_AS(config_from_json_text(R"({"master_sed": 1})"), ConfigError);
  CHECK_THROWS_AS(config_from_json_text("not json"), ConfigError);
  CHECK_THROWS_AS(config_from_json_text("[]"), ConfigError);
}

TEST_CASE("the master seed drives every stage seed") {
  const PipelineConfig config = config_from_json_text(R"({"master_seed": 99})");
  // The generator draws must match a suite built from the same master.
  const auto ours = generate_suite(config.generator);
  const auto reference = generate_suite(default_suite_config(99, 765));
  CHECK(ours[0] == reference[0]);

  const PipelineConfig other = config_from_json_text(R"({"master_seed": 100})");
  CHECK_FALSE(generate_suite(other.generator)[0] == ours[0]);
}

TEST_CASE("quick profile shrinks regions after overlays") {
  const PipelineConfig quick = config_from_json_text(
      R"({"master_seed": 1, "quick": true,
          "mix": {"alpha": [0.5, 0.5]},
          "generator": {"regions": [
            {"region_id": "a", "n": 4000, "mu": [0, 0], "sigma2": [1, 1]},
            {"region_id": "b", "n": 4000, "mu": [1, 1], "sigma2": [1, 1]}]}})");
  REQUIRE(quick.generator.regions.size() == 2);
  CHECK(quick.generator.regions[0].n == 125);
  CHECK(quick.generator.regions[1].n == 125);
  CHECK(quick.augment.expansion_factor == 4);
  CHECK(quick.evaluation.k == 10);
  CHECK(quick.models.size() == 4);
  for (const Hyperparams& hp : quick.models) {
    if (hp.kind == ModelKind::rf) CHECK(hp.rf.n_trees == 50);
  }
  CHECK(quick.quick);
}

TEST_CASE("mix noise accepts a number or auto") {
  const PipelineConfig autod =
      config_from_json_text(R"({"master_seed": 1, "mix": {"mix_noise_sd": "auto"}})");
  CHECK(autod.mix.mix_noise_sd < 0.0);
  const PipelineConfig fixed =
      config_from_json_text(R"({"master_seed": 1, "mix": {"mix_noise_sd": 0.25}})");
  CHECK(fixed.mix.mix_noise_sd == 0.25);
  CHECK_THROWS_AS(
      config_from_json_text(R"({"master_seed": 1, "mix": {"mix_noise_sd": -0.25}})"),
      ConfigError);
  CHECK_THROWS_AS(
      config_from_json_text(R"({"master_seed": 1, "mix": {"mix_noise_sd": "none"}})"),
      ConfigError);
}

TEST_CASE("svr gamma accepts a number or scale") {
  const PipelineConfig config = config_from_json_text(
      R"({"master_seed": 1, "models": [{"kind": "svr", "gamma": "scale"},
                                       {"kind": "knn"}]})");
  REQUIRE(config.models.size() == 2);
  CHECK(config.models[0].kind == ModelKind::svr);
  CHECK(config.models[0].svr.gamma <= 0.0);
  const std::string text = config_to_json_text(config);
  CHECK(text.find("\"scale\"") != std::string::npos);

  const PipelineConfig fixed = config_from_json_text(
      R"({"master_seed": 1, "models": [{"kind": "svr", "gamma": 0.5}]})");
  CHECK(fixed.models[0].svr.gamma == 0.5);
  CHECK(config_to_json_text(fixed).find("0.5") != std::string::npos);

  CHECK_THROWS_AS(config_from_json_text(
                      R"({"master_seed": 1, "models": [{"kind": "svr", "gamma": "auto"}]})"),
                  ConfigError);
  CHECK_THROWS_AS(config_from_json_text(
                      R"({"master_seed": 1, "models": [{"kind": "dt", "gamma": 1.0}]})"),
                  ConfigError);
}

TEST_CASE("config validation rejects bad evaluation settings") {
  CHECK_THROWS_AS(config_from_json_text(R"({"master_seed": 1, "evaluation": {"k": 1}})"),
                  ConfigError);
  CHECK_THROWS_AS(
      config_from_json_text(R"({"master_seed": 1, "evaluation": {"test_fraction": 0}})"),
      ConfigError);
  CHECK_THROWS_AS(config_from_json_text(R"({"master_seed": 1, "models": []})"), ConfigError);
  CHECK_THROWS_AS(config_from_json_text(R"({"master_seed": 1, "out_dir": ""})"), ConfigError);
  CHECK_THROWS_AS(
      config_from_json_text(R"({"master_seed": 1, "evaluation": {"protocol": "sideways"}})"),
      ConfigError);
  const PipelineConfig cross = config_from_json_text(
      R"({"master_seed": 1, "evaluation": {"protocol": "cross_context"}})");
  CHECK(cross.evaluation.protocol == Protocol::cross_context);
  CHECK(to_string(Protocol::cross_context) == "cross_context");
  CHECK(protocol_from_string("in_context") == Protocol::in_context);
}

TEST_CASE("cli reports usage and version cleanly") {
  CHECK(fwtest::run_cli("--help") == 0);
  CHECK(fwtest::run_cli("--version") == 0);
  CHECK(fwtest::run_cli("") == 2);
  CHECK(fwtest::run_cli("frobnicate") == 2);
  CHECK(fwtest::run_cli("augment") == 2);  // missing required --input
}

TEST_CASE("cli pipeline chain produces its declared files") {
  fwtest::TempDir tmp;
  const std::string dir = tmp.path.string();

  CHECK(fwtest::run_cli("generate --quick --seed 5 --out " + dir) == 0);
  for (const char* name : {"region_a.csv", "region_b.csv", "region_c.csv",
                           "region_a.json", "region_b.json", "region_c.json"}) {
    CAPTURE(name);
    CHECK(std::filesystem::exists(tmp.path / name));
  }

  CHECK(fwtest::run_cli("augment --input " + dir + "/region_a.csv --factor 2 --out " + dir) ==
        0);
  CHECK(std::filesystem::exists(tmp.path / "region_a_augmented.csv"));
  CHECK(std::filesystem::exists(tmp.path / "region_a_ks.json"));

  CHECK(fwtest::run_cli("mix --inputs " + dir + "/region_a.csv " + dir + "/region_b.csv " +
                        dir + "/region_c.csv --out " + dir) == 0);
  CHECK(std::filesystem::exists(tmp.path / "mixed.csv"));
  CHECK(std::filesystem::exists(tmp.path / "mix_report.json"));
  {
    std::ifstream in(tmp.path / "mix_report.json");
    const nlohmann::json j = nlohmann::json::parse(in);
    CHECK(j.at("mode") == "convex_blend");
    CHECK(j.at("output_n") == 375);
    CHECK(j.at("predicted").at("mean").size() == 2);
  }

  CHECK(fwtest::run_cli("baseline --technique reweight --inputs " + dir + "/region_a.csv " +
                        dir + "/region_b.csv --out " + dir) == 0);
  CHECK(std::filesystem::exists(tmp.path / "reweight.csv"));
  CHECK(std::filesystem::exists(tmp.path / "reweight_weights.json"));

  CHECK(fwtest::run_cli("train --model dt --input " + dir + "/mixed.csv --out " + dir) == 0);
  CHECK(std::filesystem::exists(tmp.path / "model_dt.json"));
  {
    std::ifstream in(tmp.path / "model_dt.json");
    const nlohmann::json j = nlohmann::json::parse(in);
    CHECK(j.at("kind") == "dt");
    CHECK(j.at("dimension") == 2);
  }
}

TEST_CASE("cli distinguishes input errors from crashes") {
  fwtest::TempDir tmp;
  const std::string dir = tmp.path.string();

  CHECK(fwtest::run_cli("augment --input " + dir + "/absent.csv") == 2);

  std::ofstream(tmp.path / "bad.csv") << "x1,y\n1.0,huh\n";
  CHECK(fwtest::run_cli("train --model dt --input " + dir + "/bad.csv") == 2);

  std::ofstream(tmp.path / "ok.csv") << "x1,y\n1.0,2.0\n2.0,3.0\n";
  CHECK(fwtest::run_cli("train --model bogus --input " + dir + "/ok.csv --out " + dir) == 2);

  std::ofstream(tmp.path / "config.json") << R"({"master_seed": 1, "nope": true})";
  CHECK(fwtest::run_cli("generate --config " + dir + "/config.json --out " + dir) == 2);
}
