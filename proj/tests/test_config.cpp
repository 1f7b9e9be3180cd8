#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "asymmap/commands.hpp"
#include "asymmap/config.hpp"

using namespace asymmap;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = fs::path(ASYMMAP_SOURCE_DIR) / "configs";

nlohmann::json base_doc() {
  return nlohmann::json::parse(R"({
    "model": {"lambda0": 0.01, "blocks": [{"fraction": 0.2, "rho": 0.1}, {"fraction": 0.8, "rho": 0.01, "c": 2.0}]},
    "penalties": [{"kind": "zero_norm"}],
    "ensemble": {"kind": "marcenko_pastur", "alpha": 0.5},
    "lambda": 0.1
  })");
}

std::string config_error(const nlohmann::json& doc) {
  try {
    parse_config(doc);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

fs::path temp_dir() {
  auto d = fs::temp_directory_path() / ("asymmap_test_" + std::to_string(::getpid()));
  fs::create_directories(d);
  return d;
}

fs::path write_file(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
  return p;
}

int run(const std::string& cmd, const fs::path& cfg, std::string* out = nullptr, std::string* err = nullptr,
        std::optional<std::string> format = std::nullopt, std::size_t threads = 1) {
  CommandOptions o;
  o.command = cmd;
  o.config = cfg;
  o.format = format;
  o.threads = threads;
  std::ostringstream so, se;
  const int code = run_command(o, so, se);
  if (out) *out = so.str();
  if (err) *err = se.str();
  return code;
}

}  // namespace

TEST(Config, ShippedConfigsRoundTrip) {
  int n = 0;
  for (const auto& entry : fs::directory_iterator(kConfigs)) {
    if (entry.path().extension() != ".json") continue;
    SCOPED_TRACE(entry.path().string());
    const auto cfg = load_config(entry.path());
    const auto again = parse_config(to_json(cfg), kConfigs);
    EXPECT_TRUE(cfg == again);
    EXPECT_EQ(to_json(again), to_json(cfg));
    ++n;
  }
  EXPECT_GE(n, 6);
}

TEST(Config, RejectsUnknownKeys) {
  auto doc = base_doc();
  doc["model"]["blocks"][1]["sparsity"] = 0.1;
  EXPECT_NE(config_error(doc).find("model.blocks[1].sparsity: unknown key"), std::string::npos);
  doc = base_doc();
  doc["extra"] = 1;
  EXPECT_NE(config_error(doc).find("extra: unknown key"), std::string::npos);
}

TEST(Config, FractionSumNamesConstraint) {
  auto doc = base_doc();
  doc["model"]["blocks"][1]["fraction"] = 0.7;
  const auto msg = config_error(doc);
  EXPECT_NE(msg.find("model.blocks"), std::string::npos);
  EXPECT_NE(msg.find("sum to 1"), std::string::npos);
}

TEST(Config, FieldErrors) {
  auto doc = base_doc();
  doc["model"]["blocks"][0]["rho"] = 1.5;
  EXPECT_NE(config_error(doc).find("model.blocks[0].rho"), std::string::npos);
  doc = base_doc();
  doc["penalties"][0] = {{"kind", "lp"}, {"exponent", 3.0}};
  EXPECT_NE(config_error(doc).find("penalties[0].exponent"), std::string::npos);
  doc = base_doc();
  doc["model"]["blocks"][0]["penalty"] = 2;
  EXPECT_NE(config_error(doc).find("model.blocks[0].penalty"), std::string::npos);
  doc = base_doc();
  doc["distortions"] = {"squared_error", "hamming"};
  EXPECT_NE(config_error(doc).find("distortions[1]"), std::string::npos);
  doc = base_doc();
  doc["simulate"] = {{"N", 100}, {"trials", 0}};
  EXPECT_NE(config_error(doc).find("simulate.trials"), std::string::npos);
  doc = base_doc();
  doc["ensemble"] = {{"kind", "empirical"}, {"eigenvalues_file", "missing.txt"}};
  EXPECT_NE(config_error(doc).find("file not found"), std::string::npos);
}

TEST(Config, SyntaxErrorReportsLine) {
  try {
    parse_config_text("{\n  \"model\": {\n    \"lambda0\": 0.01,,\n  }\n}\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

TEST(Config, EmpiricalEnsembleFromFile) {
  auto doc = base_doc();
  doc["ensemble"] = {{"kind", "empirical"}, {"alpha", 1.0}, {"eigenvalues_file", "tests/data/eigs_small.txt"}};
  const auto cfg = parse_config(doc, ASYMMAP_SOURCE_DIR);
  EXPECT_EQ(cfg.ensemble.eigenvalues.size(), 3u);
  EXPECT_EQ(cfg.make_ensemble().kind(), EnsembleKind::Empirical);
  EXPECT_TRUE(parse_config(to_json(cfg), ASYMMAP_SOURCE_DIR) == cfg);
}

TEST(Config, GridShorthand) {
  auto doc = base_doc();
  doc["sweep"] = {{"grid", {{"start", 1.0}, {"stop", 3.0}, {"num", 9}}}, {"c_blocks", nlohmann::json::array({1})}};
  const auto cfg = parse_config(doc);
  ASSERT_EQ(cfg.sweep->grid.size(), 9u);
  EXPECT_EQ(cfg.sweep->grid.front(), 1.0);
  EXPECT_EQ(cfg.sweep->grid.back(), 3.0);
  EXPECT_DOUBLE_EQ(cfg.sweep->grid[4], 2.0);
}

TEST(Commands, PredictExample1) {
  std::string out;
  ASSERT_EQ(run("predict", kConfigs / "example1.json", &out), kExitOk);
  const auto doc = nlohmann::json::parse(out);
  const auto& st = doc.at("canonical").at("state");
  for (const char* k : {"chi", "p", "theta", "theta0"}) {
    ASSERT_TRUE(st.at(k).is_number()) << k;
    EXPECT_TRUE(std::isfinite(st.at(k).get<double>()));
  }
  EXPECT_TRUE(doc.at("meta").contains("timestamp"));
  check_finite(doc);
}

TEST(Commands, PredictTrivial) {
  std::string out;
  ASSERT_EQ(run("predict", kConfigs / "trivial.json", &out), kExitOk);
  const auto doc = nlohmann::json::parse(out);
  EXPECT_NEAR(doc["canonical"]["prediction"]["mse"].get<double>(), 0.5 * 0.1 + 0.5 * 0.02, 1e-10);
  EXPECT_NEAR(doc["canonical"]["prediction"]["D_w"]["support_mismatch"].get<double>(), 0.06, 1e-10);
}

TEST(Commands, ExitCodes) {
  std::string out, err;
  EXPECT_EQ(run("predict", fs::path(ASYMMAP_SOURCE_DIR) / "tests/data/bad_fraction.json", &out, &err), kExitConfig);
  EXPECT_NE(err.find("sum to 1"), std::string::npos);

  const auto dir = temp_dir();
  auto doc = base_doc();
  doc["simulate"] = {{"N", 100}, {"trials", 0}};
  EXPECT_EQ(run("validate", write_file(dir / "zero_trials.json", doc.dump()), &out, &err), kExitConfig);

  doc = base_doc();
  doc["solver"] = {{"max_iter", 2}};
  EXPECT_EQ(run("predict", write_file(dir / "capped.json", doc.dump()), &out, &err), kExitNoConvergence);

  // a gate no finite sample can meet
  auto ridge = nlohmann::json::parse(R"({
    "model": {"lambda0": 0.1, "blocks": [{"fraction": 1.0, "rho": 1.0, "c": 0.5}]},
    "penalties": [{"kind": "l2"}],
    "ensemble": {"kind": "marcenko_pastur", "alpha": 1.0},
    "lambda": 0.1,
    "simulate": {"N": 40, "trials": 3, "solver": "ridge", "seed": 5, "decoupled_samples": 1000,
                 "gates": {"mse_relative": 1e-9}}
  })");
  EXPECT_EQ(run("validate", write_file(dir / "gate.json", ridge.dump()), &out, &err), kExitGate);
  EXPECT_EQ(run("explode", kConfigs / "example1.json", &out, &err), kExitConfig);
  EXPECT_EQ(run("predict", kConfigs / "example1.json", &out, &err, "yaml"), kExitConfig);
}

TEST(Commands, ValidateIsReproducible) {
  const auto dir = temp_dir();
  auto ridge = nlohmann::json::parse(R"({
    "model": {"lambda0": 0.1, "blocks": [{"fraction": 1.0, "rho": 1.0, "c": 0.5}]},
    "penalties": [{"kind": "l2"}],
    "ensemble": {"kind": "marcenko_pastur", "alpha": 1.0},
    "lambda": 0.1,
    "simulate": {"N": 300, "trials": 4, "solver": "ridge", "seed": 5, "decoupled_samples": 10000,
                 "gates": {"mse_relative": 1.0}}
  })");
  const auto cfg = write_file(dir / "repro.json", ridge.dump());
  std::string a, b;
  ASSERT_EQ(run("validate", cfg, &a, nullptr, std::nullopt, 1), kExitOk);
  ASSERT_EQ(run("validate", cfg, &b, nullptr, std::nullopt, 3), kExitOk);
  EXPECT_EQ(nlohmann::json::parse(a)["canonical"].dump(), nlohmann::json::parse(b)["canonical"].dump());
}

TEST(Commands, SweepCsvRows) {
  const auto dir = temp_dir();
  auto doc = nlohmann::json::parse(R"({
    "model": {"lambda0": 0.01, "blocks": [{"fraction": 0.5, "rho": 1.0, "c": 0.5}, {"fraction": 0.5, "rho": 1.0, "c": 0.5}]},
    "penalties": [{"kind": "l2"}],
    "ensemble": {"kind": "marcenko_pastur", "alpha": 1.0},
    "tune": {"enabled": true},
    "sweep": {"grid": {"start": 0.1, "stop": 0.9, "num": 9}, "c_blocks": [1], "mse0_db": -7}
  })");
  std::string out;
  ASSERT_EQ(run("sweep", write_file(dir / "sweep.json", doc.dump()), &out), kExitOk);
  std::istringstream in(out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line.rfind("c,R_t,lambda_star,mse_at_Rt,chi,p,converged", 0), 0u);
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    const auto rt = line.substr(line.find(',') + 1, line.find(',', line.find(',') + 1) - line.find(',') - 1);
    if (rt != "infeasible" && rt != "above_range") {
      EXPECT_GE(std::stod(rt), 1.0);
      EXPECT_LE(std::stod(rt), 64.0);
    }
  }
  EXPECT_EQ(rows, 9);
}
