#include "heisencorr/pipeline.hpp"

#include "heisencorr/errors.hpp"
#include "heisencorr/matrix_io.hpp"
#include "support.hpp"

#include <fstream>
#include <sstream>

using namespace heisencorr;
namespace fs = std::filesystem;

namespace {

// Small, fast configuration: short pulse, small box.
RunConfig small_config(const fs::path& dir) {
  RunConfig cfg = parse_config_text(R"(
[pulse]
e0 = 0.1
omega = 0.5
[grid]
rmax = 40
lmax = 4
[time]
n_t = 8
)");
  cfg.dir = dir.string();
  return cfg;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

int run(const RunConfig& cfg, Stage s) {
  std::ostringstream log;
  const int rc = run_pipeline(cfg, s, log);
  if (rc != 0) MESSAGE(log.str());
  return rc;
}

}  // namespace

TEST_CASE("stage names") {
  for (Stage s : {Stage::ground, Stage::corr_tdse, Stage::corr_free, Stage::corr_model, Stage::corr_vv, Stage::fit,
                  Stage::oracle, Stage::all})
    CHECK(parse_stage(to_string(s)) == s);
  CHECK_THROWS_AS(parse_stage("corr_tdse"), ConfigError);
}

TEST_CASE("ground stage on the default grid records the hydrogen energy") {
  RunConfig cfg;
  cfg.dir = hc_test::scratch_dir("pipe_ground").string();
  REQUIRE(run(cfg, Stage::ground) == exit_ok);
  const auto manifest = nlohmann::json::parse(std::ifstream(fs::path(cfg.dir) / "manifest.json"));
  CHECK(std::abs(manifest.at("diagnostics").at("ground_energy").get<double>() + 0.5) <= 5e-4);
  CHECK(manifest.at("files").contains("ground.wavs"));
  CHECK(manifest.at("config").at("pulse.omega") == 0.057);
  CHECK(manifest.at("stages").contains("ground"));
}

TEST_CASE("missing dependencies are named") {
  const RunConfig cfg = small_config(hc_test::scratch_dir("pipe_missing"));
  std::ostringstream log;
  CHECK(run_pipeline(cfg, Stage::fit, log) == exit_missing_artifact);
  CHECK(log.str().find("zz_tdse") != std::string::npos);
  CHECK(run_pipeline(cfg, Stage::corr_tdse, log) == exit_missing_artifact);
  CHECK(log.str().find("ground.wavs") != std::string::npos);
  CHECK(run_pipeline(cfg, Stage::corr_vv, log) == exit_missing_artifact);
}

TEST_CASE("exit codes") {
  RunConfig cfg = small_config(hc_test::scratch_dir("pipe_codes"));
  cfg.n_t = 1;
  std::ostringstream log;
  CHECK(run_pipeline(cfg, Stage::oracle, log) == exit_config);

  cfg = small_config(cfg.dir);
  cfg.e0 = 0.5;
  cfg.absorber_fraction = 0.3;
  cfg.rmax = 30;
  cfg.max_norm_loss = 1e-8;
  REQUIRE(run(cfg, Stage::ground) == exit_ok);
  CHECK(run_pipeline(cfg, Stage::corr_tdse, log) == exit_numerical);

  cfg = small_config(cfg.dir);
  cfg.rate = "yudin_ivanov";
  cfg.c = 1.0;
  REQUIRE(run(cfg, Stage::ground) == exit_ok);
  REQUIRE(run(cfg, Stage::corr_free) == exit_ok);
  CHECK(run_pipeline(cfg, Stage::corr_model, log) == exit_config);
}

TEST_CASE("a ground state from another grid is not reused") {
  const fs::path dir = hc_test::scratch_dir("pipe_stale");
  RunConfig cfg = small_config(dir);
  REQUIRE(run(cfg, Stage::ground) == exit_ok);
  cfg.lmax = 6;
  std::ostringstream log;
  CHECK(run_pipeline(cfg, Stage::corr_free, log) == exit_missing_artifact);
}

TEST_CASE("zero field: corr-tdse reproduces corr-free exactly") {
  RunConfig cfg = small_config(hc_test::scratch_dir("pipe_zero"));
  cfg.e0 = 0.0;
  REQUIRE(run(cfg, Stage::ground) == exit_ok);
  REQUIRE(run(cfg, Stage::corr_free) == exit_ok);
  REQUIRE(run(cfg, Stage::corr_tdse) == exit_ok);
  const fs::path dir = cfg.dir;
  CHECK(read_matrix(dir / "zz_tdse").values == read_matrix(dir / "zz_free").values);
  CHECK(slurp(dir / "zz_tdse.re.csv") == slurp(dir / "zz_free.re.csv"));
}

TEST_CASE("full run writes the plot contract and a complete manifest") {
  const fs::path dir = hc_test::scratch_dir("pipe_all");
  const RunConfig cfg = small_config(dir);
  REQUIRE(run(cfg, Stage::all) == exit_ok);
  for (const char* src : {"tdse", "model", "free"})
    for (const char* part : {".re.csv", ".im.csv", ".meta.json"})
      CHECK(fs::exists(dir / (std::string("zz_") + src + part)));
  for (const char* f : {"fit.json", "profile.csv", "cross_terms.csv", "vv_tdse.re.csv", "vv_model.re.csv",
                        "vv_free.re.csv", "oracle_volkov.re.csv", "oracle_ho.re.csv", "model_l.re.csv"})
    CHECK(fs::exists(dir / f));

  const RunManifest manifest = RunManifest::load(dir);
  CHECK(manifest.verify());
  const auto& files = manifest.json().at("files");
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name == "manifest.json") continue;
    CHECK_MESSAGE(files.contains(name), name);
  }
  CHECK(files.at("zz_tdse.re.csv").at("sha256") == sha256_file(dir / "zz_tdse.re.csv"));
  for (const char* stage : {"ground", "corr-free", "corr-tdse", "fit", "corr-model", "corr-vv", "oracle"})
    CHECK(manifest.json().at("stages").contains(stage));

  // metadata echoes the configuration
  const CorrelationMatrix model = read_matrix(dir / "zz_model");
  CHECK(model.meta.at("config") == config_to_json(cfg));
  const auto fit = nlohmann::json::parse(std::ifstream(dir / "fit.json"));
  CHECK(model.meta.at("model_c") == fit.at("c_star"));

  // tampering is detected
  std::ofstream(dir / "profile.csv", std::ios::app) << "junk\n";
  CHECK_FALSE(RunManifest::load(dir).verify());
}

TEST_CASE("stages resume from persisted artifacts") {
  const fs::path dir = hc_test::scratch_dir("pipe_resume");
  RunConfig cfg = small_config(dir);
  cfg.c = 2.5;
  for (Stage s : {Stage::ground, Stage::corr_free, Stage::corr_model}) REQUIRE(run(cfg, s) == exit_ok);
  CHECK(read_matrix(dir / "zz_model").meta.at("model_c") == 2.5);
  CHECK_FALSE(fs::exists(dir / "zz_tdse.re.csv"));
  // the manifest keeps entries from every invocation
  const auto files = RunManifest::load(dir).json().at("files");
  CHECK(files.contains("ground.wavs"));
  CHECK(files.contains("zz_free.re.csv"));
  CHECK(files.contains("zz_model.re.csv"));

  cfg.c.reset();
  std::ostringstream log;
  CHECK(run_pipeline(cfg, Stage::corr_model, log) == exit_missing_artifact);
}

TEST_CASE("results do not depend on the worker count and repeat byte for byte") {
  RunConfig a = small_config(hc_test::scratch_dir("pipe_det_a"));
  RunConfig b = small_config(hc_test::scratch_dir("pipe_det_b"));
  b.jobs = 3;
  for (const RunConfig* cfg : {&a, &b})
    for (Stage s : {Stage::ground, Stage::corr_tdse}) REQUIRE(run(*cfg, s) == exit_ok);
  for (const char* f : {"zz_tdse.re.csv", "zz_tdse.im.csv", "ground.wavs"})
    CHECK(slurp(fs::path(a.dir) / f) == slurp(fs::path(b.dir) / f));
}
