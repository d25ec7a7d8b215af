#include "heisencorr/config.hpp"

#include "heisencorr/errors.hpp"
#include "support.hpp"

#include <fstream>

using namespace heisencorr;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config_text(text, "run.toml");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("minimal file gets defaults") {
  const RunConfig cfg = parse_config_text("[pulse]\nomega = 0.057\n");
  CHECK(cfg == RunConfig{});
  CHECK(cfg.defaulted.count("pulse.omega") == 0);
  CHECK(cfg.defaulted.count("pulse.e0") == 1);
  CHECK(cfg.defaulted.size() == config_keys().size() - 1);
  CHECK_FALSE(cfg.c.has_value());
}

TEST_CASE("sections, dotted keys, quotes and comments") {
  const RunConfig cfg = parse_config_text(R"(
# run file
pulse.omega = 0.1   # carrier
[grid]
lmax = 8
rmax = 120.0
[potential]
variant = "harmonic"  # quoted
ohm = 0.5
[model]
c = 0.25
rate_file = 'rates # with hash.txt'
[output]
dir = "res"
)");
  CHECK(cfg.omega == 0.1);
  CHECK(cfg.lmax == 8);
  CHECK(cfg.variant == "harmonic");
  CHECK(cfg.ohm == 0.5);
  CHECK(cfg.c == 0.25);
  CHECK(cfg.rate_file == "rates # with hash.txt");
  CHECK(cfg.dir == "res");
  CHECK(cfg.potential().name() == "harmonic");
}

TEST_CASE("malformed values name the key and the line") {
  const std::string msg = error_of("[pulse]\nomega = 0.057\n[grid]\nlmax = banana\n");
  CHECK(msg.find("grid.lmax") != std::string::npos);
  CHECK(msg.find("run.toml:4") != std::string::npos);
  CHECK(msg.find("banana") != std::string::npos);
}

TEST_CASE("unknown keys are rejected") {
  const std::string msg = error_of("[pulse]\nomega = 0.057\nomgea = 0.06\n");
  CHECK(msg.find("pulse.omgea") != std::string::npos);
  CHECK(msg.find("run.toml:3") != std::string::npos);
  CHECK_FALSE(error_of("[pulse]\nomega = 0.057\n[nonsense]\nx = 1\n").empty());
}

TEST_CASE("pulse.omega is required") {
  CHECK(error_of("[pulse]\ne0 = 0.05\n").find("pulse.omega") != std::string::npos);
  CHECK_NOTHROW(parse_config_text("", "<defaults>", false));
}

TEST_CASE("other syntax errors") {
  CHECK_FALSE(error_of("[pulse\nomega = 0.057\n").empty());
  CHECK_FALSE(error_of("pulse.omega 0.057\n").empty());
  CHECK_FALSE(error_of("pulse.omega = 0.057\ncorr.direct_velocity = yes\n").empty());
  CHECK_FALSE(error_of("pulse.omega = 0.057\ntime.n_t = 6.5\n").empty());
  CHECK_FALSE(error_of("pulse.omega = nan\n").empty());
}

TEST_CASE("validation names the offending key") {
  RunConfig cfg;
  cfg.dr = -0.1;
  CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("grid.dr"), ConfigError);
  cfg = RunConfig{};
  cfg.n_t = 1;
  CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("time.n_t"), ConfigError);
  cfg = RunConfig{};
  cfg.ordering = "sideways";
  CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("model.ordering"), ConfigError);
  cfg = RunConfig{};
  cfg.rate = "adk";
  CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("model.rate"), ConfigError);
  CHECK_NOTHROW(RunConfig{}.validate());
}

TEST_CASE("emit and reparse gives an equal configuration") {
  RunConfig cfg = parse_config_text("pulse.omega = 0.0571\npulse.e0 = 0.0534\nmodel.c = 1e-3\ngrid.dr = 0.1\n");
  cfg.dir = "a dir";
  cfg.direct_velocity = true;
  const std::string text = emit_config(cfg);
  const RunConfig back = parse_config_text(text);
  CHECK(back == cfg);
  CHECK(emit_config(parse_config_text(emit_config(back))) == emit_config(back));
  CHECK(text.find("# default") != std::string::npos);

  const RunConfig fit = parse_config_text("pulse.omega = 0.057\nmodel.c = \"fit\"\n");
  CHECK_FALSE(fit.c.has_value());
  CHECK(parse_config_text(emit_config(fit)) == fit);
}

TEST_CASE("config file on disk") {
  const auto dir = hc_test::scratch_dir("config");
  std::ofstream(dir / "run.toml") << "[pulse]\nomega = 0.057\ne0 = 0.04\n";
  const RunConfig cfg = parse_config(dir / "run.toml");
  CHECK(cfg.e0 == 0.04);
  CHECK_THROWS_AS(parse_config(dir / "absent.toml"), ConfigError);
}

TEST_CASE("derived settings") {
  RunConfig cfg;
  CHECK(cfg.grid().n_r == 2400);
  CHECK(cfg.time_grid().t_end == doctest::Approx(2.0 * std::numbers::pi / 0.057));
  CHECK(cfg.propagator_options().absorber);
  cfg.absorber_fraction = 0.0;
  CHECK_FALSE(cfg.propagator_options().absorber);
  cfg.variant = "free";
  CHECK(cfg.initial_potential().name() == "coulomb");
  cfg.initial = "harmonic";
  CHECK(cfg.initial_potential().name() == "harmonic");
  CHECK(config_to_json(RunConfig{}).at("grid.lmax") == 16);
  CHECK(config_to_json(RunConfig{}).at("model.c") == "fit");
}
