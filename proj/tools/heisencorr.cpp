// Command-line front end: one subcommand per pipeline stage.
//
//   heisencorr <stage> [--config run.toml] [--jobs N] [--section.key value ...]
//
// Settings are resolved flag > HEISENCORR_OUT (output.dir only) > file > default.

#include "heisencorr/errors.hpp"
#include "heisencorr/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <string>

namespace hc = heisencorr;

namespace {

// Applies `--section.key value` and `--section.key=value` tokens left over by CLI11.
void apply_overrides(hc::RunConfig& cfg, const std::vector<std::string>& extras) {
  for (std::size_t i = 0; i < extras.size(); ++i) {
    const std::string& tok = extras[i];
    if (tok.rfind("--", 0) != 0) throw hc::ConfigError("command line: unexpected argument '" + tok + "'");
    std::string key = tok.substr(2);
    std::string value;
    if (const auto eq = key.find('='); eq != std::string::npos) {
      value = key.substr(eq + 1);
      key.erase(eq);
    } else {
      if (i + 1 >= extras.size()) throw hc::ConfigError("command line: " + key + ": missing value");
      value = extras[++i];
    }
    hc::set_config_value(cfg, key, value, "command line");
  }
}

hc::RunConfig resolve(const std::string& config_path, int jobs, const std::vector<std::string>& extras) {
  hc::RunConfig cfg = config_path.empty() ? hc::parse_config_text("", "<defaults>", false)
                                          : hc::parse_config(config_path);
  if (const char* out = std::getenv("HEISENCORR_OUT"); out && *out) hc::set_config_value(cfg, "output.dir", out, "HEISENCORR_OUT");
  apply_overrides(cfg, extras);
  if (jobs >= 0) hc::set_config_value(cfg, "run.jobs", std::to_string(jobs), "--jobs");
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-time position and velocity correlations of a laser-driven atom"};
  app.set_version_flag("--version", hc::library_version());
  app.require_subcommand(1);

  std::string config_path;
  int jobs = -1;  // unset: keep run.jobs
  const std::vector<std::pair<std::string, std::string>> stages = {
      {"ground", "ground state of the initial potential"},
      {"corr-free", "field-free position correlation"},
      {"corr-tdse", "position correlation with the pulse"},
      {"corr-model", "quantum simple-man model correlation"},
      {"corr-vv", "velocity correlations from the position correlations"},
      {"fit", "fit the model coefficient to the TDSE correlation"},
      {"oracle", "closed-form Volkov and oscillator correlations"},
      {"all", "every stage in dependency order"},
  };
  std::vector<CLI::App*> subs;
  for (const auto& [name, help] : stages) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->allow_extras();
    sub->add_option("--config,-c", config_path, "run configuration file")->check(CLI::ExistingFile);
    sub->add_option("--jobs,-j", jobs, "worker threads for the correlation rows (0: all cores)")
        ->check(CLI::NonNegativeNumber);
    sub->footer("Any configuration key can be overridden as --section.key value, e.g. --pulse.e0 0.04.");
    subs.push_back(sub);
  }
  CLI::App* show = app.add_subcommand("show-config", "print the resolved configuration");
  show->allow_extras();
  show->add_option("--config,-c", config_path, "run configuration file")->check(CLI::ExistingFile);
  show->add_option("--jobs,-j", jobs, "worker threads for the correlation rows (0: all cores)")
      ->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : hc::exit_config;
  }

  try {
    if (show->parsed()) {
      std::cout << hc::emit_config(resolve(config_path, jobs, show->remaining()));
      return hc::exit_ok;
    }
    for (CLI::App* sub : subs) {
      if (!sub->parsed()) continue;
      const hc::RunConfig cfg = resolve(config_path, jobs, sub->remaining());
      return hc::run_pipeline(cfg, hc::parse_stage(sub->get_name()), std::cerr);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return hc::exit_code_for(e);
  }
  return hc::exit_failure;
}
