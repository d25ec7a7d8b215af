#include "heisencorr/pipeline.hpp"

#include "heisencorr/errors.hpp"
#include "heisencorr/ground_state.hpp"
#include "heisencorr/matrix_io.hpp"
#include "heisencorr/oracles.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>

namespace heisencorr {

namespace fs = std::filesystem;

std::string library_version() { return HEISENCORR_VERSION; }

std::string to_string(Stage s) {
  switch (s) {
    case Stage::ground: return "ground";
    case Stage::corr_tdse: return "corr-tdse";
    case Stage::corr_free: return "corr-free";
    case Stage::corr_model: return "corr-model";
    case Stage::corr_vv: return "corr-vv";
    case Stage::fit: return "fit";
    case Stage::oracle: return "oracle";
    case Stage::all: return "all";
  }
  return "unknown";
}

Stage parse_stage(const std::string& s) {
  for (Stage st : {Stage::ground, Stage::corr_tdse, Stage::corr_free, Stage::corr_model, Stage::corr_vv, Stage::fit,
                   Stage::oracle, Stage::all})
    if (to_string(st) == s) return st;
  throw ConfigError("unknown stage '" + s + "'");
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const UnimplementedProvider*>(&e) ||
      dynamic_cast<const std::invalid_argument*>(&e))
    return exit_config;
  if (dynamic_cast<const NumericalFailure*>(&e)) return exit_numerical;
  if (dynamic_cast<const MissingArtifact*>(&e)) return exit_missing_artifact;
  return exit_failure;
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingArtifact(path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("cannot initialise SHA-256");
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md, &len);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return hex.str();
}

// ---------------------------------------------------------------------------
// RunManifest

RunManifest::RunManifest(fs::path dir) : dir_(std::move(dir)) {
  doc_ = {{"version", library_version()},
          {"config", nlohmann::json::object()},
          {"stages", nlohmann::json::object()},
          {"diagnostics", nlohmann::json::object()},
          {"files", nlohmann::json::object()}};
}

RunManifest RunManifest::load(const fs::path& dir) {
  RunManifest m(dir);
  std::ifstream in(m.path());
  if (!in) return m;
  try {
    const auto j = nlohmann::json::parse(in);
    for (const char* key : {"stages", "diagnostics", "files"})
      if (j.contains(key) && j[key].is_object()) m.doc_[key] = j[key];
  } catch (const nlohmann::json::exception&) {
    // unreadable manifest: start over
  }
  return m;
}

void RunManifest::set_config(const RunConfig& cfg) { doc_["config"] = config_to_json(cfg); }

void RunManifest::record_stage(const std::string& stage, double wall_seconds) {
  doc_["stages"][stage] = {{"wall_seconds", wall_seconds}};
}

void RunManifest::set_diagnostic(const std::string& key, nlohmann::json value) {
  doc_["diagnostics"][key] = std::move(value);
}

void RunManifest::add_file(const fs::path& path) {
  const fs::path rel = path.lexically_relative(dir_);
  const std::string key = rel.empty() || *rel.begin() == ".." ? fs::absolute(path).string() : rel.generic_string();
  doc_["files"][key] = nlohmann::json::object();
}

void RunManifest::save() {
  nlohmann::json files = nlohmann::json::object();
  for (const auto& [key, value] : doc_["files"].items()) {
    const fs::path p = fs::path(key).is_absolute() ? fs::path(key) : dir_ / key;
    if (!fs::exists(p)) continue;
    files[key] = {{"sha256", sha256_file(p)}, {"bytes", fs::file_size(p)}};
  }
  doc_["files"] = files;
  fs::create_directories(dir_);
  std::ofstream out(path());
  out << doc_.dump(2) << '\n';
  if (!out) throw std::runtime_error("cannot write " + path().string());
}

bool RunManifest::verify() const {
  for (const auto& [key, value] : doc_["files"].items()) {
    const fs::path p = fs::path(key).is_absolute() ? fs::path(key) : dir_ / key;
    if (!fs::exists(p) || !value.contains("sha256") || sha256_file(p) != value["sha256"].get<std::string>())
      return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Stages

namespace {

struct Context {
  const RunConfig& cfg;
  fs::path dir;
  std::ostream& log;
  RunManifest& manifest;

  fs::path at(const std::string& name) const { return dir / name; }

  void note(const std::string& stage, const std::string& msg) const { log << "[" << stage << "] " << msg << '\n'; }

  void output_matrix(const std::string& stem, CorrelationMatrix c) const {
    c.meta["config"] = config_to_json(cfg);
    c.meta["version"] = library_version();
    write_matrix(at(stem), c);
    for (const auto& f : matrix_files(at(stem))) manifest.add_file(f);
  }

  // A persisted matrix usable with the current configuration.
  CorrelationMatrix input_matrix(const std::string& stem) const {
    static const std::map<std::string, std::string> producer = {
        {"zz_tdse", "corr-tdse"}, {"zz_free", "corr-free"}, {"zz_model", "corr-model"}};
    if (!matrix_exists(at(stem)))
      throw MissingArtifact(at(stem).string() + " (run the " + producer.at(stem) + " stage first)");
    CorrelationMatrix c = read_matrix(at(stem));
    if (!(c.grid == cfg.time_grid()))
      throw MissingArtifact(stem + " for the configured time grid (n_t = " + std::to_string(cfg.n_t) + ")");
    return c;
  }

  Propagator propagator(bool with_field) const {
    std::optional<PulseParams> pulse;
    if (with_field) pulse = cfg.pulse();
    return Propagator(cfg.grid(), cfg.potential(), pulse, cfg.propagator_options());
  }
};

std::string describe_grid(const RadialGrid& g) {
  std::ostringstream s;
  s << "dr=" << g.dr << " n_r=" << g.n_r << " lmax=" << g.l_max;
  return s.str();
}

void stage_ground(const Context& ctx) {
  const RadialGrid grid = ctx.cfg.grid();
  const PotentialSpec pot = ctx.cfg.initial_potential();
  const EigenResult g = build_ground_state(grid, pot);
  const SecondMoments m = measure_moments(g.state);
  write_wave_state(ctx.at("ground.wavs"), g.state);

  nlohmann::json j;
  j["energy"] = g.energy;
  j["potential"] = pot.name();
  j["grid"] = {{"dr", grid.dr}, {"n_r", grid.n_r}, {"lmax", grid.l_max}};
  j["moments"] = {{"zz", m.m_zz.real()},
                  {"zp", {m.m_zp.real(), m.m_zp.imag()}},
                  {"pz", {m.m_pz.real(), m.m_pz.imag()}},
                  {"pp", m.m_pp.real()}};
  std::ofstream(ctx.at("ground.json")) << j.dump(2) << '\n';
  ctx.manifest.add_file(ctx.at("ground.wavs"));
  ctx.manifest.add_file(ctx.at("ground.json"));
  ctx.manifest.set_diagnostic("ground_energy", g.energy);

  std::ostringstream msg;
  msg << std::setprecision(10) << pot.name() << " ground state E = " << g.energy << ", <z^2> = " << m.m_zz.real()
      << ", <p_z^2> = " << m.m_pp.real() << ", <z p_z> = " << m.m_zp << " (" << describe_grid(grid) << ")";
  ctx.note("ground", msg.str());
}

EigenResult load_ground(const Context& ctx) {
  const fs::path wavs = ctx.at("ground.wavs");
  const fs::path meta = ctx.at("ground.json");
  if (!fs::exists(wavs)) throw MissingArtifact(wavs.string());
  if (!fs::exists(meta)) throw MissingArtifact(meta.string());
  EigenResult g;
  g.state = read_wave_state(wavs);
  const auto j = nlohmann::json::parse(std::ifstream(meta));
  g.energy = j.at("energy").get<double>();

  const RadialGrid want = ctx.cfg.grid();
  const RadialGrid& have = g.state.grid;
  if (have.n_r != want.n_r || have.l_max != want.l_max || have.dr != want.dr ||
      j.at("potential").get<std::string>() != ctx.cfg.initial_potential().name())
    throw MissingArtifact("ground.wavs for the configured grid and potential (found " + describe_grid(have) +
                          ", " + j.at("potential").get<std::string>() + "); rerun the ground stage");
  g.state.grid = want;  // restores absorber and stencil settings
  return g;
}

void stage_correlation(const Context& ctx, bool with_field) {
  const std::string name = with_field ? "corr-tdse" : "corr-free";
  const std::string stem = with_field ? "zz_tdse" : "zz_free";
  const EigenResult g = load_ground(ctx);
  const Propagator prop = ctx.propagator(with_field);
  const TimeGrid tgrid = ctx.cfg.time_grid();
  const CorrelationOptions opts = ctx.cfg.correlation_options();

  const BaseRun base = base_propagation(g.state, prop, tgrid, opts);
  CorrelationMatrix c = correlation_tdse(base, prop, tgrid, Observable::z, opts);
  c.meta["e0"] = with_field ? ctx.cfg.e0 : 0.0;
  c.meta["omega"] = ctx.cfg.omega;
  c.meta["potential"] = ctx.cfg.potential().name();
  ctx.output_matrix(stem, c);
  ctx.manifest.set_diagnostic(stem + "_absorber_norm_loss", base.norm_loss);

  std::ostringstream msg;
  msg << stem << ": n_t = " << tgrid.n_t << ", T = " << tgrid.t_end << ", absorber norm loss = " << base.norm_loss
      << ", Hermitian defect = " << hermitian_defect(c.values);
  ctx.note(name, msg.str());
}

void write_profile(const Context& ctx, const IonizationProfile& prof) {
  std::ofstream out(ctx.at("profile.csv"));
  out << "t,W,P\n";
  for (int k = 0; k < prof.tgrid.n_t; ++k)
    out << format_value(prof.tgrid.t(k)) << ',' << format_value(prof.w(k)) << ',' << format_value(prof.p(k))
        << '\n';
  ctx.manifest.add_file(ctx.at("profile.csv"));
}

void write_cross_terms(const Context& ctx, const TimeGrid& tgrid, const CrossTerms& ct) {
  std::ofstream out(ctx.at("cross_terms.csv"));
  out << "t,a_re,a_im,b_re,b_im\n";
  for (int k = 0; k < tgrid.n_t; ++k)
    out << format_value(tgrid.t(k)) << ',' << format_value(ct.a(k).real()) << ',' << format_value(ct.a(k).imag())
        << ',' << format_value(ct.b(k).real()) << ',' << format_value(ct.b(k).imag()) << '\n';
  ctx.manifest.add_file(ctx.at("cross_terms.csv"));
}

ModelDecomposition build_model(const Context& ctx, const std::string& stage) {
  const CorrelationMatrix c0 = ctx.input_matrix("zz_free");
  const EigenResult g = load_ground(ctx);
  const TimeGrid tgrid = ctx.cfg.time_grid();

  const RateProvider provider = ctx.cfg.rate_provider();
  if (provider.name() == "table") ctx.manifest.add_file(ctx.cfg.rate_file);
  const IonizationProfile prof = ionization_profile(ctx.cfg.pulse(), provider, tgrid, ctx.cfg.rate_substeps);
  for (const auto& w : prof.warnings) ctx.note(stage, "warning: " + w);

  const CrossTerms ct = cross_terms(g, ctx.propagator(false), tgrid, ctx.cfg.dt);
  const SecondMoments mom = measure_moments(g.state);
  ModelDecomposition d = assemble_model(c0, ct, prof, mom, ctx.cfg.model_ordering());

  write_profile(ctx, prof);
  write_cross_terms(ctx, tgrid, ct);
  write_complex_csv(ctx.at("model_l"), d.l_mat);
  write_complex_csv(ctx.at("model_q"), d.q_mat);
  for (const char* stem : {"model_l", "model_q"}) {
    ctx.manifest.add_file(ctx.at(std::string(stem) + ".re.csv"));
    ctx.manifest.add_file(ctx.at(std::string(stem) + ".im.csv"));
  }
  ctx.manifest.set_diagnostic("ionization_probability_final", prof.p(tgrid.n_t - 1));
  return d;
}

FitReport fit_and_save(const Context& ctx, const ModelDecomposition& d, const CorrelationMatrix& target,
                       const std::string& stage) {
  const FitReport r = fit_c(d, target, ctx.cfg.fit_objective());
  nlohmann::json j = r.to_json();
  j["ordering"] = to_string(d.ordering);
  j["rate"] = ctx.cfg.rate;
  j["config"] = config_to_json(ctx.cfg);
  std::ofstream(ctx.at("fit.json")) << j.dump(2) << '\n';
  ctx.manifest.add_file(ctx.at("fit.json"));
  ctx.manifest.set_diagnostic("fit_c_star", r.c_star);

  std::ostringstream msg;
  msg << std::setprecision(8) << "c* = " << r.c_star << "  objective(" << to_string(r.objective_kind)
      << ") = " << r.objective << "  frob_rel re/im = " << r.frobenius_rel_re << "/" << r.frobenius_rel_im
      << "  pattern re/im = " << r.pattern_re << "/" << r.pattern_im;
  ctx.note(stage, msg.str());
  return r;
}

void stage_fit(const Context& ctx) {
  const CorrelationMatrix target = ctx.input_matrix("zz_tdse");
  const ModelDecomposition d = build_model(ctx, "fit");
  fit_and_save(ctx, d, target, "fit");
}

// fit.json written for exactly this configuration, if any.
std::optional<double> saved_fit(const Context& ctx) {
  std::ifstream in(ctx.at("fit.json"));
  if (!in) return std::nullopt;
  try {
    const auto j = nlohmann::json::parse(in);
    if (j.value("config", nlohmann::json()) != config_to_json(ctx.cfg)) return std::nullopt;
    return j.at("c_star").get<double>();
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;
  }
}

void stage_model(const Context& ctx) {
  const ModelDecomposition d = build_model(ctx, "corr-model");
  double c = 0.0;
  if (ctx.cfg.c) {
    c = *ctx.cfg.c;
  } else if (const auto saved = saved_fit(ctx)) {
    c = *saved;
    ctx.note("corr-model", "using c from fit.json");
  } else if (matrix_exists(ctx.at("zz_tdse"))) {
    c = fit_and_save(ctx, d, ctx.input_matrix("zz_tdse"), "corr-model").c_star;
  } else {
    throw MissingArtifact("zz_tdse (model.c = \"fit\" needs the TDSE correlation; run corr-tdse or set model.c)");
  }
  CorrelationMatrix m = model_correlation(d, c);
  m.meta["e0"] = ctx.cfg.e0;
  m.meta["omega"] = ctx.cfg.omega;
  m.meta["rate"] = ctx.cfg.rate;
  ctx.output_matrix("zz_model", m);

  std::ostringstream msg;
  msg << std::setprecision(8) << "zz_model with c = " << c << ", P(T) = " << d.profile.p(d.profile.tgrid.n_t - 1);
  ctx.note("corr-model", msg.str());
}

void stage_velocity(const Context& ctx) {
  const CorrelationMatrix vv_tdse = velocity_from_zz(ctx.input_matrix("zz_tdse"));
  ctx.output_matrix("vv_tdse", vv_tdse);
  std::string written = "vv_tdse";
  for (const std::string src : {"model", "free"}) {
    if (!matrix_exists(ctx.at("zz_" + src))) continue;
    ctx.output_matrix("vv_" + src, velocity_from_zz(ctx.input_matrix("zz_" + src)));
    written += ", vv_" + src;
  }
  if (ctx.cfg.direct_velocity) {
    const EigenResult g = load_ground(ctx);
    const Propagator prop = ctx.propagator(true);
    CorrelationMatrix direct =
        correlation_tdse(g.state, prop, ctx.cfg.time_grid(), Observable::velocity, ctx.cfg.correlation_options());
    direct.meta["e0"] = ctx.cfg.e0;
    ctx.output_matrix("vv_direct", direct);
    const double dev = frobenius_rel_interior(vv_tdse, direct, Part::complex);
    ctx.manifest.set_diagnostic("velocity_interior_deviation", dev);
    written += ", vv_direct (interior deviation " + std::to_string(dev) + ")";
  }
  ctx.note("corr-vv", "wrote " + written);
}

void stage_oracle(const Context& ctx) {
  const TimeGrid tgrid = ctx.cfg.time_grid();
  ctx.output_matrix("oracle_volkov", volkov_matrix(hydrogen_1s_moments(), tgrid));
  ctx.output_matrix("oracle_ho", ho_matrix(ctx.cfg.ohm, tgrid));
  ctx.note("oracle", "wrote oracle_volkov, oracle_ho");
}

void run_one(const Context& ctx, Stage stage) {
  const auto start = std::chrono::steady_clock::now();
  switch (stage) {
    case Stage::ground: stage_ground(ctx); break;
    case Stage::corr_tdse: stage_correlation(ctx, true); break;
    case Stage::corr_free: stage_correlation(ctx, false); break;
    case Stage::corr_model: stage_model(ctx); break;
    case Stage::corr_vv: stage_velocity(ctx); break;
    case Stage::fit: stage_fit(ctx); break;
    case Stage::oracle: stage_oracle(ctx); break;
    case Stage::all: break;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  ctx.manifest.record_stage(to_string(stage), secs);
  ctx.manifest.save();
}

}  // namespace

void execute_stage(const RunConfig& cfg, Stage stage, std::ostream& log) {
  cfg.validate();
  const fs::path dir = cfg.dir;
  fs::create_directories(dir);
  RunManifest manifest = RunManifest::load(dir);
  manifest.set_config(cfg);
  const Context ctx{cfg, dir, log, manifest};
  if (stage != Stage::all) {
    run_one(ctx, stage);
    return;
  }
  for (Stage s : {Stage::ground, Stage::corr_free, Stage::corr_tdse, Stage::fit, Stage::corr_model, Stage::corr_vv,
                  Stage::oracle})
    run_one(ctx, s);
}

int run_pipeline(const RunConfig& cfg, Stage stage, std::ostream& log) {
  try {
    execute_stage(cfg, stage, log);
    return exit_ok;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}

}  // namespace heisencorr
