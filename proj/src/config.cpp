#include "heisencorr/config.hpp"

#include "heisencorr/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

namespace heisencorr {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  std::string s(buf, res.ptr);
  if (s.find_first_of(".en") == std::string::npos) s += ".0";
  return s;
}

std::string quote(const std::string& s) { return "\"" + s + "\""; }

double to_double(const std::string& key, const std::string& value, const std::string& where) {
  double v = 0.0;
  const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
  if (value.empty() || res.ec != std::errc() || res.ptr != value.data() + value.size() || !std::isfinite(v))
    throw ConfigError(where + ": " + key + ": expected a number, got '" + value + "'");
  return v;
}

int to_int(const std::string& key, const std::string& value, const std::string& where) {
  int v = 0;
  const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
  if (value.empty() || res.ec != std::errc() || res.ptr != value.data() + value.size())
    throw ConfigError(where + ": " + key + ": expected an integer, got '" + value + "'");
  return v;
}

bool to_bool(const std::string& key, const std::string& value, const std::string& where) {
  if (value == "true") return true;
  if (value == "false") return false;
  throw ConfigError(where + ": " + key + ": expected true or false, got '" + value + "'");
}

std::string to_text(const std::string& value) {
  if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') && value.back() == value.front())
    return value.substr(1, value.size() - 2);
  return value;
}

struct Field {
  std::string key;
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define HC_DOUBLE(name, member)                                                                                 \
  Field {                                                                                                       \
    name, [](RunConfig& c, const std::string& v, const std::string& w) { c.member = to_double(name, v, w); }, \
        [](const RunConfig& c) { return format_double(c.member); }                                            \
  }
#define HC_INT(name, member)                                                                                 \
  Field {                                                                                                    \
    name, [](RunConfig& c, const std::string& v, const std::string& w) { c.member = to_int(name, v, w); }, \
        [](const RunConfig& c) { return std::to_string(c.member); }                                        \
  }
#define HC_BOOL(name, member)                                                                                 \
  Field {                                                                                                     \
    name, [](RunConfig& c, const std::string& v, const std::string& w) { c.member = to_bool(name, v, w); }, \
        [](const RunConfig& c) { return std::string(c.member ? "true" : "false"); }                         \
  }
#define HC_TEXT(name, member)                                                                          \
  Field {                                                                                              \
    name, [](RunConfig& c, const std::string& v, const std::string&) { c.member = to_text(v); },     \
        [](const RunConfig& c) { return quote(c.member); }                                           \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      HC_DOUBLE("pulse.e0", e0),
      HC_DOUBLE("pulse.omega", omega),
      HC_DOUBLE("pulse.n_cycles", n_cycles),
      HC_DOUBLE("grid.dr", dr),
      HC_DOUBLE("grid.rmax", rmax),
      HC_INT("grid.lmax", lmax),
      HC_DOUBLE("grid.absorber_fraction", absorber_fraction),
      HC_INT("grid.fd_order", fd_order),
      HC_DOUBLE("time.dt", dt),
      HC_INT("time.n_t", n_t),
      HC_INT("time.order", order),
      HC_TEXT("potential.variant", variant),
      HC_DOUBLE("potential.z", z),
      HC_DOUBLE("potential.ohm", ohm),
      HC_TEXT("potential.initial", initial),
      HC_TEXT("model.rate", rate),
      HC_TEXT("model.rate_file", rate_file),
      Field{"model.c",
            [](RunConfig& c, const std::string& v, const std::string& w) {
              if (to_text(v) == "fit") c.c.reset();
              else c.c = to_double("model.c", v, w);
            },
            [](const RunConfig& c) { return c.c ? format_double(*c.c) : quote("fit"); }},
      HC_TEXT("model.ordering", ordering),
      HC_INT("model.rate_substeps", rate_substeps),
      HC_TEXT("fit.objective", objective),
      HC_DOUBLE("corr.max_norm_loss", max_norm_loss),
      HC_BOOL("corr.direct_velocity", direct_velocity),
      HC_TEXT("output.dir", dir),
      HC_BOOL("run.seedless", seedless),
      HC_INT("run.jobs", jobs),
  };
  return table;
}

#undef HC_DOUBLE
#undef HC_INT
#undef HC_BOOL
#undef HC_TEXT

const Field* find_field(const std::string& key) {
  for (const auto& f : fields())
    if (f.key == key) return &f;
  return nullptr;
}

// Strips a trailing comment that is not inside quotes.
std::string strip_comment(const std::string& line) {
  char quote_char = 0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quote_char) {
      if (ch == quote_char) quote_char = 0;
    } else if (ch == '"' || ch == '\'') {
      quote_char = ch;
    } else if (ch == '#') {
      return line.substr(0, i);
    }
  }
  return line;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& f : fields()) k.push_back(f.key);
    return k;
  }();
  return keys;
}

bool RunConfig::operator==(const RunConfig& o) const {
  for (const auto& f : fields())
    if (f.get(*this) != f.get(o)) return false;
  return true;
}

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value, const std::string& where) {
  const Field* f = find_field(key);
  if (!f) throw ConfigError(where + ": unknown key '" + key + "'");
  f->set(cfg, trim(value), where);
  cfg.defaulted.erase(key);
}

RunConfig parse_config_text(const std::string& text, const std::string& origin, bool require_omega) {
  RunConfig cfg;
  for (const auto& f : fields()) cfg.defaulted.insert(f.key);
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = origin + ":" + std::to_string(line_no);
    const std::string body = trim(strip_comment(line));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') throw ConfigError(where + ": malformed section header '" + body + "'");
      section = trim(body.substr(1, body.size() - 2));
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value, got '" + body + "'");
    const std::string name = trim(body.substr(0, eq));
    const std::string key = name.find('.') == std::string::npos && !section.empty() ? section + "." + name : name;
    set_config_value(cfg, key, body.substr(eq + 1), where);
  }
  if (require_omega && cfg.defaulted.count("pulse.omega"))
    throw ConfigError(origin + ": missing required key 'pulse.omega'");
  return cfg;
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str(), path.string());
}

std::string emit_config(const RunConfig& cfg) {
  std::ostringstream out;
  std::string section;
  for (const auto& f : fields()) {
    const auto dot = f.key.find('.');
    const std::string s = f.key.substr(0, dot);
    if (s != section) {
      if (!section.empty()) out << "\n";
      out << "[" << s << "]\n";
      section = s;
    }
    out << f.key.substr(dot + 1) << " = " << f.get(cfg);
    if (cfg.defaulted.count(f.key)) out << "  # default";
    out << "\n";
  }
  return out.str();
}

nlohmann::json config_to_json(const RunConfig& cfg) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& f : fields()) {
    const std::string v = f.get(cfg);
    if (v.size() >= 2 && v.front() == '"') j[f.key] = v.substr(1, v.size() - 2);
    else if (v == "true" || v == "false") j[f.key] = v == "true";
    else j[f.key] = nlohmann::json::parse(v);
  }
  return j;
}

PulseParams RunConfig::pulse() const { return {e0, omega, n_cycles}; }

RadialGrid RunConfig::grid() const { return RadialGrid::from_extent(dr, rmax, lmax, absorber_fraction, fd_order); }

namespace {

PotentialSpec potential_named(const std::string& name, double z, double ohm) {
  if (name == "coulomb") return PotentialSpec::coulomb(z);
  if (name == "harmonic") return PotentialSpec::harmonic(ohm);
  if (name == "free") return PotentialSpec::free();
  throw ConfigError("potential: unknown variant '" + name + "' (coulomb|harmonic|free)");
}

}  // namespace

PotentialSpec RunConfig::potential() const { return potential_named(variant, z, ohm); }

PotentialSpec RunConfig::initial_potential() const {
  if (initial == "auto") return variant == "free" ? PotentialSpec::coulomb(z) : potential();
  if (initial == "free") throw ConfigError("potential.initial: the free particle has no ground state");
  return potential_named(initial, z, ohm);
}

TimeGrid RunConfig::time_grid() const { return TimeGrid::over_pulse(pulse(), n_t); }

PropagatorOptions RunConfig::propagator_options() const { return {order, absorber_fraction > 0.0}; }

CorrelationOptions RunConfig::correlation_options() const {
  CorrelationOptions o;
  o.dt = dt;
  o.max_norm_loss = max_norm_loss;
  o.jobs = jobs;
  return o;
}

RateProvider RunConfig::rate_provider() const {
  RateProvider p;
  if (rate == "quasistatic") p.variant = QuasistaticRate{};
  else if (rate == "yudin_ivanov") p.variant = YudinIvanovRate{};
  else if (rate == "table") p.variant = TabulatedRate::load(rate_file);
  else throw ConfigError("model.rate: unknown provider '" + rate + "' (quasistatic|yudin_ivanov|table)");
  return p;
}

void RunConfig::validate() const {
  auto require = [](bool ok, const std::string& key, const std::string& what) {
    if (!ok) throw ConfigError(key + ": " + what);
  };
  require(e0 >= 0.0, "pulse.e0", "must be >= 0");
  require(omega > 0.0, "pulse.omega", "must be > 0");
  require(n_cycles > 0.0, "pulse.n_cycles", "must be > 0");
  require(dr > 0.0, "grid.dr", "must be > 0");
  require(rmax >= 16.0 * dr, "grid.rmax", "must span at least 16 grid points");
  require(lmax >= 1, "grid.lmax", "must be >= 1");
  require(absorber_fraction >= 0.0 && absorber_fraction < 0.5, "grid.absorber_fraction", "must lie in [0, 0.5)");
  require(fd_order == 2 || fd_order == 4 || fd_order == 6, "grid.fd_order", "must be 2, 4 or 6");
  require(dt > 0.0, "time.dt", "must be > 0");
  require(n_t >= 2, "time.n_t", "must be >= 2");
  require(order == 2 || order == 4, "time.order", "must be 2 or 4");
  require(variant == "coulomb" || variant == "harmonic" || variant == "free", "potential.variant",
          "must be coulomb, harmonic or free");
  require(z > 0.0, "potential.z", "must be > 0");
  require(ohm > 0.0, "potential.ohm", "must be > 0");
  require(initial == "auto" || initial == "coulomb" || initial == "harmonic", "potential.initial",
          "must be auto, coulomb or harmonic");
  require(rate == "quasistatic" || rate == "yudin_ivanov" || rate == "table", "model.rate",
          "must be quasistatic, yudin_ivanov or table");
  require(rate != "table" || !rate_file.empty(), "model.rate_file", "required when model.rate = table");
  require(!c || std::isfinite(*c), "model.c", "must be a number or \"fit\"");
  require(ordering == "printed" || ordering == "direct", "model.ordering", "must be printed or direct");
  require(rate_substeps >= 1, "model.rate_substeps", "must be >= 1");
  require(objective == "frobenius_re" || objective == "frobenius_complex", "fit.objective",
          "must be frobenius_re or frobenius_complex");
  require(max_norm_loss >= 0.0 && max_norm_loss <= 1.0, "corr.max_norm_loss", "must lie in [0, 1]");
  require(!dir.empty(), "output.dir", "must not be empty");
  require(jobs >= 0, "run.jobs", "must be >= 0");
}

}  // namespace heisencorr
