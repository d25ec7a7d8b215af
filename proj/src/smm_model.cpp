#include "heisencorr/smm_model.hpp"

#include "heisencorr/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace heisencorr {

double quasistatic_rate(double e_abs) {
  if (e_abs < 0.0) throw std::invalid_argument("field magnitude must be >= 0");
  if (e_abs == 0.0) return 0.0;
  return 4.0 / e_abs * std::exp(-2.0 / (3.0 * e_abs));
}

double yudin_ivanov_rate(double e_inst, double, double) {
  if (e_inst == 0.0) return 0.0;
  throw UnimplementedProvider("the yudin_ivanov rate provider has no transcribed formula; use quasistatic or table");
}

TabulatedRate TabulatedRate::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifact(path.string());
  TabulatedRate table;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    double t = 0.0, w = 0.0;
    if (!(fields >> t)) continue;
    std::string rest;
    if (!(fields >> w) || (fields >> rest))
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": expected two numbers");
    if (!table.times.empty() && !(t > table.times.back()))
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": times must increase strictly");
    if (w < 0.0) throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": negative rate");
    table.times.push_back(t);
    table.rates.push_back(w);
  }
  if (table.times.empty()) throw std::runtime_error(path.string() + ": empty rate table");
  return table;
}

double TabulatedRate::operator()(double t) const {
  if (times.empty() || t < times.front() || t > times.back()) return 0.0;
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  if (it == times.end()) return rates.back();
  const auto k = static_cast<std::size_t>(it - times.begin());
  if (k == 0) return rates.front();
  const double x = (t - times[k - 1]) / (times[k] - times[k - 1]);
  return rates[k - 1] + x * (rates[k] - rates[k - 1]);
}

double RateProvider::rate(const PulseParams& p, double t) const {
  const double w = std::visit(
      [&](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, QuasistaticRate>) return quasistatic_rate(std::abs(electric_field(p, t)));
        else if constexpr (std::is_same_v<T, YudinIvanovRate>)
          return yudin_ivanov_rate(electric_field(p, t), p.omega * t, v.ip);
        else return v(t);
      },
      variant);
  return scale * w;
}

std::string RateProvider::name() const {
  switch (variant.index()) {
    case 0: return "quasistatic";
    case 1: return "yudin_ivanov";
    default: return "table";
  }
}

IonizationProfile ionization_profile(const PulseParams& p, const RateProvider& provider, const TimeGrid& tgrid,
                                     int substeps) {
  tgrid.validate();
  if (substeps < 1) throw std::invalid_argument("model.rate_substeps must be >= 1");
  IonizationProfile prof;
  prof.tgrid = tgrid;
  prof.w.resize(tgrid.n_t);
  prof.p.resize(tgrid.n_t);
  prof.w(0) = provider.rate(p, tgrid.t(0));
  prof.p(0) = 0.0;
  double total = 0.0;
  for (int k = 1; k < tgrid.n_t; ++k) {
    const double t0 = tgrid.t(k - 1);
    const double h = (tgrid.t(k) - t0) / substeps;
    double left = provider.rate(p, t0);
    double segment = 0.0;
    for (int s = 1; s <= substeps; ++s) {
      const double right = provider.rate(p, s == substeps ? tgrid.t(k) : t0 + s * h);
      segment += 0.5 * h * (left + right);
      left = right;
    }
    total += segment;
    prof.w(k) = left;
    prof.p(k) = total;
  }
  if (prof.p(tgrid.n_t - 1) > 1.0) {
    std::ostringstream msg;
    msg << "ionization probability exceeds 1 (P(T) = " << prof.p(tgrid.n_t - 1) << "); not clamped";
    prof.warnings.push_back(msg.str());
  }
  return prof;
}

CrossTerms cross_terms(const EigenResult& ground, const Propagator& field_free, const TimeGrid& tgrid, double dt) {
  if (field_free.pulse() && field_free.pulse()->e0 != 0.0)
    throw std::invalid_argument("cross terms need a field-free propagator");
  tgrid.validate();
  const WaveState z_phi = apply_z(ground.state);
  WaveState zeta = z_phi;
  WaveState pi = apply_pz(ground.state, field_free.derivative());
  CrossTerms ct;
  ct.a.resize(tgrid.n_t);
  ct.b.resize(tgrid.n_t);
  for (int k = 0; k < tgrid.n_t; ++k) {
    const double t = tgrid.t(k);
    field_free.advance(zeta, t, dt);
    field_free.advance(pi, t, dt);
    const cdouble phase = std::polar(1.0, ground.energy * t);
    ct.a(k) = phase * inner(z_phi, zeta);
    ct.b(k) = phase * inner(z_phi, pi);
  }
  return ct;
}

std::string to_string(ModelOrdering o) { return o == ModelOrdering::printed ? "printed" : "direct"; }

ModelOrdering parse_ordering(const std::string& s) {
  if (s == "printed") return ModelOrdering::printed;
  if (s == "direct") return ModelOrdering::direct;
  throw std::invalid_argument("unknown model ordering '" + s + "' (printed|direct)");
}

ModelDecomposition assemble_model(const CorrelationMatrix& c0, const CrossTerms& cross,
                                  const IonizationProfile& prof, const SecondMoments& mom, ModelOrdering ordering) {
  const int n = c0.grid.n_t;
  if (!(prof.tgrid == c0.grid) || cross.a.size() != n || cross.b.size() != n || c0.values.rows() != n ||
      c0.values.cols() != n)
    throw std::invalid_argument("model inputs live on different time grids");

  ModelDecomposition d;
  d.c0 = c0;
  d.ordering = ordering;
  d.profile = prof;
  d.l_mat.resize(n, n);
  d.q_mat.resize(n, n);
  const Eigen::VectorXd t = c0.grid.times();
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      // (i, j) = (t2, t1)
      d.l_mat(i, j) = prof.p(j) * (cross.a(i) + t(j) * cross.b(i)) + prof.p(i) * (cross.a(j) + t(i) * cross.b(j));
      const cdouble bilinear =
          ordering == ModelOrdering::printed ? volkov_zz(mom, t(i), t(j)) : volkov_zz(mom, t(j), t(i));
      d.q_mat(i, j) = prof.p(i) * prof.p(j) * bilinear;
    }
  }
  return d;
}

CorrelationMatrix model_correlation(const ModelDecomposition& d, double c) {
  if (!std::isfinite(c)) throw std::invalid_argument("model coefficient must be finite");
  CorrelationMatrix m = d.c0;
  m.source = CorrelationSource::model;
  m.values = d.c0.values + c * d.l_mat + (c * c) * d.q_mat;
  m.meta["model_c"] = c;
  m.meta["model_ordering"] = to_string(d.ordering);
  return m;
}

}  // namespace heisencorr
