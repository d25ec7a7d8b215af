#include "heisencorr/compare.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace heisencorr {

namespace {

void require_same_grid(const CorrelationMatrix& a, const CorrelationMatrix& b) {
  if (!(a.grid == b.grid) || a.values.rows() != b.values.rows() || a.values.cols() != b.values.cols())
    throw std::invalid_argument("correlation matrices live on different time grids");
}

Eigen::MatrixXd select(const Eigen::MatrixXcd& m, Part part) {
  return part == Part::im ? Eigen::MatrixXd(m.imag()) : Eigen::MatrixXd(m.real());
}

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

}  // namespace

std::string to_string(Part p) {
  switch (p) {
    case Part::re: return "re";
    case Part::im: return "im";
    case Part::complex: return "complex";
  }
  return "unknown";
}

Part parse_part(const std::string& s) {
  if (s == "re") return Part::re;
  if (s == "im") return Part::im;
  if (s == "complex") return Part::complex;
  throw std::invalid_argument("unknown part '" + s + "' (re|im|complex)");
}

double frobenius_rel(const CorrelationMatrix& a, const CorrelationMatrix& b, Part part) {
  require_same_grid(a, b);
  double num = 0.0, den = 0.0;
  if (part == Part::complex) {
    num = (a.values - b.values).norm();
    den = b.values.norm();
  } else {
    num = (select(a.values, part) - select(b.values, part)).norm();
    den = select(b.values, part).norm();
  }
  if (den == 0.0) throw std::invalid_argument("reference matrix has zero norm");
  return num / den;
}

double frobenius_rel_interior(const CorrelationMatrix& a, const CorrelationMatrix& b, Part part, int margin) {
  require_same_grid(a, b);
  const Eigen::Index n = a.values.rows() - 2 * margin;
  if (margin < 0 || n < 1) throw std::invalid_argument("grid too small for the interior margin");
  CorrelationMatrix ai = a, bi = b;
  ai.values = a.values.block(margin, margin, n, n);
  bi.values = b.values.block(margin, margin, n, n);
  ai.grid = bi.grid = TimeGrid{static_cast<int>(n), a.grid.t_end};
  return frobenius_rel(ai, bi, part);
}

double max_relative_error(const CorrelationMatrix& a, const CorrelationMatrix& b) {
  require_same_grid(a, b);
  if ((b.values.array() == cdouble(0.0)).any()) throw std::invalid_argument("reference matrix has zero entries");
  return ((a.values - b.values).cwiseAbs().array() / b.values.cwiseAbs().array()).maxCoeff();
}

double pattern_correlation(const CorrelationMatrix& a, const CorrelationMatrix& b, Part part) {
  require_same_grid(a, b);
  if (part == Part::complex) throw std::invalid_argument("pattern correlation needs part re or im");
  const Eigen::ArrayXXd x = select(a.values, part).array() - select(a.values, part).mean();
  const Eigen::ArrayXXd y = select(b.values, part).array() - select(b.values, part).mean();
  const double sxx = x.square().sum();
  const double syy = y.square().sum();
  if (sxx == 0.0 || syy == 0.0) throw std::invalid_argument("pattern correlation of a constant matrix");
  return std::clamp((x * y).sum() / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::string to_string(FitObjective o) {
  return o == FitObjective::frobenius_re ? "frobenius_re" : "frobenius_complex";
}

FitObjective parse_objective(const std::string& s) {
  if (s == "frobenius_re") return FitObjective::frobenius_re;
  if (s == "frobenius_complex") return FitObjective::frobenius_complex;
  throw std::invalid_argument("unknown fit objective '" + s + "' (frobenius_re|frobenius_complex)");
}

double FitReport::evaluate(double c) const {
  double v = 0.0;
  for (int k = 4; k >= 0; --k) v = v * c + coefficients[k];
  return v;
}

nlohmann::json FitReport::to_json() const {
  auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
  nlohmann::json j;
  j["c_star"] = c_star;
  j["objective"] = objective;
  j["objective_kind"] = to_string(objective_kind);
  j["coefficients"] = coefficients;
  j["frobenius_rel_re"] = num(frobenius_rel_re);
  j["frobenius_rel_im"] = num(frobenius_rel_im);
  j["frobenius_rel_complex"] = num(frobenius_rel_complex);
  j["pattern_re"] = num(pattern_re);
  j["pattern_im"] = num(pattern_im);
  std::vector<double> sc, so;
  for (const auto& [c, o] : scan) {
    sc.push_back(c);
    so.push_back(o);
  }
  j["scan_c"] = sc;
  j["scan_objective"] = so;
  return j;
}

FitReport FitReport::from_json(const nlohmann::json& j) {
  auto num = [&](const char* key) { return j.at(key).is_null() ? nan() : j.at(key).get<double>(); };
  FitReport r;
  r.c_star = j.at("c_star").get<double>();
  r.objective = j.at("objective").get<double>();
  r.objective_kind = parse_objective(j.at("objective_kind").get<std::string>());
  r.coefficients = j.at("coefficients").get<std::array<double, 5>>();
  r.frobenius_rel_re = num("frobenius_rel_re");
  r.frobenius_rel_im = num("frobenius_rel_im");
  r.frobenius_rel_complex = num("frobenius_rel_complex");
  r.pattern_re = num("pattern_re");
  r.pattern_im = num("pattern_im");
  const auto sc = j.at("scan_c").get<std::vector<double>>();
  const auto so = j.at("scan_objective").get<std::vector<double>>();
  for (std::size_t k = 0; k < sc.size() && k < so.size(); ++k) r.scan.emplace_back(sc[k], so[k]);
  return r;
}

std::array<double, 5> objective_coefficients(const ModelDecomposition& d, const CorrelationMatrix& target,
                                             FitObjective objective) {
  require_same_grid(d.c0, target);
  Eigen::MatrixXcd r0 = d.c0.values - target.values;
  Eigen::MatrixXcd l = d.l_mat;
  Eigen::MatrixXcd q = d.q_mat;
  if (objective == FitObjective::frobenius_re) {
    r0 = r0.real().cast<cdouble>();
    l = l.real().cast<cdouble>();
    q = q.real().cast<cdouble>();
  }
  auto re_dot = [](const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    return (a.real().array() * b.real().array() + a.imag().array() * b.imag().array()).sum();
  };
  return {r0.squaredNorm(), 2.0 * re_dot(r0, l), l.squaredNorm() + 2.0 * re_dot(r0, q), 2.0 * re_dot(l, q),
          q.squaredNorm()};
}

void score(FitReport& report, const CorrelationMatrix& model, const CorrelationMatrix& target) {
  auto guarded = [](auto&& f) {
    try {
      return f();
    } catch (const std::invalid_argument&) {
      return nan();
    }
  };
  report.frobenius_rel_re = guarded([&] { return frobenius_rel(model, target, Part::re); });
  report.frobenius_rel_im = guarded([&] { return frobenius_rel(model, target, Part::im); });
  report.frobenius_rel_complex = guarded([&] { return frobenius_rel(model, target, Part::complex); });
  report.pattern_re = guarded([&] { return pattern_correlation(model, target, Part::re); });
  report.pattern_im = guarded([&] { return pattern_correlation(model, target, Part::im); });
}

FitReport fit_c(const ModelDecomposition& d, const CorrelationMatrix& target, FitObjective objective) {
  FitReport report;
  report.objective_kind = objective;
  report.coefficients = objective_coefficients(d, target, objective);
  const auto& k = report.coefficients;
  if (k[4] == 0.0 && k[3] == 0.0 && k[2] == 0.0 && k[1] == 0.0) throw std::invalid_argument("nothing to fit");

  // Exact gradient and curvature from the matrices, for Newton polishing.
  Eigen::MatrixXcd r0 = d.c0.values - target.values;
  Eigen::MatrixXcd l = d.l_mat;
  Eigen::MatrixXcd q = d.q_mat;
  if (objective == FitObjective::frobenius_re) {
    r0 = r0.real().cast<cdouble>();
    l = l.real().cast<cdouble>();
    q = q.real().cast<cdouble>();
  }
  auto polish = [&](double c) {
    for (int it = 0; it < 8; ++it) {
      const Eigen::MatrixXcd r = r0 + c * l + (c * c) * q;
      const Eigen::MatrixXcd dr = l + (2.0 * c) * q;
      const double g = 2.0 * (r.real().array() * dr.real().array() + r.imag().array() * dr.imag().array()).sum();
      const double h = 2.0 * (dr.squaredNorm() +
                              2.0 * (r.real().array() * q.real().array() + r.imag().array() * q.imag().array()).sum());
      if (!(h > 0.0)) break;
      const double step = g / h;
      c -= step;
      if (std::abs(step) <= 1e-15 * (1.0 + std::abs(c))) break;
    }
    return c;
  };

  // Stationary points: roots of k1 + 2 k2 c + 3 k3 c^2 + 4 k4 c^3.
  std::vector<double> deriv = {k[1], 2.0 * k[2], 3.0 * k[3], 4.0 * k[4]};
  while (deriv.size() > 1 && deriv.back() == 0.0) deriv.pop_back();
  std::vector<double> candidates;
  const int degree = static_cast<int>(deriv.size()) - 1;
  if (degree == 1) {
    candidates.push_back(-deriv[0] / deriv[1]);
  } else if (degree > 1) {
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(degree, degree);
    for (int i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < degree; ++i) companion(i, degree - 1) = -deriv[i] / deriv[degree];
    const Eigen::VectorXcd roots = companion.eigenvalues();
    for (const auto& z : roots)
      if (std::abs(z.imag()) <= 1e-6 * (1.0 + std::abs(z.real()))) candidates.push_back(z.real());
  }
  for (double& c : candidates) c = polish(c);

  // Logarithmic ladder, scaled by the peak ionization probability.
  const double p_max = d.profile.p.size() > 0 ? d.profile.p.maxCoeff() : 0.0;
  const double scale = p_max > 0.0 ? 1.0 / p_max : 1.0;
  for (int e = -16; e <= 8; ++e) {
    const double c = scale * std::pow(10.0, 0.25 * e);
    report.scan.emplace_back(c, report.evaluate(c));
  }
  candidates.push_back(report.scan.front().first);
  candidates.push_back(report.scan.back().first);

  double best = std::numeric_limits<double>::infinity();
  for (double c : candidates) {
    const double v = report.evaluate(c);
    if (v < best) {
      best = v;
      report.c_star = c;
    }
  }
  report.objective = (r0 + report.c_star * l + (report.c_star * report.c_star) * q).squaredNorm();
  score(report, model_correlation(d, report.c_star), target);
  return report;
}

}  // namespace heisencorr
