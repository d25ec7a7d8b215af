#pragma once

#include "heisencorr/ground_state.hpp"
#include "heisencorr/oracles.hpp"

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace heisencorr {

/// Static tunneling rate of hydrogen 1s, (4/E) exp(-2/(3E)); zero at E = 0.
double quasistatic_rate(double e_abs);

/// Nonadiabatic instantaneous rate. No closed form is bundled, so this
/// always throws UnimplementedProvider.
double yudin_ivanov_rate(double e_inst, double phase, double ip);

struct QuasistaticRate {};
struct YudinIvanovRate {
  double ip = 0.5;
};
/// Rate samples W(t) read from a two-column file, linearly interpolated and
/// zero outside the tabulated range.
struct TabulatedRate {
  std::vector<double> times;
  std::vector<double> rates;

  static TabulatedRate load(const std::filesystem::path& path);
  double operator()(double t) const;
};

struct RateProvider {
  std::variant<QuasistaticRate, YudinIvanovRate, TabulatedRate> variant = QuasistaticRate{};
  /// Overall factor applied to every rate sample.
  double scale = 1.0;

  double rate(const PulseParams& p, double t) const;
  std::string name() const;
};

struct IonizationProfile {
  TimeGrid tgrid;
  Eigen::VectorXd w;  // rate at t_k
  Eigen::VectorXd p;  // cumulative probability at t_k
  std::vector<std::string> warnings;
};

/// P(t) as the cumulative trapezoid integral of W on a grid refined by
/// `substeps` intervals per time-grid interval. P is not clamped at 1; a
/// warning is recorded instead.
IonizationProfile ionization_profile(const PulseParams& p, const RateProvider& provider, const TimeGrid& tgrid,
                                     int substeps = 256);

/// a(t) = <z_0(t) z>, b(t) = <z_0(t) p_z> with z_0(t) the field-free Heisenberg coordinate.
struct CrossTerms {
  Eigen::VectorXcd a;
  Eigen::VectorXcd b;
};

/// Field-free repropagation of z phi_0 and p_z phi_0:
/// a(t) = e^{i e0 t} <z phi_0| U0(t, 0) |z phi_0>, b(t) = e^{i e0 t} <z phi_0| U0(t, 0) |p_z phi_0>.
/// `field_free` must have no pulse.
CrossTerms cross_terms(const EigenResult& ground, const Propagator& field_free, const TimeGrid& tgrid, double dt);

/// Factor order in the quadratic term. `printed`: <(z + p_z t1)(z + p_z t2)>.
/// `direct`: <(z + p_z t2)(z + p_z t1)>, the expansion of <z_H(t2) z_H(t1)>.
enum class ModelOrdering { printed, direct };
std::string to_string(ModelOrdering o);
ModelOrdering parse_ordering(const std::string& s);

/// C_model(c) = c0 + c l_mat + c^2 q_mat.
struct ModelDecomposition {
  CorrelationMatrix c0;
  Eigen::MatrixXcd l_mat;
  Eigen::MatrixXcd q_mat;
  ModelOrdering ordering = ModelOrdering::printed;
  IonizationProfile profile;
};

ModelDecomposition assemble_model(const CorrelationMatrix& c0, const CrossTerms& cross,
                                  const IonizationProfile& prof, const SecondMoments& mom,
                                  ModelOrdering ordering = ModelOrdering::printed);

CorrelationMatrix model_correlation(const ModelDecomposition& d, double c);

}  // namespace heisencorr
