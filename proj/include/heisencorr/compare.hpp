#pragma once

#include "heisencorr/smm_model.hpp"

#include <json.hpp>

#include <array>
#include <string>
#include <utility>
#include <vector>

namespace heisencorr {

enum class Part { re, im, complex };
std::string to_string(Part p);
Part parse_part(const std::string& s);

/// ||a - b||_F / ||b||_F on the selected part.
double frobenius_rel(const CorrelationMatrix& a, const CorrelationMatrix& b, Part part);

/// frobenius_rel restricted to rows and columns margin ... n_t - 1 - margin.
double frobenius_rel_interior(const CorrelationMatrix& a, const CorrelationMatrix& b, Part part, int margin = 1);

/// Largest entrywise |a - b| / |b|.
double max_relative_error(const CorrelationMatrix& a, const CorrelationMatrix& b);

/// Pearson correlation of all entries of the selected part (re or im).
double pattern_correlation(const CorrelationMatrix& a, const CorrelationMatrix& b, Part part);

enum class FitObjective { frobenius_re, frobenius_complex };
std::string to_string(FitObjective o);
FitObjective parse_objective(const std::string& s);

struct FitReport {
  double c_star = 0.0;
  /// Squared Frobenius distance between C_model(c_star) and the target.
  double objective = 0.0;
  FitObjective objective_kind = FitObjective::frobenius_re;
  /// Objective(c) = sum_k coefficients[k] c^k.
  std::array<double, 5> coefficients{};
  double frobenius_rel_re = 0.0;
  double frobenius_rel_im = 0.0;
  double frobenius_rel_complex = 0.0;
  double pattern_re = 0.0;
  double pattern_im = 0.0;
  std::vector<std::pair<double, double>> scan;  // (c, objective)

  double evaluate(double c) const;
  nlohmann::json to_json() const;
  static FitReport from_json(const nlohmann::json& j);
};

/// Quartic coefficients of the squared Frobenius objective of C_model(c) - target.
std::array<double, 5> objective_coefficients(const ModelDecomposition& d, const CorrelationMatrix& target,
                                             FitObjective objective);

/// Least-squares fit of the model coefficient c. Throws std::invalid_argument
/// when the field-induced terms vanish ("nothing to fit").
FitReport fit_c(const ModelDecomposition& d, const CorrelationMatrix& target,
                FitObjective objective = FitObjective::frobenius_re);

/// Fills the metric fields of a report for a given model matrix.
void score(FitReport& report, const CorrelationMatrix& model, const CorrelationMatrix& target);

}  // namespace heisencorr
