#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bmd {

/// gamma_k = gamma0 / (k + k_gamma)^alpha_gamma and
/// delta_k = delta0 / (k + k_delta)^alpha_delta, plus the delay exponent the
/// step-size conditions are checked against.
struct ScheduleParams {
  double gamma0 = 1.0;
  double k_gamma = 1000.0;
  double alpha_gamma = 0.9;
  double delta0 = 1.0;
  double k_delta = 10.0;
  double alpha_delta = 0.6;
  double alpha_d = 0.0;
};

double step_size(const ScheduleParams& p, std::int64_t k);
double query_radius(const ScheduleParams& p, std::int64_t k);

struct ConditionResult {
  std::string id;          // stable identifier, e.g. "alpha_gamma_range"
  std::string inequality;  // human-readable form of the checked condition
  bool passed = false;
  std::string detail;      // evaluated numbers
};

struct ValidationReport {
  std::vector<ConditionResult> conditions;

  bool ok() const;
  const ConditionResult* find(const std::string& id) const;
  std::vector<std::string> failed_ids() const;
};

/// Checks the convergence conditions on the schedule exponents:
///   0.5 < alpha_gamma <= 1, alpha_gamma > alpha_delta,
///   alpha_gamma + alpha_delta > 1, 2 alpha_gamma - alpha_d > 1,
/// that gamma_k / delta_k decays numerically (k = 1e3 vs 1e6), and, when
/// `min_ball_radius` is given, that delta_1 <= min_i r_i. Strict
/// inequalities need a margin of 1e-12 so boundary cases fail.
ValidationReport validate_params(const ScheduleParams& p,
                                 std::optional<double> min_ball_radius = std::nullopt);

}  // namespace bmd
