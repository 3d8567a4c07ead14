#include <cmath>

#include <fmt/format.h>

#include "bmd/schedules.hpp"

namespace bmd {
namespace {
constexpr double kMargin = 1e-12;
}

double step_size(const ScheduleParams& p, std::int64_t k) {
  return p.gamma0 / std::pow(static_cast<double>(k) + p.k_gamma, p.alpha_gamma);
}

double query_radius(const ScheduleParams& p, std::int64_t k) {
  return p.delta0 / std::pow(static_cast<double>(k) + p.k_delta, p.alpha_delta);
}

bool ValidationReport::ok() const {
  for (const auto& c : conditions)
    if (!c.passed) return false;
  return true;
}

const ConditionResult* ValidationReport::find(const std::string& id) const {
  for (const auto& c : conditions)
    if (c.id == id) return &c;
  return nullptr;
}

std::vector<std::string> ValidationReport::failed_ids() const {
  std::vector<std::string> out;
  for (const auto& c : conditions)
    if (!c.passed) out.push_back(c.id);
  return out;
}

ValidationReport validate_params(const ScheduleParams& p, std::optional<double> min_ball_radius) {
  ValidationReport r;
  const double ag = p.alpha_gamma, ad = p.alpha_delta, adel = p.alpha_d;

  r.conditions.push_back({"alpha_gamma_range", "0.5 < alpha_gamma <= 1", ag > 0.5 + kMargin && ag <= 1.0,
                          fmt::format("alpha_gamma = {}", ag)});
  r.conditions.push_back({"gamma_faster_than_delta", "alpha_gamma > alpha_delta", ag > ad + kMargin,
                          fmt::format("{} vs {}", ag, ad)});
  r.conditions.push_back({"exponent_sum", "alpha_gamma + alpha_delta > 1", ag + ad > 1.0 + kMargin,
                          fmt::format("sum = {}", ag + ad)});
  r.conditions.push_back({"delay_exponent", "2 alpha_gamma - alpha_d > 1",
                          2.0 * ag - adel > 1.0 + kMargin,
                          fmt::format("2*{} - {} = {}", ag, adel, 2.0 * ag - adel)});

  const double ratio_early = step_size(p, 1000) / query_radius(p, 1000);
  const double ratio_late = step_size(p, 1000000) / query_radius(p, 1000000);
  r.conditions.push_back({"ratio_decay", "gamma_k / delta_k -> 0", ratio_late < ratio_early,
                          fmt::format("ratio at k=1e3: {:.6g}, at k=1e6: {:.6g}", ratio_early, ratio_late)});

  const bool schedule_ok = p.gamma0 > 0.0 && p.delta0 > 0.0 && p.k_gamma >= 0.0 && p.k_delta >= 0.0 &&
                           ad > 0.0 && ad <= 1.0 && ag > 0.0;
  r.conditions.push_back({"schedule_form", "gamma0, delta0 > 0; K >= 0; alpha in (0, 1]", schedule_ok,
                          fmt::format("gamma0={} delta0={} K_gamma={} K_delta={}", p.gamma0, p.delta0,
                                      p.k_gamma, p.k_delta)});

  if (min_ball_radius) {
    const double d1 = query_radius(p, 1);
    r.conditions.push_back({"radius_within_ball", "delta_1 <= min_i r_i", d1 <= *min_ball_radius,
                            fmt::format("delta_1 = {:.6g}, min radius = {:.6g}", d1, *min_ball_radius)});
  }
  return r;
}

}  // namespace bmd
