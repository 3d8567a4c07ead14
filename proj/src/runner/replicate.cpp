#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include "bmd/errors.hpp"
#include "bmd/runner.hpp"

namespace bmd {

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw DomainError("quantile: no data");
  for (double v : values)
    if (std::isnan(v)) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

namespace {

AggregateRow::Band band(std::vector<double> v) {
  return {quantile(v, 0.25), quantile(v, 0.5), quantile(v, 0.75)};
}

}  // namespace

ReplicateResult replicate(const RunConfig& cfg, unsigned threads) {
  check_run_config(cfg);
  const auto reps = static_cast<std::size_t>(cfg.replications);
  ReplicateResult out;
  out.runs.resize(reps);

  std::vector<std::exception_ptr> errors(reps);
  auto job = [&](std::size_t r) {
    try {
      RunConfig c = cfg;
      c.seed = cfg.seed + r;
      out.runs[r] = run(c);
    } catch (...) {
      errors[r] = std::current_exception();
    }
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(reps)));
  if (workers == 1) {
    for (std::size_t r = 0; r < reps; ++r) job(r);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t r; (r = next.fetch_add(1)) < reps;) job(r);
      });
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  const std::size_t rows = out.runs.front().trace.size();
  out.aggregate.resize(rows);
  std::vector<double> a(reps), b(reps), c(reps), d(reps);
  for (std::size_t j = 0; j < rows; ++j) {
    for (std::size_t r = 0; r < reps; ++r) {
      const TraceRow& row = out.runs[r].trace[j];
      a[r] = row.rel_dist;
      b[r] = row.potential_gap;
      c[r] = row.ghat_norm;
      d[r] = row.starved_players;
    }
    AggregateRow& agg = out.aggregate[j];
    agg.iteration = out.runs.front().trace[j].iteration;
    agg.rel_dist = band(a);
    agg.potential_gap = band(b);
    agg.ghat_norm = band(c);
    agg.starved_players = band(d);
  }
  return out;
}

}  // namespace bmd
