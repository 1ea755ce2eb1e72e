// SPDX-License-Identifier: Apache-2.0
#include "ergocheck/sde.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "ergocheck/error.hpp"

namespace ergocheck {

namespace {

constexpr double kMaxCensoredFraction = 0.01;

std::mt19937_64 path_engine(std::uint64_t seed, std::size_t path) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(path), static_cast<std::uint32_t>(std::uint64_t{path} >> 32),
                    0x9e3779b9u};
  return std::mt19937_64(seq);
}

double reflect(double x, double L) {
  // Fold into [-L, L]; a single fold suffices unless a step exceeds 2L.
  while (x > L || x < -L) {
    if (x > L) x = 2.0 * L - x;
    if (x < -L) x = -2.0 * L - x;
  }
  return x;
}

std::size_t step_count(const SimConfig& cfg) {
  return static_cast<std::size_t>(std::llround(cfg.T / cfg.dt));
}

// Order-independent reduction: Neumaier-compensated sum.
double compensated_sum(std::span<const double> xs) {
  double sum = 0.0, comp = 0.0;
  for (double x : xs) {
    const double t = sum + x;
    comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  return sum + comp;
}

double interpolate(const Grid1D& grid, std::span<const double> table, double x) {
  const double L = grid.half_width();
  const double h = grid.spacing();
  const double pos = std::clamp((x + L) / h, 0.0, static_cast<double>(grid.size() - 1));
  const auto i = std::min(static_cast<std::size_t>(pos), grid.size() - 2);
  const double w = pos - static_cast<double>(i);
  return (1.0 - w) * table[i] + w * table[i + 1];
}

}  // namespace

void SimConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(Errc::InvalidConfig, "dt must be positive");
  if (!(T > 0.0) || !std::isfinite(T)) throw Error(Errc::InvalidConfig, "horizon T must be positive");
  if (n_paths < 1) throw Error(Errc::InvalidConfig, "need at least one path");
  if (reflect_at && !(*reflect_at > 0.0)) throw Error(Errc::InvalidConfig, "reflection level must be positive");
  if (step_count(*this) < 1) throw Error(Errc::InvalidConfig, "horizon shorter than one step");
}

PathStats PathStats::from_samples(std::span<const double> samples) {
  PathStats s;
  s.n_samples = samples.size();
  if (samples.empty()) return s;
  const double n = static_cast<double>(samples.size());
  s.mean = compensated_sum(samples) / n;
  if (samples.size() > 1) {
    std::vector<double> sq(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) sq[i] = (samples[i] - s.mean) * (samples[i] - s.mean);
    s.std_error = std::sqrt(compensated_sum(sq) / (n - 1.0) / n);
  }
  return s;
}

std::vector<double> simulate_path_averages(const DiffusionModel& model, const Policy& policy, const SimConfig& cfg) {
  cfg.validate();
  const std::size_t steps = step_count(cfg);
  const double sqdt = std::sqrt(cfg.dt);
  std::vector<double> averages(cfg.n_paths);
  for (std::size_t p = 0; p < cfg.n_paths; ++p) {
    auto rng = path_engine(cfg.seed, p);
    std::normal_distribution<double> normal(0.0, 1.0);
    double x = cfg.x0;
    double acc = 0.0;
    for (std::size_t k = 0; k < steps; ++k) {
      const double u = policy.lookup_clamped(x);
      acc += model.cost(x, u);
      x += model.drift(x, u) * cfg.dt + model.dispersion(x) * sqdt * normal(rng);
      if (cfg.reflect_at) x = reflect(x, *cfg.reflect_at);
    }
    averages[p] = acc / static_cast<double>(steps);
  }
  return averages;
}

PathStats simulate_average_cost(const DiffusionModel& model, const Policy& policy, const SimConfig& cfg) {
  return PathStats::from_samples(simulate_path_averages(model, policy, cfg));
}

ExitEstimate estimate_exit_functional(const DiffusionModel& model, const Policy& policy, double x0, double r,
                                      double rho, const SimConfig& cfg, std::optional<std::span<const double>> V) {
  cfg.validate();
  if (!(r > 0.0)) throw Error(Errc::InvalidRadius, "inner radius must be positive");
  if (std::abs(x0) < r) throw Error(Errc::InvalidArgument, "starting point lies inside the ball");
  if (V && V->size() != policy.grid().size()) {
    throw Error(Errc::PolicyLengthMismatch, "value table does not match the policy grid");
  }

  const std::size_t steps = step_count(cfg);
  const double sqdt = std::sqrt(cfg.dt);
  std::vector<double> psi(cfg.n_paths), vexit(cfg.n_paths), both(cfg.n_paths);
  std::size_t censored = 0;
  for (std::size_t p = 0; p < cfg.n_paths; ++p) {
    auto rng = path_engine(cfg.seed, p);
    std::normal_distribution<double> normal(0.0, 1.0);
    double x = x0;
    double acc = 0.0;
    bool exited = std::abs(x) <= r;
    for (std::size_t k = 0; k < steps && !exited; ++k) {
      const double u = policy.lookup_clamped(x);
      acc += (model.cost(x, u) - rho) * cfg.dt;
      x += model.drift(x, u) * cfg.dt + model.dispersion(x) * sqdt * normal(rng);
      if (cfg.reflect_at) x = reflect(x, *cfg.reflect_at);
      exited = std::abs(x) <= r;
    }
    if (!exited) ++censored;
    psi[p] = acc;
    if (V) {
      vexit[p] = interpolate(policy.grid(), *V, x);
      both[p] = acc + vexit[p];
    }
  }

  ExitEstimate out;
  out.censored_fraction = static_cast<double>(censored) / static_cast<double>(cfg.n_paths);
  if (out.censored_fraction > kMaxCensoredFraction) {
    throw Error(Errc::CensoringExcessive, std::to_string(censored) + " of " + std::to_string(cfg.n_paths) +
                                              " paths did not reach the ball before the horizon");
  }
  out.psi = PathStats::from_samples(psi);
  if (V) {
    out.v_exit = PathStats::from_samples(vexit);
    out.combined = PathStats::from_samples(both);
  }
  return out;
}

Histogram occupation_histogram(const DiffusionModel& model, const Policy& policy, const SimConfig& cfg,
                               std::size_t bins, double lo, double hi) {
  cfg.validate();
  if (bins == 0 || !(hi > lo)) throw Error(Errc::InvalidConfig, "histogram needs bins >= 1 and hi > lo");
  const std::size_t steps = step_count(cfg);
  const std::size_t burn = steps / 10;
  const double sqdt = std::sqrt(cfg.dt);
  const double width = (hi - lo) / static_cast<double>(bins);

  Histogram hist;
  hist.edges.resize(bins + 1);
  for (std::size_t b = 0; b <= bins; ++b) hist.edges[b] = lo + width * static_cast<double>(b);
  std::vector<std::uint64_t> counts(bins, 0);
  std::uint64_t total = 0;
  for (std::size_t p = 0; p < cfg.n_paths; ++p) {
    auto rng = path_engine(cfg.seed, p);
    std::normal_distribution<double> normal(0.0, 1.0);
    double x = cfg.x0;
    for (std::size_t k = 0; k < steps; ++k) {
      const double u = policy.lookup_clamped(x);
      x += model.drift(x, u) * cfg.dt + model.dispersion(x) * sqdt * normal(rng);
      if (cfg.reflect_at) x = reflect(x, *cfg.reflect_at);
      if (k + 1 < burn) continue;
      const auto b = static_cast<std::size_t>(std::clamp((x - lo) / width, 0.0, static_cast<double>(bins - 1)));
      ++counts[b];
      ++total;
    }
  }
  hist.mass.resize(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    hist.mass[b] = total ? static_cast<double>(counts[b]) / static_cast<double>(total) : 0.0;
  }
  return hist;
}

}  // namespace ergocheck
