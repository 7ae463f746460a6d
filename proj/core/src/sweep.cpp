#include <algorithm>
#include <cmath>

#include "sgmix/error.hpp"
#include "sgmix/parallel.hpp"
#include "sgmix/train.hpp"

namespace sgmix {

namespace {

void apply_dimension(TrainConfig& cfg, std::string_view dimension, double value) {
  if (dimension == "r") {
    if (value < 0.0 || value != std::floor(value))
      throw UsageError("sweep: r values must be non-negative integers");
    cfg.radius = static_cast<std::uint32_t>(value);
  } else if (dimension == "gamma") {
    cfg.gamma = value;
  } else if (dimension == "beta") {
    cfg.beta = value;
  } else if (dimension == "mu") {
    cfg.mu = value;
  } else if (dimension == "epsilon") {
    cfg.epsilon = value;
  } else {
    throw UsageError("sweep: unknown dimension '" + std::string(dimension) + "'");
  }
}

}  // namespace

std::vector<SweepRow> sweep(const Graph& g, const TrainConfig& base,
                            std::string_view dimension, std::span<const double> values,
                            std::span<const std::uint64_t> seeds, unsigned jobs) {
  if (values.empty()) throw UsageError("sweep: no values given");
  if (seeds.empty()) throw UsageError("sweep: no seeds given");

  // Per-cell seeding in sorted-seed order makes the aggregate independent of
  // the order the caller listed seeds in.
  std::vector<std::uint64_t> sorted_seeds(seeds.begin(), seeds.end());
  std::sort(sorted_seeds.begin(), sorted_seeds.end());

  struct Cell {
    double test_acc = 0.0;
    double val_acc = 0.0;
    double confidence = 0.0;
    double gap = 0.0;
    double epochs = 0.0;
  };
  const std::size_t num_cells = values.size() * sorted_seeds.size();
  std::vector<Cell> cells(num_cells);

  // Validate every cell's config before any training starts.
  for (std::size_t v = 0; v < values.size(); ++v) {
    TrainConfig cfg = base;
    apply_dimension(cfg, dimension, values[v]);
    validate_config(cfg);
  }

  parallel_for(num_cells, jobs, [&](std::size_t idx) {
    const std::size_t v = idx / sorted_seeds.size();
    const std::size_t s = idx % sorted_seeds.size();
    TrainConfig cfg = base;
    apply_dimension(cfg, dimension, values[v]);
    cfg.seed = sorted_seeds[s];
    const RunResult run = train(g, cfg);
    Cell& cell = cells[idx];
    cell.test_acc = run.test_acc_at_best_val;
    cell.val_acc = run.best_val_acc;
    cell.confidence = run.best_metrics.confidence.value_or(0.0);
    cell.gap = run.best_metrics.generalization_gap().value_or(0.0);
    cell.epochs = static_cast<double>(run.epochs_ran);
  });

  std::vector<SweepRow> rows;
  rows.reserve(values.size());
  const double n = static_cast<double>(sorted_seeds.size());
  for (std::size_t v = 0; v < values.size(); ++v) {
    SweepRow row;
    row.value = values[v];
    row.num_seeds = sorted_seeds.size();
    for (std::size_t s = 0; s < sorted_seeds.size(); ++s) {
      const Cell& c = cells[v * sorted_seeds.size() + s];
      row.test_acc_mean += c.test_acc;
      row.val_acc_mean += c.val_acc;
      row.confidence_mean += c.confidence;
      row.gap_mean += c.gap;
      row.epochs_mean += c.epochs;
    }
    row.test_acc_mean /= n;
    row.val_acc_mean /= n;
    row.confidence_mean /= n;
    row.gap_mean /= n;
    row.epochs_mean /= n;
    if (sorted_seeds.size() > 1) {
      double ss = 0.0;
      for (std::size_t s = 0; s < sorted_seeds.size(); ++s) {
        const double dev = cells[v * sorted_seeds.size() + s].test_acc - row.test_acc_mean;
        ss += dev * dev;
      }
      row.test_acc_std = std::sqrt(ss / (n - 1.0));
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace sgmix
