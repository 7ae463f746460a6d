#pragma once

#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sgmix/train.hpp"

namespace sgmix {

/// Writes the shared results CSV. One fixed column set is used by every
/// command; cells that do not apply to a row type stay empty. When a lambda
/// grid is supplied, one miss_<value> column per grid point is appended.
///
/// Row types:
///   trace          one row per epoch of a training run
///   summary        one row per training run (best-checkpoint metrics)
///   sweep-summary  one row per swept value (mean/std over seeds)
///   casestudy      one row per policy (miss columns keyed by grid value)
///   miss           long-form miss table: one row per (policy, lambda)
class ResultsWriter {
 public:
  explicit ResultsWriter(std::ostream& out, std::vector<double> miss_grid = {});

  /// '#'-prefixed metadata line; parsers skip these.
  void comment(std::string_view text);

  void header();

  void trace_row(std::string_view run_id, const TrainConfig& cfg, const EpochRecord& rec);

  void summary_row(std::string_view run_id, const TrainConfig& cfg, const RunResult& run);

  void sweep_summary_row(std::string_view run_id, const TrainConfig& cfg_with_value,
                         const SweepRow& row);

  /// policy_label may be "vanilla", in which case the miss columns are left
  /// empty even if a grid is configured.
  void casestudy_row(std::string_view run_id, std::string_view policy_label,
                     const TrainConfig& cfg, const RunResult& run,
                     std::span<const double> miss_rates);

  void miss_row(std::string_view run_id, std::string_view policy_label,
                const TrainConfig& cfg, double lambda, double miss_rate);

  static std::string format_number(double v);

 private:
  std::vector<std::string> blank_row() const;
  void fill_config(std::vector<std::string>& row, const TrainConfig& cfg) const;
  void fill_metrics(std::vector<std::string>& row, const EvalMetrics& m) const;
  void emit(const std::vector<std::string>& row);

  std::ostream& out_;
  std::vector<double> miss_grid_;
  std::vector<std::string> columns_;
};

}  // namespace sgmix
