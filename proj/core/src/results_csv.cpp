#include "sgmix/results_csv.hpp"

#include <cstdio>

namespace sgmix {

namespace {

// Column indices for the fixed part of the schema.
enum Col : std::size_t {
  kRowType = 0,
  kRunId,
  kSeed,
  kPolicy,
  kR,
  kGamma,
  kBeta,
  kAlpha,
  kLambdaFixed,
  kMu,
  kEpsilon,
  kHidden,
  kDropout,
  kLr,
  kWeightDecay,
  kMaxEpochs,
  kPatience,
  kNumSeeds,
  kEpoch,
  kTrainLoss,
  kValLoss,
  kTestLoss,
  kTrainAcc,
  kValAcc,
  kTestAcc,
  kTestAccStd,
  kConfidence,
  kGap,
  kMeanLambda,
  kLambda,
  kMissRate,
  kFixedColumnCount,
};

const char* kFixedColumns[kFixedColumnCount] = {
    "row_type",   "run_id",     "seed",        "policy",     "r",
    "gamma",      "beta",       "alpha",       "lambda_fixed", "mu",
    "epsilon",    "hidden",     "dropout",     "lr",         "weight_decay",
    "max_epochs", "patience",   "num_seeds",   "epoch",      "train_loss",
    "val_loss",   "test_loss",  "train_acc",   "val_acc",    "test_acc",
    "test_acc_std", "confidence", "gap",       "mean_lambda", "lambda",
    "miss_rate",
};

std::string opt_str(const std::optional<double>& v) {
  return v.has_value() ? ResultsWriter::format_number(*v) : std::string{};
}

}  // namespace

std::string ResultsWriter::format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

ResultsWriter::ResultsWriter(std::ostream& out, std::vector<double> miss_grid)
    : out_(out), miss_grid_(std::move(miss_grid)) {
  columns_.assign(kFixedColumns, kFixedColumns + kFixedColumnCount);
  for (double g : miss_grid_) columns_.push_back("miss_" + format_number(g));
}

void ResultsWriter::comment(std::string_view text) { out_ << "# " << text << "\n"; }

void ResultsWriter::header() {
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    if (c > 0) out_ << ',';
    out_ << columns_[c];
  }
  out_ << "\n";
}

std::vector<std::string> ResultsWriter::blank_row() const {
  return std::vector<std::string>(columns_.size());
}

void ResultsWriter::fill_config(std::vector<std::string>& row, const TrainConfig& cfg) const {
  row[kSeed] = std::to_string(cfg.seed);
  row[kPolicy] = std::string(policy_name(cfg.policy));
  row[kR] = std::to_string(cfg.radius);
  row[kGamma] = format_number(cfg.gamma);
  row[kBeta] = format_number(cfg.beta);
  row[kAlpha] = format_number(cfg.alpha);
  row[kLambdaFixed] = format_number(cfg.lambda_fixed);
  row[kMu] = format_number(cfg.mu);
  row[kEpsilon] = format_number(cfg.epsilon);
  row[kHidden] = std::to_string(cfg.hidden);
  row[kDropout] = format_number(cfg.dropout);
  row[kLr] = format_number(cfg.lr);
  row[kWeightDecay] = format_number(cfg.weight_decay);
  row[kMaxEpochs] = std::to_string(cfg.max_epochs);
  row[kPatience] = std::to_string(cfg.patience);
}

void ResultsWriter::fill_metrics(std::vector<std::string>& row, const EvalMetrics& m) const {
  row[kTrainLoss] = opt_str(m.train.loss);
  row[kValLoss] = opt_str(m.val.loss);
  row[kTestLoss] = opt_str(m.test.loss);
  row[kTrainAcc] = opt_str(m.train.accuracy);
  row[kValAcc] = opt_str(m.val.accuracy);
  row[kTestAcc] = opt_str(m.test.accuracy);
  row[kConfidence] = opt_str(m.confidence);
  row[kGap] = opt_str(m.generalization_gap());
}

void ResultsWriter::emit(const std::vector<std::string>& row) {
  for (std::size_t c = 0; c < row.size(); ++c) {
    if (c > 0) out_ << ',';
    out_ << row[c];
  }
  out_ << "\n";
}

void ResultsWriter::trace_row(std::string_view run_id, const TrainConfig& cfg,
                              const EpochRecord& rec) {
  auto row = blank_row();
  row[kRowType] = "trace";
  row[kRunId] = std::string(run_id);
  fill_config(row, cfg);
  row[kNumSeeds] = "1";
  row[kEpoch] = std::to_string(rec.epoch);
  fill_metrics(row, rec.metrics);
  row[kMeanLambda] = opt_str(rec.mean_lambda);
  emit(row);
}

void ResultsWriter::summary_row(std::string_view run_id, const TrainConfig& cfg,
                                const RunResult& run) {
  auto row = blank_row();
  row[kRowType] = "summary";
  row[kRunId] = std::string(run_id);
  fill_config(row, cfg);
  row[kNumSeeds] = "1";
  row[kEpoch] = std::to_string(run.epochs_ran);
  fill_metrics(row, run.best_metrics);
  emit(row);
}

void ResultsWriter::sweep_summary_row(std::string_view run_id, const TrainConfig& cfg_with_value,
                                      const SweepRow& srow) {
  auto row = blank_row();
  row[kRowType] = "sweep-summary";
  row[kRunId] = std::string(run_id);
  fill_config(row, cfg_with_value);
  row[kSeed].clear();  // aggregate over several seeds
  row[kNumSeeds] = std::to_string(srow.num_seeds);
  row[kEpoch] = format_number(srow.epochs_mean);
  row[kValAcc] = format_number(srow.val_acc_mean);
  row[kTestAcc] = format_number(srow.test_acc_mean);
  row[kTestAccStd] = format_number(srow.test_acc_std);
  row[kConfidence] = format_number(srow.confidence_mean);
  row[kGap] = format_number(srow.gap_mean);
  emit(row);
}

void ResultsWriter::casestudy_row(std::string_view run_id, std::string_view policy_label,
                                  const TrainConfig& cfg, const RunResult& run,
                                  std::span<const double> miss_rates) {
  auto row = blank_row();
  row[kRowType] = "casestudy";
  row[kRunId] = std::string(run_id);
  fill_config(row, cfg);
  row[kPolicy] = std::string(policy_label);
  row[kNumSeeds] = "1";
  row[kEpoch] = std::to_string(run.epochs_ran);
  fill_metrics(row, run.best_metrics);
  for (std::size_t k = 0; k < miss_rates.size() && k < miss_grid_.size(); ++k)
    row[kFixedColumnCount + k] = format_number(miss_rates[k]);
  emit(row);
}

void ResultsWriter::miss_row(std::string_view run_id, std::string_view policy_label,
                             const TrainConfig& cfg, double lambda, double miss_rate) {
  auto row = blank_row();
  row[kRowType] = "miss";
  row[kRunId] = std::string(run_id);
  fill_config(row, cfg);
  row[kPolicy] = std::string(policy_label);
  row[kLambda] = format_number(lambda);
  row[kMissRate] = format_number(miss_rate);
  emit(row);
}

}  // namespace sgmix
