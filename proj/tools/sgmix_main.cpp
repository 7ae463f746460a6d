// sgmix command-line front end.
//
// Subcommands: train, sweep, casestudy, gen-sbm, validate-bundle.
// Exit codes: 0 success, 1 usage error, 2 data/validation error,
// 3 numeric failure.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sgmix/checkpoint.hpp"
#include "sgmix/error.hpp"
#include "sgmix/graph.hpp"
#include "sgmix/results_csv.hpp"
#include "sgmix/sbm.hpp"
#include "sgmix/train.hpp"

namespace {

using namespace sgmix;

struct CliOptions {
  std::string dataset;
  std::string out_csv = "results.csv";
  std::string checkpoint_out = "model.ckpt";
  std::string checkpoint_in;
  std::string policy = "adaptive";
  TrainConfig cfg;
  bool gamma_set = false, beta_set = false, alpha_set = false, lambda_set = false;
  unsigned jobs = 1;

  // sweep
  std::string dimension;
  std::string values_spec;
  std::string seeds_spec;

  // casestudy
  bool train_models = false;
  std::string lambda_grid_spec = "0..1:0.1";
  std::size_t miss_pairs = 500;

  // gen-sbm
  std::string blocks_spec;
  SbmSpec sbm;
};

PolicyKind parse_policy(const std::string& name) {
  if (name == "adaptive") return PolicyKind::Adaptive;
  if (name == "random-beta") return PolicyKind::RandomBeta;
  if (name == "fixed") return PolicyKind::Fixed;
  throw UsageError("unknown policy '" + name + "' (adaptive, random-beta, fixed)");
}

double parse_double(const std::string& s, const char* what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw UsageError(std::string("cannot parse ") + what + " value '" + s + "'");
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  return parts;
}

/// "a..b:s" inclusive range, "a..b" with step 1, or a comma list.
/// Duplicates are dropped with a warning.
std::vector<double> parse_values(const std::string& spec) {
  std::vector<double> values;
  const auto range_pos = spec.find("..");
  if (range_pos != std::string::npos) {
    const std::string lo_str = spec.substr(0, range_pos);
    std::string rest = spec.substr(range_pos + 2);
    double step = 1.0;
    if (const auto colon = rest.find(':'); colon != std::string::npos) {
      step = parse_double(rest.substr(colon + 1), "step");
      rest = rest.substr(0, colon);
    }
    const double lo = parse_double(lo_str, "range start");
    const double hi = parse_double(rest, "range end");
    if (!(step > 0.0)) throw UsageError("range step must be > 0");
    if (hi < lo) throw UsageError("range end must be >= start");
    for (int k = 0;; ++k) {
      const double v = lo + step * k;
      if (v > hi + 1e-9) break;
      values.push_back(v);
    }
  } else {
    for (const auto& part : split(spec, ',')) {
      if (!part.empty()) values.push_back(parse_double(part, "list"));
    }
  }
  if (values.empty()) throw UsageError("no values in '" + spec + "'");

  std::vector<double> unique;
  for (double v : values) {
    bool dup = false;
    for (double u : unique) {
      if (std::abs(u - v) < 1e-12) dup = true;
    }
    if (dup) {
      std::cerr << "warning: duplicate value " << v << " dropped\n";
    } else {
      unique.push_back(v);
    }
  }
  return unique;
}

/// Either a count N (seeds seed..seed+N-1) or an explicit comma list.
std::vector<std::uint64_t> parse_seeds(const std::string& spec, std::uint64_t master) {
  std::vector<std::uint64_t> seeds;
  if (spec.find(',') == std::string::npos) {
    std::uint64_t count = 0;
    try {
      count = std::stoull(spec);
    } catch (const std::exception&) {
      throw UsageError("cannot parse --seeds '" + spec + "'");
    }
    if (count == 0) throw UsageError("--seeds count must be >= 1");
    for (std::uint64_t k = 0; k < count; ++k) seeds.push_back(master + k);
    return seeds;
  }
  for (const auto& part : split(spec, ',')) {
    if (part.empty()) continue;
    try {
      seeds.push_back(std::stoull(part));
    } catch (const std::exception&) {
      throw UsageError("cannot parse seed '" + part + "'");
    }
  }
  if (seeds.empty()) throw UsageError("no seeds in '" + spec + "'");
  return seeds;
}

void fill_policy(CliOptions& opt) {
  opt.cfg.policy = parse_policy(opt.policy);
  switch (opt.cfg.policy) {
    case PolicyKind::Adaptive:
      if (opt.alpha_set) throw UsageError("--alpha applies only to --policy random-beta");
      if (opt.lambda_set) throw UsageError("--lambda applies only to --policy fixed");
      break;
    case PolicyKind::RandomBeta:
      if (opt.gamma_set || opt.beta_set)
        throw UsageError("--gamma/--beta apply only to --policy adaptive");
      if (opt.lambda_set) throw UsageError("--lambda applies only to --policy fixed");
      break;
    case PolicyKind::Fixed:
      if (opt.gamma_set || opt.beta_set)
        throw UsageError("--gamma/--beta apply only to --policy adaptive");
      if (opt.alpha_set) throw UsageError("--alpha applies only to --policy random-beta");
      if (!opt.lambda_set) throw UsageError("--policy fixed requires --lambda");
      break;
  }
  validate_config(opt.cfg);
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw DataError("cannot open for writing: " + path.string());
  f << text;
  if (!f) throw DataError("write failed: " + path.string());
}

void add_train_options(CLI::App* cmd, CliOptions& opt) {
  cmd->add_option("--dataset", opt.dataset, "Graph bundle directory")->required();
  cmd->add_option("--seed", opt.cfg.seed, "Master RNG seed (required; no hidden entropy)")
      ->required();
  cmd->add_option("--policy", opt.policy, "Mixing-ratio policy: adaptive, random-beta, fixed")
      ->capture_default_str();
  cmd->add_option("--gamma", opt.cfg.gamma, "Similarity sensitivity (adaptive)")
      ->capture_default_str()
      ->each([&opt](const std::string&) { opt.gamma_set = true; });
  cmd->add_option("--beta", opt.cfg.beta, "Uncertainty scaling (adaptive)")
      ->capture_default_str()
      ->each([&opt](const std::string&) { opt.beta_set = true; });
  cmd->add_option("--alpha", opt.cfg.alpha, "Beta-distribution shape (random-beta)")
      ->capture_default_str()
      ->each([&opt](const std::string&) { opt.alpha_set = true; });
  cmd->add_option("--lambda", opt.cfg.lambda_fixed, "Constant mixing ratio (fixed)")
      ->each([&opt](const std::string&) { opt.lambda_set = true; });
  cmd->add_option("--radius,-r", opt.cfg.radius, "Ego-subgraph radius")->capture_default_str();
  cmd->add_option("--mu", opt.cfg.mu, "Mixup loss weight; 0 trains vanilla")
      ->capture_default_str();
  cmd->add_option("--epsilon", opt.cfg.epsilon, "Pair shrink ratio; 0 trains vanilla")
      ->capture_default_str();
  cmd->add_option("--hidden", opt.cfg.hidden, "Hidden width")->capture_default_str();
  cmd->add_option("--dropout", opt.cfg.dropout, "Hidden dropout rate")->capture_default_str();
  cmd->add_option("--lr", opt.cfg.lr, "Adam learning rate")->capture_default_str();
  cmd->add_option("--weight-decay", opt.cfg.weight_decay, "L2 weight decay")
      ->capture_default_str();
  cmd->add_option("--max-epochs", opt.cfg.max_epochs, "Epoch cap")->capture_default_str();
  cmd->add_option("--patience", opt.cfg.patience, "Early-stopping patience (epochs)")
      ->capture_default_str();
  cmd->add_option("--jobs", opt.jobs, "Worker-thread cap")->capture_default_str();
  cmd->set_config("--config", "", "TOML-style config file; flags override it");
}

int cmd_train(CliOptions& opt) {
  fill_policy(opt);
  const Graph g = load_bundle(opt.dataset);
  const RunResult run = train(g, opt.cfg, opt.jobs);

  const std::string run_id = "train-" + g.name + "-s" + std::to_string(opt.cfg.seed);
  std::ostringstream csv;
  ResultsWriter w(csv);
  w.comment("command=train dataset=" + g.name + " seed=" + std::to_string(opt.cfg.seed));
  w.header();
  for (const EpochRecord& rec : run.trace) w.trace_row(run_id, opt.cfg, rec);
  w.summary_row(run_id, opt.cfg, run);
  write_text_file(opt.out_csv, csv.str());
  save_checkpoint(opt.checkpoint_out, run.model, opt.cfg.seed);

  std::cout << run_id << ": epochs=" << run.epochs_ran << " best_epoch=" << run.best_epoch
            << " val_acc=" << ResultsWriter::format_number(run.best_val_acc)
            << " test_acc=" << ResultsWriter::format_number(run.test_acc_at_best_val)
            << " confidence="
            << ResultsWriter::format_number(run.best_metrics.confidence.value_or(0.0)) << "\n";
  return 0;
}

int cmd_sweep(CliOptions& opt) {
  fill_policy(opt);
  const std::vector<double> values = parse_values(opt.values_spec);
  const std::vector<std::uint64_t> seeds = parse_seeds(opt.seeds_spec, opt.cfg.seed);
  const Graph g = load_bundle(opt.dataset);

  const std::vector<SweepRow> rows = sweep(g, opt.cfg, opt.dimension, values, seeds, opt.jobs);

  std::ostringstream csv;
  ResultsWriter w(csv);
  w.comment("command=sweep dataset=" + g.name + " dim=" + opt.dimension +
            " seeds=" + std::to_string(seeds.size()));
  w.header();
  for (const SweepRow& row : rows) {
    TrainConfig cell = opt.cfg;
    if (opt.dimension == "r") cell.radius = static_cast<std::uint32_t>(row.value);
    else if (opt.dimension == "gamma") cell.gamma = row.value;
    else if (opt.dimension == "beta") cell.beta = row.value;
    else if (opt.dimension == "mu") cell.mu = row.value;
    else if (opt.dimension == "epsilon") cell.epsilon = row.value;
    const std::string run_id =
        "sweep-" + opt.dimension + "-" + ResultsWriter::format_number(row.value);
    w.sweep_summary_row(run_id, cell, row);
  }
  write_text_file(opt.out_csv, csv.str());
  std::cout << "sweep " << opt.dimension << ": " << values.size() << " values x "
            << seeds.size() << " seeds -> " << rows.size() << " rows\n";
  return 0;
}

int cmd_casestudy(CliOptions& opt) {
  fill_policy(opt);
  if (opt.train_models == !opt.checkpoint_in.empty())
    throw UsageError("casestudy needs exactly one of --train or --checkpoint");
  const std::vector<double> grid = parse_values(opt.lambda_grid_spec);
  for (double v : grid) {
    if (!(v >= 0.0 && v <= 1.0)) throw UsageError("lambda grid values must be in [0, 1]");
  }
  if (opt.miss_pairs == 0) throw UsageError("--pairs must be >= 1");
  const Graph g = load_bundle(opt.dataset);

  // The same pair sample is reused across policies so their miss curves are
  // comparable.
  auto pair_rng = RngStream::derive(opt.cfg.seed, "miss-pairs");
  const std::vector<MixupPair> pairs = sample_distinct_label_pairs(g, opt.miss_pairs, pair_rng);

  std::ostringstream csv;
  ResultsWriter w(csv, grid);
  w.comment("command=casestudy dataset=" + g.name + " seed=" + std::to_string(opt.cfg.seed) +
            " miss_pairs=" + std::to_string(pairs.size()));
  w.header();

  if (!opt.checkpoint_in.empty()) {
    const GcnModel<float> model = load_checkpoint(opt.checkpoint_in);
    if (model.w0.rows != g.num_features || model.w1.cols != g.num_classes)
      throw DataError("checkpoint dimensions do not match the dataset");
    const std::vector<double> misses =
        miss_rate_experiment(model, g, pairs, grid, opt.cfg.radius);
    RunResult shim;
    shim.best_metrics = evaluate(model, g);
    const std::string run_id = "casestudy-" + g.name + "-checkpoint";
    w.casestudy_row(run_id, "checkpoint", opt.cfg, shim, misses);
    for (std::size_t k = 0; k < grid.size(); ++k)
      w.miss_row(run_id, "checkpoint", opt.cfg, grid[k], misses[k]);
    write_text_file(opt.out_csv, csv.str());
    std::cout << "casestudy (checkpoint): " << grid.size() << " lambda values\n";
    return 0;
  }

  struct Entry {
    std::string label;
    TrainConfig cfg;
  };
  std::vector<Entry> entries;
  for (PolicyKind kind : {PolicyKind::Adaptive, PolicyKind::RandomBeta, PolicyKind::Fixed}) {
    TrainConfig cfg = opt.cfg;
    cfg.policy = kind;
    entries.push_back({std::string(policy_name(kind)), cfg});
  }
  {
    TrainConfig vanilla = opt.cfg;
    vanilla.mu = 0.0;
    entries.push_back({"vanilla", vanilla});
  }

  for (const Entry& e : entries) {
    const RunResult run = train(g, e.cfg, opt.jobs);
    const std::string run_id = "casestudy-" + g.name + "-" + e.label;
    if (e.label == "vanilla") {
      w.casestudy_row(run_id, e.label, e.cfg, run, {});
    } else {
      const std::vector<double> misses =
          miss_rate_experiment(run.model, g, pairs, grid, e.cfg.radius);
      w.casestudy_row(run_id, e.label, e.cfg, run, misses);
      for (std::size_t k = 0; k < grid.size(); ++k)
        w.miss_row(run_id, e.label, e.cfg, grid[k], misses[k]);
    }
    std::cout << run_id
              << ": test_acc=" << ResultsWriter::format_number(run.test_acc_at_best_val)
              << "\n";
  }
  write_text_file(opt.out_csv, csv.str());
  return 0;
}

int cmd_gen_sbm(CliOptions& opt, const std::string& out_dir) {
  for (const auto& part : split(opt.blocks_spec, ',')) {
    if (part.empty()) continue;
    try {
      opt.sbm.block_sizes.push_back(static_cast<std::uint32_t>(std::stoul(part)));
    } catch (const std::exception&) {
      throw UsageError("cannot parse block size '" + part + "'");
    }
  }
  if (!(opt.sbm.p_in >= 0.0 && opt.sbm.p_in <= 1.0) ||
      !(opt.sbm.p_out >= 0.0 && opt.sbm.p_out <= 1.0))
    throw UsageError("edge probabilities must be in [0, 1]");

  const Graph g = generate_sbm(opt.sbm);
  save_bundle(g, out_dir);
  std::cout << "wrote " << out_dir << ": " << g.num_nodes << " nodes, "
            << g.adjacency.num_entries() / 2 << " edges, " << g.num_classes << " classes\n";
  return 0;
}

int cmd_validate_bundle(const std::string& dataset) {
  const Graph g = load_bundle(dataset);
  std::size_t train = 0, val = 0, test = 0;
  for (std::uint8_t m : g.masks) {
    if (m & kRoleTrain) ++train;
    if (m & kRoleVal) ++val;
    if (m & kRoleTest) ++test;
  }
  std::cout << "ok: " << g.name << " nodes=" << g.num_nodes
            << " edges=" << g.adjacency.num_entries() / 2 << " features=" << g.num_features
            << " classes=" << g.num_classes << " train/val/test=" << train << "/" << val << "/"
            << test << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Subgraph-centric graph mixup lab: adaptive-ratio mixup on a 2-layer GCN"};
  app.require_subcommand(1);

  CliOptions opt;
  std::string gen_out;

  CLI::App* train_cmd = app.add_subcommand("train", "Train one model and write CSV + checkpoint");
  add_train_options(train_cmd, opt);
  train_cmd->add_option("--out", opt.out_csv, "Results CSV path")->capture_default_str();
  train_cmd->add_option("--checkpoint-out", opt.checkpoint_out, "Checkpoint path")
      ->capture_default_str();

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Train values x seeds over one dimension");
  add_train_options(sweep_cmd, opt);
  sweep_cmd->add_option("--dim", opt.dimension, "One of: r, gamma, beta, mu, epsilon")
      ->required();
  sweep_cmd->add_option("--values", opt.values_spec, "Comma list or range a..b:step")
      ->required();
  sweep_cmd
      ->add_option("--seeds", opt.seeds_spec,
                   "Seed count (derived from --seed) or explicit comma list")
      ->required();
  sweep_cmd->add_option("--out", opt.out_csv, "Results CSV path")->capture_default_str();

  CLI::App* case_cmd =
      app.add_subcommand("casestudy", "Miss-rate-vs-lambda, confidence and gap per policy");
  add_train_options(case_cmd, opt);
  case_cmd->add_flag("--train", opt.train_models, "Train each policy, then measure");
  case_cmd->add_option("--checkpoint", opt.checkpoint_in, "Measure an existing checkpoint");
  case_cmd->add_option("--lambda-grid", opt.lambda_grid_spec, "Lambda grid for the miss table")
      ->capture_default_str();
  case_cmd->add_option("--pairs", opt.miss_pairs, "Number of distinct-label test pairs")
      ->capture_default_str();
  case_cmd->add_option("--out", opt.out_csv, "Results CSV path")->capture_default_str();

  CLI::App* gen_cmd = app.add_subcommand("gen-sbm", "Generate a stochastic block model bundle");
  gen_cmd->add_option("--blocks", opt.blocks_spec, "Comma list of block sizes")->required();
  gen_cmd->add_option("--p-in", opt.sbm.p_in, "Intra-block edge probability")
      ->capture_default_str();
  gen_cmd->add_option("--p-out", opt.sbm.p_out, "Inter-block edge probability")
      ->capture_default_str();
  gen_cmd->add_option("--feature-dim", opt.sbm.feature_dim, "Feature dimensionality")
      ->capture_default_str();
  gen_cmd->add_option("--noise", opt.sbm.feature_noise, "Per-node feature noise stddev")
      ->capture_default_str();
  gen_cmd->add_option("--name", opt.sbm.name, "Bundle name")->capture_default_str();
  gen_cmd->add_option("--seed", opt.sbm.seed, "Master RNG seed")->required();
  gen_cmd->add_option("--out", gen_out, "Bundle output directory")->required();

  CLI::App* val_cmd = app.add_subcommand("validate-bundle", "Load and validate a bundle");
  val_cmd->add_option("--dataset", opt.dataset, "Graph bundle directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (train_cmd->parsed()) return cmd_train(opt);
    if (sweep_cmd->parsed()) return cmd_sweep(opt);
    if (case_cmd->parsed()) return cmd_casestudy(opt);
    if (gen_cmd->parsed()) return cmd_gen_sbm(opt, gen_out);
    if (val_cmd->parsed()) return cmd_validate_bundle(opt.dataset);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
