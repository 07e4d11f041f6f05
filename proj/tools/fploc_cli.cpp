// Command-line front end: simulate, ingest, train, evaluate, augment,
// transfer, bench. Every run is deterministic given its seeds.

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fploc/csv_io.hpp"
#include "fploc/error.hpp"
#include "fploc/experiment.hpp"
#include "fploc/loaders.hpp"
#include "fploc/model_io.hpp"
#include "fploc/propagation.hpp"
#include "fploc/report.hpp"

namespace {

using namespace fploc;

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string item = text.substr(
        start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!item.empty()) seeds.push_back(std::stoull(item));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (seeds.empty()) throw InvalidInput("empty seed list");
  return seeds;
}

void write_reports(const std::string& prefix, const ExperimentReport& report) {
  write_report_text(prefix + ".txt", report);
  write_report_csv(prefix + ".csv", report);
  write_plot_data(prefix + "_plot.csv", report);
}

int cmd_simulate(const ExperimentSpec& spec, std::uint64_t seed,
                 const std::string& train_out, const std::string& test_out) {
  Room room;
  room.width = spec.room_width;
  room.height = spec.room_height;
  room.ap_positions = {{0.0, 0.0},
                       {spec.room_width, 0.0},
                       {0.0, spec.room_height},
                       {spec.room_width, spec.room_height}};
  const Grid grid = make_square_grid(room, spec.grid_spacing);

  Rng db_rng = Rng::derive(seed, 1);
  const std::vector<RawMeasurementRow> rows =
      simulate_database(room, grid, spec.meas_per_ap, spec.path_loss, db_rng);
  write_raw_csv(train_out, rows);
  std::cout << "wrote " << rows.size() << " training points to " << train_out << '\n';

  if (!test_out.empty()) {
    Rng test_rng = Rng::derive(seed, 2);
    const std::vector<RawMeasurementRow> test =
        simulate_test_set(room, spec.n_test, spec.meas_per_ap, spec.path_loss,
                          test_rng);
    write_raw_csv(test_out, test);
    std::cout << "wrote " << test.size() << " test points to " << test_out << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fingerprinting localization toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string seed_override;

  // simulate
  auto* simulate = app.add_subcommand("simulate", "emit a simulated corpus as CSV");
  std::string sim_train_out = "corpus.csv";
  std::string sim_test_out;
  simulate->add_option("--config", config_path, "experiment config (key = value)");
  simulate->add_option("--seed", seed_override, "seed override");
  simulate->add_option("--out", sim_train_out, "training corpus output path");
  simulate->add_option("--test-out", sim_test_out, "test corpus output path");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "convert a public dataset to CSV");
  std::string ingest_kind;
  std::string ingest_train, ingest_test, ingest_in;
  std::string ingest_out_train = "train.csv", ingest_out_test = "test.csv";
  int ingest_building = 0, ingest_floor = 0;
  ingest->add_option("kind", ingest_kind, "uji or tkn")->required();
  ingest->add_option("--train", ingest_train, "source training file (uji)");
  ingest->add_option("--test", ingest_test, "source validation file (uji)");
  ingest->add_option("--in", ingest_in, "source export (tkn)");
  ingest->add_option("--building", ingest_building, "building id (uji)");
  ingest->add_option("--floor", ingest_floor, "floor id (uji)");
  ingest->add_option("--out-train", ingest_out_train, "canonical training CSV");
  ingest->add_option("--out-test", ingest_out_test, "canonical test CSV");

  // train
  auto* train_cmd = app.add_subcommand("train", "train an engine from a config");
  std::string model_out = "model.fploc";
  train_cmd->add_option("--config", config_path, "experiment config")->required();
  train_cmd->add_option("--seed", seed_override, "seed override (single value)");
  train_cmd->add_option("--out", model_out, "model output path");

  // evaluate
  auto* eval_cmd = app.add_subcommand("evaluate", "evaluate a model on a test CSV");
  std::string model_in, eval_test, report_prefix = "report";
  std::uint64_t eval_seed = 1;
  int eval_rows_per_point = 1;
  eval_cmd->add_option("--model", model_in, "trained model file")->required();
  eval_cmd->add_option("--test", eval_test, "tidy test CSV")->required();
  eval_cmd->add_option("--seed", eval_seed, "resampling seed");
  eval_cmd->add_option("--rows-per-point", eval_rows_per_point,
                       "fingerprints per test point");
  eval_cmd->add_option("--report-prefix", report_prefix, "report file prefix");

  // augment
  auto* augment_cmd = app.add_subcommand("augment", "permutation-augment a DB CSV");
  std::string aug_in, aug_out = "augmented.csv";
  int aug_times = 1, aug_width = 1;
  std::uint64_t aug_seed = 1;
  augment_cmd->add_option("--in", aug_in, "wide fingerprint CSV")->required();
  augment_cmd->add_option("--out", aug_out, "output CSV");
  augment_cmd->add_option("--times", aug_times, "augmentation factor")->required();
  augment_cmd->add_option("--width", aug_width, "fingerprint width");
  augment_cmd->add_option("--seed", aug_seed, "permutation seed");

  // transfer
  auto* transfer_cmd =
      app.add_subcommand("transfer", "fine-tune a trained network on new data");
  std::string tr_model_in, tr_data, tr_model_out = "finetuned.fploc";
  std::uint64_t tr_seed = 1;
  double tr_subset = 1.0;
  transfer_cmd->add_option("--model", tr_model_in, "pretrained model")->required();
  transfer_cmd->add_option("--data", tr_data, "tidy CSV of the new environment")
      ->required();
  transfer_cmd->add_option("--config", config_path, "experiment config");
  transfer_cmd->add_option("--seed", tr_seed, "run seed");
  transfer_cmd->add_option("--subset", tr_subset,
                           "fraction of new points used (0,1]");
  transfer_cmd->add_option("--out", tr_model_out, "fine-tuned model output");

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "run an experiment config");
  std::string bench_prefix = "report";
  bool bench_check = false;
  bench_cmd->add_option("--config", config_path, "experiment config")->required();
  bench_cmd->add_option("--seed", seed_override, "seed list override (comma separated)");
  bench_cmd->add_option("--out-prefix", bench_prefix, "report file prefix");
  bench_cmd->add_flag("--check", bench_check, "verify the config's tolerance band");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      ExperimentSpec spec;
      if (!config_path.empty()) spec = parse_experiment_file(config_path);
      const std::uint64_t seed =
          seed_override.empty() ? spec.seeds.front() : parse_seed_list(seed_override)[0];
      return cmd_simulate(spec, seed, sim_train_out, sim_test_out);
    }

    if (ingest->parsed()) {
      if (ingest_kind == "uji") {
        if (ingest_train.empty())
          throw InvalidInput("ingest uji needs --train <UJIIndoorLoc csv>");
        const UjiData data = load_ujiindoorloc(ingest_train, ingest_test,
                                               ingest_building, ingest_floor);
        write_db_csv(ingest_out_train, data.train);
        std::cout << "wrote " << data.train.rows.size() << " rows ("
                  << data.train.ap_ids.size() << " anchors) to " << ingest_out_train
                  << '\n';
        if (!data.test.empty()) {
          write_db_csv(ingest_out_test, data.test);
          std::cout << "wrote " << data.test.rows.size() << " rows to "
                    << ingest_out_test << '\n';
        }
      } else if (ingest_kind == "tkn") {
        if (ingest_in.empty()) throw InvalidInput("ingest tkn needs --in <export csv>");
        const TknData data = load_tkn(ingest_in);
        write_raw_csv(ingest_out_train, data.train);
        std::cout << "wrote " << data.train.size() << " training points to "
                  << ingest_out_train << '\n';
        if (!data.test.empty()) {
          write_raw_csv(ingest_out_test, data.test);
          std::cout << "wrote " << data.test.size() << " test points to "
                    << ingest_out_test << '\n';
        }
      } else {
        throw InvalidInput("unknown dataset kind '" + ingest_kind + "'");
      }
      return 0;
    }

    if (train_cmd->parsed()) {
      ExperimentSpec spec = parse_experiment_file(config_path);
      const std::uint64_t seed =
          seed_override.empty() ? spec.seeds.front() : parse_seed_list(seed_override)[0];
      const ModelBundle bundle = train_bundle(spec, seed);
      save_model(model_out, bundle);
      std::cout << "trained " << bundle.engine << " model written to " << model_out
                << '\n';
      return 0;
    }

    if (eval_cmd->parsed()) {
      const ModelBundle bundle = load_model(model_in);
      const std::vector<RawMeasurementRow> rows = read_raw_csv(eval_test);
      ExperimentReport report;
      report.config_echo = {{"model", model_in}, {"test", eval_test}};
      SeedResult result;
      result.seed = eval_seed;
      result.errors = evaluate_bundle(bundle, rows, eval_rows_per_point, eval_seed);
      report.per_seed.push_back(std::move(result));
      write_reports(report_prefix, report);
      std::cout << render_report_text(report);
      return 0;
    }

    if (augment_cmd->parsed()) {
      FingerprintDb db = read_db_csv(aug_in, aug_width);
      Rng rng(aug_seed);
      const FingerprintDb out = augment_permute(db, aug_times, rng);
      write_db_csv(aug_out, out);
      std::cout << "wrote " << out.rows.size() << " rows to " << aug_out << '\n';
      return 0;
    }

    if (transfer_cmd->parsed()) {
      ModelBundle bundle = load_model(tr_model_in);
      if (!bundle.has_mlp)
        throw InvalidInput("transfer needs a model with a trained network");
      ExperimentSpec spec;
      if (!config_path.empty()) spec = parse_experiment_file(config_path);

      std::vector<RawMeasurementRow> rows = read_raw_csv(tr_data);
      if (!(tr_subset > 0.0 && tr_subset <= 1.0))
        throw InvalidInput("--subset must be in (0,1]");
      if (tr_subset < 1.0) {
        Rng subset_rng = Rng::derive(tr_seed, 21);
        subset_rng.shuffle(rows);
        const std::size_t keep = std::max<std::size_t>(
            2, static_cast<std::size_t>(tr_subset * static_cast<double>(rows.size())));
        rows.resize(std::min(keep, rows.size()));
      }

      FingerprintDb db;
      if (bundle.fingerprint_mode == "average") {
        db = average_fingerprint(rows, bundle.default_dbm, &bundle.ap_ids);
      } else {
        Rng rng = Rng::derive(tr_seed, 3);
        db = resample_fixed_width(rows, bundle.width, bundle.default_dbm, rng,
                                  spec.rows_per_point, &bundle.ap_ids);
      }
      db.norm = bundle.norm;
      for (FingerprintRow& row : db.rows)
        row.features = apply_normalization(bundle.norm, row.features);

      Rng split_rng = Rng::derive(tr_seed, 5);
      auto [tr, val] = split_train_validation(db, spec.train_fraction, split_rng);
      TrainConfig cfg = spec.nn;
      cfg.seed = Rng::derive(tr_seed, 7).next_u64();
      const TrainHistory history = fine_tune(bundle.mlp, tr, val, cfg);
      save_model(tr_model_out, bundle);
      std::cout << "fine-tuned over " << history.train_loss.size()
                << " epochs (stop: " << history.stop_reason << "), best val "
                << (history.best_epoch >= 0
                        ? format_double(history.val_error_m[history.best_epoch])
                        : "n/a")
                << " m; written to " << tr_model_out << '\n';
      return 0;
    }

    if (bench_cmd->parsed()) {
      ExperimentSpec spec = parse_experiment_file(config_path);
      if (!seed_override.empty()) spec.seeds = parse_seed_list(seed_override);
      const ExperimentReport report = run_experiment(spec);
      write_reports(bench_prefix, report);
      std::cout << render_report_text(report);
      std::printf("\nwall clock: %.1f s\n", report.wall_seconds);
      if (bench_check) {
        if (!check_report(spec, report)) {
          const ErrorStats pooled = report.pooled();
          std::cout << "check FAILED: pooled mean " << format_double(pooled.mean)
                    << " outside band\n";
          return 1;
        }
        std::cout << "check passed\n";
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
