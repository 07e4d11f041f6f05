// Drives the installed binary end to end through std::system.

#include <sys/wait.h>

#include <gtest/gtest.h>

#include <cstdlib>
#include <string>

#include "fploc/csv_io.hpp"
#include "fploc/model_io.hpp"
#include "fploc/report.hpp"
#include "test_util.hpp"

namespace fploc {
namespace {

using test::slurp;
using test::spit;
using test::TempDir;

const std::string kDataDir = FPLOC_TEST_DATA_DIR;

const char* kEdConfig =
    "dataset = simulated\n"
    "room_width = 4\n"
    "room_height = 2\n"
    "grid_spacing = 1\n"
    "meas_per_ap = 2\n"
    "n_test = 6\n"
    "fingerprint = resample\n"
    "width = 1\n"
    "rows_per_point = 1\n"
    "test_rows_per_point = 1\n"
    "engine = ed_knn\n"
    "k = 1\n"
    "seeds = 9\n";

const char* kNnConfig =
    "dataset = simulated\n"
    "room_width = 4\n"
    "room_height = 2\n"
    "grid_spacing = 1\n"
    "meas_per_ap = 2\n"
    "n_test = 6\n"
    "fingerprint = resample\n"
    "width = 1\n"
    "rows_per_point = 2\n"
    "engine = nn\n"
    "optimizer = adam\n"
    "batch_size = 8\n"
    "max_epochs = 1\n"
    "patience = 1\n"
    "seeds = 9\n";

struct CmdResult {
  int status = -1;
  std::string out;
  std::string err;
};

class CliTest : public ::testing::Test {
 protected:
  CliTest() : tmp_("cli") {}

  std::string path(const std::string& name) { return tmp_.file(name); }

  CmdResult run(const std::string& args) {
    const std::string out = path("stdout_" + std::to_string(run_id_));
    const std::string err = path("stderr_" + std::to_string(run_id_));
    ++run_id_;
    const std::string cmd =
        std::string(FPLOC_CLI_PATH) + " " + args + " >" + out + " 2>" + err;
    const int rc = std::system(cmd.c_str());
    CmdResult result;
    result.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    result.out = slurp(out);
    result.err = slurp(err);
    return result;
  }

  TempDir tmp_;
  int run_id_ = 0;
};

TEST_F(CliTest, RequiresASubcommand) {
  EXPECT_NE(run("").status, 0);
}

TEST_F(CliTest, SimulateIsDeterministicPerSeed) {
  const std::string cfg = path("sim.cfg");
  spit(cfg, kEdConfig);

  const CmdResult first = run("simulate --config " + cfg + " --out " + path("a.csv") +
                              " --test-out " + path("at.csv"));
  ASSERT_EQ(first.status, 0) << first.err;
  EXPECT_NE(first.out.find("wrote 8 training points"), std::string::npos);
  EXPECT_NE(first.out.find("wrote 6 test points"), std::string::npos);

  // The config's first seed and an explicit --seed 9 are the same stream.
  const CmdResult second = run("simulate --config " + cfg + " --seed 9 --out " +
                               path("b.csv") + " --test-out " + path("bt.csv"));
  ASSERT_EQ(second.status, 0) << second.err;
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
  EXPECT_EQ(slurp(path("at.csv")), slurp(path("bt.csv")));

  const CmdResult third =
      run("simulate --config " + cfg + " --seed 10 --out " + path("c.csv"));
  ASSERT_EQ(third.status, 0) << third.err;
  EXPECT_NE(slurp(path("a.csv")), slurp(path("c.csv")));
}

TEST_F(CliTest, TrainEvaluateRoundTrip) {
  const std::string cfg = path("ed.cfg");
  spit(cfg, kEdConfig);
  ASSERT_EQ(run("simulate --config " + cfg + " --out " + path("train.csv") +
                " --test-out " + path("test.csv"))
                .status,
            0);

  const std::string model = path("ed.fploc");
  const CmdResult trained =
      run("train --config " + cfg + " --out " + model);
  ASSERT_EQ(trained.status, 0) << trained.err;
  EXPECT_NE(trained.out.find("trained ed_knn model"), std::string::npos);

  const std::string prefix = path("rep");
  const CmdResult eval = run("evaluate --model " + model + " --test " +
                             path("test.csv") + " --seed 3 --report-prefix " + prefix);
  ASSERT_EQ(eval.status, 0) << eval.err;
  EXPECT_NE(eval.out.find("pooled over 1 seed(s):"), std::string::npos);

  const auto rows = read_report_csv(prefix + ".csv");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].label, "seed3");
  EXPECT_EQ(rows[0].n, 6);
  EXPECT_EQ(rows[1].label, "pooled");

  // Re-running the evaluation reproduces the report files byte for byte.
  const std::string again = path("rep2");
  ASSERT_EQ(run("evaluate --model " + model + " --test " + path("test.csv") +
                " --seed 3 --report-prefix " + again)
                .status,
            0);
  EXPECT_EQ(slurp(prefix + ".txt"), slurp(again + ".txt"));
  EXPECT_EQ(slurp(prefix + ".csv"), slurp(again + ".csv"));
  EXPECT_EQ(slurp(prefix + "_plot.csv"), slurp(again + "_plot.csv"));

  // More fingerprints per test point mean more errors in the report.
  const std::string wide = path("rep3");
  ASSERT_EQ(run("evaluate --model " + model + " --test " + path("test.csv") +
                " --rows-per-point 2 --report-prefix " + wide)
                .status,
            0);
  EXPECT_EQ(read_report_csv(wide + ".csv")[0].n, 12);
}

TEST_F(CliTest, AugmentExpandsTheDatabase) {
  const std::string in = path("db.csv");
  spit(in,
       "x,y,class,f_1,f_2,f_3,f_4\n"
       "0,0,0,1,2,3,4\n"
       "1,0,1,5,6,7,8\n");
  const CmdResult r = run("augment --in " + in + " --times 2 --width 2 --out " +
                          path("aug.csv"));
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_NE(r.out.find("wrote 6 rows"), std::string::npos);
  EXPECT_EQ(read_db_csv(path("aug.csv"), 2).rows.size(), 6u);
}

TEST_F(CliTest, BenchCheckGatesTheExitCode) {
  const std::string pass_cfg = path("pass.cfg");
  spit(pass_cfg, std::string(kEdConfig) +
                     "check_mean_min = 0\n"
                     "check_mean_max = 100\n");
  const CmdResult pass =
      run("bench --config " + pass_cfg + " --out-prefix " + path("p"));
  ASSERT_EQ(pass.status, 0) << pass.err;
  EXPECT_NE(pass.out.find("wall clock:"), std::string::npos);

  const CmdResult checked =
      run("bench --config " + pass_cfg + " --check --out-prefix " + path("q"));
  EXPECT_EQ(checked.status, 0) << checked.err;
  EXPECT_NE(checked.out.find("check passed"), std::string::npos);

  // Identical runs leave identical files; timing stays on the console.
  EXPECT_EQ(slurp(path("p.txt")), slurp(path("q.txt")));
  EXPECT_EQ(slurp(path("p.csv")), slurp(path("q.csv")));
  EXPECT_EQ(slurp(path("p_plot.csv")), slurp(path("q_plot.csv")));

  const std::string fail_cfg = path("fail.cfg");
  spit(fail_cfg, std::string(kEdConfig) +
                     "check_mean_min = 90\n"
                     "check_mean_max = 100\n");
  const CmdResult failed =
      run("bench --config " + fail_cfg + " --check --out-prefix " + path("r"));
  EXPECT_EQ(failed.status, 1);
  EXPECT_NE(failed.out.find("check FAILED"), std::string::npos);

  // A seed override widens the report.
  const CmdResult two = run("bench --config " + pass_cfg + " --seed 3,4 --out-prefix " +
                            path("s"));
  ASSERT_EQ(two.status, 0) << two.err;
  const auto rows = read_report_csv(path("s.csv"));
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].label, "seed3");
  EXPECT_EQ(rows[1].label, "seed4");
}

TEST_F(CliTest, IngestConvertsBothPublicFormats) {
  const CmdResult uji = run("ingest uji --train " + kDataDir +
                            "/uji_mini_train.csv --test " + kDataDir +
                            "/uji_mini_test.csv --building 0 --floor 0 --out-train " +
                            path("u_train.csv") + " --out-test " + path("u_test.csv"));
  ASSERT_EQ(uji.status, 0) << uji.err;
  EXPECT_NE(uji.out.find("wrote 3 rows (2 anchors)"), std::string::npos);
  EXPECT_EQ(read_db_csv(path("u_train.csv"), 1).rows.size(), 3u);
  EXPECT_EQ(read_db_csv(path("u_test.csv"), 1).rows.size(), 2u);

  const CmdResult tkn = run("ingest tkn --in " + kDataDir +
                            "/tkn_mini.csv --out-train " + path("t_train.csv") +
                            " --out-test " + path("t_test.csv"));
  ASSERT_EQ(tkn.status, 0) << tkn.err;
  EXPECT_EQ(read_raw_csv(path("t_train.csv")).size(), 2u);
  EXPECT_EQ(read_raw_csv(path("t_test.csv")).size(), 1u);

  const CmdResult bad = run("ingest wigle --in " + path("nothing.csv"));
  EXPECT_EQ(bad.status, 1);
  EXPECT_NE(bad.err.find("error: unknown dataset kind"), std::string::npos);
}

TEST_F(CliTest, TransferFineTunesOnlyNetworks) {
  const std::string ed_cfg = path("ed.cfg");
  const std::string nn_cfg = path("nn.cfg");
  spit(ed_cfg, kEdConfig);
  spit(nn_cfg, kNnConfig);
  ASSERT_EQ(run("simulate --config " + ed_cfg + " --out " + path("env.csv")).status, 0);

  const std::string ed_model = path("ed.fploc");
  ASSERT_EQ(run("train --config " + ed_cfg + " --out " + ed_model).status, 0);
  const CmdResult rejected = run("transfer --model " + ed_model + " --data " +
                                 path("env.csv") + " --config " + nn_cfg);
  EXPECT_EQ(rejected.status, 1);
  EXPECT_NE(rejected.err.find("error: transfer needs a model with a trained network"),
            std::string::npos);

  const std::string nn_model = path("nn.fploc");
  const CmdResult trained = run("train --config " + nn_cfg + " --out " + nn_model);
  ASSERT_EQ(trained.status, 0) << trained.err;

  const std::string tuned = path("tuned.fploc");
  const CmdResult transfer =
      run("transfer --model " + nn_model + " --data " + path("env.csv") +
          " --config " + nn_cfg + " --subset 0.9 --seed 2 --out " + tuned);
  ASSERT_EQ(transfer.status, 0) << transfer.err;
  EXPECT_NE(transfer.out.find("fine-tuned over"), std::string::npos);
  EXPECT_TRUE(load_model(tuned).has_mlp);
}

TEST_F(CliTest, SurfacesConfigErrors) {
  const CmdResult missing =
      run("train --config " + path("absent.cfg") + " --out " + path("m.fploc"));
  EXPECT_EQ(missing.status, 1);
  EXPECT_NE(missing.err.find("error:"), std::string::npos);

  const std::string bad_cfg = path("bad.cfg");
  spit(bad_cfg, "dataset = simulated\nwibble = 3\n");
  const CmdResult unknown =
      run("train --config " + bad_cfg + " --out " + path("m.fploc"));
  EXPECT_EQ(unknown.status, 1);
  EXPECT_NE(unknown.err.find("unknown key"), std::string::npos);
  EXPECT_NE(unknown.err.find("bad.cfg:2"), std::string::npos);
}

}  // namespace
}  // namespace fploc
