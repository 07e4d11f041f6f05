#include "fploc/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "fploc/csv_io.hpp"
#include "fploc/error.hpp"
#include "fploc/loaders.hpp"

namespace fploc {

namespace {

// Stream tags for Rng::derive: one independent stream per pipeline stage.
enum StreamTag : std::uint64_t {
  kSimDb = 1,
  kSimTest = 2,
  kResample = 3,
  kAugment = 4,
  kSplit = 5,
  kInit = 6,
  kTrain = 7,
  kTestResample = 8,
  kAeInit = 9,
  kAeTrain = 10,
};

bool is_engine(const std::string& name) {
  return name == "ed_knn" || name == "svm" || name == "nn" || name == "ae_ed" ||
         name == "ae_svm";
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

NormMode norm_from(const std::string& name, const std::string& file, std::size_t line) {
  if (name == "none") return NormMode::none;
  if (name == "minmax") return NormMode::minmax;
  if (name == "zscore") return NormMode::zscore;
  throw ParseError(file, line, "unknown normalization '" + name + "'");
}

const char* norm_name(NormMode mode) {
  switch (mode) {
    case NormMode::none:
      return "none";
    case NormMode::minmax:
      return "minmax";
    case NormMode::zscore:
      return "zscore";
  }
  return "?";
}

Optimizer optimizer_from(const std::string& name, const std::string& file,
                         std::size_t line) {
  if (name == "sgd") return Optimizer::sgd;
  if (name == "momentum") return Optimizer::momentum;
  if (name == "adagrad") return Optimizer::adagrad;
  if (name == "rmsprop") return Optimizer::rmsprop;
  if (name == "adam") return Optimizer::adam;
  throw ParseError(file, line, "unknown optimizer '" + name + "'");
}

const char* optimizer_name(Optimizer o) {
  switch (o) {
    case Optimizer::sgd:
      return "sgd";
    case Optimizer::momentum:
      return "momentum";
    case Optimizer::adagrad:
      return "adagrad";
    case Optimizer::rmsprop:
      return "rmsprop";
    case Optimizer::adam:
      return "adam";
  }
  return "?";
}

Penalty penalty_from(const std::string& name, const std::string& file,
                     std::size_t line) {
  if (name == "none") return Penalty::none;
  if (name == "l1") return Penalty::l1;
  if (name == "l2") return Penalty::l2;
  throw ParseError(file, line, "unknown penalty '" + name + "'");
}

const char* penalty_name(Penalty p) {
  switch (p) {
    case Penalty::none:
      return "none";
    case Penalty::l1:
      return "l1";
    case Penalty::l2:
      return "l2";
  }
  return "?";
}

Room room_of(const ExperimentSpec& spec) {
  Room room;
  room.width = spec.room_width;
  room.height = spec.room_height;
  room.ap_positions = {{0.0, 0.0},
                       {spec.room_width, 0.0},
                       {0.0, spec.room_height},
                       {spec.room_width, spec.room_height}};
  return room;
}

double corpus_min_dbm(const std::vector<RawMeasurementRow>& rows) {
  double lo = std::numeric_limits<double>::infinity();
  for (const RawMeasurementRow& row : rows)
    for (const auto& [ap, values] : row.rssi_by_ap)
      for (double v : values) lo = std::min(lo, v);
  if (std::isinf(lo)) throw InvalidInput("corpus has no measurements");
  return lo;
}

double resolve_default_dbm(const ExperimentSpec& spec,
                           const std::vector<RawMeasurementRow>& train_rows) {
  if (!std::isnan(spec.default_dbm)) return spec.default_dbm;
  if (spec.dataset == "simulated") return corpus_min_dbm(train_rows) - 1.0;
  return -110.0;
}

// Class labels from distinct row locations, ranked lexicographically.
void assign_location_labels(FingerprintDb& db) {
  std::map<std::pair<double, double>, int> label_of;
  for (const FingerprintRow& row : db.rows)
    label_of.emplace(std::make_pair(row.location.x, row.location.y), 0);
  int next = 0;
  for (auto& [loc, label] : label_of) label = next++;
  for (FingerprintRow& row : db.rows)
    row.class_label = label_of.at({row.location.x, row.location.y});
}

TrainConfig ae_config(const ExperimentSpec& spec, std::uint64_t seed) {
  TrainConfig cfg;
  cfg.optimizer = Optimizer::sgd;
  cfg.alpha = spec.ae_alpha;
  cfg.batch_size = spec.ae_batch;
  cfg.max_epochs = spec.ae_epochs;
  cfg.patience = spec.ae_patience;
  cfg.penalty = Penalty::none;
  cfg.lambda_r = 0.0;
  cfg.seed = Rng::derive(seed, kAeTrain).next_u64();
  return cfg;
}

// Shared engine construction once the training database exists.
void fit_engine(ModelBundle& bundle, const ExperimentSpec& spec, FingerprintDb db,
                std::uint64_t seed, const Grid* grid) {
  if (spec.engine == "svm" || spec.engine == "ae_svm") {
    if (grid != nullptr)
      assign_voronoi_labels(db, *grid);
    else if (db.rows.front().class_label < 0)
      assign_location_labels(db);
  }
  // The regression net augments after the split (validation stays authentic);
  // everything else trains on the full augmented database.
  if (spec.augment_times > 0 && spec.engine != "nn") {
    Rng rng = Rng::derive(seed, kAugment);
    db = augment_permute(db, spec.augment_times, rng);
  }

  if (spec.engine == "ae_ed" || spec.engine == "ae_svm") {
    Rng init_rng = Rng::derive(seed, kAeInit);
    MlpModel ae = build_autoencoder(db.dim(), spec.code_dim, init_rng);
    Rng split_rng = Rng::derive(seed, kSplit);
    auto [tr, val] = split_train_validation(db, spec.train_fraction, split_rng);
    const Eigen::MatrixXd xtr = features_matrix(tr);
    const Eigen::MatrixXd xval = features_matrix(val);
    train_on_matrices(ae, xtr, xtr, xval, xval, ae_config(spec, seed),
                      ValMetric::mse);
    bundle.autoencoder = ae;
    bundle.has_ae = true;
    db = encode_db(ae, db);  // labels and locations survive encoding
  }

  if (spec.engine == "ed_knn" || spec.engine == "ae_ed") {
    bundle.knn_cfg = spec.knn;
    bundle.knn_db = std::move(db);
    bundle.has_knn_db = true;
  } else if (spec.engine == "svm" || spec.engine == "ae_svm") {
    KernelSpec kernel;
    kernel.kind = KernelKind::rbf;
    kernel.gamma_k = spec.svm_gamma;
    SmoOptions opts;
    opts.tol = spec.smo_tol;
    bundle.ovo = ovo_train(db, spec.svm_c, kernel, opts);
    bundle.k_top = spec.k_top;
    bundle.has_ovo = true;
  } else if (spec.engine == "nn") {
    Rng split_rng = Rng::derive(seed, kSplit);
    auto [tr, val] = split_train_validation(db, spec.train_fraction, split_rng);
    if (spec.augment_times > 0) {
      Rng rng = Rng::derive(seed, kAugment);
      tr = augment_permute(tr, spec.augment_times, rng);
    }
    Rng init_rng = Rng::derive(seed, kInit);
    MlpModel net = build_regression_net(db.dim(), init_rng);
    TrainConfig cfg = spec.nn;
    cfg.seed = Rng::derive(seed, kTrain).next_u64();
    train(net, tr, val, cfg);
    bundle.mlp = std::move(net);
    bundle.has_mlp = true;
  } else {
    throw InvalidInput("unknown engine '" + spec.engine + "'");
  }
}

}  // namespace

void ExperimentSpec::validate() const {
  if (dataset != "simulated" && dataset != "uji" && dataset != "tkn")
    throw InvalidInput("unknown dataset '" + dataset + "'");
  if (!is_engine(engine)) throw InvalidInput("unknown engine '" + engine + "'");
  if (fingerprint != "average" && fingerprint != "resample")
    throw InvalidInput("fingerprint must be average or resample");
  if (seeds.empty()) throw InvalidInput("seed list must be nonempty");
  if (width < 1) throw InvalidInput("width must be >= 1");
  if (rows_per_point < 1 || test_rows_per_point < 1)
    throw InvalidInput("rows_per_point must be >= 1");
  if (augment_times < 0) throw InvalidInput("augment_times must be >= 0");
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw InvalidInput("train_fraction must be in (0,1)");
  if (dataset == "simulated") {
    path_loss.validate();
    if (!(room_width > 0.0 && room_height > 0.0))
      throw InvalidInput("room dimensions must be positive");
    if (!(grid_spacing > 0.0)) throw InvalidInput("grid_spacing must be positive");
    if (meas_per_ap < 1) throw InvalidInput("meas_per_ap must be >= 1");
    if (n_test < 1) throw InvalidInput("n_test must be >= 1");
  }
  if (dataset == "uji" && uji_train.empty())
    throw InvalidInput("uji dataset needs uji_train");
  if (dataset == "tkn" && tkn_path.empty())
    throw InvalidInput("tkn dataset needs tkn_path");
  nn.validate();
  if (engine == "ae_ed" || engine == "ae_svm") {
    if (code_dim < 1) throw InvalidInput("code_dim must be >= 1");
    if (!(ae_alpha > 0.0)) throw InvalidInput("ae_alpha must be > 0");
    if (ae_batch < 1 || ae_epochs < 0 || ae_patience < 1)
      throw InvalidInput("autoencoder training parameters out of range");
  }
}

ExperimentSpec parse_experiment_text(const std::string& text, const std::string& name) {
  ExperimentSpec spec;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ParseError(name, line_no, "expected key = value");
    const std::string key = trim(std::string_view(stripped).substr(0, eq));
    const std::string value = trim(std::string_view(stripped).substr(eq + 1));
    if (key.empty()) throw ParseError(name, line_no, "empty key");

    const auto as_double = [&] { return parse_double(value, name, line_no); };
    const auto as_int = [&] {
      return static_cast<int>(parse_long(value, name, line_no));
    };

    if (key == "dataset") {
      spec.dataset = value;
    } else if (key == "room_width") {
      spec.room_width = as_double();
    } else if (key == "room_height") {
      spec.room_height = as_double();
    } else if (key == "grid_spacing") {
      spec.grid_spacing = as_double();
    } else if (key == "meas_per_ap") {
      spec.meas_per_ap = as_int();
    } else if (key == "n_test") {
      spec.n_test = as_int();
    } else if (key == "ptx_dbm") {
      spec.path_loss.ptx_dbm = as_double();
    } else if (key == "l0_db") {
      spec.path_loss.l0_db = as_double();
    } else if (key == "gamma_pl") {
      spec.path_loss.gamma_pl = as_double();
    } else if (key == "lc_db") {
      spec.path_loss.lc_db = as_double();
    } else if (key == "lw_db") {
      spec.path_loss.lw_db = as_double();
    } else if (key == "k_walls") {
      spec.path_loss.k_walls = as_int();
    } else if (key == "lambda_exp") {
      spec.path_loss.lambda_exp = as_double();
    } else if (key == "uji_train") {
      spec.uji_train = value;
    } else if (key == "uji_test") {
      spec.uji_test = value;
    } else if (key == "building") {
      spec.building = as_int();
    } else if (key == "floor") {
      spec.floor = as_int();
    } else if (key == "tkn_path") {
      spec.tkn_path = value;
    } else if (key == "fingerprint") {
      spec.fingerprint = value;
    } else if (key == "width") {
      spec.width = as_int();
    } else if (key == "rows_per_point") {
      spec.rows_per_point = as_int();
    } else if (key == "test_rows_per_point") {
      spec.test_rows_per_point = as_int();
    } else if (key == "normalization") {
      spec.normalization = norm_from(value, name, line_no);
    } else if (key == "augment_times") {
      spec.augment_times = as_int();
    } else if (key == "default_dbm") {
      if (value != "auto") spec.default_dbm = as_double();
    } else if (key == "engine") {
      spec.engine = value;
    } else if (key == "k") {
      spec.knn.k = as_int();
    } else if (key == "weighting") {
      if (value == "uniform")
        spec.knn.weighting = KnnWeighting::uniform;
      else if (value == "inverse_distance")
        spec.knn.weighting = KnnWeighting::inverse_distance;
      else
        throw ParseError(name, line_no, "unknown weighting '" + value + "'");
    } else if (key == "svm_c") {
      spec.svm_c = as_double();
    } else if (key == "svm_gamma") {
      spec.svm_gamma = as_double();
    } else if (key == "k_top") {
      spec.k_top = as_int();
    } else if (key == "smo_tol") {
      spec.smo_tol = as_double();
    } else if (key == "optimizer") {
      spec.nn.optimizer = optimizer_from(value, name, line_no);
    } else if (key == "alpha") {
      spec.nn.alpha = as_double();
    } else if (key == "rho") {
      spec.nn.rho = as_double();
    } else if (key == "gamma_d") {
      spec.nn.gamma_d = as_double();
    } else if (key == "eps") {
      spec.nn.eps = as_double();
    } else if (key == "batch_size") {
      spec.nn.batch_size = as_int();
    } else if (key == "max_epochs") {
      spec.nn.max_epochs = as_int();
    } else if (key == "patience") {
      spec.nn.patience = as_int();
    } else if (key == "penalty") {
      spec.nn.penalty = penalty_from(value, name, line_no);
    } else if (key == "lambda_r") {
      spec.nn.lambda_r = as_double();
    } else if (key == "train_fraction") {
      spec.train_fraction = as_double();
    } else if (key == "code_dim") {
      spec.code_dim = as_int();
    } else if (key == "ae_alpha") {
      spec.ae_alpha = as_double();
    } else if (key == "ae_batch") {
      spec.ae_batch = as_int();
    } else if (key == "ae_epochs") {
      spec.ae_epochs = as_int();
    } else if (key == "ae_patience") {
      spec.ae_patience = as_int();
    } else if (key == "seeds") {
      spec.seeds.clear();
      std::size_t start = 0;
      const std::string& list = value;
      while (start <= list.size()) {
        const std::size_t comma = list.find(',', start);
        const std::string item =
            trim(std::string_view(list).substr(start, comma == std::string::npos
                                                          ? std::string::npos
                                                          : comma - start));
        if (!item.empty())
          spec.seeds.push_back(
              static_cast<std::uint64_t>(parse_long(item, name, line_no)));
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
      if (spec.seeds.empty()) throw ParseError(name, line_no, "empty seed list");
    } else if (key == "check_mean_min") {
      spec.check_mean_min = as_double();
    } else if (key == "check_mean_max") {
      spec.check_mean_max = as_double();
    } else {
      throw ParseError(name, line_no, "unknown key '" + key + "'");
    }
  }
  spec.validate();
  return spec;
}

ExperimentSpec parse_experiment_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path + "' for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_experiment_text(buffer.str(), path);
}

std::vector<std::pair<std::string, std::string>> spec_echo(const ExperimentSpec& spec) {
  std::vector<std::pair<std::string, std::string>> echo;
  const auto put = [&echo](const std::string& k, const std::string& v) {
    echo.emplace_back(k, v);
  };
  const auto put_d = [&put](const std::string& k, double v) {
    put(k, format_double(v));
  };
  put("dataset", spec.dataset);
  if (spec.dataset == "simulated") {
    put_d("room_width", spec.room_width);
    put_d("room_height", spec.room_height);
    put_d("grid_spacing", spec.grid_spacing);
    put("meas_per_ap", std::to_string(spec.meas_per_ap));
    put("n_test", std::to_string(spec.n_test));
    put_d("ptx_dbm", spec.path_loss.ptx_dbm);
    put_d("l0_db", spec.path_loss.l0_db);
    put_d("gamma_pl", spec.path_loss.gamma_pl);
    put_d("lc_db", spec.path_loss.lc_db);
    put_d("lw_db", spec.path_loss.lw_db);
    put("k_walls", std::to_string(spec.path_loss.k_walls));
    put_d("lambda_exp", spec.path_loss.lambda_exp);
  } else if (spec.dataset == "uji") {
    put("uji_train", spec.uji_train);
    put("uji_test", spec.uji_test);
    put("building", std::to_string(spec.building));
    put("floor", std::to_string(spec.floor));
  } else {
    put("tkn_path", spec.tkn_path);
  }
  if (spec.dataset != "uji") {
    put("fingerprint", spec.fingerprint);
    if (spec.fingerprint == "resample") {
      put("width", std::to_string(spec.width));
      put("rows_per_point", std::to_string(spec.rows_per_point));
      put("test_rows_per_point", std::to_string(spec.test_rows_per_point));
    }
    put("normalization", norm_name(spec.normalization));
    put("default_dbm",
        std::isnan(spec.default_dbm) ? "auto" : format_double(spec.default_dbm));
  }
  put("augment_times", std::to_string(spec.augment_times));
  put("engine", spec.engine);
  if (spec.engine == "ed_knn" || spec.engine == "ae_ed") {
    put("k", std::to_string(spec.knn.k));
    put("weighting", spec.knn.weighting == KnnWeighting::uniform
                         ? "uniform"
                         : "inverse_distance");
  }
  if (spec.engine == "svm" || spec.engine == "ae_svm") {
    put_d("svm_c", spec.svm_c);
    put_d("svm_gamma", spec.svm_gamma);
    put("k_top", std::to_string(spec.k_top));
    put_d("smo_tol", spec.smo_tol);
  }
  if (spec.engine == "nn") {
    put("optimizer", optimizer_name(spec.nn.optimizer));
    put_d("alpha", spec.nn.alpha);
    put_d("rho", spec.nn.rho);
    put_d("gamma_d", spec.nn.gamma_d);
    put_d("eps", spec.nn.eps);
    put("batch_size", std::to_string(spec.nn.batch_size));
    put("max_epochs", std::to_string(spec.nn.max_epochs));
    put("patience", std::to_string(spec.nn.patience));
    put("penalty", penalty_name(spec.nn.penalty));
    put_d("lambda_r", spec.nn.lambda_r);
    put_d("train_fraction", spec.train_fraction);
  }
  if (spec.engine == "ae_ed" || spec.engine == "ae_svm") {
    put("code_dim", std::to_string(spec.code_dim));
    put_d("ae_alpha", spec.ae_alpha);
    put("ae_batch", std::to_string(spec.ae_batch));
    put("ae_epochs", std::to_string(spec.ae_epochs));
    put("ae_patience", std::to_string(spec.ae_patience));
    put_d("train_fraction", spec.train_fraction);
  }
  std::string seed_list;
  for (std::size_t i = 0; i < spec.seeds.size(); ++i) {
    if (i > 0) seed_list += ',';
    seed_list += std::to_string(spec.seeds[i]);
  }
  put("seeds", seed_list);
  if (!std::isnan(spec.check_mean_min)) put_d("check_mean_min", spec.check_mean_min);
  if (!std::isnan(spec.check_mean_max)) put_d("check_mean_max", spec.check_mean_max);
  return echo;
}

ModelBundle train_bundle(const ExperimentSpec& spec, std::uint64_t seed) {
  spec.validate();
  ModelBundle bundle;
  bundle.engine = spec.engine;

  if (spec.dataset == "uji") {
    UjiData data = load_ujiindoorloc(spec.uji_train, spec.uji_test, spec.building,
                                     spec.floor);
    bundle.fingerprint_mode = "average";
    bundle.width = 1;
    bundle.default_dbm = -110.0;
    bundle.ap_ids = data.train.ap_ids;
    bundle.norm = data.train.norm;
    fit_engine(bundle, spec, std::move(data.train), seed, nullptr);
    return bundle;
  }

  std::vector<RawMeasurementRow> train_rows;
  Grid grid;
  const Grid* grid_ptr = nullptr;
  if (spec.dataset == "simulated") {
    const Room room = room_of(spec);
    grid = make_square_grid(room, spec.grid_spacing);
    grid_ptr = &grid;
    Rng rng = Rng::derive(seed, kSimDb);
    train_rows = simulate_database(room, grid, spec.meas_per_ap, spec.path_loss, rng);
  } else {
    train_rows = load_tkn(spec.tkn_path).train;
  }

  const double default_dbm = resolve_default_dbm(spec, train_rows);
  bundle.default_dbm = default_dbm;
  bundle.fingerprint_mode = spec.fingerprint;
  bundle.width = spec.fingerprint == "average" ? 1 : spec.width;

  FingerprintDb db;
  if (spec.fingerprint == "average") {
    db = average_fingerprint(train_rows, default_dbm);
  } else {
    Rng rng = Rng::derive(seed, kResample);
    db = resample_fixed_width(train_rows, spec.width, default_dbm, rng,
                              spec.rows_per_point);
  }
  bundle.ap_ids = db.ap_ids;
  db = normalize(db, spec.normalization);
  bundle.norm = db.norm;

  fit_engine(bundle, spec, std::move(db), seed, grid_ptr);
  return bundle;
}

namespace {

Point2 bundle_predict_row(const ModelBundle& bundle, const FingerprintRow& row) {
  if (bundle.has_knn_db)
    return knn_localize(bundle.knn_db, row.features, bundle.knn_cfg);
  if (bundle.has_ovo) return svm_localize(bundle.ovo, row.features, bundle.k_top);
  throw InvalidInput("bundle has no queryable engine");
}

std::vector<double> bundle_errors(const ModelBundle& bundle,
                                  const FingerprintDb& test_db) {
  if (test_db.rows.empty()) throw InvalidInput("empty test database");
  FingerprintDb queries = test_db;
  if (bundle.has_ae) queries = encode_db(bundle.autoencoder, queries);

  std::vector<double> errors;
  errors.reserve(queries.rows.size());
  if (bundle.has_mlp) {
    const std::vector<Point2> pred = predict(bundle.mlp, queries);
    for (std::size_t i = 0; i < pred.size(); ++i)
      errors.push_back(distance(pred[i], queries.rows[i].location));
    return errors;
  }
  for (const FingerprintRow& row : queries.rows)
    errors.push_back(distance(bundle_predict_row(bundle, row), row.location));
  return errors;
}

}  // namespace

std::vector<double> evaluate_bundle(const ModelBundle& bundle,
                                    const std::vector<RawMeasurementRow>& test_rows,
                                    int test_rows_per_point, std::uint64_t seed) {
  if (test_rows.empty()) throw InvalidInput("empty test set");
  FingerprintDb test_db;
  if (bundle.fingerprint_mode == "average") {
    test_db = average_fingerprint(test_rows, bundle.default_dbm, &bundle.ap_ids);
  } else {
    Rng rng = Rng::derive(seed, kTestResample);
    test_db = resample_fixed_width(test_rows, bundle.width, bundle.default_dbm, rng,
                                   test_rows_per_point, &bundle.ap_ids);
  }
  test_db.norm = bundle.norm;
  for (FingerprintRow& row : test_db.rows)
    row.features = apply_normalization(bundle.norm, row.features);
  return bundle_errors(bundle, test_db);
}

std::vector<double> evaluate_bundle_db(const ModelBundle& bundle,
                                       const FingerprintDb& test_db) {
  return bundle_errors(bundle, test_db);
}

SeedResult run_experiment_seed(const ExperimentSpec& spec, std::uint64_t seed) {
  SeedResult result;
  result.seed = seed;

  const ModelBundle bundle = train_bundle(spec, seed);

  if (spec.dataset == "uji") {
    UjiData data =
        load_ujiindoorloc(spec.uji_train, spec.uji_test, spec.building, spec.floor);
    if (data.test.empty())
      throw InvalidInput("uji run needs uji_test for evaluation");
    result.errors = evaluate_bundle_db(bundle, data.test);
    return result;
  }

  std::vector<RawMeasurementRow> test_rows;
  if (spec.dataset == "simulated") {
    const Room room = room_of(spec);
    Rng rng = Rng::derive(seed, kSimTest);
    test_rows =
        simulate_test_set(room, spec.n_test, spec.meas_per_ap, spec.path_loss, rng);
  } else {
    test_rows = load_tkn(spec.tkn_path).test;
    if (test_rows.empty()) throw InvalidInput("tkn corpus has no test rows");
  }
  result.errors = evaluate_bundle(bundle, test_rows, spec.test_rows_per_point, seed);
  return result;
}

ExperimentReport run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  ExperimentReport report;
  report.config_echo = spec_echo(spec);
  const auto start = std::chrono::steady_clock::now();
  for (std::uint64_t seed : spec.seeds)
    report.per_seed.push_back(run_experiment_seed(spec, seed));
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

bool check_report(const ExperimentSpec& spec, const ExperimentReport& report) {
  const double mean = report.pooled().mean;
  if (!std::isnan(spec.check_mean_min) && mean < spec.check_mean_min) return false;
  if (!std::isnan(spec.check_mean_max) && mean > spec.check_mean_max) return false;
  return true;
}

}  // namespace fploc
