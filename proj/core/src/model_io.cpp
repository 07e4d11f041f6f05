#include "fploc/model_io.hpp"

#include <fstream>
#include <sstream>

#include "fploc/csv_io.hpp"
#include "fploc/error.hpp"

namespace fploc {

namespace {

constexpr const char* kMagic = "fploc-model";
constexpr const char* kVersion = "v1";

// Whitespace token stream with line tracking for error messages.
class Tokenizer {
 public:
  Tokenizer(std::string text, std::string file)
      : text_(std::move(text)), file_(std::move(file)) {}

  std::string_view next() {
    while (pos_ < text_.size() && is_space(text_[pos_])) {
      if (text_[pos_] == '\n') ++line_;
      ++pos_;
    }
    if (pos_ >= text_.size()) throw ParseError(file_, line_, "unexpected end of file");
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !is_space(text_[pos_])) ++pos_;
    return std::string_view(text_).substr(start, pos_ - start);
  }

  std::string next_string() { return std::string(next()); }
  double next_double() { return parse_double(next(), file_, line_); }
  long next_long() { return parse_long(next(), file_, line_); }
  int next_int() { return static_cast<int>(next_long()); }

  void expect(std::string_view word) {
    const std::string_view got = next();
    if (got != word)
      throw ParseError(file_, line_,
                       "expected '" + std::string(word) + "', got '" +
                           std::string(got) + "'");
  }

  const std::string& file() const { return file_; }
  std::size_t line() const { return line_; }

 private:
  static bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r';
  }
  std::string text_;
  std::string file_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

const char* activation_name(Activation a) {
  switch (a) {
    case Activation::relu:
      return "relu";
    case Activation::linear:
      return "linear";
    case Activation::sigmoid:
      return "sigmoid";
  }
  throw Error("unreachable activation");
}

Activation activation_from(Tokenizer& tok) {
  const std::string name = tok.next_string();
  if (name == "relu") return Activation::relu;
  if (name == "linear") return Activation::linear;
  if (name == "sigmoid") return Activation::sigmoid;
  throw ParseError(tok.file(), tok.line(), "unknown activation '" + name + "'");
}

const char* kernel_name(KernelKind k) {
  switch (k) {
    case KernelKind::linear:
      return "linear";
    case KernelKind::rbf:
      return "rbf";
    case KernelKind::polynomial:
      return "polynomial";
  }
  throw Error("unreachable kernel kind");
}

KernelKind kernel_from(Tokenizer& tok) {
  const std::string name = tok.next_string();
  if (name == "linear") return KernelKind::linear;
  if (name == "rbf") return KernelKind::rbf;
  if (name == "polynomial") return KernelKind::polynomial;
  throw ParseError(tok.file(), tok.line(), "unknown kernel '" + name + "'");
}

void write_norm(std::ostream& out, const Normalization& norm) {
  switch (norm.mode) {
    case NormMode::none:
      out << "norm none\n";
      break;
    case NormMode::minmax:
      out << "norm minmax " << format_double(norm.x_min) << ' '
          << format_double(norm.x_max) << '\n';
      break;
    case NormMode::zscore:
      out << "norm zscore " << norm.feature_mean.size() << '\n';
      for (std::size_t j = 0; j < norm.feature_mean.size(); ++j)
        out << format_double(norm.feature_mean[j]) << ' '
            << format_double(norm.feature_std[j]) << '\n';
      break;
  }
}

Normalization read_norm(Tokenizer& tok) {
  tok.expect("norm");
  Normalization norm;
  const std::string mode = tok.next_string();
  if (mode == "none") {
    norm.mode = NormMode::none;
  } else if (mode == "minmax") {
    norm.mode = NormMode::minmax;
    norm.x_min = tok.next_double();
    norm.x_max = tok.next_double();
  } else if (mode == "zscore") {
    norm.mode = NormMode::zscore;
    const long d = tok.next_long();
    norm.feature_mean.resize(d);
    norm.feature_std.resize(d);
    for (long j = 0; j < d; ++j) {
      norm.feature_mean[j] = tok.next_double();
      norm.feature_std[j] = tok.next_double();
    }
  } else {
    throw ParseError(tok.file(), tok.line(), "unknown norm mode '" + mode + "'");
  }
  return norm;
}

void write_db(std::ostream& out, const FingerprintDb& db) {
  out << "db aps " << db.ap_ids.size() << " width " << db.width << " rows "
      << db.rows.size() << '\n';
  for (const std::string& ap : db.ap_ids) out << ap << '\n';
  write_norm(out, db.norm);
  for (const FingerprintRow& row : db.rows) {
    out << format_double(row.location.x) << ' ' << format_double(row.location.y) << ' '
        << row.class_label;
    for (double v : row.features) out << ' ' << format_double(v);
    out << '\n';
  }
}

// Body after the "db" tag has been consumed.
FingerprintDb read_db_body(Tokenizer& tok) {
  tok.expect("aps");
  const long n_aps = tok.next_long();
  tok.expect("width");
  FingerprintDb db;
  db.width = tok.next_int();
  tok.expect("rows");
  const long n_rows = tok.next_long();
  for (long a = 0; a < n_aps; ++a) db.ap_ids.push_back(tok.next_string());
  db.norm = read_norm(tok);
  const int dim = db.dim();
  db.rows.resize(n_rows);
  for (long i = 0; i < n_rows; ++i) {
    FingerprintRow& row = db.rows[i];
    row.location.x = tok.next_double();
    row.location.y = tok.next_double();
    row.class_label = tok.next_int();
    row.features.resize(dim);
    for (int j = 0; j < dim; ++j) row.features[j] = tok.next_double();
  }
  db.validate();
  return db;
}

void write_mlp(std::ostream& out, const char* tag, const MlpModel& m) {
  out << tag << " layers " << m.num_layers() << '\n';
  for (int i = 0; i < m.num_layers(); ++i) {
    out << m.weights[i].rows() << ' ' << m.weights[i].cols() << ' '
        << activation_name(m.activations[i]) << ' ' << format_double(m.keep_prob[i])
        << '\n';
    for (Eigen::Index r = 0; r < m.weights[i].rows(); ++r) {
      for (Eigen::Index c = 0; c < m.weights[i].cols(); ++c) {
        if (c > 0) out << ' ';
        out << format_double(m.weights[i](r, c));
      }
      out << '\n';
    }
    for (Eigen::Index r = 0; r < m.biases[i].size(); ++r) {
      if (r > 0) out << ' ';
      out << format_double(m.biases[i](r));
    }
    out << '\n';
  }
}

// Body after the "mlp"/"ae" tag has been consumed.
MlpModel read_mlp_body(Tokenizer& tok) {
  tok.expect("layers");
  const int n_layers = tok.next_int();
  if (n_layers < 1) throw ParseError(tok.file(), tok.line(), "mlp needs layers >= 1");
  MlpModel m;
  for (int i = 0; i < n_layers; ++i) {
    const long rows = tok.next_long();
    const long cols = tok.next_long();
    m.activations.push_back(activation_from(tok));
    m.keep_prob.push_back(tok.next_double());
    Eigen::MatrixXd w(rows, cols);
    for (long r = 0; r < rows; ++r)
      for (long c = 0; c < cols; ++c) w(r, c) = tok.next_double();
    Eigen::VectorXd b(rows);
    for (long r = 0; r < rows; ++r) b(r) = tok.next_double();
    m.weights.push_back(std::move(w));
    m.biases.push_back(std::move(b));
  }
  m.validate();
  return m;
}

void write_ovo(std::ostream& out, const OvoModel& ovo, int k_top) {
  out << "ovo c " << format_double(ovo.c_penalty) << " kernel "
      << kernel_name(ovo.kernel.kind) << ' ' << format_double(ovo.kernel.gamma_k) << ' '
      << ovo.kernel.degree << ' ' << format_double(ovo.kernel.coef) << " k_top "
      << k_top << '\n';
  out << "classes " << ovo.class_ids.size() << '\n';
  for (std::size_t i = 0; i < ovo.class_ids.size(); ++i)
    out << ovo.class_ids[i] << ' ' << format_double(ovo.class_locations[i].x) << ' '
        << format_double(ovo.class_locations[i].y) << '\n';
  out << "points " << ovo.points.rows() << ' ' << ovo.points.cols() << '\n';
  for (Eigen::Index r = 0; r < ovo.points.rows(); ++r) {
    for (Eigen::Index c = 0; c < ovo.points.cols(); ++c) {
      if (c > 0) out << ' ';
      out << format_double(ovo.points(r, c));
    }
    out << '\n';
  }
  out << "pairs " << ovo.pairs.size() << '\n';
  for (const PairwiseSvm& pair : ovo.pairs) {
    out << pair.class_a << ' ' << pair.class_b << ' ' << format_double(pair.bias)
        << ' ' << pair.sv_index.size();
    for (std::size_t i = 0; i < pair.sv_index.size(); ++i)
      out << ' ' << pair.sv_index[i] << ' ' << format_double(pair.coef[i]);
    out << '\n';
  }
}

// Body after the "ovo" tag has been consumed.
OvoModel read_ovo_body(Tokenizer& tok, int& k_top) {
  tok.expect("c");
  OvoModel ovo;
  ovo.c_penalty = tok.next_double();
  tok.expect("kernel");
  ovo.kernel.kind = kernel_from(tok);
  ovo.kernel.gamma_k = tok.next_double();
  ovo.kernel.degree = tok.next_int();
  ovo.kernel.coef = tok.next_double();
  tok.expect("k_top");
  k_top = tok.next_int();
  tok.expect("classes");
  const long n_classes = tok.next_long();
  for (long i = 0; i < n_classes; ++i) {
    ovo.class_ids.push_back(tok.next_int());
    Point2 loc;
    loc.x = tok.next_double();
    loc.y = tok.next_double();
    ovo.class_locations.push_back(loc);
  }
  tok.expect("points");
  const long rows = tok.next_long();
  const long cols = tok.next_long();
  ovo.points.resize(rows, cols);
  for (long r = 0; r < rows; ++r)
    for (long c = 0; c < cols; ++c) ovo.points(r, c) = tok.next_double();
  tok.expect("pairs");
  const long n_pairs = tok.next_long();
  for (long i = 0; i < n_pairs; ++i) {
    PairwiseSvm pair;
    pair.class_a = tok.next_int();
    pair.class_b = tok.next_int();
    pair.bias = tok.next_double();
    const long n_sv = tok.next_long();
    for (long s = 0; s < n_sv; ++s) {
      pair.sv_index.push_back(tok.next_int());
      pair.coef.push_back(tok.next_double());
    }
    ovo.pairs.push_back(std::move(pair));
  }
  return ovo;
}

const char* weighting_name(KnnWeighting w) {
  return w == KnnWeighting::uniform ? "uniform" : "inverse_distance";
}

}  // namespace

void save_model(const std::string& path, const ModelBundle& bundle) {
  if (bundle.engine.empty()) throw InvalidInput("save_model: engine not set");
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot open '" + path + "' for writing");
  out << kMagic << ' ' << kVersion << '\n';
  out << "engine " << bundle.engine << '\n';
  out << "fingerprint " << bundle.fingerprint_mode << " width " << bundle.width
      << " default_dbm " << format_double(bundle.default_dbm) << '\n';
  out << "aps " << bundle.ap_ids.size() << '\n';
  for (const std::string& ap : bundle.ap_ids) out << ap << '\n';
  write_norm(out, bundle.norm);

  if (bundle.has_knn_db) {
    out << "knn k " << bundle.knn_cfg.k << " weighting "
        << weighting_name(bundle.knn_cfg.weighting) << '\n';
    write_db(out, bundle.knn_db);
  }
  if (bundle.has_ovo) write_ovo(out, bundle.ovo, bundle.k_top);
  if (bundle.has_mlp) write_mlp(out, "mlp", bundle.mlp);
  if (bundle.has_ae) write_mlp(out, "ae", bundle.autoencoder);
  out << "end\n";
  if (!out) throw Error("write failed for '" + path + "'");
}

ModelBundle load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path + "' for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  Tokenizer tok(buffer.str(), path);

  tok.expect(kMagic);
  const std::string version = tok.next_string();
  if (version != kVersion)
    throw ParseError(path, tok.line(), "unsupported version '" + version + "'");

  ModelBundle bundle;
  tok.expect("engine");
  bundle.engine = tok.next_string();
  tok.expect("fingerprint");
  bundle.fingerprint_mode = tok.next_string();
  tok.expect("width");
  bundle.width = tok.next_int();
  tok.expect("default_dbm");
  bundle.default_dbm = tok.next_double();
  tok.expect("aps");
  const long n_aps = tok.next_long();
  for (long i = 0; i < n_aps; ++i) bundle.ap_ids.push_back(tok.next_string());
  bundle.norm = read_norm(tok);

  while (true) {
    const std::string section = tok.next_string();
    if (section == "end") break;
    if (section == "knn") {
      tok.expect("k");
      bundle.knn_cfg.k = tok.next_int();
      tok.expect("weighting");
      const std::string w = tok.next_string();
      if (w == "uniform")
        bundle.knn_cfg.weighting = KnnWeighting::uniform;
      else if (w == "inverse_distance")
        bundle.knn_cfg.weighting = KnnWeighting::inverse_distance;
      else
        throw ParseError(path, tok.line(), "unknown weighting '" + w + "'");
      tok.expect("db");
      bundle.knn_db = read_db_body(tok);
      bundle.has_knn_db = true;
    } else if (section == "ovo") {
      bundle.ovo = read_ovo_body(tok, bundle.k_top);
      bundle.has_ovo = true;
    } else if (section == "mlp") {
      bundle.mlp = read_mlp_body(tok);
      bundle.has_mlp = true;
    } else if (section == "ae") {
      bundle.autoencoder = read_mlp_body(tok);
      bundle.has_ae = true;
    } else {
      throw ParseError(path, tok.line(), "unknown section '" + section + "'");
    }
  }
  return bundle;
}

}  // namespace fploc
