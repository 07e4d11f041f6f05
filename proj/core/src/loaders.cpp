#include "fploc/loaders.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>

#include "fploc/csv_io.hpp"
#include "fploc/error.hpp"

namespace fploc {

namespace {

constexpr double kUndetectedMarker = 100.0;
constexpr double kUndetectedDbm = -110.0;

struct UjiLayout {
  std::vector<int> wap_cols;          // column index per WAP, in header order
  std::vector<std::string> wap_names;
  int lon = -1, lat = -1, floor = -1, building = -1;
};

std::string_view trim_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

UjiLayout parse_uji_header(const std::string& path, std::string_view header_line) {
  UjiLayout layout;
  const std::vector<std::string_view> names = split_fields(header_line);
  for (int i = 0; i < static_cast<int>(names.size()); ++i) {
    const std::string_view n = names[i];
    if (n.rfind("WAP", 0) == 0) {
      layout.wap_cols.push_back(i);
      layout.wap_names.emplace_back(n);
    } else if (n == "LONGITUDE") {
      layout.lon = i;
    } else if (n == "LATITUDE") {
      layout.lat = i;
    } else if (n == "FLOOR") {
      layout.floor = i;
    } else if (n == "BUILDINGID") {
      layout.building = i;
    }
  }
  if (layout.wap_cols.empty())
    throw ParseError(path, 1, "no WAP columns in header");
  if (layout.lon < 0 || layout.lat < 0 || layout.floor < 0 || layout.building < 0)
    throw ParseError(path, 1,
                     "header must contain LONGITUDE, LATITUDE, FLOOR, BUILDINGID");
  return layout;
}

struct UjiRow {
  Point2 position;                // absolute
  std::vector<double> rssi;       // aligned with layout.wap_cols, marker replaced
};

std::vector<UjiRow> read_uji_rows(const std::string& path, const UjiLayout& layout,
                                  int building, int floor) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path + "' for reading");
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError(path, 1, "missing header");
  ++line_no;

  std::vector<UjiRow> rows;
  const int max_col = std::max({layout.wap_cols.empty() ? 0 : layout.wap_cols.back(),
                                layout.lon, layout.lat, layout.floor, layout.building});
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view record = trim_cr(line);
    if (record.empty()) continue;
    const std::vector<std::string_view> f = split_fields(record);
    if (static_cast<int>(f.size()) <= max_col)
      throw ParseError(path, line_no, "row has too few fields");
    if (parse_long(f[layout.building], path, line_no) != building) continue;
    if (parse_long(f[layout.floor], path, line_no) != floor) continue;

    UjiRow row;
    row.position.x = parse_double(f[layout.lon], path, line_no);
    row.position.y = parse_double(f[layout.lat], path, line_no);
    row.rssi.reserve(layout.wap_cols.size());
    for (int col : layout.wap_cols) {
      double v = parse_double(f[col], path, line_no);
      if (v == kUndetectedMarker) v = kUndetectedDbm;
      row.rssi.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

UjiData load_ujiindoorloc(const std::string& train_csv, const std::string& test_csv,
                          int building, int floor) {
  std::ifstream probe(train_csv);
  if (!probe) throw InvalidInput("cannot open '" + train_csv + "' for reading");
  std::string header_line;
  if (!std::getline(probe, header_line)) throw ParseError(train_csv, 1, "missing header");
  probe.close();
  const UjiLayout layout = parse_uji_header(train_csv, trim_cr(header_line));

  const std::vector<UjiRow> raw_train = read_uji_rows(train_csv, layout, building, floor);
  if (raw_train.empty())
    throw InvalidInput("no training rows for building " + std::to_string(building) +
                       " floor " + std::to_string(floor) + " in '" + train_csv + "'");

  // Anchors never detected on this floor are dropped (training rows decide).
  std::vector<bool> detected(layout.wap_cols.size(), false);
  for (const UjiRow& row : raw_train)
    for (std::size_t j = 0; j < row.rssi.size(); ++j)
      if (row.rssi[j] != kUndetectedDbm) detected[j] = true;

  UjiData data;
  std::vector<std::size_t> kept;
  for (std::size_t j = 0; j < detected.size(); ++j) {
    if (detected[j])
      kept.push_back(j);
    else
      data.meta.pruned_aps.push_back(layout.wap_names[j]);
  }
  if (kept.empty()) throw InvalidInput("every anchor is undetected on this floor");

  Point2 offset{std::numeric_limits<double>::infinity(),
                std::numeric_limits<double>::infinity()};
  for (const UjiRow& row : raw_train) {
    offset.x = std::min(offset.x, row.position.x);
    offset.y = std::min(offset.y, row.position.y);
  }

  data.meta.source = DatasetMeta::Source::uji;
  data.meta.coordinate_offset = offset;

  const auto build_db = [&](const std::vector<UjiRow>& raw) {
    FingerprintDb db;
    db.width = 1;
    for (std::size_t j : kept) db.ap_ids.push_back(layout.wap_names[j]);
    db.rows.reserve(raw.size());
    for (const UjiRow& row : raw) {
      FingerprintRow out;
      out.location = {row.position.x - offset.x, row.position.y - offset.y};
      out.features.reserve(kept.size());
      for (std::size_t j : kept) out.features.push_back(row.rssi[j]);
      db.rows.push_back(std::move(out));
    }
    return db;
  };

  FingerprintDb train = build_db(raw_train);

  double max_x = 0.0, max_y = 0.0;
  for (const FingerprintRow& row : train.rows) {
    max_x = std::max(max_x, row.location.x);
    max_y = std::max(max_y, row.location.y);
  }
  data.meta.room_width = max_x;
  data.meta.room_height = max_y;

  // Class labels: rank of the row's reference point among distinct locations.
  std::map<std::pair<double, double>, int> label_of;
  for (const FingerprintRow& row : train.rows)
    label_of.emplace(std::make_pair(row.location.x, row.location.y), 0);
  int next = 0;
  for (auto& [loc, label] : label_of) label = next++;
  for (FingerprintRow& row : train.rows)
    row.class_label = label_of.at({row.location.x, row.location.y});

  data.train = normalize(train, NormMode::zscore);

  if (!test_csv.empty()) {
    const std::vector<UjiRow> raw_test = read_uji_rows(test_csv, layout, building, floor);
    if (raw_test.empty())
      throw InvalidInput("no test rows for building " + std::to_string(building) +
                         " floor " + std::to_string(floor) + " in '" + test_csv + "'");
    FingerprintDb test = build_db(raw_test);
    test.norm = data.train.norm;
    for (FingerprintRow& row : test.rows)
      row.features = apply_normalization(test.norm, row.features);
    data.test = std::move(test);
  }
  return data;
}

TknData load_tkn(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw InvalidInput(
        "cannot open '" + path +
        "': the TKN corpus is not redistributable; request it from the TKN group "
        "and export it as set,point_id,x,y,ap_id,rssi_dbm");
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError(path, 1, "missing header");
  ++line_no;
  if (trim_cr(line) != "set,point_id,x,y,ap_id,rssi_dbm")
    throw ParseError(path, line_no,
                     "expected header set,point_id,x,y,ap_id,rssi_dbm");

  TknData data;
  data.meta.source = DatasetMeta::Source::tkn;
  std::map<std::pair<int, long>, std::size_t> index_of;  // (set, point_id) -> row
  double max_x = 0.0, max_y = 0.0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view record = trim_cr(line);
    if (record.empty()) continue;
    const std::vector<std::string_view> f = split_fields(record);
    if (f.size() != 6)
      throw ParseError(path, line_no,
                       "expected 6 fields, got " + std::to_string(f.size()));
    int which;
    if (f[0] == "train")
      which = 0;
    else if (f[0] == "test")
      which = 1;
    else
      throw ParseError(path, line_no, "set must be train or test");
    const long point_id = parse_long(f[1], path, line_no);
    const double x = parse_double(f[2], path, line_no);
    const double y = parse_double(f[3], path, line_no);
    if (f[4].empty()) throw ParseError(path, line_no, "empty ap_id");
    const double rssi = parse_double(f[5], path, line_no);

    std::vector<RawMeasurementRow>& rows = which == 0 ? data.train : data.test;
    auto it = index_of.find({which, point_id});
    if (it == index_of.end()) {
      it = index_of.emplace(std::make_pair(which, point_id), rows.size()).first;
      rows.push_back(RawMeasurementRow{{x, y}, {}});
    }
    rows[it->second].rssi_by_ap[std::string(f[4])].push_back(rssi);
    max_x = std::max(max_x, x);
    max_y = std::max(max_y, y);
  }
  if (data.train.empty()) throw ParseError(path, line_no, "no training rows");
  data.meta.room_width = max_x;
  data.meta.room_height = max_y;
  return data;
}

}  // namespace fploc
