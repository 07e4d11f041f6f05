#include "fploc/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <system_error>
#include <utility>

#include "fploc/error.hpp"

namespace fploc {

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw Error("format_double: conversion failed");
  return std::string(buf, ptr);
}

double parse_double(std::string_view text, const std::string& file, std::size_t line) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last)
    throw ParseError(file, line, "expected a number, got '" + std::string(text) + "'");
  return value;
}

long parse_long(std::string_view text, const std::string& file, std::size_t line) {
  long value = 0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last)
    throw ParseError(file, line, "expected an integer, got '" + std::string(text) + "'");
  return value;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

namespace {

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot open '" + path + "' for writing");
  return out;
}

// Strips one trailing carriage return so CRLF files parse cleanly.
std::string_view trim_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

}  // namespace

void write_raw_csv(const std::string& path, const std::vector<RawMeasurementRow>& rows) {
  std::ofstream out = open_output(path);
  out << "x,y,ap_id,meas_idx,rssi_dbm\n";
  for (const RawMeasurementRow& row : rows) {
    const std::string x = format_double(row.location.x);
    const std::string y = format_double(row.location.y);
    for (const auto& [ap, values] : row.rssi_by_ap) {
      for (std::size_t m = 0; m < values.size(); ++m) {
        out << x << ',' << y << ',' << ap << ',' << m << ',' << format_double(values[m])
            << '\n';
      }
    }
  }
  if (!out) throw Error("write failed for '" + path + "'");
}

std::vector<RawMeasurementRow> read_raw_csv(const std::string& path) {
  std::ifstream in = open_input(path);
  std::string line;
  std::size_t line_no = 0;

  if (!std::getline(in, line)) throw ParseError(path, 1, "missing header");
  ++line_no;
  if (trim_cr(line) != "x,y,ap_id,meas_idx,rssi_dbm")
    throw ParseError(path, line_no, "unexpected header '" + line + "'");

  std::vector<RawMeasurementRow> rows;
  std::map<std::pair<double, double>, std::size_t> index_of;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view record = trim_cr(line);
    if (record.empty()) continue;
    const std::vector<std::string_view> f = split_fields(record);
    if (f.size() != 5)
      throw ParseError(path, line_no,
                       "expected 5 fields, got " + std::to_string(f.size()));
    const double x = parse_double(f[0], path, line_no);
    const double y = parse_double(f[1], path, line_no);
    if (f[2].empty()) throw ParseError(path, line_no, "empty ap_id");
    parse_long(f[3], path, line_no);  // meas_idx: validated, order comes from the file
    const double rssi = parse_double(f[4], path, line_no);

    const std::pair<double, double> key{x, y};
    auto it = index_of.find(key);
    if (it == index_of.end()) {
      it = index_of.emplace(key, rows.size()).first;
      rows.push_back(RawMeasurementRow{{x, y}, {}});
    }
    rows[it->second].rssi_by_ap[std::string(f[2])].push_back(rssi);
  }
  if (rows.empty()) throw ParseError(path, line_no, "no data rows");
  return rows;
}

void write_db_csv(const std::string& path, const FingerprintDb& db) {
  db.validate();
  std::ofstream out = open_output(path);
  out << "x,y,class";
  for (int j = 1; j <= db.dim(); ++j) out << ",f_" << j;
  out << '\n';
  for (const FingerprintRow& row : db.rows) {
    out << format_double(row.location.x) << ',' << format_double(row.location.y) << ','
        << row.class_label;
    for (double v : row.features) out << ',' << format_double(v);
    out << '\n';
  }
  if (!out) throw Error("write failed for '" + path + "'");
}

FingerprintDb read_db_csv(const std::string& path, int width) {
  if (width < 1) throw InvalidInput("read_db_csv: width must be >= 1");
  std::ifstream in = open_input(path);
  std::string line;
  std::size_t line_no = 0;

  if (!std::getline(in, line)) throw ParseError(path, 1, "missing header");
  ++line_no;
  const std::vector<std::string_view> header = split_fields(trim_cr(line));
  if (header.size() < 4 || header[0] != "x" || header[1] != "y" || header[2] != "class")
    throw ParseError(path, line_no, "expected header x,y,class,f_1,...");
  const int dim = static_cast<int>(header.size()) - 3;
  if (dim % width != 0)
    throw ParseError(path, line_no,
                     "feature count " + std::to_string(dim) +
                         " is not a multiple of width " + std::to_string(width));

  FingerprintDb db;
  db.width = width;
  for (int a = 1; a <= dim / width; ++a) db.ap_ids.push_back("c" + std::to_string(a));

  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view record = trim_cr(line);
    if (record.empty()) continue;
    const std::vector<std::string_view> f = split_fields(record);
    if (static_cast<int>(f.size()) != dim + 3)
      throw ParseError(path, line_no,
                       "expected " + std::to_string(dim + 3) + " fields, got " +
                           std::to_string(f.size()));
    FingerprintRow row;
    row.location.x = parse_double(f[0], path, line_no);
    row.location.y = parse_double(f[1], path, line_no);
    row.class_label = static_cast<int>(parse_long(f[2], path, line_no));
    row.features.reserve(dim);
    for (int j = 0; j < dim; ++j)
      row.features.push_back(parse_double(f[3 + j], path, line_no));
    db.rows.push_back(std::move(row));
  }
  if (db.rows.empty()) throw ParseError(path, line_no, "no data rows");
  return db;
}

}  // namespace fploc
