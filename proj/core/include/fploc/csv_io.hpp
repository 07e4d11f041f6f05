#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "fploc/fingerprint.hpp"

namespace fploc {

// Shortest round-trip decimal form, locale independent.
std::string format_double(double value);

// Strict parsers; file/line feed the ParseError they throw on bad input.
double parse_double(std::string_view text, const std::string& file, std::size_t line);
long parse_long(std::string_view text, const std::string& file, std::size_t line);

// Splits one record on commas. No quoting: fields must not contain commas.
std::vector<std::string_view> split_fields(std::string_view line);

// Tidy measurement table, header: x,y,ap_id,meas_idx,rssi_dbm
void write_raw_csv(const std::string& path, const std::vector<RawMeasurementRow>& rows);
std::vector<RawMeasurementRow> read_raw_csv(const std::string& path);

// Wide fingerprint table, header: x,y,class,f_1,...,f_D
void write_db_csv(const std::string& path, const FingerprintDb& db);
// D must be a multiple of width; anchors are synthesized as c1..c{D/width}.
FingerprintDb read_db_csv(const std::string& path, int width = 1);

}  // namespace fploc
