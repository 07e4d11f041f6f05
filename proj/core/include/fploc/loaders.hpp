#pragma once

#include <string>
#include <vector>

#include "fploc/fingerprint.hpp"

namespace fploc {

struct UjiData {
  FingerprintDb train;  // z-scored; class labels index distinct reference points
  FingerprintDb test;   // empty when no test file given; uses training transform
  DatasetMeta meta;
};

// Original UJIIndoorLoc column layout, columns located by header name.
// Undetected marker 100 becomes -110 dBm; rows filtered to building/floor;
// anchors never detected on the floor are dropped; coordinates become relative
// to the floor's minimum corner (training rows define it).
UjiData load_ujiindoorloc(const std::string& train_csv, const std::string& test_csv,
                          int building, int floor);

struct TknData {
  std::vector<RawMeasurementRow> train;
  std::vector<RawMeasurementRow> test;
  DatasetMeta meta;
};

// Export layout: set,point_id,x,y,ap_id,rssi_dbm with set in {train,test}.
// Per-anchor measurement counts may differ within one point.
TknData load_tkn(const std::string& path);

}  // namespace fploc
