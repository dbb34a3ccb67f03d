// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "fmfog/data/types.hpp"

namespace fmfog::data {

// Daphnet subject file: 11 space-separated columns per row - time in ms,
// ankle/thigh/trunk acceleration triplets in milli-g, and an annotation in
// {0 invalid, 1 no-freeze, 2 freeze}; nominal 64 Hz. Returns three
// accel-only streams (ankle, thigh, trunk) in m/s^2 with fog/non-fog spans;
// label-0 runs become invalid spans.
std::vector<SensorStream> load_daphnet(const std::string& path);

// PAMAP2 .dat file: 54 space-separated columns at 100 Hz - timestamp s,
// activity id, heart rate, then hand/chest/ankle IMUs with 17 columns each.
// Returns wrist, chest, ankle streams with accel+gyro+mag (the +-16g
// accelerometer; orientation discarded). NaN gaps of <= 3 samples in used
// channels are linearly interpolated, longer gaps drop the rows.
std::vector<SensorStream> load_pamap2(const std::string& path);

struct CsvChannel {
  std::string column;
  std::string unit;  // m/s2, g, mg, rad/s, deg/s, uT
};

struct CsvSchema {
  std::string timestamp_column;
  std::vector<CsvChannel> accel;  // exactly 3 when present
  std::vector<CsvChannel> gyro;
  std::vector<CsvChannel> mag;
  std::string label_column;  // optional binary FoG column
  SensorLocation location;
  double rate_hz = 100.0;
  std::string subject_id;
};

// Generic CSV stand-in for unpublished clinical formats; header row with
// named columns, units converted to SI, label runs become fog spans.
SensorStream load_generic_csv(const std::string& path, const CsvSchema& schema);

}  // namespace fmfog::data
