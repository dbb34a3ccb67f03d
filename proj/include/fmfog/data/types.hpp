// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fmfog/core/error.hpp"
#include "fmfog/core/tensor.hpp"

namespace fmfog::data {

// Body sites map to stable location ids 0..5 used by the context embedding.
enum class Site : uint8_t { ankle = 0, wrist = 1, chest = 2, thigh = 3, trunk = 4, lower_back = 5 };

enum class Side : uint8_t { left = 0, right = 1, center = 2, unknown = 3 };

struct SensorLocation {
  Site site = Site::ankle;
  Side side = Side::unknown;

  int location_id() const { return static_cast<int>(site); }
};

const char* site_name(Site s);
const char* side_name(Side s);
Site site_from_name(const std::string& name);
Side side_from_name(const std::string& name);

struct ModalityMask {
  bool accel = true;  // always true: every supported dataset provides acceleration
  bool gyro = false;
  bool mag = false;

  int modality_count() const { return (accel ? 1 : 0) + (gyro ? 1 : 0) + (mag ? 1 : 0); }
  int channel_count() const { return 3 * modality_count(); }
};

enum class SpanLabel : uint8_t { fog = 0, non_fog = 1, invalid = 2, activity = 3 };

struct AnnotationSpan {
  SpanLabel label = SpanLabel::non_fog;
  int activity_id = -1;  // meaningful only when label == activity
  double start_s = 0.0;
  double end_s = 0.0;  // half-open [start_s, end_s)
};

// Timestamped multi-channel IMU recording in SI units (accel m/s^2,
// gyro rad/s, mag uT). Channel order: accel triplet first, then gyro, then
// mag, for the modalities present.
struct SensorStream {
  std::string subject_id;
  SensorLocation location;
  double native_rate_hz = 0.0;
  ModalityMask modalities;
  std::vector<double> timestamps_s;  // strictly increasing
  Tensor<float> channels;            // [T x C], C = 3 x modality count
  std::vector<AnnotationSpan> annotations;

  int64_t samples() const { return static_cast<int64_t>(timestamps_s.size()); }
  double extent_begin() const { return timestamps_s.empty() ? 0.0 : timestamps_s.front(); }
  // Streams own the half-open sample interval ending one nominal period
  // after the last timestamp.
  double extent_end() const {
    if (timestamps_s.empty()) return 0.0;
    return timestamps_s.back() + (native_rate_hz > 0 ? 1.0 / native_rate_hz : 0.0);
  }

  // Checks the structural invariants; throws on violation.
  void validate() const;
};

struct SubjectSplit {
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;
  int repeat_index = 0;
};

// n_repeats seeded random partitions with |train| = n_train; train and test
// are disjoint and cover the full id set.
std::vector<SubjectSplit> split_subjects(const std::vector<std::string>& subject_ids,
                                         int64_t n_train, int64_t n_repeats, uint64_t seed);

}  // namespace fmfog::data
