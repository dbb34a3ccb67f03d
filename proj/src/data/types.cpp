// SPDX-License-Identifier: Apache-2.0
#include "fmfog/data/types.hpp"

#include <algorithm>
#include <cmath>

#include "fmfog/core/rng.hpp"

namespace fmfog::data {

const char* site_name(Site s) {
  switch (s) {
    case Site::ankle: return "ankle";
    case Site::wrist: return "wrist";
    case Site::chest: return "chest";
    case Site::thigh: return "thigh";
    case Site::trunk: return "trunk";
    case Site::lower_back: return "lower_back";
  }
  return "?";
}

const char* side_name(Side s) {
  switch (s) {
    case Side::left: return "left";
    case Side::right: return "right";
    case Side::center: return "center";
    case Side::unknown: return "unknown";
  }
  return "?";
}

Site site_from_name(const std::string& name) {
  for (Site s : {Site::ankle, Site::wrist, Site::chest, Site::thigh, Site::trunk, Site::lower_back}) {
    if (name == site_name(s)) return s;
  }
  throw ConfigError("unknown sensor site: " + name);
}

Side side_from_name(const std::string& name) {
  for (Side s : {Side::left, Side::right, Side::center, Side::unknown}) {
    if (name == side_name(s)) return s;
  }
  throw ConfigError("unknown sensor side: " + name);
}

void SensorStream::validate() const {
  if (channels.ndim() != 2) throw ShapeError("stream: channels must be [T x C]");
  if (channels.dim(0) != samples()) {
    throw ShapeError("stream: timestamp/sample count mismatch");
  }
  if (channels.dim(1) != modalities.channel_count()) {
    throw ShapeError("stream: channel count does not match modality mask");
  }
  if (!modalities.accel) throw ConfigError("stream: acceleration channels are required");
  for (size_t i = 1; i < timestamps_s.size(); ++i) {
    if (timestamps_s[i] <= timestamps_s[i - 1]) {
      throw ParseError("stream: timestamps not strictly increasing at index " + std::to_string(i));
    }
  }
  for (int64_t i = 0; i < channels.size(); ++i) {
    if (!std::isfinite(channels[i])) {
      throw ParseError("stream: non-finite sample value at flat index " + std::to_string(i));
    }
  }
  for (const auto& span : annotations) {
    if (!(span.start_s < span.end_s)) throw ParseError("stream: empty or inverted span");
    if (span.start_s < extent_begin() - 1e-9 || span.end_s > extent_end() + 1e-9) {
      throw ParseError("stream: span exceeds stream extent");
    }
  }
  // spans must be non-overlapping (sorted check)
  std::vector<const AnnotationSpan*> spans;
  spans.reserve(annotations.size());
  for (const auto& s : annotations) spans.push_back(&s);
  std::sort(spans.begin(), spans.end(),
            [](const AnnotationSpan* a, const AnnotationSpan* b) { return a->start_s < b->start_s; });
  for (size_t i = 1; i < spans.size(); ++i) {
    if (spans[i]->start_s < spans[i - 1]->end_s - 1e-9) {
      throw ParseError("stream: overlapping annotation spans");
    }
  }
}

std::vector<SubjectSplit> split_subjects(const std::vector<std::string>& subject_ids,
                                         int64_t n_train, int64_t n_repeats, uint64_t seed) {
  const int64_t n = static_cast<int64_t>(subject_ids.size());
  if (n_train >= n) {
    throw ConfigError("split_subjects: n_train (" + std::to_string(n_train) +
                      ") must be < subject count (" + std::to_string(n) + ")");
  }
  if (n_train < 1) throw ConfigError("split_subjects: n_train must be >= 1");
  if (n_repeats < 1) throw ConfigError("split_subjects: n_repeats must be >= 1");

  std::vector<SubjectSplit> splits;
  splits.reserve(static_cast<size_t>(n_repeats));
  for (int64_t r = 0; r < n_repeats; ++r) {
    std::vector<std::string> ids = subject_ids;
    Rng rng(derive_seed(seed, "split_subjects", static_cast<uint64_t>(r)));
    rng.shuffle(ids);
    SubjectSplit split;
    split.repeat_index = static_cast<int>(r);
    split.train_ids.assign(ids.begin(), ids.begin() + n_train);
    split.test_ids.assign(ids.begin() + n_train, ids.end());
    std::sort(split.train_ids.begin(), split.train_ids.end());
    std::sort(split.test_ids.begin(), split.test_ids.end());
    splits.push_back(std::move(split));
  }
  return splits;
}

}  // namespace fmfog::data
