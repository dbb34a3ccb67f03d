// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fmfog/data/types.hpp"

namespace fmfog::data {

// Desk-scale synthetic gait generator. Walk segments are band-limited
// periodic signals (step frequency 1.5-2.5 Hz) over a gravity baseline,
// fog segments replace locomotion with low-amplitude 3-8 Hz trembling,
// sit/stand are low-variance noise with distinct gravity orientations.
// Deterministic given (params, seed).

enum class GaitState : int { walk = 1, stand = 2, sit = 3, fog = 4 };

// Activity ids recorded in annotation spans equal the GaitState values; fog
// segments are labeled as fog spans directly.
struct SynthParams {
  double duration_s = 0.0;
  double rate_hz = 100.0;
  // Cycled (truncating the final segment) until duration_s is covered.
  std::vector<std::pair<GaitState, double>> schedule;
  SensorLocation location{Site::ankle, Side::unknown};
  ModalityMask modalities{true, true, false};
  std::string subject_id = "synth";
};

SensorStream synth_gait(const SynthParams& params, uint64_t seed);

// Ambulatory ids for trigger-style labeling: walking, standing (and fog,
// which only occurs while upright).
inline bool gait_state_ambulatory(GaitState s) { return s != GaitState::sit; }

}  // namespace fmfog::data
