#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <ostream>
#include <vector>

#include "signsynth/pose_model.hpp"

namespace signsynth {

/// Linear ramp of the probability of drawing a real (non-synthetic) example:
/// 0 at step 0, rising to max_real_fraction at ramp_steps, flat afterwards.
struct AnnealSchedule {
  double max_real_fraction = 0.85;
  std::uint64_t ramp_steps = 60000;

  void validate() const;
};

enum class DataSource { Real, Synthetic };

struct MixtureDraw {
  std::uint64_t step = 0;
  DataSource source = DataSource::Synthetic;
  std::uint64_t item_index = 0;

  friend bool operator==(const MixtureDraw&, const MixtureDraw&) = default;
};

inline constexpr std::size_t kDefaultMaxFrames = 300;

double real_fraction(std::uint64_t step, const AnnealSchedule& sched);

/// Pure in (step, sched, seed, sizes): the engine is seeded per step, so a
/// resumed run replays the same mixture from any step onwards.
MixtureDraw draw(std::uint64_t step, const AnnealSchedule& sched, std::uint64_t seed,
                 std::uint64_t real_size, std::uint64_t synth_size);

PoseSequence truncate_frames(const PoseSequence& seq, std::size_t max_frames = kDefaultMaxFrames);

std::vector<MixtureDraw> emit_schedule(std::uint64_t total_steps, const AnnealSchedule& sched,
                                       std::uint64_t seed, std::uint64_t real_size,
                                       std::uint64_t synth_size, std::uint64_t first_step = 0);

/// CSV with header "step,real_fraction,source".
void write_schedule_csv(std::ostream& os, const std::vector<MixtureDraw>& draws,
                        const AnnealSchedule& sched);

}  // namespace signsynth
