#include "signsynth/curriculum.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

#include "signsynth/common.hpp"

namespace signsynth {

void AnnealSchedule::validate() const {
  if (!(max_real_fraction >= 0.0 && max_real_fraction <= 1.0)) {
    throw std::invalid_argument("max_real_fraction must lie in [0,1]");
  }
  if (ramp_steps < 1) throw std::invalid_argument("ramp_steps must be >= 1");
}

double real_fraction(std::uint64_t step, const AnnealSchedule& sched) {
  if (step >= sched.ramp_steps) return sched.max_real_fraction;
  return sched.max_real_fraction * static_cast<double>(step) /
         static_cast<double>(sched.ramp_steps);
}

MixtureDraw draw(std::uint64_t step, const AnnealSchedule& sched, std::uint64_t seed,
                 std::uint64_t real_size, std::uint64_t synth_size) {
  if (real_size < 1 || synth_size < 1) throw std::invalid_argument("dataset sizes must be >= 1");
  Engine eng(derive_seed(seed, step));
  MixtureDraw d;
  d.step = step;
  const double u = uniform_unit(eng);
  d.source = u < real_fraction(step, sched) ? DataSource::Real : DataSource::Synthetic;
  d.item_index = uniform_index(eng, d.source == DataSource::Real ? real_size : synth_size);
  return d;
}

PoseSequence truncate_frames(const PoseSequence& seq, std::size_t max_frames) {
  if (max_frames < 1) throw std::invalid_argument("max_frames must be >= 1");
  PoseSequence out = seq;
  if (out.frames.size() > max_frames) out.frames.resize(max_frames);
  return out;
}

std::vector<MixtureDraw> emit_schedule(std::uint64_t total_steps, const AnnealSchedule& sched,
                                       std::uint64_t seed, std::uint64_t real_size,
                                       std::uint64_t synth_size, std::uint64_t first_step) {
  sched.validate();
  std::vector<MixtureDraw> out;
  out.reserve(total_steps > first_step ? total_steps - first_step : 0);
  for (std::uint64_t s = first_step; s < total_steps; ++s) {
    out.push_back(draw(s, sched, seed, real_size, synth_size));
  }
  return out;
}

void write_schedule_csv(std::ostream& os, const std::vector<MixtureDraw>& draws,
                        const AnnealSchedule& sched) {
  os << "step,real_fraction,source\n";
  char buf[64];
  for (const auto& d : draws) {
    std::snprintf(buf, sizeof buf, "%.6f", real_fraction(d.step, sched));
    os << d.step << ',' << buf << ',' << (d.source == DataSource::Real ? "real" : "synthetic")
       << '\n';
  }
}

}  // namespace signsynth
