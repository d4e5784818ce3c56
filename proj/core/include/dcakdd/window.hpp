#pragma once

#include <cstdint>
#include <span>

#include "dcakdd/signals.hpp"

namespace dcakdd {

// Moving time window over a signal stream.
//
// Position i becomes the per-category mean of the w instances starting at i
// (i .. i+w-1). Near the end the window shrinks to the instances that
// remain, so the last position is always unchanged. w = 1 is the identity.
// Throws ConfigError when w < 1.
SignalStream apply_time_window(std::span<const SignalTriple> stream, std::int64_t w);

}  // namespace dcakdd
