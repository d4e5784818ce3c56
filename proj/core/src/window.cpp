#include "dcakdd/window.hpp"

#include <algorithm>
#include <array>
#include <string>

#include "dcakdd/errors.hpp"

namespace dcakdd {

SignalStream apply_time_window(std::span<const SignalTriple> stream, std::int64_t w) {
  if (w < 1) throw ConfigError("window size must be >= 1, got " + std::to_string(w));
  SignalStream out(stream.begin(), stream.end());
  if (w == 1) return out;

  const auto width = static_cast<std::size_t>(w);
  const std::size_t n = stream.size();
  // Direct sums rather than a running total, so nothing drifts over long
  // streams. The clamp absorbs rounding: a mean never leaves its window's
  // [min, max], and a constant window returns the constant exactly.
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t end = std::min(n, i + width);
    std::array<double, 3> sum{}, lo{}, hi{};
    for (std::size_t j = i; j < end; ++j) {
      const std::array<double, 3> v{stream[j].pamp, stream[j].danger, stream[j].safe};
      for (std::size_t c = 0; c < 3; ++c) {
        sum[c] += v[c];
        lo[c] = j == i ? v[c] : std::min(lo[c], v[c]);
        hi[c] = j == i ? v[c] : std::max(hi[c], v[c]);
      }
    }
    const auto count = static_cast<double>(end - i);
    std::array<double, 3> mean{};
    for (std::size_t c = 0; c < 3; ++c) mean[c] = std::clamp(sum[c] / count, lo[c], hi[c]);
    out[i] = {mean[0], mean[1], mean[2]};
  }
  return out;
}

}  // namespace dcakdd
