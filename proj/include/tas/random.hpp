#pragma once

// Platform-stable uniform draws on top of std::mt19937_64, whose output
// stream is fixed by the standard (unlike the std distributions).

#include <cstdint>
#include <random>

namespace tas {

class UniformStream {
public:
    explicit UniformStream(std::uint64_t seed) : engine_(seed) {}

    /// Open interval (0, 1), 53-bit resolution.
    double unit() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

    /// Open interval (lo, hi).
    double between(double lo, double hi) { return lo + (hi - lo) * unit(); }

    /// Open interval (-1, 1).
    double symmetric() { return 2.0 * unit() - 1.0; }

private:
    std::mt19937_64 engine_;
};

} // namespace tas
