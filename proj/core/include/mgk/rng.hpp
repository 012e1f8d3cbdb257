#pragma once

#include <cstdint>
#include <random>

namespace mgk {

// Seeded uniform stream. Each stream is owned by one logical thread of
// execution; distributions draw through it by inverse transform so that
// identical seeds give identical sample paths.
class RngStream {
   public:
    explicit RngStream(std::uint64_t seed) : engine_(seed) {}

    double uniform() {
        // (0, 1): both endpoints excluded so log() and inverse CDFs are safe.
        std::uint64_t r = engine_();
        return (static_cast<double>(r >> 11) + 0.5) * 0x1.0p-53;
    }

    double exponential(double rate) { return -std::log(uniform()) / rate; }

    std::uint64_t raw() { return engine_(); }

   private:
    std::mt19937_64 engine_;
};

}  // namespace mgk
