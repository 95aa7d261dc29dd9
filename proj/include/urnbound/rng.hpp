#pragma once

#include <cstdint>
#include <random>

namespace urnbound {

// splitmix64 finalizer; used only to derive well-separated stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    return mix64(mix64(seed) ^ mix64(stream + 0x632BE59BD9B4E019ULL));
}

// Replica r of an experiment seeded with s draws from Rng(s, r). Output is
// bit-identical across platforms: the uniform is built from the top 53 bits
// rather than through std::uniform_real_distribution.
class Rng {
  public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
        : seed_(seed), stream_(stream), engine_(stream_seed(seed, stream)) {}

    double uniform() noexcept { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream() const noexcept { return stream_; }

  private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::mt19937_64 engine_;
};

}  // namespace urnbound
