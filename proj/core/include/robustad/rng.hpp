#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace robustad::num {

/// Deterministic random stream identified by (seed, stream label).
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard; the derived distributions below are implemented here rather than
/// taken from <random> so that draws are identical across standard libraries.
/// Child streams hash the parent's identity with the child label, so a child
/// never replays the parent's sequence.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed, std::string label = "root");

    std::uint64_t seed() const noexcept { return seed_; }
    const std::string& label() const noexcept { return label_; }

    /// Independent stream derived from this stream's identity (not its position).
    SeededRng child(std::string_view label) const;

    std::uint64_t next_u64() { return engine_(); }
    /// Uniform in [0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Uniform integer in [0, n). n must be > 0.
    std::size_t uniform_index(std::size_t n);
    double normal(double mean = 0.0, double stddev = 1.0);

    template <typename T>
    void shuffle(std::span<T> items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            const std::size_t j = uniform_index(i);
            std::swap(items[i - 1], items[j]);
        }
    }
    template <typename T>
    void shuffle(std::vector<T>& items) { shuffle(std::span<T>(items)); }

    /// k distinct values drawn from `pool` (order is the draw order).
    std::vector<std::size_t> sample(std::span<const std::size_t> pool, std::size_t k);

private:
    std::uint64_t seed_;
    std::string label_;
    std::mt19937_64 engine_;
    bool has_spare_normal_ = false;
    double spare_normal_ = 0.0;
};

/// SplitMix64 finalizer; exposed for seed derivation in callers.
std::uint64_t mix64(std::uint64_t x) noexcept;
/// Stable 64-bit FNV-1a hash.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

}  // namespace robustad::num
