#include "robustad/rng.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "robustad/error.hpp"

namespace robustad::num {

std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

namespace {

std::uint64_t engine_seed(std::uint64_t seed, std::string_view label) {
    return mix64(mix64(seed) ^ fnv1a64(label));
}

}  // namespace

SeededRng::SeededRng(std::uint64_t seed, std::string label)
    : seed_(seed), label_(std::move(label)), engine_(engine_seed(seed_, label_)) {}

SeededRng SeededRng::child(std::string_view label) const {
    std::string full = label_;
    full.push_back('/');
    full.append(label);
    return SeededRng(seed_, std::move(full));
}

double SeededRng::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::size_t SeededRng::uniform_index(std::size_t n) {
    if (n == 0) throw DomainError("uniform_index requires n > 0");
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    // Reject the biased tail of the 64-bit range.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return static_cast<std::size_t>(x % bound);
}

double SeededRng::normal(double mean, double stddev) {
    if (has_spare_normal_) {
        has_spare_normal_ = false;
        return mean + stddev * spare_normal_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_normal_ = radius * std::sin(angle);
    has_spare_normal_ = true;
    return mean + stddev * radius * std::cos(angle);
}

std::vector<std::size_t> SeededRng::sample(std::span<const std::size_t> pool, std::size_t k) {
    if (k > pool.size()) throw DomainError("sample: k exceeds pool size");
    std::vector<std::size_t> work(pool.begin(), pool.end());
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + uniform_index(work.size() - i);
        std::swap(work[i], work[j]);
    }
    work.resize(k);
    return work;
}

}  // namespace robustad::num
