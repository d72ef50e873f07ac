#pragma once

#include <cstdint>

namespace lsp {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t z)
{
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}
}  // namespace detail

/// Counter-based generator: draw i of stream `seed` is a pure function of
/// (seed, i), so any partitioning of the index range reproduces the same
/// per-sample values. State is just the next counter.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t start = 0)
        : key_(detail::splitmix64(seed ^ 0x5851F42D4C957F2Dull)), counter_(start) {}

    /// Value of draw `i`, independent of current position.
    double at(std::uint64_t i) const
    {
        std::uint64_t v = detail::splitmix64(key_ + i * 0x9E3779B97F4A7C15ull);
        // 53 random bits, offset by half an ulp: result lies strictly in (0,1)
        return (static_cast<double>(v >> 11) + 0.5) * 0x1.0p-53;
    }

    double next() { return at(counter_++); }

    std::uint64_t position() const { return counter_; }
    void seek(std::uint64_t i) { counter_ = i; }

private:
    std::uint64_t key_;
    std::uint64_t counter_;
};

}  // namespace lsp
