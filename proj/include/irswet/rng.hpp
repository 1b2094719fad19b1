#pragma once

#include <complex>
#include <cstdint>
#include <numbers>
#include <cmath>

namespace irswet {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Independent sub-streams of one experiment.
enum class Domain : std::uint64_t {
    channel = 1,
    restart = 2,
    placement = 3,
    precoder = 4,
    generic = 5,
};

/// Counter-based random stream.
///
/// A stream is fully determined by its key (seed, domain, index); draw n of the
/// stream is a pure function of (key, n). Two streams built from the same key
/// produce identical sequences regardless of which thread owns them or in what
/// order other streams were consumed.
class Stream {
public:
    Stream(std::uint64_t seed, Domain domain, std::uint64_t index)
        : key_(mix64(mix64(mix64(seed) ^ static_cast<std::uint64_t>(domain)) ^ mix64(index + 0x632be59bd9b4e019ULL)))
    {
    }

    /// Sub-stream keyed by an additional index (e.g. element within a trial).
    Stream child(std::uint64_t index) const
    {
        Stream s = *this;
        s.key_ = mix64(key_ ^ mix64(index ^ 0xd1b54a32d192ed03ULL));
        s.counter_ = 0;
        return s;
    }

    std::uint64_t next_u64() { return mix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

    /// Uniform in (0, 1): never returns exactly 0 or 1.
    double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Circularly symmetric complex normal with E|z|^2 = 1.
    std::complex<double> complex_normal()
    {
        const double r = std::sqrt(-std::log(uniform()));
        const double a = 2.0 * std::numbers::pi * uniform();
        return {r * std::cos(a), r * std::sin(a)};
    }

    /// Standard real normal.
    double normal()
    {
        const double r = std::sqrt(-2.0 * std::log(uniform()));
        return r * std::cos(2.0 * std::numbers::pi * uniform());
    }

    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace irswet
