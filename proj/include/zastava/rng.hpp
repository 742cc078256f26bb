#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <string_view>

#include "zastava/elliptic.hpp"

namespace zastava
{

// SplitMix64 (Steele-Lea-Flood). The standard library's engines are portable
// but its distributions are not; sampling through this tiny generator keeps
// verification reports bit-identical across platforms and thread counts.
class SplitMix64
{
public:
    explicit SplitMix64(std::uint64_t seed) : m_state(seed) {}

    std::uint64_t next()
    {
        std::uint64_t z = (m_state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Signed integer uniform on [lo, hi] (small ranges only).
    long uniform_int(long lo, long hi)
    {
        return lo + static_cast<long>(next() % static_cast<std::uint64_t>(hi - lo + 1));
    }

    // Log-uniform modulus in [lo, hi], uniform phase.
    Complex log_uniform_complex(double lo, double hi)
    {
        const double modulus = std::exp(uniform(std::log(lo), std::log(hi)));
        return std::polar(modulus, uniform(0.0, 2.0 * kPi));
    }

private:
    static constexpr double kPi = 3.14159265358979323846;
    std::uint64_t m_state;
};

// Stable per-sample seed: mixes the run seed, the suite name and the sample
// index so that reordering suites or distributing samples across threads never
// changes any individual sample's draws.
inline std::uint64_t derive_seed(std::uint64_t run_seed, std::string_view suite,
                                 std::uint64_t index)
{
    std::uint64_t h = 1469598103934665603ULL; // FNV-1a over the suite name
    for (const char c : suite) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    SplitMix64 mixer(h ^ run_seed);
    mixer.next();
    SplitMix64 indexed(mixer.next() ^ (index * 0x9e3779b97f4a7c15ULL));
    return indexed.next();
}

} // namespace zastava
