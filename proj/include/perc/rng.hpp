#pragma once

// Counter-based random numbers for site states.
//
// Each site's uniform draw is a pure function of (stream seed, site index),
// so states never depend on evaluation order, thread count, or whether the
// configuration is materialized or sampled lazily.  The generator is the
// SplitMix64 output function evaluated at an arbitrary counter position:
// out(i) = finalize(seed + i * golden), with the Murmur-style finalizer.

#include <cstdint>

namespace perc {

inline constexpr std::uint64_t golden_gamma = 0x9E3779B97F4A7C15ull;

inline constexpr std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

// Seed for replica i of a run.  Mixing the replica index through mix64
// decorrelates streams even for adjacent indices and small master seeds.
inline constexpr std::uint64_t stream_seed(std::uint64_t master_seed,
                                           std::uint64_t replica) {
    return mix64(master_seed ^ mix64(replica * golden_gamma + 0x632BE59BD9B4E019ull));
}

// Uniform 64-bit draw for the site with row-major index `site_index`.
inline constexpr std::uint64_t site_uniform(std::uint64_t seed,
                                            std::uint64_t site_index) {
    return mix64(seed + (site_index + 1) * golden_gamma);
}

// Bernoulli(p) by integer threshold: open iff u < floor(p * 2^64).  The
// threshold is monotone in p, so configurations sampled from shared draws
// are coupled monotonically across a p grid.  p in [0,1) is represented to
// within 2^-64; p = 1 is handled exactly.
inline bool state_from_uniform(std::uint64_t u, double p) {
    if (p >= 1.0) return true;
    if (p <= 0.0) return false;
    const long double scaled = static_cast<long double>(p) * 18446744073709551616.0L;
    return u < static_cast<std::uint64_t>(scaled);
}

inline std::uint64_t open_threshold(double p) {
    // Companion to state_from_uniform for hot loops; caller must special-case
    // p >= 1 (threshold semantics "u < t" cannot express "always").
    if (p <= 0.0) return 0;
    const long double scaled = static_cast<long double>(p) * 18446744073709551616.0L;
    return static_cast<std::uint64_t>(scaled);
}

}  // namespace perc
