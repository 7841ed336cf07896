#pragma once

// A configuration assigns open/closed to every site of a region.  States are
// packed bits in row-major site order.  Sampling draws one uniform per site
// (see rng.hpp) and thresholds it against p, so the assignment is identical
// no matter how or where it is evaluated.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "perc/lattice.hpp"
#include "perc/rng.hpp"

namespace perc {

struct ConfigMeta {
    double p = -1.0;          // sampling parameter, -1 for hand-built states
    std::uint64_t seed = 0;   // stream seed used by sample()
    bool sampled = false;
};

class Configuration {
  public:
    Configuration(const Region& r, bool open_everywhere = false)
        : region_(r),
          bits_(static_cast<std::size_t>((r.site_count() + 63) / 64), 0) {
        if (open_everywhere) {
            for (auto& w : bits_) w = ~0ull;
            trim();
        }
    }

    static Configuration sample(const Region& r, double p, std::uint64_t seed) {
        if (!(p >= 0.0 && p <= 1.0))
            throw std::domain_error("Configuration::sample: p outside [0,1]");
        Configuration c(r);
        c.meta_ = ConfigMeta{p, seed, true};
        const std::int64_t n = r.site_count();
        if (p >= 1.0) {
            for (auto& w : c.bits_) w = ~0ull;
            c.trim();
            return c;
        }
        const std::uint64_t t = open_threshold(p);
        for (std::int64_t i = 0; i < n; ++i)
            if (site_uniform(seed, static_cast<std::uint64_t>(i)) < t)
                c.bits_[static_cast<std::size_t>(i >> 6)] |= 1ull << (i & 63);
        return c;
    }

    static Configuration from_open_sites(const Region& r,
                                         const std::vector<Site>& open) {
        Configuration c(r);
        for (const Site& v : open) {
            if (!r.contains(v))
                throw std::domain_error("from_open_sites: site outside region");
            c.set_index(r.index(v), true);
        }
        return c;
    }

    const Region& region() const { return region_; }
    const ConfigMeta& meta() const { return meta_; }

    bool is_open(std::int64_t index) const {
        return (bits_[static_cast<std::size_t>(index >> 6)] >> (index & 63)) & 1u;
    }
    bool is_open(const Site& v) const {
        if (!region_.contains(v))
            throw std::domain_error("Configuration::is_open: site outside region");
        return is_open(region_.index(v));
    }

    // Value-semantic single-site flip; metadata no longer describes a product
    // measure afterwards, so it is cleared.
    Configuration flip(const Site& v) const {
        if (!region_.contains(v))
            throw std::domain_error("Configuration::flip: site outside region");
        Configuration c(*this);
        c.meta_ = ConfigMeta{};
        const std::int64_t i = region_.index(v);
        c.bits_[static_cast<std::size_t>(i >> 6)] ^= 1ull << (i & 63);
        return c;
    }

    Configuration with_state(const Site& v, bool open) const {
        Configuration c(*this);
        c.meta_ = ConfigMeta{};
        c.set_index(region_.index(v), open);
        return c;
    }

    // Swap the two colors everywhere.
    Configuration invert() const {
        Configuration c(region_);
        for (std::size_t w = 0; w < bits_.size(); ++w) c.bits_[w] = ~bits_[w];
        c.trim();
        return c;
    }

    std::int64_t open_count() const {
        std::int64_t n = 0;
        for (auto w : bits_) n += __builtin_popcountll(w);
        return n;
    }

    // Low 2^k states from an integer mask; used by exhaustive enumeration.
    static Configuration from_mask(const Region& r, std::uint64_t mask) {
        if (r.site_count() > 64)
            throw std::length_error("from_mask: region too large");
        Configuration c(r);
        c.bits_[0] = mask;
        c.trim();
        return c;
    }
    std::uint64_t as_mask() const {
        if (region_.site_count() > 64)
            throw std::length_error("as_mask: region too large");
        return bits_[0];
    }

    friend bool operator==(const Configuration& a, const Configuration& b) {
        return a.region_ == b.region_ && a.bits_ == b.bits_;
    }

  private:
    void set_index(std::int64_t i, bool open) {
        const std::uint64_t bit = 1ull << (i & 63);
        auto& w = bits_[static_cast<std::size_t>(i >> 6)];
        w = open ? (w | bit) : (w & ~bit);
    }
    void trim() {
        const std::int64_t n = region_.site_count();
        const int tail = static_cast<int>(n & 63);
        if (tail != 0) bits_.back() &= (1ull << tail) - 1;
    }

    Region region_;
    std::vector<std::uint64_t> bits_;
    ConfigMeta meta_;
};

}  // namespace perc
