#pragma once

// CSV serialization for estimate records, plus the digest used by run
// manifests.  Floating-point fields are written with 17 significant digits so
// a round-trip through text is lossless; a NaN p (not applicable) serializes
// as an empty field.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include "perc/experiments.hpp"

namespace perc {

inline std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
}

inline std::string csv_header() {
    return "kind,n,p,aspect,estimate,stderr,ci_lo,ci_hi,replicas,seed";
}

inline std::string csv_row(const EstimateRecord& rec) {
    std::string out;
    out += kind_name(rec.kind);
    out += ',';
    out += std::to_string(rec.n);
    out += ',';
    if (!std::isnan(rec.p)) out += format_g17(rec.p);
    out += ',';
    out += std::to_string(rec.aspect);
    out += ',';
    out += format_g17(rec.estimate);
    out += ',';
    out += format_g17(rec.std_error);
    out += ',';
    out += format_g17(rec.ci_lo);
    out += ',';
    out += format_g17(rec.ci_hi);
    out += ',';
    out += std::to_string(rec.replicas);
    out += ',';
    out += std::to_string(rec.seed);
    return out;
}

inline std::string csv_table(const std::vector<EstimateRecord>& records) {
    std::string out = csv_header();
    out += '\n';
    for (const EstimateRecord& rec : records) {
        out += csv_row(rec);
        out += '\n';
    }
    return out;
}

// FNV-1a.  Manifest digests only tie output files to a run for reproduction
// checks; nothing here needs a cryptographic hash.
inline std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 14695981039346656037ULL;
    for (const unsigned char ch : data) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return std::string(buf);
}

}  // namespace perc
