#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace kupred::ku {

constexpr int kKuCount = 28;

// Capability rule identity. ku is 1..28, cap is 1..n within the KU.
// id() renders as "K8.C2". The study-facing KU display names (Data Type,
// Loop, ...) live in ku_display_name().
struct CapabilityRule {
    int ku = 0;
    int cap = 0;
    std::string id;           // "K4.C2"
    std::string description;  // what the matcher counts, in this tool's terms
};

// All capability rules, grouped by KU in ascending (ku, cap) order. The set
// is static and versioned with the library.
const std::vector<CapabilityRule>& all_rules();

// Number of capabilities for one KU (1-based).
int capability_count(int ku);

const char* ku_display_name(int ku);  // 1-based, e.g. 6 -> "Inheritance"
std::string ku_column_name(int ku);   // 1-based, "K6"

// Per-file occurrence counts for the 28 KUs, indexed 0..27 for K1..K28.
struct KuVector {
    std::array<int64_t, kKuCount> counts{};

    int64_t& operator[](size_t i) { return counts[i]; }
    int64_t operator[](size_t i) const { return counts[i]; }
    bool operator==(const KuVector& o) const { return counts == o.counts; }
    int64_t total() const {
        int64_t s = 0;
        for (auto c : counts) s += c;
        return s;
    }
};

// One capability match with its source location (byte span + line).
struct TraceHit {
    const CapabilityRule* rule;
    uint32_t begin = 0;
    uint32_t end = 0;
    uint32_t line = 0;
};

struct DetectionTrace {
    std::vector<TraceHit> hits;

    // Regrouping the trace by KU must reproduce the KuVector exactly.
    KuVector to_vector() const {
        KuVector v;
        for (const auto& h : hits) ++v[static_cast<size_t>(h.rule->ku - 1)];
        return v;
    }
};

} // namespace kupred::ku
