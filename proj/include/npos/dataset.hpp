#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "npos/geom.hpp"
#include "npos/sim.hpp"

namespace npos::data {

/// One triangle of accumulated displacements with vertices at sample indices
/// (m, m+V, m+2V). d_c is constructed as d_a + d_b, bit-exactly.
struct TriangleSet {
    long start = 0;  // m
    int leap = 0;    // V
    Vec2 d_a, d_b, d_c;
};

struct AnchorEntry {
    long index = 0;
    Vec2 position;
    double variance = 1.0;
};

struct AnchorSet {
    std::vector<AnchorEntry> entries;
};

struct SplitPlan {
    long n_samples = 0;
    std::uint64_t rng_seed = 0;
    std::vector<long> test_indices;  // sorted
    std::vector<char> test_mask;     // n_samples entries

    bool is_test(long i) const { return test_mask[static_cast<std::size_t>(i)] != 0; }
};

/// One triangle per m in {0, ..., N-2V}, stride 1:
/// d_a = sum of measurements [m, m+V), d_b = sum of [m+V, m+2V), d_c = d_a + d_b.
std::vector<TriangleSet> build_triangles(const sim::DisplacementLog& disp, int leap);

/// One entry per dock visit, claiming the dock position with the given variance.
AnchorSet build_anchor_set(const std::vector<long>& dock_indices, const Vec2& dock_position,
                           double variance);

/// Marks a uniformly random fifth of the indices as test (4:1 train/test).
SplitPlan split_samples(long n_samples, std::uint64_t seed);

/// Triangles whose three vertices are all non-test.
std::vector<TriangleSet> training_triangles(const std::vector<TriangleSet>& triangles,
                                            const SplitPlan& split);

/// Anchor entries at test indices are dropped from training.
AnchorSet training_anchors(const AnchorSet& anchors, const SplitPlan& split);

// CSV / text serialization.
void save_triangles_csv(const std::vector<TriangleSet>& triangles, const std::string& path);
std::vector<TriangleSet> load_triangles_csv(const std::string& path);
void save_anchors_csv(const AnchorSet& anchors, const std::string& path);
AnchorSet load_anchors_csv(const std::string& path);
void save_split(const SplitPlan& split, const std::string& path);  // one test index per line
SplitPlan load_split(const std::string& path, long n_samples);

}  // namespace npos::data
