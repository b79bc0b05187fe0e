#include "npos/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include "npos/binio.hpp"
#include "npos/rng.hpp"

namespace npos::data {

std::vector<TriangleSet> build_triangles(const sim::DisplacementLog& disp, int leap) {
    const long n = static_cast<long>(disp.measurements.size());
    if (leap < 1) throw std::invalid_argument("leap increment V must be >= 1");
    if (n < 2 * leap) throw std::invalid_argument("need N >= 2V displacement measurements");

    std::vector<TriangleSet> out;
    out.reserve(static_cast<std::size_t>(n - 2 * leap + 1));
    for (long m = 0; m <= n - 2 * leap; ++m) {
        TriangleSet t;
        t.start = m;
        t.leap = leap;
        for (long k = m; k < m + leap; ++k) t.d_a += disp.measurements[k];
        for (long k = m + leap; k < m + 2 * leap; ++k) t.d_b += disp.measurements[k];
        t.d_c = t.d_a + t.d_b;
        out.push_back(t);
    }
    return out;
}

AnchorSet build_anchor_set(const std::vector<long>& dock_indices, const Vec2& dock_position,
                           double variance) {
    if (dock_indices.empty()) throw std::invalid_argument("dock index list is empty");
    if (!(variance > 0.0)) throw std::invalid_argument("anchor variance must be > 0");
    AnchorSet set;
    set.entries.reserve(dock_indices.size());
    for (long idx : dock_indices) set.entries.push_back({idx, dock_position, variance});
    return set;
}

SplitPlan split_samples(long n_samples, std::uint64_t seed) {
    if (n_samples < 5) throw std::invalid_argument("need at least 5 samples to split 4:1");
    SplitPlan plan;
    plan.n_samples = n_samples;
    plan.rng_seed = seed;
    const long n_test = (2 * n_samples + 5) / 10;  // round(n/5)

    std::vector<long> order(static_cast<std::size_t>(n_samples));
    std::iota(order.begin(), order.end(), 0L);
    Rng rng(seed);
    for (long i = n_samples - 1; i > 0; --i) {
        const long j = static_cast<long>(rng.uniform_index(static_cast<std::uint64_t>(i + 1)));
        std::swap(order[i], order[j]);
    }
    plan.test_indices.assign(order.begin(), order.begin() + n_test);
    std::sort(plan.test_indices.begin(), plan.test_indices.end());
    plan.test_mask.assign(static_cast<std::size_t>(n_samples), 0);
    for (long idx : plan.test_indices) plan.test_mask[static_cast<std::size_t>(idx)] = 1;
    return plan;
}

std::vector<TriangleSet> training_triangles(const std::vector<TriangleSet>& triangles,
                                            const SplitPlan& split) {
    std::vector<TriangleSet> out;
    out.reserve(triangles.size());
    for (const TriangleSet& t : triangles) {
        if (split.is_test(t.start) || split.is_test(t.start + t.leap) ||
            split.is_test(t.start + 2 * t.leap))
            continue;
        out.push_back(t);
    }
    return out;
}

AnchorSet training_anchors(const AnchorSet& anchors, const SplitPlan& split) {
    AnchorSet out;
    for (const AnchorEntry& a : anchors.entries)
        if (a.index >= split.n_samples || !split.is_test(a.index)) out.entries.push_back(a);
    return out;
}

void save_triangles_csv(const std::vector<TriangleSet>& triangles, const std::string& path) {
    auto f = io::open_out(path, false);
    f << "m,V,dAx,dAy,dBx,dBy,dCx,dCy\n";
    char buf[256];
    for (const TriangleSet& t : triangles) {
        std::snprintf(buf, sizeof(buf), "%ld,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", t.start,
                      t.leap, t.d_a.x, t.d_a.y, t.d_b.x, t.d_b.y, t.d_c.x, t.d_c.y);
        f << buf;
    }
}

std::vector<TriangleSet> load_triangles_csv(const std::string& path) {
    auto f = io::open_in(path, false);
    std::vector<TriangleSet> out;
    std::string line;
    std::getline(f, line);
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        TriangleSet t;
        if (std::sscanf(line.c_str(), "%ld,%d,%lg,%lg,%lg,%lg,%lg,%lg", &t.start, &t.leap,
                        &t.d_a.x, &t.d_a.y, &t.d_b.x, &t.d_b.y, &t.d_c.x, &t.d_c.y) != 8)
            throw std::runtime_error("malformed triangle CSV line: " + line);
        out.push_back(t);
    }
    return out;
}

void save_anchors_csv(const AnchorSet& anchors, const std::string& path) {
    auto f = io::open_out(path, false);
    f << "a,x,y,var\n";
    char buf[160];
    for (const AnchorEntry& a : anchors.entries) {
        std::snprintf(buf, sizeof(buf), "%ld,%.17g,%.17g,%.17g\n", a.index, a.position.x,
                      a.position.y, a.variance);
        f << buf;
    }
}

AnchorSet load_anchors_csv(const std::string& path) {
    auto f = io::open_in(path, false);
    AnchorSet out;
    std::string line;
    std::getline(f, line);
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        AnchorEntry a;
        if (std::sscanf(line.c_str(), "%ld,%lg,%lg,%lg", &a.index, &a.position.x, &a.position.y,
                        &a.variance) != 4)
            throw std::runtime_error("malformed anchor CSV line: " + line);
        out.entries.push_back(a);
    }
    return out;
}

void save_split(const SplitPlan& split, const std::string& path) {
    auto f = io::open_out(path, false);
    for (long idx : split.test_indices) f << idx << '\n';
}

SplitPlan load_split(const std::string& path, long n_samples) {
    auto f = io::open_in(path, false);
    SplitPlan plan;
    plan.n_samples = n_samples;
    plan.test_mask.assign(static_cast<std::size_t>(n_samples), 0);
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        const long idx = std::stol(line);
        if (idx < 0 || idx >= n_samples)
            throw std::runtime_error("split index out of range: " + line);
        plan.test_indices.push_back(idx);
        plan.test_mask[static_cast<std::size_t>(idx)] = 1;
    }
    return plan;
}

}  // namespace npos::data
