#include <doctest.h>

#include <algorithm>

#include "oracles.hpp"
#include "sxp/hdbscan.hpp"
#include "sxp/rng.hpp"

using namespace sxp;

namespace {

// tight group of `n` points around (lat, lon), ~20 m spread
void add_group(std::vector<GeoPoint>& pts, Rng& rng, double lat, double lon, int n) {
    for (int i = 0; i < n; ++i)
        pts.push_back({lat + rng.normal() * 2e-4, lon + rng.normal() * 2e-4});
}

}  // namespace

TEST_CASE("identical points form one cluster with zero noise") {
    std::vector<GeoPoint> pts(6, {38.7, -9.1});
    const auto c = hdbscan(pts, {1, 3});
    CHECK(c.num_clusters == 1);
    for (int l : c.labels) CHECK(l == 0);
}

TEST_CASE("two tight groups far apart plus a distant stray point") {
    Rng rng(5);
    std::vector<GeoPoint> pts;
    add_group(pts, rng, 38.70, -9.10, 5);
    add_group(pts, rng, 38.79, -9.10, 5);   // ~10 km north
    pts.push_back({38.95, -9.10});          // ~28 km away from both
    const auto c = hdbscan(pts, {1, 3});
    CHECK(c.num_clusters == 2);
    CHECK(c.labels[10] == kNoiseLabel);
    CHECK(c.labels[0] == c.labels[4]);
    CHECK(c.labels[5] == c.labels[9]);
    CHECK(c.labels[0] != c.labels[5]);

    const auto o = oracle::brute_hdbscan(pts, {1, 3});
    CHECK(oracle::same_partition(c.labels, o.labels));
}

TEST_CASE("colinear equally-spaced points with a large min_cluster_size") {
    std::vector<GeoPoint> pts;
    for (int i = 0; i < 8; ++i) pts.push_back({38.70 + i * 0.001, -9.10});
    const auto c = hdbscan(pts, {1, 5});  // min_cluster_size > n/2
    const auto o = oracle::brute_hdbscan(pts, {1, 5});
    CHECK(oracle::same_partition(c.labels, o.labels));
    // no true split is possible, so the root is the only candidate
    CHECK(c.num_clusters == 1);
}

TEST_CASE("fewer points than min_cluster_size is all noise, not an error") {
    std::vector<GeoPoint> pts = {{38.7, -9.1}, {38.71, -9.1}};
    const auto c = hdbscan(pts, {1, 3});
    CHECK(c.all_noise());
    for (int l : c.labels) CHECK(l == kNoiseLabel);
}

TEST_CASE("min_samples larger than the point count is all noise") {
    Rng rng(6);
    std::vector<GeoPoint> pts;
    add_group(pts, rng, 38.7, -9.1, 20);
    const auto c = hdbscan(pts, {100, 3});
    CHECK(c.all_noise());
}

TEST_CASE("permutation equivariance: permuted points give the same partition") {
    Rng rng(9);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<GeoPoint> pts;
        add_group(pts, rng, 38.70, -9.10, 4);
        add_group(pts, rng, 38.76, -9.04, 4);
        const ClusterParams params{1, 2};
        const auto base = hdbscan(pts, params);

        std::vector<std::size_t> perm(pts.size());
        std::iota(perm.begin(), perm.end(), 0u);
        std::vector<std::size_t> order = perm;
        rng.shuffle(order);
        std::vector<GeoPoint> shuffled(pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i) shuffled[i] = pts[order[i]];
        const auto permuted = hdbscan(shuffled, params);

        // map the permuted labels back into original order and compare partitions
        std::vector<int> back(pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i) back[order[i]] = permuted.labels[i];
        CHECK(oracle::same_partition(base.labels, back));
    }
}

TEST_CASE("exact agreement with the brute-force oracle on random small sets") {
    Rng rng(2024);
    int trials = 0;
    for (int t = 0; t < 1000; ++t) {
        const int n = rng.uniform_int(2, 10);
        std::vector<GeoPoint> pts;
        for (int i = 0; i < n; ++i) {
            // mixture: two loose centers plus uniform scatter and duplicates
            const double r = rng.uniform();
            if (r < 0.4) {
                pts.push_back({38.70 + rng.normal() * 5e-4, -9.10 + rng.normal() * 5e-4});
            } else if (r < 0.8) {
                pts.push_back({38.78 + rng.normal() * 5e-4, -9.02 + rng.normal() * 5e-4});
            } else if (r < 0.9 && !pts.empty()) {
                pts.push_back(pts[static_cast<std::size_t>(rng.uniform_int(
                    0, static_cast<int>(pts.size()) - 1))]);  // duplicate
            } else {
                pts.push_back({rng.uniform(38.5, 39.0), rng.uniform(-9.3, -8.9)});
            }
        }
        ClusterParams params;
        params.min_samples = std::array<int, 3>{1, 10, 100}[rng.uniform_int(0, 2)];
        params.min_cluster_size = rng.uniform_int(2, 5);
        const auto got = hdbscan(pts, params);
        const auto want = oracle::brute_hdbscan(pts, params);
        REQUIRE(oracle::same_partition(got.labels, want.labels));
        CHECK(got.num_clusters == want.num_clusters);
        ++trials;
    }
    CHECK(trials == 1000);
}

TEST_CASE("cluster size floor: every non-noise cluster has >= min_cluster_size members") {
    Rng rng(31);
    for (int t = 0; t < 100; ++t) {
        std::vector<GeoPoint> pts;
        const int n = rng.uniform_int(5, 40);
        for (int i = 0; i < n; ++i)
            pts.push_back({rng.uniform(38.6, 38.9), rng.uniform(-9.3, -9.0)});
        ClusterParams params{1, rng.uniform_int(2, 6)};
        const auto c = hdbscan(pts, params);
        std::map<int, int> sizes;
        for (int l : c.labels)
            if (l >= 0) ++sizes[l];
        for (const auto& [id, count] : sizes) CHECK(count >= params.min_cluster_size);
        // ids dense 0..k-1
        for (int k = 0; k < c.num_clusters; ++k) CHECK(sizes.count(k) == 1);
    }
}

TEST_CASE("search: separated dense groups are recovered") {
    Rng rng(77);
    std::vector<GeoPoint> pts;
    add_group(pts, rng, 38.70, -9.10, 12);
    add_group(pts, rng, 38.79, -9.02, 12);
    add_group(pts, rng, 38.62, -9.02, 12);
    const auto res = search_cluster_params(pts);
    CHECK(!res.all_noise);
    CHECK(res.clustering.num_clusters == 3);
    // groups land in distinct clusters
    CHECK(res.clustering.labels[0] == res.clustering.labels[11]);
    CHECK(res.clustering.labels[12] == res.clustering.labels[23]);
    CHECK(res.clustering.labels[0] != res.clustering.labels[12]);
}

TEST_CASE("search: with under 100 points the min_samples=100 rung never wins") {
    Rng rng(78);
    std::vector<GeoPoint> pts;
    add_group(pts, rng, 38.70, -9.10, 20);
    add_group(pts, rng, 38.79, -9.02, 20);
    const auto res = search_cluster_params(pts);
    CHECK(!res.all_noise);
    CHECK(res.params.min_samples < 100);
    CHECK(res.clustering.num_clusters >= 1);
}

TEST_CASE("search: single dense blob comes back as one cluster") {
    Rng rng(79);
    std::vector<GeoPoint> pts;
    add_group(pts, rng, 38.70, -9.10, 30);
    const auto res = search_cluster_params(pts);
    CHECK(!res.all_noise);
    CHECK(res.clustering.num_clusters == 1);
}

TEST_CASE("search: tie-breaks prefer larger min_cluster_size then smaller min_samples") {
    // identical points: every config gives one cluster with equal validity 0
    std::vector<GeoPoint> pts(40, {38.7, -9.1});
    const auto res = search_cluster_params(pts);
    CHECK(!res.all_noise);
    CHECK(res.params.min_cluster_size == 13);  // largest candidate <= 40/2
    CHECK(res.params.min_samples == 1);
}

TEST_CASE("search: needs two points") {
    CHECK_THROWS_AS(search_cluster_params({{1.0, 1.0}}), std::invalid_argument);
}

TEST_CASE("selected cluster stability dominates its children (excess of mass)") {
    // two dense groups close together inside a loose envelope: whatever is
    // selected, the partition must match the oracle, which implements the
    // selection rule independently
    Rng rng(55);
    for (int t = 0; t < 200; ++t) {
        std::vector<GeoPoint> pts;
        const double gap = rng.uniform(0.001, 0.05);
        add_group(pts, rng, 38.70, -9.10, rng.uniform_int(3, 5));
        add_group(pts, rng, 38.70 + gap, -9.10, rng.uniform_int(3, 5));
        ClusterParams params{1, 3};
        const auto got = hdbscan(pts, params);
        const auto want = oracle::brute_hdbscan(pts, params);
        REQUIRE(oracle::same_partition(got.labels, want.labels));
    }
}
