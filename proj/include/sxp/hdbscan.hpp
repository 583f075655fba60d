#pragma once

// Density-based clustering of geographic points: mutual-reachability
// distances (haversine metric), exact minimum spanning tree, condensed
// cluster tree and excess-of-mass stability selection. Points outside
// every selected cluster are noise.

#include <utility>
#include <vector>

namespace sxp {

struct GeoPoint {
    double lat = 0.0;
    double lon = 0.0;
};

struct ClusterParams {
    int min_samples = 1;      // kth neighbor (self counted) for core distance
    int min_cluster_size = 2; // >= 2
};

constexpr int kNoiseLabel = -1;

struct Clustering {
    std::vector<int> labels;  // dense ids 0..k-1 or kNoiseLabel
    ClusterParams params;
    double validity = -1.0;   // density-validity score, [-1, 1]
    int num_clusters = 0;

    bool all_noise() const { return num_clusters == 0; }
};

// Core clustering. Fewer points than max(min_samples, min_cluster_size)
// yields an all-noise result (not an error).
Clustering hdbscan(const std::vector<GeoPoint>& points, const ClusterParams& params);

struct ClusterSearchResult {
    ClusterParams params;
    Clustering clustering;
    bool all_noise = false;  // every candidate configuration was all-noise
};

// Runs hdbscan for min_samples in {1, 10, 100} over a min_cluster_size
// grid of {2, 3, 5, 8, 13, 21, 34} capped at |points|/2, and returns the
// configuration maximizing the validity score. Ties break toward larger
// min_cluster_size, then smaller min_samples. Requires >= 2 points.
ClusterSearchResult search_cluster_params(const std::vector<GeoPoint>& points);

}  // namespace sxp
