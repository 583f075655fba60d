#pragma once

// Test-side oracles: independent brute-force implementations used to
// derive expected values. These deliberately avoid the library's code
// paths (different construction, different algorithms) so agreement is
// meaningful evidence.

#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "sxp/gbdt.hpp"
#include "sxp/hdbscan.hpp"
#include "sxp/types.hpp"

namespace oracle {

// ---- civil calendar ------------------------------------------------------
// Weekday (Monday=0) via Sakamoto's congruence, independent of the
// library's era-based date math. offset_s is a fixed UTC offset.
sxp::MomentContext civil_moment(sxp::Instant at_utc_ms, int offset_s);

// ---- economy -------------------------------------------------------------
// Last-observation-carried-forward resampling of a location stream at the
// given grid times; returns an index into `stream` for each grid time
// (-1 if nothing observed yet).
std::vector<int> locf_indices(const std::vector<sxp::SensorSample>& stream,
                              const std::vector<sxp::Instant>& grid_times);

// ---- clustering ----------------------------------------------------------
// Brute-force condensed-tree/stability clustering with the same contract
// as sxp::hdbscan (root selectable, subtree membership), built by naive
// agglomerative merging and recursive selection.
struct BruteClustering {
    std::vector<int> labels;  // dense ids or -1 noise
    int num_clusters = 0;
};
BruteClustering brute_hdbscan(const std::vector<sxp::GeoPoint>& points,
                              const sxp::ClusterParams& params);

// True iff the two labelings induce the same partition and noise set.
bool same_partition(const std::vector<int>& a, const std::vector<int>& b);

// ---- Shapley -------------------------------------------------------------
// Exact Shapley values of one tree by subset enumeration over the
// cover-weighted conditional expectation. n_features <= ~20.
std::vector<double> brute_tree_shap(const sxp::RegressionTree& tree,
                                    std::span<const double> x, std::size_t n_features);
// Cover-weighted expectation with the features in `fixed` pinned to x.
double tree_expvalue(const sxp::RegressionTree& tree, std::span<const double> x,
                     const std::set<int>& fixed);

// ---- geodesy ---------------------------------------------------------------
// Transverse Mercator forward projection via Snyder's working-manual
// series (nu/T/C/A terms), an independent derivation from the library's
// Krüger-series path. Accurate to a few millimeters inside a UTM zone.
void snyder_utm_forward(double lat_deg, double lon_deg, int zone, double& easting,
                        double& northing);

// ---- imbalance degree ----------------------------------------------------
// Dense-grid maximization of distance-to-balanced over distributions with
// exactly m minority classes (3-class simplex).
double grid_iota_distance(int m, int resolution = 2000);

// ---- Mann-Whitney --------------------------------------------------------
// Exact two-sided p by enumerating every n-subset labeling of the pooled
// sample (tie-free inputs only).
double enumerate_mwu_p(const std::vector<double>& a, const std::vector<double>& b);

// ---- optimization --------------------------------------------------------
// Dense-grid maximum of an objective over a box.
double grid_max(const std::function<double(const std::vector<double>&)>& f,
                const std::vector<std::pair<double, double>>& box, int steps_per_dim);

}  // namespace oracle

// ---- synthetic data ------------------------------------------------------

namespace synth {

enum class Driver { Weekday, Hour, Location };

struct Entity {
    std::string entity_id;
    std::vector<sxp::ValenceReport> reports;
    std::vector<sxp::SensorSample> samples;
    Driver driver = Driver::Weekday;
};

struct EntityOptions {
    std::size_t n_reports = 1000;
    double label_noise = 0.05;
    Driver driver = Driver::Weekday;
    std::string tz = "UTC";
    double base_lat = 38.74;
    double base_lon = -9.15;
    int n_places = 3;
};

Entity make_entity(const std::string& id, std::uint64_t seed, const EntityOptions& opts);

// Random-walk location stream for one entity: mostly sub-threshold steps,
// occasional large jumps and long pauses.
std::vector<sxp::SensorSample> random_walk_stream(std::uint64_t seed, std::size_t n,
                                                  double step_m = 5.0);

}  // namespace synth
