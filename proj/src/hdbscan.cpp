#include "sxp/hdbscan.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "sxp/economy.hpp"  // haversine_m

namespace sxp {

namespace {

constexpr double kLambdaCap = 1e15;  // stands in for 1/0 on duplicate points

double to_lambda(double dist) {
    if (dist <= 0.0) return kLambdaCap;
    return std::min(1.0 / dist, kLambdaCap);
}

struct DendroNode {
    int left = -1;   // node ids; 0..n-1 are points
    int right = -1;
    double dist = 0.0;
    int size = 1;
};

// Single-linkage dendrogram from MST edges sorted ascending.
std::vector<DendroNode> build_dendrogram(int n, std::vector<std::array<double, 3>> edges) {
    std::sort(edges.begin(), edges.end(), [](const auto& a, const auto& b) {
        if (a[0] != b[0]) return a[0] < b[0];
        if (a[1] != b[1]) return a[1] < b[1];
        return a[2] < b[2];
    });
    std::vector<DendroNode> nodes(static_cast<std::size_t>(2 * n - 1));
    std::vector<int> parent(static_cast<std::size_t>(2 * n - 1));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&parent](int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    int next = n;
    for (const auto& e : edges) {
        const int ra = find(static_cast<int>(e[1]));
        const int rb = find(static_cast<int>(e[2]));
        DendroNode& m = nodes[next];
        m.left = ra;
        m.right = rb;
        m.dist = e[0];
        m.size = nodes[ra].size + nodes[rb].size;
        parent[ra] = parent[rb] = next;
        ++next;
    }
    return nodes;
}

void collect_leaves(const std::vector<DendroNode>& nodes, int node, std::vector<int>& out) {
    std::vector<int> stack{node};
    while (!stack.empty()) {
        const int cur = stack.back();
        stack.pop_back();
        if (nodes[cur].left < 0) {
            out.push_back(cur);
        } else {
            stack.push_back(nodes[cur].left);
            stack.push_back(nodes[cur].right);
        }
    }
}

struct CondensedCluster {
    double birth_lambda = 0.0;
    double stability = 0.0;
    std::vector<int> children;                    // child cluster ids
    std::vector<std::pair<int, double>> points;   // (point, fall-out lambda)
};

// Top-down condensation of the dendrogram: children smaller than
// min_cluster_size fall out of the running cluster; a split into two
// large-enough children births two new clusters.
std::vector<CondensedCluster> condense(const std::vector<DendroNode>& nodes, int n,
                                       int min_cluster_size) {
    std::vector<CondensedCluster> clusters(1);
    clusters[0].birth_lambda = 0.0;
    std::vector<std::pair<int, int>> stack{{2 * n - 2, 0}};  // (dendro node, cluster)
    while (!stack.empty()) {
        auto [node, cl] = stack.back();
        stack.pop_back();
        const DendroNode& d = nodes[node];
        if (d.left < 0) {  // bare point as a cluster root; only if n == 1
            clusters[cl].points.emplace_back(node, clusters[cl].birth_lambda);
            continue;
        }
        const double lambda = to_lambda(d.dist);
        const int ls = nodes[d.left].size;
        const int rs = nodes[d.right].size;
        const bool left_big = ls >= min_cluster_size;
        const bool right_big = rs >= min_cluster_size;
        if (left_big && right_big) {
            // true split: current cluster dies, two children born
            clusters[cl].stability +=
                (d.size) * (lambda - clusters[cl].birth_lambda);
            for (int side : {d.left, d.right}) {
                CondensedCluster child;
                child.birth_lambda = lambda;
                clusters[cl].children.push_back(static_cast<int>(clusters.size()));
                stack.emplace_back(side, static_cast<int>(clusters.size()));
                clusters.push_back(std::move(child));
            }
        } else if (left_big || right_big) {
            const int small = left_big ? d.right : d.left;
            const int big = left_big ? d.left : d.right;
            std::vector<int> fallen;
            collect_leaves(nodes, small, fallen);
            for (int p : fallen) {
                clusters[cl].points.emplace_back(p, lambda);
                clusters[cl].stability += lambda - clusters[cl].birth_lambda;
            }
            stack.emplace_back(big, cl);
        } else {
            // both sides below min size: every point falls, cluster ends
            std::vector<int> fallen;
            collect_leaves(nodes, node, fallen);
            for (int p : fallen) {
                clusters[cl].points.emplace_back(p, lambda);
                clusters[cl].stability += lambda - clusters[cl].birth_lambda;
            }
        }
    }
    return clusters;
}

// Excess-of-mass selection; the root is selectable, so a single dense
// group comes back as one cluster rather than noise.
std::vector<bool> select_eom(std::vector<CondensedCluster>& clusters) {
    const int m = static_cast<int>(clusters.size());
    std::vector<bool> selected(m, false);
    std::vector<double> subtree(m, 0.0);
    for (int c = m - 1; c >= 0; --c) {  // children always have larger ids
        if (clusters[c].children.empty()) {
            selected[c] = true;
            subtree[c] = clusters[c].stability;
            continue;
        }
        double child_sum = 0.0;
        for (int ch : clusters[c].children) child_sum += subtree[ch];
        if (clusters[c].stability >= child_sum) {
            selected[c] = true;
            subtree[c] = clusters[c].stability;
        } else {
            subtree[c] = child_sum;
        }
    }
    // prune descendants of selected clusters, top-down
    std::vector<std::pair<int, bool>> stack{{0, false}};  // (cluster, under selected)
    while (!stack.empty()) {
        auto [c, covered] = stack.back();
        stack.pop_back();
        if (covered) selected[c] = false;
        const bool now_covered = covered || selected[c];
        for (int ch : clusters[c].children) stack.emplace_back(ch, now_covered);
    }
    return selected;
}

void collect_cluster_points(const std::vector<CondensedCluster>& clusters, int c,
                            std::vector<int>& out) {
    std::vector<int> stack{c};
    while (!stack.empty()) {
        const int cur = stack.back();
        stack.pop_back();
        for (const auto& [p, lambda] : clusters[cur].points) out.push_back(p);
        for (int ch : clusters[cur].children) stack.push_back(ch);
    }
}

// Density-validity of the labeling: per cluster, how far its internal
// density sparseness sits below its separation from everything else,
// weighted by cluster size. Range [-1, 1]; higher is better.
double validity_score(const std::vector<std::vector<double>>& mreach,
                      const std::vector<int>& labels, int num_clusters) {
    const int n = static_cast<int>(labels.size());
    if (num_clusters == 0) return -1.0;
    std::vector<std::vector<int>> members(num_clusters);
    for (int i = 0; i < n; ++i)
        if (labels[i] >= 0) members[labels[i]].push_back(i);

    double score = 0.0;
    for (int c = 0; c < num_clusters; ++c) {
        const auto& pts = members[c];
        // sparseness: max edge of the MST over the cluster's points
        double sparseness = 0.0;
        if (pts.size() > 1) {
            std::vector<bool> in_tree(pts.size(), false);
            std::vector<double> best(pts.size(), std::numeric_limits<double>::infinity());
            in_tree[0] = true;
            for (std::size_t k = 0; k < pts.size(); ++k)
                best[k] = mreach[pts[0]][pts[k]];
            for (std::size_t added = 1; added < pts.size(); ++added) {
                int pick = -1;
                for (std::size_t k = 0; k < pts.size(); ++k)
                    if (!in_tree[k] && (pick < 0 || best[k] < best[pick]))
                        pick = static_cast<int>(k);
                sparseness = std::max(sparseness, best[pick]);
                in_tree[pick] = true;
                for (std::size_t k = 0; k < pts.size(); ++k)
                    if (!in_tree[k])
                        best[k] = std::min(best[k], mreach[pts[pick]][pts[k]]);
            }
        }
        // separation: nearest mutual-reachability to any point outside
        double separation = std::numeric_limits<double>::infinity();
        for (int p : pts)
            for (int q = 0; q < n; ++q)
                if (labels[q] != c) separation = std::min(separation, mreach[p][q]);
        double v;
        if (!std::isfinite(separation)) {
            v = 0.0;  // single cluster covering everything: neutral
        } else {
            const double denom = std::max(separation, sparseness);
            v = denom > 0.0 ? (separation - sparseness) / denom : 0.0;
        }
        score += (static_cast<double>(pts.size()) / n) * v;
    }
    return score;
}

}  // namespace

Clustering hdbscan(const std::vector<GeoPoint>& points, const ClusterParams& params) {
    if (params.min_cluster_size < 2)
        throw std::invalid_argument("min_cluster_size must be >= 2");
    if (params.min_samples < 1)
        throw std::invalid_argument("min_samples must be >= 1");
    const int n = static_cast<int>(points.size());
    Clustering result;
    result.params = params;
    result.labels.assign(points.size(), kNoiseLabel);
    result.num_clusters = 0;
    result.validity = -1.0;
    if (n < std::max(params.min_samples, params.min_cluster_size)) return result;

    // pairwise and mutual-reachability distances
    std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            dist[i][j] = dist[j][i] =
                haversine_m(points[i].lat, points[i].lon, points[j].lat, points[j].lon);
    std::vector<double> core(n);
    for (int i = 0; i < n; ++i) {
        std::vector<double> row = dist[i];  // includes self distance 0
        std::nth_element(row.begin(), row.begin() + (params.min_samples - 1), row.end());
        core[i] = row[params.min_samples - 1];
    }
    std::vector<std::vector<double>> mreach(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) mreach[i][j] = std::max({core[i], core[j], dist[i][j]});

    // exact MST (Prim)
    std::vector<std::array<double, 3>> edges;
    if (n > 1) {
        std::vector<bool> in_tree(n, false);
        std::vector<double> best(n, std::numeric_limits<double>::infinity());
        std::vector<int> from(n, 0);
        in_tree[0] = true;
        for (int j = 1; j < n; ++j) best[j] = mreach[0][j];
        for (int added = 1; added < n; ++added) {
            int pick = -1;
            for (int j = 0; j < n; ++j)
                if (!in_tree[j] && (pick < 0 || best[j] < best[pick])) pick = j;
            edges.push_back({best[pick], static_cast<double>(std::min(from[pick], pick)),
                             static_cast<double>(std::max(from[pick], pick))});
            in_tree[pick] = true;
            for (int j = 0; j < n; ++j)
                if (!in_tree[j] && mreach[pick][j] < best[j]) {
                    best[j] = mreach[pick][j];
                    from[j] = pick;
                }
        }
    }

    const auto dendro = build_dendrogram(n, std::move(edges));
    auto clusters = condense(dendro, n, params.min_cluster_size);
    const auto selected = select_eom(clusters);

    // assign dense labels ordered by smallest member point index
    std::vector<std::pair<int, std::vector<int>>> chosen;  // (min point, members)
    for (std::size_t c = 0; c < clusters.size(); ++c) {
        if (!selected[c]) continue;
        std::vector<int> pts;
        collect_cluster_points(clusters, static_cast<int>(c), pts);
        if (pts.empty()) continue;
        chosen.emplace_back(*std::min_element(pts.begin(), pts.end()), std::move(pts));
    }
    std::sort(chosen.begin(), chosen.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t id = 0; id < chosen.size(); ++id)
        for (int p : chosen[id].second) result.labels[p] = static_cast<int>(id);
    result.num_clusters = static_cast<int>(chosen.size());
    result.validity = validity_score(mreach, result.labels, result.num_clusters);
    return result;
}

ClusterSearchResult search_cluster_params(const std::vector<GeoPoint>& points) {
    if (points.size() < 2)
        throw std::invalid_argument("parameter search needs at least 2 points");
    const int n = static_cast<int>(points.size());
    std::vector<int> size_grid;
    for (int v : {2, 3, 5, 8, 13, 21, 34})
        if (v == 2 || v <= n / 2) size_grid.push_back(v);

    ClusterSearchResult best;
    bool have_best = false;
    for (const int mcs : size_grid) {
        for (const int ms : {1, 10, 100}) {
            ClusterParams params{ms, mcs};
            Clustering c = hdbscan(points, params);
            const bool c_noise = c.all_noise();
            bool better;
            if (!have_best) {
                better = true;
            } else if (c_noise != best.clustering.all_noise()) {
                better = !c_noise;  // any real clustering beats all-noise
            } else if (c.validity != best.clustering.validity) {
                better = c.validity > best.clustering.validity;
            } else if (params.min_cluster_size != best.params.min_cluster_size) {
                better = params.min_cluster_size > best.params.min_cluster_size;
            } else {
                better = params.min_samples < best.params.min_samples;
            }
            if (better) {
                best.params = params;
                best.clustering = std::move(c);
                have_best = true;
            }
        }
    }
    best.all_noise = best.clustering.all_noise();
    return best;
}

}  // namespace sxp
