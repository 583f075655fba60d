#include "sxp/gbdt.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>

#include "sxp/rng.hpp"

namespace sxp {

namespace {

constexpr double kMinHessian = 1e-16;
constexpr double kMinGain = 1e-12;

struct BinnedFeature {
    std::vector<double> values;      // sorted distinct values
    std::vector<std::int32_t> bins;  // per-row bin index
};

std::vector<BinnedFeature> bin_features(const Matrix& x) {
    std::vector<BinnedFeature> out(x.cols);
    std::vector<double> col(x.rows);
    for (std::size_t f = 0; f < x.cols; ++f) {
        for (std::size_t i = 0; i < x.rows; ++i) col[i] = x.at(i, f);
        auto& bf = out[f];
        bf.values = col;
        std::sort(bf.values.begin(), bf.values.end());
        bf.values.erase(std::unique(bf.values.begin(), bf.values.end()), bf.values.end());
        bf.bins.resize(x.rows);
        for (std::size_t i = 0; i < x.rows; ++i) {
            bf.bins[i] = static_cast<std::int32_t>(
                std::lower_bound(bf.values.begin(), bf.values.end(), col[i]) -
                bf.values.begin());
        }
    }
    return out;
}

struct TreeBuilder {
    const Matrix& x;
    const std::vector<BinnedFeature>& binned;
    const std::vector<double>& grad;
    const std::vector<double>& hess;
    const Hyperparams& hp;
    std::vector<TreeNode> nodes;

    static double leaf_objective(double g, double h, double lambda) {
        return g * g / (h + lambda);
    }

    std::int32_t build(std::vector<std::int32_t>& rows, int depth) {
        double g_sum = 0.0, h_sum = 0.0;
        for (auto r : rows) {
            g_sum += grad[r];
            h_sum += hess[r];
        }
        const std::int32_t node_id = static_cast<std::int32_t>(nodes.size());
        nodes.emplace_back();
        nodes[node_id].cover = static_cast<double>(rows.size());

        const auto make_leaf = [&] {
            nodes[node_id].feature = -1;
            nodes[node_id].value =
                -hp.learning_rate * g_sum / (h_sum + hp.l2_lambda);
        };
        if (depth >= hp.max_depth || rows.size() < 2) {
            make_leaf();
            return node_id;
        }

        // exact greedy split over every distinct value of every feature
        double best_gain = kMinGain;
        std::size_t best_feature = 0;
        std::int32_t best_bin = -1;  // split between bin and bin+1
        const double parent_obj = leaf_objective(g_sum, h_sum, hp.l2_lambda);
        std::vector<double> gl, hl;
        std::vector<std::int32_t> cnt;
        for (std::size_t f = 0; f < x.cols; ++f) {
            const auto& bf = binned[f];
            const std::size_t nbins = bf.values.size();
            if (nbins < 2) continue;
            gl.assign(nbins, 0.0);
            hl.assign(nbins, 0.0);
            cnt.assign(nbins, 0);
            for (auto r : rows) {
                const auto b = bf.bins[r];
                gl[b] += grad[r];
                hl[b] += hess[r];
                ++cnt[b];
            }
            double g_left = 0.0, h_left = 0.0;
            std::int64_t c_left = 0;
            for (std::size_t b = 0; b + 1 < nbins; ++b) {
                g_left += gl[b];
                h_left += hl[b];
                c_left += cnt[b];
                if (c_left == 0 || c_left == static_cast<std::int64_t>(rows.size()))
                    continue;
                const double h_right = h_sum - h_left;
                if (h_left < hp.min_child_weight || h_right < hp.min_child_weight)
                    continue;
                const double gain =
                    0.5 * (leaf_objective(g_left, h_left, hp.l2_lambda) +
                           leaf_objective(g_sum - g_left, h_right, hp.l2_lambda) -
                           parent_obj);
                if (gain > best_gain) {
                    best_gain = gain;
                    best_feature = f;
                    best_bin = static_cast<std::int32_t>(b);
                }
            }
        }
        if (best_bin < 0) {
            make_leaf();
            return node_id;
        }

        const auto& bf = binned[best_feature];
        std::vector<std::int32_t> left_rows, right_rows;
        left_rows.reserve(rows.size());
        right_rows.reserve(rows.size());
        for (auto r : rows) {
            (bf.bins[r] <= best_bin ? left_rows : right_rows).push_back(r);
        }
        rows.clear();
        rows.shrink_to_fit();

        nodes[node_id].feature = static_cast<std::int32_t>(best_feature);
        nodes[node_id].threshold =
            0.5 * (bf.values[best_bin] + bf.values[best_bin + 1]);
        const std::int32_t left_id = build(left_rows, depth + 1);
        nodes[node_id].left = left_id;
        const std::int32_t right_id = build(right_rows, depth + 1);
        nodes[node_id].right = right_id;
        return node_id;
    }
};

void softmax_inplace(std::vector<double>& m) {
    const double mx = *std::max_element(m.begin(), m.end());
    double sum = 0.0;
    for (auto& v : m) {
        v = std::exp(v - mx);
        sum += v;
    }
    for (auto& v : m) v /= sum;
}

}  // namespace

void Hyperparams::validate() const {
    if (n_rounds < 1) throw std::invalid_argument("n_rounds must be >= 1");
    if (max_depth < 1) throw std::invalid_argument("max_depth must be >= 1");
    if (!(learning_rate > 0.0 && learning_rate <= 1.0))
        throw std::invalid_argument("learning_rate must be in (0, 1]");
    if (min_child_weight < 0.0) throw std::invalid_argument("min_child_weight must be >= 0");
    if (l2_lambda < 0.0) throw std::invalid_argument("l2_lambda must be >= 0");
    if (!(subsample > 0.0 && subsample <= 1.0))
        throw std::invalid_argument("subsample must be in (0, 1]");
}

double RegressionTree::predict(std::span<const double> x) const {
    std::int32_t i = 0;
    while (!nodes[i].is_leaf())
        i = x[nodes[i].feature] < nodes[i].threshold ? nodes[i].left : nodes[i].right;
    return nodes[i].value;
}

int RegressionTree::depth() const {
    std::vector<std::pair<std::int32_t, int>> stack{{0, 0}};
    int d = 0;
    while (!stack.empty()) {
        auto [i, level] = stack.back();
        stack.pop_back();
        d = std::max(d, level);
        if (!nodes[i].is_leaf()) {
            stack.emplace_back(nodes[i].left, level + 1);
            stack.emplace_back(nodes[i].right, level + 1);
        }
    }
    return d;
}

double RegressionTree::mean_value() const {
    double weighted = 0.0;
    const double total = nodes[0].cover;
    for (const auto& n : nodes)
        if (n.is_leaf()) weighted += n.value * n.cover;
    return total > 0.0 ? weighted / total : 0.0;
}

int GbdtModel::feature_index(const std::string& name) const {
    for (std::size_t i = 0; i < feature_names.size(); ++i)
        if (feature_names[i] == name) return static_cast<int>(i);
    return -1;
}

std::vector<double> GbdtModel::predict_margin(std::span<const double> x) const {
    std::vector<double> m = base_score;
    for (const auto& t : trees) m[t.class_index] += t.predict(x);
    return m;
}

std::vector<double> GbdtModel::predict_proba(std::span<const double> x) const {
    std::vector<double> m = predict_margin(x);
    softmax_inplace(m);
    return m;
}

ValenceClass GbdtModel::predict_class(std::span<const double> x) const {
    const auto p = predict_proba(x);
    const std::size_t i = std::max_element(p.begin(), p.end()) - p.begin();
    return class_list[i];
}

GbdtModel train_gbdt(const Matrix& features, const std::vector<ValenceClass>& labels,
                     const Hyperparams& hp, std::uint64_t seed,
                     const std::vector<std::string>& feature_names) {
    hp.validate();
    if (features.rows != labels.size())
        throw std::invalid_argument("feature/label row mismatch");
    if (features.rows == 0) throw std::invalid_argument("empty training set");
    for (double v : features.data)
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite feature value");

    GbdtModel model;
    model.seed = seed;
    model.hyperparams = hp;
    if (feature_names.empty()) {
        for (std::size_t f = 0; f < features.cols; ++f)
            model.feature_names.push_back("f" + std::to_string(f));
    } else {
        if (feature_names.size() != features.cols)
            throw std::invalid_argument("feature name count mismatch");
        model.feature_names = feature_names;
    }

    // dense class indices in ValenceClass order
    std::map<ValenceClass, int> class_index;
    for (auto l : labels) class_index.emplace(l, 0);
    if (class_index.size() < 2)
        throw std::invalid_argument("training needs at least two label classes");
    for (auto& [cls, idx] : class_index) {
        idx = static_cast<int>(model.class_list.size());
        model.class_list.push_back(cls);
    }
    const std::size_t k = model.class_list.size();
    model.base_score.assign(k, 0.0);

    std::vector<int> y(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) y[i] = class_index[labels[i]];

    const auto binned = bin_features(features);
    const std::size_t n = features.rows;
    std::vector<double> margins(n * k, 0.0);
    std::vector<double> probs(k), grad(n), hess(n);
    Rng rng(seed);

    for (int round = 0; round < hp.n_rounds; ++round) {
        // row subsample shared by the round's class trees
        std::vector<std::int32_t> sample;
        sample.reserve(n);
        if (hp.subsample < 1.0) {
            for (std::size_t i = 0; i < n; ++i)
                if (rng.uniform() < hp.subsample) sample.push_back(static_cast<std::int32_t>(i));
            if (sample.empty())
                for (std::size_t i = 0; i < n; ++i) sample.push_back(static_cast<std::int32_t>(i));
        } else {
            for (std::size_t i = 0; i < n; ++i) sample.push_back(static_cast<std::int32_t>(i));
        }

        std::vector<std::vector<double>> round_probs(n);
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<double> p(margins.begin() + i * k, margins.begin() + (i + 1) * k);
            softmax_inplace(p);
            round_probs[i] = std::move(p);
        }

        for (std::size_t c = 0; c < k; ++c) {
            for (std::size_t i = 0; i < n; ++i) {
                const double p = round_probs[i][c];
                grad[i] = p - (y[i] == static_cast<int>(c) ? 1.0 : 0.0);
                hess[i] = std::max(2.0 * p * (1.0 - p), kMinHessian);
            }
            TreeBuilder builder{features, binned, grad, hess, hp, {}};
            std::vector<std::int32_t> rows = sample;
            builder.build(rows, 0);
            RegressionTree tree;
            tree.round = round;
            tree.class_index = static_cast<std::uint8_t>(c);
            tree.nodes = std::move(builder.nodes);
            for (std::size_t i = 0; i < n; ++i)
                margins[i * k + c] += tree.predict(features.row(i));
            model.trees.push_back(std::move(tree));
        }
    }
    return model;
}

double log_loss(const GbdtModel& model, const Matrix& features,
                const std::vector<ValenceClass>& labels) {
    if (features.rows != labels.size())
        throw std::invalid_argument("feature/label row mismatch");
    double loss = 0.0;
    for (std::size_t i = 0; i < features.rows; ++i) {
        const auto p = model.predict_proba(features.row(i));
        int idx = -1;
        for (std::size_t c = 0; c < model.class_list.size(); ++c)
            if (model.class_list[c] == labels[i]) idx = static_cast<int>(c);
        if (idx < 0) throw std::invalid_argument("label class not in model");
        loss += -std::log(std::max(p[idx], 1e-15));
    }
    return loss / static_cast<double>(features.rows);
}

// ---- persistence --------------------------------------------------------

namespace {

constexpr char kMagic[4] = {'S', 'X', 'P', 'M'};
constexpr std::uint16_t kVersion = 1;

struct Writer {
    std::vector<unsigned char> out;
    void u8(std::uint8_t v) { out.push_back(v); }
    void u16(std::uint16_t v) {
        out.push_back(v & 0xff);
        out.push_back((v >> 8) & 0xff);
    }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) out.push_back((v >> (8 * i)) & 0xff);
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) out.push_back((v >> (8 * i)) & 0xff);
    }
    void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
    void f64(double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, 8);
        u64(bits);
    }
    void str(const std::string& s) {
        if (s.size() > 0xffff) throw ModelIoError("string too long for model format");
        u16(static_cast<std::uint16_t>(s.size()));
        out.insert(out.end(), s.begin(), s.end());
    }
};

struct Reader {
    std::span<const unsigned char> in;
    std::size_t pos = 0;
    void need(std::size_t n) const {
        if (pos + n > in.size()) throw ModelIoError("model file truncated");
    }
    std::uint8_t u8() {
        need(1);
        return in[pos++];
    }
    std::uint16_t u16() {
        need(2);
        std::uint16_t v = in[pos] | (std::uint16_t(in[pos + 1]) << 8);
        pos += 2;
        return v;
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 3; i >= 0; --i) v = (v << 8) | in[pos + i];
        pos += 4;
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 7; i >= 0; --i) v = (v << 8) | in[pos + i];
        pos += 8;
        return v;
    }
    std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
    double f64() {
        const std::uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }
    std::string str() {
        const std::uint16_t n = u16();
        need(n);
        std::string s(reinterpret_cast<const char*>(in.data() + pos), n);
        pos += n;
        return s;
    }
};

}  // namespace

std::vector<unsigned char> serialize_model(const GbdtModel& model) {
    Writer w;
    w.out.insert(w.out.end(), kMagic, kMagic + 4);
    w.u16(kVersion);
    w.u8(static_cast<std::uint8_t>(model.class_list.size()));
    for (auto c : model.class_list) w.u8(static_cast<std::uint8_t>(c));
    w.u32(static_cast<std::uint32_t>(model.feature_names.size()));
    for (const auto& n : model.feature_names) w.str(n);
    for (double b : model.base_score) w.f64(b);
    w.u64(model.seed);
    w.i32(model.hyperparams.n_rounds);
    w.i32(model.hyperparams.max_depth);
    w.f64(model.hyperparams.learning_rate);
    w.f64(model.hyperparams.min_child_weight);
    w.f64(model.hyperparams.l2_lambda);
    w.f64(model.hyperparams.subsample);
    w.u16(static_cast<std::uint16_t>(model.fold_plan.k));
    w.u16(static_cast<std::uint16_t>(model.fold_plan.fold_sizes.size()));
    for (auto s : model.fold_plan.fold_sizes) w.i32(s);
    w.u32(static_cast<std::uint32_t>(model.trees.size()));
    for (const auto& t : model.trees) {
        w.u32(static_cast<std::uint32_t>(t.round));
        w.u8(t.class_index);
        w.u32(static_cast<std::uint32_t>(t.nodes.size()));
        for (const auto& n : t.nodes) {
            w.i32(n.feature);
            w.f64(n.threshold);
            w.i32(n.left);
            w.i32(n.right);
            w.f64(n.value);
            w.f64(n.cover);
        }
    }
    return std::move(w.out);
}

GbdtModel deserialize_model(std::span<const unsigned char> bytes) {
    Reader r{bytes};
    r.need(6);
    if (std::memcmp(bytes.data(), kMagic, 4) != 0)
        throw ModelIoError("not a model file (bad magic)");
    r.pos = 4;
    const std::uint16_t version = r.u16();
    if (version != kVersion)
        throw ModelIoError("unsupported model version " + std::to_string(version));
    GbdtModel m;
    const std::uint8_t nc = r.u8();
    for (int i = 0; i < nc; ++i) {
        const std::uint8_t c = r.u8();
        if (c >= kNumValenceClasses) throw ModelIoError("bad class id in model");
        m.class_list.push_back(static_cast<ValenceClass>(c));
    }
    const std::uint32_t nf = r.u32();
    for (std::uint32_t i = 0; i < nf; ++i) m.feature_names.push_back(r.str());
    for (int i = 0; i < nc; ++i) m.base_score.push_back(r.f64());
    m.seed = r.u64();
    m.hyperparams.n_rounds = r.i32();
    m.hyperparams.max_depth = r.i32();
    m.hyperparams.learning_rate = r.f64();
    m.hyperparams.min_child_weight = r.f64();
    m.hyperparams.l2_lambda = r.f64();
    m.hyperparams.subsample = r.f64();
    m.fold_plan.k = r.u16();
    const std::uint16_t nfold = r.u16();
    for (int i = 0; i < nfold; ++i) m.fold_plan.fold_sizes.push_back(r.i32());
    const std::uint32_t ntrees = r.u32();
    for (std::uint32_t t = 0; t < ntrees; ++t) {
        RegressionTree tree;
        tree.round = static_cast<std::int32_t>(r.u32());
        tree.class_index = r.u8();
        if (tree.class_index >= nc) throw ModelIoError("bad tree class index");
        const std::uint32_t nn = r.u32();
        tree.nodes.resize(nn);
        for (std::uint32_t i = 0; i < nn; ++i) {
            auto& n = tree.nodes[i];
            n.feature = r.i32();
            n.threshold = r.f64();
            n.left = r.i32();
            n.right = r.i32();
            n.value = r.f64();
            n.cover = r.f64();
            if (n.feature >= static_cast<std::int32_t>(nf))
                throw ModelIoError("split feature outside feature table");
            if (!n.is_leaf() &&
                (n.left < 0 || n.right < 0 || n.left >= static_cast<std::int32_t>(nn) ||
                 n.right >= static_cast<std::int32_t>(nn)))
                throw ModelIoError("bad child index in tree");
        }
        if (nn == 0) throw ModelIoError("empty tree in model");
        m.trees.push_back(std::move(tree));
    }
    if (r.pos != bytes.size()) throw ModelIoError("trailing bytes after model");
    return m;
}

void persist_model(const GbdtModel& model, const std::string& path) {
    const auto bytes = serialize_model(model);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ModelIoError("cannot open model file for writing: " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw ModelIoError("failed writing model file: " + path);
}

GbdtModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ModelIoError("cannot open model file: " + path);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    return deserialize_model(bytes);
}

}  // namespace sxp
