#include "sxp/bayesopt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

#include "sxp/rng.hpp"

namespace sxp {

namespace {

constexpr double kJitter = 1e-8;
constexpr double kNoise = 1e-6;

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }
double normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * 3.14159265358979323846);
}

double matern52(double r, double ls) {
    const double s = std::sqrt(5.0) * r / ls;
    return (1.0 + s + s * s / 3.0) * std::exp(-s);
}

// Low-discrepancy sequence for initial trials and candidate pools.
double halton(int index, int base) {
    double f = 1.0, r = 0.0;
    int i = index;
    while (i > 0) {
        f /= base;
        r += f * (i % base);
        i /= base;
    }
    return r;
}

const int kHaltonBases[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29};

struct Surrogate {
    Eigen::MatrixXd x;   // rows: observations in unit space
    Eigen::VectorXd y;   // standardized objectives
    Eigen::MatrixXd chol_l;
    Eigen::VectorXd alpha;
    double lengthscale = 0.3;
    double y_mean = 0.0, y_std = 1.0;

    void fit(const std::vector<std::vector<double>>& pts, const std::vector<double>& vals) {
        const int n = static_cast<int>(pts.size());
        const int d = static_cast<int>(pts[0].size());
        x.resize(n, d);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < d; ++j) x(i, j) = pts[i][j];
        y_mean = 0.0;
        for (double v : vals) y_mean += v;
        y_mean /= n;
        double var = 0.0;
        for (double v : vals) var += (v - y_mean) * (v - y_mean);
        y_std = n > 1 ? std::sqrt(var / (n - 1)) : 1.0;
        if (y_std < 1e-12) y_std = 1.0;
        y.resize(n);
        for (int i = 0; i < n; ++i) y(i) = (vals[i] - y_mean) / y_std;

        Eigen::MatrixXd dist(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                dist(i, j) = (x.row(i) - x.row(j)).norm();

        double best_ls = 0.3;
        double best_ml = -std::numeric_limits<double>::infinity();
        for (double ls : {0.05, 0.1, 0.2, 0.4, 0.8, 1.6}) {
            Eigen::MatrixXd k(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) k(i, j) = matern52(dist(i, j), ls);
            k.diagonal().array() += kNoise + kJitter;
            Eigen::LLT<Eigen::MatrixXd> llt(k);
            if (llt.info() != Eigen::Success) continue;
            const Eigen::VectorXd a = llt.solve(y);
            double logdet = 0.0;
            for (int i = 0; i < n; ++i) logdet += std::log(llt.matrixL()(i, i));
            const double ml = -0.5 * y.dot(a) - logdet;
            if (ml > best_ml) {
                best_ml = ml;
                best_ls = ls;
            }
        }
        lengthscale = best_ls;
        Eigen::MatrixXd k(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) k(i, j) = matern52(dist(i, j), lengthscale);
        k.diagonal().array() += kNoise + kJitter;
        Eigen::LLT<Eigen::MatrixXd> llt(k);
        chol_l = llt.matrixL();
        alpha = llt.solve(y);
    }

    // posterior mean/stddev in the original objective units
    std::pair<double, double> predict(const std::vector<double>& pt) const {
        const int n = static_cast<int>(x.rows());
        Eigen::VectorXd ks(n);
        Eigen::Map<const Eigen::VectorXd> p(pt.data(), static_cast<int>(pt.size()));
        for (int i = 0; i < n; ++i) ks(i) = matern52((x.row(i).transpose() - p).norm(), lengthscale);
        const double mu = ks.dot(alpha);
        const Eigen::VectorXd v = chol_l.triangularView<Eigen::Lower>().solve(ks);
        const double var = std::max(1.0 + kNoise - v.squaredNorm(), 1e-12);
        return {mu * y_std + y_mean, std::sqrt(var) * y_std};
    }
};

double expected_improvement(double mu, double sigma, double best) {
    if (sigma < 1e-12) return 0.0;
    const double z = (mu - best) / sigma;
    return (mu - best) * normal_cdf(z) + sigma * normal_pdf(z);
}

}  // namespace

double ParamRange::from_unit(double u) const {
    u = std::clamp(u, 0.0, 1.0);
    double v;
    if (log_scale) {
        v = std::exp(std::log(lo) + u * (std::log(hi) - std::log(lo)));
    } else {
        v = lo + u * (hi - lo);
    }
    if (integer) v = std::round(v);
    return std::clamp(v, lo, hi);
}

double ParamRange::to_unit(double v) const {
    double u;
    if (log_scale) {
        u = (std::log(v) - std::log(lo)) / (std::log(hi) - std::log(lo));
    } else {
        u = (v - lo) / (hi - lo);
    }
    return std::clamp(u, 0.0, 1.0);
}

BayesOptResult bayes_opt(const Objective& objective, const std::vector<ParamRange>& space,
                         int budget, std::uint64_t seed) {
    if (budget < 1) throw std::invalid_argument("budget must be >= 1");
    if (space.empty()) throw std::invalid_argument("empty parameter space");
    for (const auto& r : space) {
        if (!(r.hi >= r.lo)) throw std::invalid_argument("bad range for " + r.name);
        if (r.log_scale && r.lo <= 0.0)
            throw std::invalid_argument("log-scaled range needs positive bounds: " + r.name);
    }
    const int d = static_cast<int>(space.size());
    Rng rng(seed);
    std::vector<double> rotation(d);
    for (auto& r : rotation) r = rng.uniform();

    BayesOptResult result;
    result.best_objective = -std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> unit_points;  // successful trials only
    std::vector<double> values;

    auto to_raw = [&](const std::vector<double>& u) {
        ParamPoint p(d);
        for (int j = 0; j < d; ++j) p[j] = space[j].from_unit(u[j]);
        return p;
    };
    auto evaluated_already = [&](const ParamPoint& p) {
        for (const auto& t : result.trials) {
            bool same = true;
            for (int j = 0; j < d; ++j)
                if (std::abs(t.point[j] - p[j]) > 1e-12) { same = false; break; }
            if (same) return true;
        }
        return false;
    };
    auto run_trial = [&](const std::vector<double>& u) {
        Trial t;
        t.index = static_cast<int>(result.trials.size());
        t.point = to_raw(u);
        const double v = objective(t.point);
        if (!std::isfinite(v)) {
            t.failed = true;
        } else {
            t.objective = v;
            // keep the surrogate on the rounded/clamped coordinates
            std::vector<double> uu(d);
            for (int j = 0; j < d; ++j) uu[j] = space[j].to_unit(t.point[j]);
            unit_points.push_back(uu);
            values.push_back(v);
            if (v > result.best_objective) {
                result.best_objective = v;
                result.best = t.point;
                result.any_succeeded = true;
            }
        }
        result.trials.push_back(std::move(t));
    };

    const int n_init = std::min(budget, std::max(4, 2 * d));
    int halton_cursor = 1;
    for (int i = 0; i < n_init; ++i) {
        std::vector<double> u(d);
        for (int j = 0; j < d; ++j) {
            const double h = halton(halton_cursor, kHaltonBases[j % 10]);
            u[j] = std::fmod(h + rotation[j], 1.0);
        }
        ++halton_cursor;
        run_trial(u);
    }

    while (static_cast<int>(result.trials.size()) < budget) {
        if (values.size() < 2) {
            // not enough signal for a surrogate; keep space-filling
            std::vector<double> u(d);
            for (int j = 0; j < d; ++j)
                u[j] = std::fmod(halton(halton_cursor, kHaltonBases[j % 10]) + rotation[j], 1.0);
            ++halton_cursor;
            run_trial(u);
            continue;
        }
        Surrogate gp;
        gp.fit(unit_points, values);

        // candidate pool: low-discrepancy + uniform + local perturbations
        std::vector<std::vector<double>> candidates;
        for (int i = 0; i < 256; ++i) {
            std::vector<double> u(d);
            for (int j = 0; j < d; ++j)
                u[j] = std::fmod(halton(halton_cursor, kHaltonBases[j % 10]) + rotation[j], 1.0);
            ++halton_cursor;
            candidates.push_back(std::move(u));
        }
        for (int i = 0; i < 128; ++i) {
            std::vector<double> u(d);
            for (int j = 0; j < d; ++j) u[j] = rng.uniform();
            candidates.push_back(std::move(u));
        }
        std::vector<double> best_u(d);
        for (int j = 0; j < d; ++j) best_u[j] = space[j].to_unit(result.best[j]);
        for (int i = 0; i < 64; ++i) {
            const double scale = i < 32 ? 0.05 : 0.01;
            std::vector<double> u(d);
            for (int j = 0; j < d; ++j)
                u[j] = std::clamp(best_u[j] + scale * rng.normal(), 0.0, 1.0);
            candidates.push_back(std::move(u));
        }

        double best_ei = -1.0;
        std::vector<double> pick = candidates.front();
        for (const auto& u : candidates) {
            const auto [mu, sigma] = gp.predict(u);
            const double ei = expected_improvement(mu, sigma, result.best_objective);
            const ParamPoint raw = to_raw(u);
            if (ei > best_ei && !evaluated_already(raw)) {
                best_ei = ei;
                pick = u;
            }
        }
        if (best_ei < 0.0) {
            // everything collapsed onto evaluated points; fall back to random
            for (int j = 0; j < d; ++j) pick[j] = rng.uniform();
        }
        run_trial(pick);
    }
    return result;
}

}  // namespace sxp
