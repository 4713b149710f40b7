#ifndef QUE_TEST_HELPERS_HPP
#define QUE_TEST_HELPERS_HPP

#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <random>
#include <vector>

#include "que/dataset.hpp"
#include "que/moments.hpp"
#include "que/weights.hpp"

namespace que::test {

inline Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng,
                                       double scale = 1.0) {
    std::normal_distribution<double> gauss(0.0, scale);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = gauss(rng);
    }
    return m;
}

inline Dataset random_dataset(Eigen::Index n, Eigen::Index d, Rng& rng, double scale = 1.0) {
    return Dataset(gaussian_matrix(n, d, rng, scale));
}

// Random sub-uniform weights: w_i = u_i / n with u_i ~ U(lo, 1].
inline WeightVector random_weights(Eigen::Index n, Rng& rng, double lo = 0.2) {
    std::uniform_real_distribution<double> unif(lo, 1.0);
    Eigen::VectorXd w(n);
    for (Eigen::Index i = 0; i < n; ++i) w[i] = unif(rng) / static_cast<double>(n);
    return WeightVector(w);
}

// Dense M(w) = sum_i w_i (X_i - mu(w))(X_i - mu(w))^T for oracle checks.
inline Eigen::MatrixXd dense_weighted_cov(const Dataset& data, const WeightVector& w) {
    const Eigen::VectorXd mu = weighted_mean(data, w);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(data.d(), data.d());
    for (Eigen::Index i = 0; i < data.n(); ++i) {
        const Eigen::VectorXd c = data.row(i).transpose() - mu;
        m += w[i] * c * c.transpose();
    }
    return m;
}

// Random symmetric PSD matrix with spectral norm exactly `norm`.
inline Eigen::MatrixXd random_psd(Eigen::Index d, double norm, Rng& rng) {
    Eigen::MatrixXd g = gaussian_matrix(d, d, rng);
    Eigen::MatrixXd p = g * g.transpose();
    const double top = p.operatorNorm();
    return p * (norm / top);
}

// Exact sorted-rank permutation: indices of `v` in ascending score order,
// ties broken by index so the result is deterministic.
inline std::vector<Eigen::Index> argsort(const Eigen::VectorXd& v) {
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(v.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<Eigen::Index>(i);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return v[a] < v[b]; });
    return idx;
}

// Spearman rank correlation between two score vectors (fractional ranks for
// ties).
inline double spearman(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const auto ranks = [](const Eigen::VectorXd& v) {
        const auto order = argsort(v);
        Eigen::VectorXd r(v.size());
        std::size_t i = 0;
        while (i < order.size()) {
            std::size_t j = i;
            while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
            const double avg = 0.5 * static_cast<double>(i + j);
            for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
            i = j + 1;
        }
        return r;
    };
    const Eigen::VectorXd ra = ranks(a), rb = ranks(b);
    const Eigen::VectorXd ca = ra.array() - ra.mean();
    const Eigen::VectorXd cb = rb.array() - rb.mean();
    const double denom = std::sqrt(ca.squaredNorm() * cb.squaredNorm());
    return denom > 0 ? ca.dot(cb) / denom : 0.0;
}

// Labeled instance for downweighting tests: inlier scores are small, a few
// "bad" entries carry most of the weighted score mass, so that the measured
// good-share eta = sum_good w*tau / sum w*tau stays below eta_max.
struct FilterInstance {
    WeightVector w;
    Eigen::VectorXd tau;
    std::vector<bool> good;
    double eta = 0.0;
};

inline FilterInstance labeled_filter_instance(Rng& rng, double eta_max) {
    std::uniform_int_distribution<int> count(5, 60);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (;;) {
        const Eigen::Index m = count(rng);
        const Eigen::Index bad = std::max<Eigen::Index>(1, m / 8);
        Eigen::VectorXd tau(m), wv(m);
        std::vector<bool> good(static_cast<std::size_t>(m), true);
        for (Eigen::Index i = 0; i < m; ++i) {
            wv[i] = (0.2 + 0.8 * unif(rng)) / static_cast<double>(m);
            if (i < bad) {
                good[static_cast<std::size_t>(i)] = false;
                tau[i] = 20.0 + 80.0 * unif(rng);
            } else {
                tau[i] = unif(rng);
            }
        }
        double sigma = 0.0, good_part = 0.0;
        for (Eigen::Index i = 0; i < m; ++i) {
            sigma += wv[i] * tau[i];
            if (good[static_cast<std::size_t>(i)]) good_part += wv[i] * tau[i];
        }
        const double eta = good_part / sigma;
        if (eta <= eta_max) {
            return FilterInstance{WeightVector(wv), tau, std::move(good), eta};
        }
    }
}

} // namespace que::test

#endif // QUE_TEST_HELPERS_HPP
