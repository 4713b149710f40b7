#include "que/moments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace que {

namespace {

void check_sizes(const Dataset& data, const WeightVector& w) {
    if (w.size() != data.n()) {
        throw DimensionMismatch("weight vector length does not match sample count");
    }
}

} // namespace

Eigen::VectorXd weighted_mean(const Dataset& data, const WeightVector& w) {
    check_sizes(data, w);
    if (w.mass() <= 0.0) {
        throw ZeroMass();
    }
    return data.samples().transpose() * w.values() / w.mass();
}

Eigen::MatrixXd weighted_cov_matmat(const Dataset& data, const WeightVector& w,
                                    const Eigen::MatrixXd& V) {
    check_sizes(data, w);
    if (V.rows() != data.d()) {
        throw DimensionMismatch("matvec input dimension does not match dataset");
    }
    if (w.mass() <= 0.0) {
        throw ZeroMass();
    }
    const Eigen::VectorXd mu = weighted_mean(data, w);
    // M(w) V = X^T diag(w) (X V - 1 mu^T V) - mu (w^T X V - |w| mu^T V)
    // where X holds the samples as rows; everything stays O(n d cols).
    Eigen::MatrixXd C = data.samples() * V;              // n x cols
    const Eigen::RowVectorXd muV = mu.transpose() * V;   // 1 x cols
    C.rowwise() -= muV;
    Eigen::MatrixXd out = data.samples().transpose() * (w.values().asDiagonal() * C);
    out.noalias() -= mu * (w.values().transpose() * C);
    return out;
}

Eigen::VectorXd weighted_cov_matvec(const Dataset& data, const WeightVector& w,
                                    const Eigen::VectorXd& v) {
    return weighted_cov_matmat(data, w, v);
}

Eigen::VectorXd weighted_cov_shifted_matvec(const Dataset& data, const WeightVector& w,
                                            const Eigen::VectorXd& v) {
    return weighted_cov_matmat(data, w, v) - v;
}

SpectralEstimate estimate_spectral_norm_block(
    const std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)>& matmat,
    Eigen::Index d, double accuracy, double fail_prob, Rng& rng) {
    if (accuracy <= 0.0 || accuracy > 0.5) {
        throw ConfigError("spectral-norm accuracy must lie in (0, 0.5]");
    }
    if (fail_prob <= 0.0 || fail_prob >= 1.0) {
        throw ConfigError("spectral-norm failure probability must lie in (0, 1)");
    }
    const int iters = static_cast<int>(std::ceil(10.0 * std::log(static_cast<double>(d) + 1.0) / accuracy));
    const int restarts = static_cast<int>(std::ceil(std::log2(2.0 / fail_prob)));

    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd V(d, restarts);
    for (Eigen::Index j = 0; j < restarts; ++j) {
        for (Eigen::Index i = 0; i < d; ++i) {
            V(i, j) = gauss(rng);
        }
    }
    for (int it = 0; it < iters; ++it) {
        V = matmat(V);
        // Renormalize columns to dodge overflow/underflow; the Rayleigh
        // quotient at the end is scale invariant.
        for (Eigen::Index j = 0; j < restarts; ++j) {
            const double norm = V.col(j).norm();
            if (norm > 0.0) {
                V.col(j) /= norm;
            } else {
                // Operator annihilated the iterate: restart from fresh noise.
                for (Eigen::Index i = 0; i < d; ++i) {
                    V(i, j) = gauss(rng);
                }
            }
        }
    }
    const Eigen::MatrixXd AV = matmat(V);
    double best = 0.0;
    for (Eigen::Index j = 0; j < restarts; ++j) {
        const double denom = V.col(j).squaredNorm();
        if (denom <= 0.0) continue;
        best = std::max(best, std::abs(V.col(j).dot(AV.col(j))) / denom);
    }
    SpectralEstimate est;
    est.value = best;
    est.iterations_used = iters * restarts;
    est.relative_accuracy = accuracy;
    return est;
}

SpectralEstimate estimate_spectral_norm(const MatVec& matvec, Eigen::Index d, double accuracy,
                                        double fail_prob, Rng& rng) {
    auto matmat = [&](const Eigen::MatrixXd& V) {
        Eigen::MatrixXd out(V.rows(), V.cols());
        for (Eigen::Index j = 0; j < V.cols(); ++j) {
            Eigen::VectorXd r = matvec(V.col(j));
            if (r.size() != V.rows()) {
                throw DimensionMismatch("matvec changed vector dimension");
            }
            out.col(j) = r;
        }
        return out;
    };
    return estimate_spectral_norm_block(matmat, d, accuracy, fail_prob, rng);
}

Dataset bucket_reduce(const Dataset& data, double eps, Rng& rng) {
    const double n = static_cast<double>(data.n());
    if (!(eps > 0.0) || eps > 1.0 / 20.0) {
        throw InvalidEpsilon("bucket_reduce needs eps in (0, 1/20]");
    }
    if (10.0 * eps * n < 1.0) {
        throw InvalidEpsilon("bucket_reduce needs 10*eps*n >= 1");
    }
    const Eigen::Index bucket_size = static_cast<Eigen::Index>(std::floor(1.0 / (10.0 * eps)));
    const Eigen::Index buckets = static_cast<Eigen::Index>(std::floor(10.0 * eps * n));
    if (bucket_size < 1 || buckets < 1 || bucket_size > data.n()) {
        throw InvalidEpsilon("bucket_reduce: fewer samples than one bucket");
    }

    std::vector<Eigen::Index> perm(static_cast<std::size_t>(data.n()));
    std::iota(perm.begin(), perm.end(), Eigen::Index{0});
    std::shuffle(perm.begin(), perm.end(), rng);

    Eigen::MatrixXd out(buckets, data.d());
    for (Eigen::Index b = 0; b < buckets; ++b) {
        Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(data.d());
        for (Eigen::Index j = 0; j < bucket_size; ++j) {
            acc += data.row(perm[static_cast<std::size_t>(b * bucket_size + j)]);
        }
        out.row(b) = acc / static_cast<double>(bucket_size);
    }
    return Dataset(std::move(out));
}

} // namespace que
