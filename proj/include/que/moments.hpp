#ifndef QUE_MOMENTS_HPP
#define QUE_MOMENTS_HPP

#include <Eigen/Core>
#include <functional>
#include <random>

#include "que/dataset.hpp"
#include "que/weights.hpp"

namespace que {

using Rng = std::mt19937_64;
using MatVec = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct SpectralEstimate {
    double value = 0.0;           // estimated spectral norm, >= 0
    int iterations_used = 0;      // total power iterations across restarts
    double relative_accuracy = 0.1;
};

// mu(w) = (1/|w|) sum_i w_i X_i.
Eigen::VectorXd weighted_mean(const Dataset& data, const WeightVector& w);

// M(w) * v where M(w) = sum_i w_i (X_i - mu(w))(X_i - mu(w))^T, the
// unnormalized weighted covariance. O(nd), M(w) is never formed.
Eigen::VectorXd weighted_cov_matvec(const Dataset& data, const WeightVector& w,
                                    const Eigen::VectorXd& v);

// (M(w) - Id) * v, same cost contract.
Eigen::VectorXd weighted_cov_shifted_matvec(const Dataset& data, const WeightVector& w,
                                            const Eigen::VectorXd& v);

// Block variants: applies the operator to every column of V at once, which
// lets Eigen use matrix-matrix products. Equivalent to column-wise matvecs.
Eigen::MatrixXd weighted_cov_matmat(const Dataset& data, const WeightVector& w,
                                    const Eigen::MatrixXd& V);

// Gap-free power method: Gaussian start, ceil(10*ln(d+1)/accuracy) iterations
// per restart, ceil(log2(2/fail_prob)) restarts, estimate is the largest
// Rayleigh-quotient magnitude |v^T A v| / |v|^2 over the final iterates.
// The operator must be symmetric (caller's contract).
SpectralEstimate estimate_spectral_norm(const MatVec& matvec, Eigen::Index d,
                                        double accuracy, double fail_prob, Rng& rng);

// Block version used by the estimators: all restarts advance together so the
// matvecs batch into matrix products. `matmat` applies the operator columnwise.
SpectralEstimate estimate_spectral_norm_block(
    const std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)>& matmat,
    Eigen::Index d, double accuracy, double fail_prob, Rng& rng);

// Randomly permutes the samples, groups them into floor(10*eps*n) buckets of
// size floor(1/(10*eps)) (remainder dropped) and returns the bucket means.
Dataset bucket_reduce(const Dataset& data, double eps, Rng& rng);

} // namespace que

#endif // QUE_MOMENTS_HPP
