#ifndef QUE_SCORING_HPP
#define QUE_SCORING_HPP

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "que/dataset.hpp"
#include "que/moments.hpp"

namespace que {

enum class ScoreMode { exact, approx };
enum class WhiteningKind { identity, exact, topk };
enum class TieConvention { half, geq }; // how equal scores count in ROCAUC

struct QueScoreConfig {
    ScoreMode mode = ScoreMode::exact;
    std::optional<int> r; // sketch width for approx mode
    double delta = 0.05;  // used only by the default sketch width
};

struct WhiteningTransform {
    WhiteningKind kind = WhiteningKind::identity;
    Eigen::MatrixXd matrix; // d x d, empty for identity
    int k = 0;              // used by topk
    double ridge = 1e-6;
};

struct LabeledScores {
    Eigen::VectorXd tau;
    std::vector<int> labels; // 0 = inlier, 1 = outlier
};

// QUE scores tau_i = x_i'^T exp(alpha * Sbar / |Sbar|) x_i' / tr exp(...)
// where x_i' = X_i - mean and Sbar is the empirical covariance (1/n).
// Exact mode eigendecomposes; approx mode runs a degree-5 Chebyshev
// approximation of exp with scaling-and-squaring through a JL sketch.
Eigen::VectorXd que_scores(const Dataset& data, double alpha, const QueScoreConfig& cfg, Rng& rng);

// |X_i - mean| (not squared).
Eigen::VectorXd baseline_l2(const Dataset& data);

// Squared projections on the power-method top eigenvector of Sbar.
Eigen::VectorXd baseline_spectral(const Dataset& data, Rng& rng);

// power = -0.5 gives the isotropizing (Cov + ridge*Id)^(-1/2) (default);
// power = -1 gives the plain inverse variant.
WhiteningTransform fit_whitening(const Dataset& reference, WhiteningKind kind, int k = 0,
                                 double ridge = 1e-6, double power = -0.5);
Dataset apply_whitening(const WhiteningTransform& w, const Dataset& data);

// Pr(tau_outlier >= tau_inlier) with ties counting 1/2 (half) or 1 (geq).
double rocauc(const LabeledScores& scored, TieConvention ties = TieConvention::half);

} // namespace que

#endif // QUE_SCORING_HPP
