#ifndef QUE_ROBUST_MEAN_HPP
#define QUE_ROBUST_MEAN_HPP

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "que/dataset.hpp"
#include "que/matexp.hpp"
#include "que/moments.hpp"
#include "que/weights.hpp"

namespace que {

enum class EstimatorMode { bounded_cov, subgaussian };
enum class OracleChoice { exact, sketched };

struct EstimatorConfig {
    double eps = 0.1;    // corruption fraction upper bound, in (0, 1/2)
    double delta = 0.05; // overall failure probability
    EstimatorMode mode = EstimatorMode::bounded_cov;
    OracleChoice oracle = OracleChoice::sketched;

    // Goodness thresholds; defaulted from the concentration formulas below
    // when unset. Overridable: they are tunables, not truths.
    std::optional<double> gamma1;
    std::optional<double> gamma2;
    std::optional<double> beta1; // subgaussian only
    std::optional<double> beta2; // subgaussian only
    double xi_o_constant = 4.0;  // constant on the eps*log(1/eps) term of xi
    double xi_c = 4.0;           // termination threshold C * xi (subgaussian)

    std::optional<int> r;   // sketch width
    std::optional<int> ell; // polynomial degree
    std::optional<int> epoch_cap;
    std::optional<int> iter_cap;
    std::uint64_t seed = 0;

    bool weighted_q = true; // augmented-score convention (see matexp)

    // Set by the pipeline: norm bound after pruning and the per-call failure
    // budget handed to spectral estimates / sketches. Direct filter calls
    // default these from the data and cfg.delta.
    std::optional<double> kappa;
    std::optional<double> oracle_delta;

    void validate() const;
    double resolved_gamma1(Eigen::Index n, Eigen::Index d) const;
    double resolved_gamma2(Eigen::Index n, Eigen::Index d) const;
    double resolved_beta2(Eigen::Index n, Eigen::Index d) const;
    double resolved_beta1(Eigen::Index n, Eigen::Index d) const;
    // xi = gamma2 + 2*gamma1^2 + 4*eps^2*beta1^2 + 2*eps*beta2 + O(eps*log(1/eps))
    double resolved_xi(Eigen::Index n, Eigen::Index d) const;
    int resolved_epoch_cap(double kappa_value, Eigen::Index n) const;
    int resolved_iter_cap(Eigen::Index d) const;
};

struct EpochRecord {
    double lambda0 = 0.0;               // spectral estimate at epoch start
    double lambda_end = 0.0;            // estimate that closed the epoch
    int iterations = 0;                 // filter iterations run
    double mass_removed = 0.0;          // weight mass removed in this epoch
    double seconds = 0.0;               // wall time
    std::vector<double> lambda_history; // per-iteration estimates
    std::vector<double> alpha_lambda;   // alpha^(s) * lambda_t, for the MMW contract
};

struct EpochTrace {
    std::vector<EpochRecord> epochs;
    std::vector<double> lambda_history() const;
};

struct FilterResult {
    Eigen::VectorXd mu_hat;
    WeightVector weights;
    EpochTrace trace;
};

struct PipelineResult {
    Eigen::VectorXd mu_hat;
    EpochTrace trace;
    Eigen::Index retained = 0; // samples surviving the prune
    std::uint64_t seed = 0;
    EstimatorMode mode = EstimatorMode::bounded_cov;
    OracleChoice oracle = OracleChoice::sketched;

    std::string to_json() const;
};

// Randomized gross-outlier removal: pick a random sample, and if strictly more
// than n/2 samples lie within 2r of it, keep exactly the samples within 4r.
// At most ceil(log2(2/delta)) attempts, then PruneFailed.
std::pair<Dataset, std::vector<Eigen::Index>> naive_prune(const Dataset& data, double radius,
                                                          double delta, Rng& rng);

// Bounded-covariance MMW filter. Expects pre-pruned, pre-centered data.
FilterResult que_score_filter(const Dataset& data, const EstimatorConfig& cfg);

// Sub-Gaussian variant: tracks |M(w) - Id|, terminates at C*xi, filters only
// the top 2eps weight percentile by score.
FilterResult sg_que_score_filter(const Dataset& data, const EstimatorConfig& cfg);

// Full pipeline: prune, center, dispatch on cfg.mode, un-center.
PipelineResult estimate_mean_pipeline(const Dataset& data, const EstimatorConfig& cfg);

} // namespace que

#endif // QUE_ROBUST_MEAN_HPP
