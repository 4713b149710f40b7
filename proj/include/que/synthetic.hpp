#ifndef QUE_SYNTHETIC_HPP
#define QUE_SYNTHETIC_HPP

#include <Eigen/Core>
#include <vector>

#include "que/dataset.hpp"
#include "que/moments.hpp"

namespace que {

enum class Adversary { directional_mixture, norm_inflation, replace_remove };

struct CorruptionSpec {
    double eps = 0.2;  // total corruption fraction
    int k = 1;         // number of corruption directions
    double magnitude = 1.0; // C: cluster centers sit at +-C*sqrt(k/eps)*e_i
    double sigma = 0.2;     // outlier cluster spread
    std::vector<double> weights; // per-direction fractions, default uniform eps/k
    Adversary adversary = Adversary::directional_mixture;

    std::vector<double> resolved_weights() const;
    void validate(Eigen::Index d) const;
};

struct GeneratedData {
    Dataset data;
    std::vector<int> labels;  // 0 = inlier, 1 = outlier, aligned with rows
    Eigen::VectorXd true_mean;
};

// Mixture generator: exactly ceil((1-eps)*n) inliers from N(0, Id) plus
// ceil(eps_i*n) outliers per direction split evenly between the +- clusters
// N(+-C*sqrt(k/eps)*e_i, sigma^2*Id). True mean is 0.
GeneratedData gen_synthetic(Eigen::Index d, Eigen::Index n, const CorruptionSpec& spec, Rng& rng);

// eps-corruption model: n iid N(mu*, Id) with mu* uniform on the unit sphere;
// the adversary replaces the ceil(eps*n) samples most extreme along a random
// direction. "directional" shifts the replaced samples by a bias of magnitude
// 0.9/sqrt(eps) along a fresh random direction; "norm_inflation" scales them
// by 3 about the sample mean; "replace_remove" spreads the bias over three
// orthogonal directions.
GeneratedData gen_eps_corrupted(Eigen::Index d, Eigen::Index n, double eps, Adversary adversary,
                                Rng& rng);

void save_labels_csv(const std::vector<int>& labels, const std::string& path);
std::vector<int> load_labels_csv(const std::string& path);

} // namespace que

#endif // QUE_SYNTHETIC_HPP
