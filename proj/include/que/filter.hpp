#ifndef QUE_FILTER_HPP
#define QUE_FILTER_HPP

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "que/moments.hpp"
#include "que/weights.hpp"

namespace que {

struct FilterOutcome {
    WeightVector new_weights;     // <= input weights entrywise
    std::int64_t steps_taken = 0; // the exponent t of the geometric decay
    double final_weighted_sum = 0.0; // sum_i w'_i tau_i
};

// Soft univariate downweighting: finds the smallest t >= 1 with
// F_t = sum_i w_i (1 - tau_i/tau_max)^t tau_i <= b * sigma (sigma = F_0) by
// binary search over {1, ..., ceil(tau_max/(e*b*sigma))} and returns
// w'_i = (1 - tau_i/tau_max)^t w_i. Degenerate sigma = 0 returns w unchanged.
FilterOutcome one_d_filter(const WeightVector& w, const Eigen::VectorXd& tau, double b);

// Randomized hard filter: repeatedly removes each surviving index i with
// probability tau_i / tau_max (tau_max over the survivors) until the surviving
// score sum drops to b * sigma, sigma fixed at entry. Errors after the round
// cap ceil(4 * log(tau_max*m/(b*sigma) + 2) * log(2/delta)).
std::vector<Eigen::Index> random_filter(const std::vector<Eigen::Index>& indices,
                                        const Eigen::VectorXd& tau, double b, double delta,
                                        Rng& rng);

} // namespace que

#endif // QUE_FILTER_HPP
