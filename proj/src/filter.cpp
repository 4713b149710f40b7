#include "que/filter.hpp"

#include <cmath>
#include <cstdint>
#include <limits>

#include "que/errors.hpp"

namespace que {

namespace {

// x^t for integer t >= 0 via repeated squaring, so each probe of F_t costs
// O(m log t) instead of O(m t).
double pow_int(double x, std::int64_t t) {
    double result = 1.0;
    double base = x;
    while (t > 0) {
        if (t & 1) result *= base;
        base *= base;
        t >>= 1;
    }
    return result;
}

} // namespace

FilterOutcome one_d_filter(const WeightVector& w, const Eigen::VectorXd& tau, double b) {
    if (tau.size() != w.size()) {
        throw DimensionMismatch("score vector length does not match weights");
    }
    if (!(b > 0.0) || !(b < 1.0)) {
        throw InvalidB();
    }
    if (!tau.allFinite() || (tau.array() < 0.0).any()) {
        throw NegativeScore();
    }

    const double sigma = w.values().dot(tau);
    const double tau_max = tau.maxCoeff();
    if (sigma <= 0.0 || tau_max <= 0.0) {
        return FilterOutcome{w, 0, sigma};
    }

    // F_t = sum_i w_i (1 - tau_i/tau_max)^t tau_i, nonincreasing in t; the
    // search window upper end guarantees F_t <= b*sigma.
    const auto f_at = [&](std::int64_t t) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < tau.size(); ++i) {
            if (tau[i] <= 0.0 || w[i] <= 0.0) continue;
            acc += w[i] * pow_int(1.0 - tau[i] / tau_max, t) * tau[i];
        }
        return acc;
    };

    constexpr std::int64_t kSearchCap = std::int64_t{1} << 60;
    const double t_bound = std::ceil(tau_max / (std::exp(1.0) * b * sigma));
    std::int64_t hi = t_bound >= static_cast<double>(kSearchCap)
                          ? kSearchCap
                          : std::max<std::int64_t>(1, static_cast<std::int64_t>(t_bound));
    if (f_at(hi) > b * sigma) {
        throw NonTermination("1DFilter: no step count within the search cap reaches the target");
    }

    // Smallest t in [1, hi] with F_t <= b*sigma; F is monotone so plain
    // binary search returns the minimal witness.
    std::int64_t lo = 1;
    while (lo < hi) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        if (f_at(mid) <= b * sigma) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }

    Eigen::VectorXd new_w(w.size());
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        new_w[i] = w[i] * pow_int(1.0 - tau[i] / tau_max, lo);
    }
    WeightVector result(std::move(new_w));
    const double final_sum = result.values().dot(tau);
    return FilterOutcome{std::move(result), lo, final_sum};
}

std::vector<Eigen::Index> random_filter(const std::vector<Eigen::Index>& indices,
                                        const Eigen::VectorXd& tau, double b, double delta,
                                        Rng& rng) {
    if (!(b > 0.0) || !(b < 1.0)) {
        throw InvalidB();
    }
    if (!(delta > 0.0) || !(delta < 1.0)) {
        throw ConfigError("random_filter: delta must lie in (0, 1)");
    }
    if (!tau.allFinite() || (tau.array() < 0.0).any()) {
        throw NegativeScore();
    }
    for (Eigen::Index i : indices) {
        if (i < 0 || i >= tau.size()) {
            throw DimensionMismatch("random_filter: index outside the score vector");
        }
    }

    std::vector<Eigen::Index> alive = indices;
    const auto score_sum = [&](const std::vector<Eigen::Index>& set) {
        double s = 0.0;
        for (Eigen::Index i : set) s += tau[i];
        return s;
    };
    const double sigma = score_sum(alive);
    if (sigma <= 0.0) {
        return alive;
    }

    double tau_max0 = 0.0;
    for (Eigen::Index i : alive) tau_max0 = std::max(tau_max0, tau[i]);
    const double m = static_cast<double>(alive.size());
    const int round_cap = static_cast<int>(
        std::ceil(4.0 * std::log(tau_max0 * m / (b * sigma) + 2.0) * std::log(2.0 / delta)));

    std::uniform_real_distribution<double> unif(0.0, 1.0);
    int rounds = 0;
    while (score_sum(alive) > b * sigma) {
        if (rounds >= round_cap) {
            throw NonTermination("random_filter: round cap exceeded");
        }
        ++rounds;
        double tau_max = 0.0;
        for (Eigen::Index i : alive) tau_max = std::max(tau_max, tau[i]);
        if (tau_max <= 0.0) break;
        std::vector<Eigen::Index> next;
        next.reserve(alive.size());
        for (Eigen::Index i : alive) {
            if (unif(rng) >= tau[i] / tau_max) {
                next.push_back(i);
            }
        }
        alive.swap(next);
    }
    return alive;
}

} // namespace que
