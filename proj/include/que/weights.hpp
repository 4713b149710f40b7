#ifndef QUE_WEIGHTS_HPP
#define QUE_WEIGHTS_HPP

#include <Eigen/Core>
#include <utility>

#include "que/errors.hpp"

namespace que {

// Per-sample nonnegative weights with total mass at most 1: a point of the
// truncated simplex Gamma_n. Filters shrink these entries, never grow them.
class WeightVector {
public:
    static constexpr double kMassTol = 1e-12;

    explicit WeightVector(Eigen::VectorXd w) : w_(std::move(w)), mass_(w_.sum()) {
        validate();
    }

    // Uniform weights 1/n, the filters' starting state.
    static WeightVector uniform(Eigen::Index n) {
        return WeightVector(Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n)));
    }

    Eigen::Index size() const { return w_.size(); }
    const Eigen::VectorXd& values() const { return w_; }
    double operator[](Eigen::Index i) const { return w_[i]; }
    double mass() const { return mass_; }

    bool in_simplex() const { return mass_ <= 1.0 + kMassTol; }

    // Whether w <= (1/n) * 1 entrywise, the capped set reachable from uniform
    // weights by downweighting.
    bool is_capped() const {
        const double cap = 1.0 / static_cast<double>(w_.size()) + kMassTol;
        return (w_.array() <= cap).all();
    }

    bool dominates(const WeightVector& other) const {
        return other.size() == size() && (other.w_.array() <= w_.array() + kMassTol).all();
    }

private:
    void validate() const {
        if (w_.size() < 1) {
            throw DataError("weight vector must be nonempty");
        }
        if (!w_.allFinite() || (w_.array() < 0.0).any()) {
            throw DataError("weights must be finite and nonnegative");
        }
        if (mass_ > 1.0 + kMassTol) {
            throw DataError("weight mass exceeds 1");
        }
    }

    Eigen::VectorXd w_;
    double mass_;
};

} // namespace que

#endif // QUE_WEIGHTS_HPP
