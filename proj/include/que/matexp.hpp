#ifndef QUE_MATEXP_HPP
#define QUE_MATEXP_HPP

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "que/dataset.hpp"
#include "que/moments.hpp"
#include "que/weights.hpp"

namespace que {

// The sequence of weight vectors w_0 ... w_{t-1} whose covariance operators
// accumulate inside the matrix-exponential exponent, together with the
// learning rate alpha. Centers mu(w_j) are cached at push time.
class WeightHistory {
public:
    explicit WeightHistory(double alpha) : alpha_(alpha) {}

    void push(const Dataset& data, const WeightVector& w);

    double alpha() const { return alpha_; }
    std::size_t length() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    const WeightVector& weights(std::size_t j) const { return entries_[j].w; }
    const Eigen::VectorXd& center(std::size_t j) const { return entries_[j].center; }

    // Applies Y = (alpha/2) * sum_j M(w_j) to every column of V. O(t*n*d*cols).
    Eigen::MatrixXd apply_half_exponent(const Dataset& data, const Eigen::MatrixXd& V) const;

    // Dense sum_j M(w_j); guarded by the caller's densify limit.
    Eigen::MatrixXd dense_exponent_sum(const Dataset& data) const;

private:
    struct Entry {
        WeightVector w;
        Eigen::VectorXd center;
    };
    double alpha_;
    std::vector<Entry> entries_;
};

// JL sketch of the polynomial approximant of exp((alpha/2) * sum_j M(w_j)):
// A = S * P_ell(Y) with S an r x d matrix of iid Normal(0, 1/r) entries.
// When r >= d no dimension is gained by sketching, so S degenerates to the
// identity and the oracle is exact up to the Taylor truncation.
struct SketchedExponentialOracle {
    Eigen::MatrixXd sketch;     // r x d matrix A
    double trace_estimate = 0;  // tr(A A^T) = squared Frobenius norm
    int r = 0;
    int ell = 0;
    std::uint64_t seed = 0;
    Eigen::VectorXd center;     // mu(w_now) the scores are taken against
};

enum class OracleKind { exact, sketched };

struct ScoreReport {
    Eigen::VectorXd tau;          // per-sample nonnegative scores
    std::optional<double> q;      // augmented score <M(w)-Id, U>
    OracleKind oracle_kind = OracleKind::exact;

    std::string to_json() const;
};

// Default sketch width / polynomial degree.
int default_sketch_width(Eigen::Index n, Eigen::Index d, double delta);
int default_poly_degree(Eigen::Index d);

// P_ell((alpha/2) sum_j M(w_j)) * v via Horner-style nested matvecs,
// P_ell(Y) = sum_{j<=ell} Y^j / j!.
Eigen::VectorXd taylor_exp_matvec(const WeightHistory& history, const Dataset& data,
                                  int ell, const Eigen::VectorXd& v);

// Builds the sketch; rows use deterministic substreams derived from `seed`.
SketchedExponentialOracle build_sketched_oracle(const Dataset& data, const WeightHistory& history,
                                                const WeightVector& w_now, int r, int ell,
                                                std::uint64_t seed);

// tau_i = |A (X_i - mu(w_now))|^2 / trace_estimate and the augmented score
// q = sum_i w_i tau_i - 1 (weighted; set weighted_q=false for the plain
// sum_i (tau_i - 1) variant).
ScoreReport sketched_scores(const SketchedExponentialOracle& oracle, const Dataset& data,
                            const WeightVector& w_now, bool weighted_q = true);

// Dense reference oracle: U = exp(alpha * sum_j M(w_j)) / tr(exp(...)) via
// symmetric eigendecomposition (top eigenvalue subtracted before
// exponentiating), tau_i = (X_i - mu)^T U (X_i - mu), q = <M(w_now) - Id, U>.
ScoreReport exact_scores(const Dataset& data, const WeightHistory& history,
                         const WeightVector& w_now, bool weighted_q = true);

// Dense U itself, for tests that need the density matrix.
Eigen::MatrixXd exact_density_matrix(const Dataset& data, const WeightHistory& history);

} // namespace que

#endif // QUE_MATEXP_HPP
