#ifndef QUE_DATASET_HPP
#define QUE_DATASET_HPP

#include <Eigen/Core>
#include <string>
#include <utility>

#include "que/errors.hpp"

namespace que {

// A fixed collection of n samples in R^d, one per row. Immutable after
// construction; all estimators and scorers read it but never modify it.
class Dataset {
public:
    explicit Dataset(Eigen::MatrixXd samples) : samples_(std::move(samples)) {
        validate();
    }

    Eigen::Index n() const { return samples_.rows(); }
    Eigen::Index d() const { return samples_.cols(); }
    const Eigen::MatrixXd& samples() const { return samples_; }
    Eigen::MatrixXd::ConstRowXpr row(Eigen::Index i) const { return samples_.row(i); }

    // CSV: one row per sample, comma separated. `skip_header` drops one line.
    static Dataset load_csv(const std::string& path, bool skip_header = false);
    void save_csv(const std::string& path) const;

    // Binary: magic "QUED", u32 little-endian n, u32 d, then n*d float64 values
    // in row-major order.
    static Dataset load_binary(const std::string& path);
    void save_binary(const std::string& path) const;

private:
    void validate() const {
        if (samples_.rows() < 1 || samples_.cols() < 1) {
            throw DataError("dataset must contain at least one sample and one dimension");
        }
        if (!samples_.allFinite()) {
            throw DataError("dataset contains non-finite entries");
        }
    }

    Eigen::MatrixXd samples_;
};

} // namespace que

#endif // QUE_DATASET_HPP
