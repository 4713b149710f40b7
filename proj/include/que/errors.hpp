#ifndef QUE_ERRORS_HPP
#define QUE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace que {

// Base class for all library errors so callers can catch everything at once.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// A data problem (bad file, bad values, infeasible input). CLI maps these to exit code 1.
class DataError : public Error {
public:
    explicit DataError(const std::string& msg) : Error(msg) {}
};

// A configuration problem (invalid tunable). CLI maps these to exit code 2.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

class ZeroMass : public DataError {
public:
    explicit ZeroMass(const std::string& msg = "weight vector has zero total mass") : DataError(msg) {}
};

class DimensionMismatch : public DataError {
public:
    explicit DimensionMismatch(const std::string& msg) : DataError(msg) {}
};

class InvalidEpsilon : public ConfigError {
public:
    explicit InvalidEpsilon(const std::string& msg) : ConfigError(msg) {}
};

class NegativeScore : public DataError {
public:
    explicit NegativeScore(const std::string& msg = "scores must be nonnegative") : DataError(msg) {}
};

class InvalidB : public ConfigError {
public:
    explicit InvalidB(const std::string& msg = "filter target b must lie in (0, 1)") : ConfigError(msg) {}
};

class NonTermination : public DataError {
public:
    explicit NonTermination(const std::string& msg) : DataError(msg) {}
};

class TooLarge : public ConfigError {
public:
    explicit TooLarge(const std::string& msg) : ConfigError(msg) {}
};

class PruneFailed : public DataError {
public:
    explicit PruneFailed(const std::string& msg = "no pruning round certified a dense center") : DataError(msg) {}
};

class NonConvergence : public DataError {
public:
    explicit NonConvergence(const std::string& msg) : DataError(msg) {}
};

class DegenerateCovariance : public DataError {
public:
    explicit DegenerateCovariance(const std::string& msg = "empirical covariance is zero") : DataError(msg) {}
};

class SingularReference : public DataError {
public:
    explicit SingularReference(const std::string& msg) : DataError(msg) {}
};

class OneClassOnly : public DataError {
public:
    explicit OneClassOnly(const std::string& msg = "ROCAUC needs at least one inlier and one outlier") : DataError(msg) {}
};

class IoError : public DataError {
public:
    explicit IoError(const std::string& msg) : DataError(msg) {}
};

} // namespace que

#endif // QUE_ERRORS_HPP
