#pragma once

#include <Eigen/Core>

#include <functional>
#include <stdexcept>
#include <string>

namespace nashflow {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Any map R^m -> R^k evaluated on a full vector.
using VectorField = std::function<Vector(const Vector&)>;

/// Raised when operands disagree on dimensions.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline void require_dim(Index actual, Index expected, const char* what) {
    if (actual != expected) {
        throw DimensionError(std::string(what) + ": expected dimension " + std::to_string(expected) +
                             ", got " + std::to_string(actual));
    }
}

}  // namespace nashflow
