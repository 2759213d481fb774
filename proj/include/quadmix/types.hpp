#ifndef QUADMIX_TYPES_HPP
#define QUADMIX_TYPES_HPP

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace quadmix {

using Index = Eigen::Index;

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

struct NonProbabilityMeasure : Error {
    using Error::Error;
};

struct NotInvertible : Error {
    using Error::Error;
};

struct MissingPointMass : Error {
    using Error::Error;
};

struct TwoSidedConstrainedQuadrant : Error {
    std::size_t quadrant_index;
    explicit TwoSidedConstrainedQuadrant(std::size_t index)
        : Error("quadrant " + std::to_string(index) + " is two-sided constrained"),
          quadrant_index(index) {}
};

struct TotalProbabilityOne : Error {
    TotalProbabilityOne() : Error("requirement floors sum to 1, no slack for shifting") {}
};

struct BallPlacementFailed : Error {
    double radius;
    std::size_t quadrant_index;
    BallPlacementFailed(double r, std::size_t index)
        : Error("no ball of radius " + std::to_string(r) + " fits in quadrant " +
                std::to_string(index)),
          radius(r),
          quadrant_index(index) {}
};

struct GridTooLarge : Error {
    using Error::Error;
};

struct AlphaOutOfRange : Error {
    using Error::Error;
};

struct NotSufficientInitially : Error {
    using Error::Error;
};

inline void require_same_dimension(Index a, Index b, const char* context) {
    if (a != b) {
        throw DimensionMismatch(std::string(context) + ": dimension " + std::to_string(a) +
                                " vs " + std::to_string(b));
    }
}

}  // namespace quadmix

#endif  // QUADMIX_TYPES_HPP
