// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <Eigen/LU>

#include <stdexcept>
#include <string>

namespace stresseq {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Error with a stable machine-readable code ("NEWTON_DIVERGED", ...) plus detail text.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& detail)
        : std::runtime_error(code + ": " + detail), code_(std::move(code)) {}

    const std::string& code() const { return code_; }

private:
    std::string code_;
};

inline Mat2 rot90() {
    Mat2 j;
    j << 0.0, 1.0, -1.0, 0.0;
    return j;
}

/// J(theta): the 2x2 skew matrix [[0, theta], [-theta, 0]].
inline Mat2 skew_j(double theta) {
    Mat2 j;
    j << 0.0, theta, -theta, 0.0;
    return j;
}

} // namespace stresseq
