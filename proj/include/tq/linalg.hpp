#pragma once

#include <Eigen/Dense>

#include "tq/error.hpp"

namespace tq {

/// Stationary row vector of a small dense CTMC generator: solves pi * gen = 0,
/// sum(pi) = 1, by replacing one balance equation with the normalization.
/// Throws `on_singular` when the generator has no unique stationary vector.
Eigen::VectorXd stationary_of_generator(const Eigen::MatrixXd& gen,
                                        ErrorCode on_singular = ErrorCode::SingularGenerator);

}  // namespace tq
