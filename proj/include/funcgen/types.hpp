#pragma once

#include <Eigen/Core>

namespace funcgen {

using Index = Eigen::Index;

using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using Matrix = Eigen::MatrixXd;

/** Point sets: one point per row. A Vector converts implicitly to an n x 1 set. */
using Points = Eigen::MatrixXd;

using PointRef = Eigen::Ref<const RowVector>;

}  // namespace funcgen
