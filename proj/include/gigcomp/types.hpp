// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>

namespace gigcomp {

using Scalar = double;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Index = Eigen::Index;

template <class T>
using CRef = const Eigen::Ref<const T>&;

}  // namespace gigcomp
