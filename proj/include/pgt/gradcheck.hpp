#pragma once

#include <functional>
#include <vector>

#include "pgt/tensor.hpp"

namespace pgt {

struct GradCheckResult {
    double max_rel_error = 0.0;
    std::size_t worst_param = 0;
    std::size_t worst_index = 0;
    double analytic = 0.0;
    double numeric = 0.0;
    std::size_t checked = 0;
};

/// Compares reverse-mode gradients of `loss_fn` against central differences
/// over every element of `params`. Relative error per element is
/// |a - n| / max(|a|, |n|, floor); `floor` keeps elements whose true
/// gradient is zero from dividing round-off by round-off.
GradCheckResult grad_check(const std::function<Tensor<double>()>& loss_fn,
                           std::vector<Tensor<double>> params, double eps = 1e-5,
                           double floor = 1e-6);

}  // namespace pgt
