#pragma once

#include <cmath>
#include <random>
#include <span>
#include <vector>

#include "pgt/tensor.hpp"

namespace pgt::test {

template <typename T = double>
Tensor<T> random_tensor(Shape shape, std::mt19937_64& rng, double scale = 1.0, bool requires_grad = true) {
    std::normal_distribution<double> dist(0.0, scale);
    std::vector<T> data(shape_numel(shape));
    for (auto& v : data) v = static_cast<T>(dist(rng));
    return Tensor<T>(std::move(shape), std::move(data), requires_grad);
}

template <typename T>
double max_abs_diff(std::span<const T> a, std::span<const T> b) {
    if (a.size() != b.size()) return INFINITY;
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(double(a[i]) - double(b[i])));
    return worst;
}

template <typename T>
double max_abs_diff(const Tensor<T>& a, const Tensor<T>& b) {
    if (a.shape() != b.shape()) return INFINITY;
    return max_abs_diff(a.data(), b.data());
}

}  // namespace pgt::test
