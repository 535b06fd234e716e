#pragma once

#include <cstdint>
#include <random>
#include <span>

#include "pgt/tensor.hpp"

namespace pgt {

// Differentiable operations. Each op records itself on the active tape when
// at least one input requires grad; otherwise it is a plain computation.

/// [m x k] * [k x n] -> [m x n]
template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b);

template <typename T>
Tensor<T> transpose(const Tensor<T>& a);

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b);

template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b);

template <typename T>
Tensor<T> scale(const Tensor<T>& a, T factor);

/// Adds a length-n vector to every row of an [m x n] matrix.
template <typename T>
Tensor<T> add_bias(const Tensor<T>& a, const Tensor<T>& bias);

/// Max-subtracted softmax along `axis`. Entries equal to -inf receive zero
/// probability; NaN input is rejected.
template <typename T>
Tensor<T> softmax(const Tensor<T>& x, std::size_t axis);

/// Normalizes over the last dimension, then applies gain and bias.
template <typename T>
Tensor<T> layer_norm(const Tensor<T>& x, const Tensor<T>& gain, const Tensor<T>& bias,
                     T eps = T(1e-12));

/// GELU, tanh approximation:
///   0.5 x (1 + tanh(sqrt(2/pi) (x + 0.044715 x^3)))
template <typename T>
Tensor<T> gelu(const Tensor<T>& x);

/// -log softmax(logits)[label] over a flat logit vector.
template <typename T>
Tensor<T> cross_entropy(const Tensor<T>& logits, std::size_t label);

template <typename T>
Tensor<T> sum(const Tensor<T>& x);

template <typename T>
Tensor<T> dot(const Tensor<T>& a, const Tensor<T>& b);

template <typename T>
Tensor<T> reshape(const Tensor<T>& x, Shape shape);

template <typename T>
Tensor<T> slice_rows(const Tensor<T>& x, std::size_t begin, std::size_t end);

template <typename T>
Tensor<T> slice_cols(const Tensor<T>& x, std::size_t begin, std::size_t end);

template <typename T>
Tensor<T> concat_rows(std::span<const Tensor<T>> parts);

template <typename T>
Tensor<T> concat_cols(std::span<const Tensor<T>> parts);

/// Embedding lookup: row ids[i] of `table` becomes row i of the result.
template <typename T>
Tensor<T> gather_rows(const Tensor<T>& table, std::span<const std::int32_t> ids);

/// Inverted dropout. rate == 0 returns the input unchanged.
template <typename T>
Tensor<T> dropout(const Tensor<T>& x, double rate, std::mt19937_64& rng);

/// Multiply+add operations executed by matmul on this thread (2·m·k·n per
/// call). Used to cross-check the analytic FLOP model.
std::uint64_t& matmul_flop_counter();

}  // namespace pgt
