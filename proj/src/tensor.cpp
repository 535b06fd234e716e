#include "pgt/tensor.hpp"

#include <algorithm>
#include <sstream>

namespace pgt {

std::string shape_str(const Shape& shape) {
    std::ostringstream out;
    out << '[';
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) out << 'x';
        out << shape[i];
    }
    out << ']';
    return out.str();
}

std::size_t shape_numel(const Shape& shape) {
    std::size_t n = 1;
    for (auto s : shape) n *= s;
    return n;
}

template <typename T>
Tensor<T>::Tensor(Shape shape, std::vector<T> data, bool requires_grad)
    : impl_(std::make_shared<TensorStorage<T>>()) {
    if (shape_numel(shape) != data.size()) {
        throw ShapeError("tensor shape " + shape_str(shape) + " does not match " +
                         std::to_string(data.size()) + " values");
    }
    impl_->shape = std::move(shape);
    impl_->data = std::move(data);
    impl_->requires_grad = requires_grad;
}

template <typename T>
Tensor<T> Tensor<T>::zeros(Shape shape, bool requires_grad) {
    return full(std::move(shape), T(0), requires_grad);
}

template <typename T>
Tensor<T> Tensor<T>::ones(Shape shape, bool requires_grad) {
    return full(std::move(shape), T(1), requires_grad);
}

template <typename T>
Tensor<T> Tensor<T>::full(Shape shape, T value, bool requires_grad) {
    auto n = shape_numel(shape);
    return Tensor(std::move(shape), std::vector<T>(n, value), requires_grad);
}

template <typename T>
Tensor<T> Tensor<T>::scalar(T value, bool requires_grad) {
    return Tensor(Shape{}, std::vector<T>{value}, requires_grad);
}

template <typename T>
Tensor<T> Tensor<T>::identity(std::size_t n) {
    auto eye = zeros({n, n});
    for (std::size_t i = 0; i < n; ++i) eye.mutable_data()[i * n + i] = T(1);
    return eye;
}

template <typename T>
std::size_t Tensor<T>::dim(std::size_t axis) const {
    if (axis >= rank()) {
        throw ShapeError("axis " + std::to_string(axis) + " out of range for " + shape_str(shape()));
    }
    return impl_->shape[axis];
}

template <typename T>
T Tensor<T>::item() const {
    if (numel() != 1) throw ShapeError("item() on tensor of shape " + shape_str(shape()));
    return impl_->data[0];
}

template <typename T>
T Tensor<T>::at(std::size_t row, std::size_t col) const {
    if (rank() != 2) throw ShapeError("at(row, col) on tensor of shape " + shape_str(shape()));
    return impl_->data.at(row * impl_->shape[1] + col);
}

template <typename T>
Tensor<T> Tensor<T>::clone() const {
    Tensor copy(shape(), impl_->data, impl_->requires_grad);
    copy.impl_->grad = impl_->grad;
    return copy;
}

template <typename T>
void Tape<T>::record(std::string op, std::vector<Tensor<T>> inputs, Tensor<T> output,
                     std::function<void()> backward) {
    entries_.push_back({std::move(op), std::move(inputs), std::move(output), std::move(backward)});
}

template <typename T>
void Tape<T>::backward(const Tensor<T>& loss) {
    if (!loss.defined() || loss.numel() != 1) {
        throw ShapeError("backward() requires a scalar loss, got " +
                         (loss.defined() ? shape_str(loss.shape()) : std::string("undefined")));
    }
    auto produced = std::any_of(entries_.begin(), entries_.end(),
                                [&](const Entry& e) { return e.output.same_storage(loss); });
    if (!produced) throw std::logic_error("backward() loss was not recorded on this tape");

    loss.storage()->ensure_grad()[0] += T(1);
    for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
        if (it->output.has_grad()) it->backward();
    }
    entries_.clear();
}

template <typename T>
Tape<T>*& active_tape() {
    thread_local Tape<T>* tape = nullptr;
    return tape;
}

template <typename T>
void backward(const Tensor<T>& loss) {
    auto* tape = active_tape<T>();
    if (!tape) throw std::logic_error("backward() called with no active tape");
    tape->backward(loss);
}

template class Tensor<float>;
template class Tensor<double>;
template class Tape<float>;
template class Tape<double>;
template Tape<float>*& active_tape<float>();
template Tape<double>*& active_tape<double>();
template void backward<float>(const Tensor<float>&);
template void backward<double>(const Tensor<double>&);

}  // namespace pgt
