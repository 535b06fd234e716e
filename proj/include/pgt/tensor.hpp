#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pgt {

using Shape = std::vector<std::size_t>;

std::string shape_str(const Shape& shape);
std::size_t shape_numel(const Shape& shape);

struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

template <typename T>
struct TensorStorage {
    Shape shape;
    std::vector<T> data;
    std::vector<T> grad;  // empty until first accumulation
    bool requires_grad = false;

    std::vector<T>& ensure_grad() {
        if (grad.empty()) grad.assign(data.size(), T(0));
        return grad;
    }
};

/// Dense row-major array with shared ownership. Copies alias the same
/// storage; use clone() for a deep copy. T is float (training, inference)
/// or double (gradient checks).
template <typename T>
class Tensor {
  public:
    Tensor() = default;
    Tensor(Shape shape, std::vector<T> data, bool requires_grad = false);

    static Tensor zeros(Shape shape, bool requires_grad = false);
    static Tensor ones(Shape shape, bool requires_grad = false);
    static Tensor full(Shape shape, T value, bool requires_grad = false);
    static Tensor scalar(T value, bool requires_grad = false);
    static Tensor identity(std::size_t n);

    bool defined() const { return static_cast<bool>(impl_); }
    const Shape& shape() const { return impl_->shape; }
    std::size_t dim(std::size_t axis) const;
    std::size_t rank() const { return impl_->shape.size(); }
    std::size_t numel() const { return impl_->data.size(); }

    std::span<const T> data() const { return impl_->data; }
    // Parameter updates and test perturbations only; tensors recorded on a
    // live tape must not be mutated.
    std::span<T> mutable_data() { return impl_->data; }

    bool has_grad() const { return !impl_->grad.empty(); }
    std::span<const T> grad() const { return impl_->grad; }
    std::span<T> mutable_grad() { return impl_->ensure_grad(); }
    void zero_grad() { impl_->grad.clear(); }

    bool requires_grad() const { return impl_->requires_grad; }
    Tensor& set_requires_grad(bool value) {
        impl_->requires_grad = value;
        return *this;
    }

    T item() const;
    T at(std::size_t i) const { return impl_->data.at(i); }
    T at(std::size_t row, std::size_t col) const;

    Tensor clone() const;
    Tensor detach() const { return Tensor(shape(), impl_->data, false); }

    TensorStorage<T>* storage() const { return impl_.get(); }
    bool same_storage(const Tensor& other) const { return impl_ == other.impl_; }

  private:
    std::shared_ptr<TensorStorage<T>> impl_;
};

/// Ordered record of differentiable operations. Entries are appended as ops
/// execute, so every entry's inputs were produced earlier (or are leaves).
template <typename T>
class Tape {
  public:
    struct Entry {
        std::string op;
        std::vector<Tensor<T>> inputs;
        Tensor<T> output;
        std::function<void()> backward;
    };

    void record(std::string op, std::vector<Tensor<T>> inputs, Tensor<T> output,
                std::function<void()> backward);

    /// Seeds d(loss)/d(loss) = 1 and walks entries in reverse, accumulating
    /// into every requires_grad tensor. The tape is cleared afterwards.
    void backward(const Tensor<T>& loss);

    std::size_t size() const { return entries_.size(); }
    const std::vector<Entry>& entries() const { return entries_; }
    void clear() { entries_.clear(); }

  private:
    std::vector<Entry> entries_;
};

/// The tape ops record into on the current thread; nullptr when recording is
/// off (inference).
template <typename T>
Tape<T>*& active_tape();

/// Installs a tape as the thread's active tape for the scope's lifetime.
template <typename T>
class TapeScope {
  public:
    explicit TapeScope(Tape<T>& tape) : previous_(active_tape<T>()) { active_tape<T>() = &tape; }
    ~TapeScope() { active_tape<T>() = previous_; }
    TapeScope(const TapeScope&) = delete;
    TapeScope& operator=(const TapeScope&) = delete;

  private:
    Tape<T>* previous_;
};

/// Disables recording for the scope (evaluation passes).
template <typename T>
class NoGradScope {
  public:
    NoGradScope() : previous_(active_tape<T>()) { active_tape<T>() = nullptr; }
    ~NoGradScope() { active_tape<T>() = previous_; }
    NoGradScope(const NoGradScope&) = delete;
    NoGradScope& operator=(const NoGradScope&) = delete;

  private:
    Tape<T>* previous_;
};

/// Runs backward on the thread's active tape.
template <typename T>
void backward(const Tensor<T>& loss);

}  // namespace pgt
