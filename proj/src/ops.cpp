#include "pgt/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace pgt {
namespace {

// Records `out` when a tape is active and some input needs gradients.
template <typename T, typename Fn>
void record(const char* op, std::vector<Tensor<T>> inputs, Tensor<T>& out, Fn&& fn) {
    auto* tape = active_tape<T>();
    if (!tape) return;
    bool needed = std::any_of(inputs.begin(), inputs.end(),
                              [](const Tensor<T>& t) { return t.requires_grad(); });
    if (!needed) return;
    out.set_requires_grad(true);
    tape->record(op, std::move(inputs), out, std::forward<Fn>(fn));
}

template <typename T>
void require_rank(const Tensor<T>& t, std::size_t rank, const char* op) {
    if (t.rank() != rank) {
        throw ShapeError(std::string(op) + ": expected rank " + std::to_string(rank) + ", got " +
                         shape_str(t.shape()));
    }
}

template <typename T>
void require_same_shape(const Tensor<T>& a, const Tensor<T>& b, const char* op) {
    if (a.shape() != b.shape()) {
        throw ShapeError(std::string(op) + ": shape mismatch " + shape_str(a.shape()) + " vs " +
                         shape_str(b.shape()));
    }
}

// c[m x n] += a[m x k] * b[k x n]
template <typename T>
void gemm_nn(const T* a, const T* b, T* c, std::size_t m, std::size_t k, std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) {
        T* crow = c + i * n;
        for (std::size_t p = 0; p < k; ++p) {
            T av = a[i * k + p];
            if (av == T(0)) continue;
            const T* brow = b + p * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

// c[m x k] += g[m x n] * b[k x n]^T
template <typename T>
void gemm_nt(const T* g, const T* b, T* c, std::size_t m, std::size_t n, std::size_t k) {
    for (std::size_t i = 0; i < m; ++i) {
        const T* grow = g + i * n;
        for (std::size_t p = 0; p < k; ++p) {
            const T* brow = b + p * n;
            T acc = T(0);
            for (std::size_t j = 0; j < n; ++j) acc += grow[j] * brow[j];
            c[i * k + p] += acc;
        }
    }
}

// c[k x n] += a[m x k]^T * g[m x n]
template <typename T>
void gemm_tn(const T* a, const T* g, T* c, std::size_t m, std::size_t k, std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) {
        const T* grow = g + i * n;
        for (std::size_t p = 0; p < k; ++p) {
            T av = a[i * k + p];
            if (av == T(0)) continue;
            T* crow = c + p * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += av * grow[j];
        }
    }
}

}  // namespace

std::uint64_t& matmul_flop_counter() {
    thread_local std::uint64_t counter = 0;
    return counter;
}

template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b) {
    if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(0)) {
        throw ShapeError("matmul: incompatible shapes " + shape_str(a.shape()) + " and " +
                         shape_str(b.shape()));
    }
    const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
    auto out = Tensor<T>::zeros({m, n});
    gemm_nn(a.data().data(), b.data().data(), out.mutable_data().data(), m, k, n);
    matmul_flop_counter() += 2ull * m * k * n;

    auto* as = a.storage();
    auto* bs = b.storage();
    auto* os = out.storage();
    record<T>("matmul", {a, b}, out, [as, bs, os, m, k, n] {
        if (as->requires_grad) gemm_nt(os->grad.data(), bs->data.data(), as->ensure_grad().data(), m, n, k);
        if (bs->requires_grad) gemm_tn(as->data.data(), os->grad.data(), bs->ensure_grad().data(), m, k, n);
    });
    return out;
}

template <typename T>
Tensor<T> transpose(const Tensor<T>& a) {
    require_rank(a, 2, "transpose");
    const std::size_t m = a.dim(0), n = a.dim(1);
    auto out = Tensor<T>::zeros({n, m});
    auto src = a.data();
    auto dst = out.mutable_data();
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) dst[j * m + i] = src[i * n + j];

    auto* as = a.storage();
    auto* os = out.storage();
    record<T>("transpose", {a}, out, [as, os, m, n] {
        auto& ga = as->ensure_grad();
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) ga[i * n + j] += os->grad[j * m + i];
    });
    return out;
}

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
    require_same_shape(a, b, "add");
    auto out = Tensor<T>::zeros(a.shape());
    auto dst = out.mutable_data();
    auto x = a.data(), y = b.data();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = x[i] + y[i];

    auto* as = a.storage();
    auto* bs = b.storage();
    auto* os = out.storage();
    record<T>("add", {a, b}, out, [as, bs, os] {
        for (auto* s : {as, bs}) {
            if (!s->requires_grad) continue;
            auto& g = s->ensure_grad();
            for (std::size_t i = 0; i < g.size(); ++i) g[i] += os->grad[i];
        }
    });
    return out;
}

template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b) {
    require_same_shape(a, b, "mul");
    auto out = Tensor<T>::zeros(a.shape());
    auto dst = out.mutable_data();
    auto x = a.data(), y = b.data();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = x[i] * y[i];

    auto* as = a.storage();
    auto* bs = b.storage();
    auto* os = out.storage();
    record<T>("mul", {a, b}, out, [as, bs, os] {
        if (as->requires_grad) {
            auto& g = as->ensure_grad();
            for (std::size_t i = 0; i < g.size(); ++i) g[i] += os->grad[i] * bs->data[i];
        }
        if (bs->requires_grad) {
            auto& g = bs->ensure_grad();
            for (std::size_t i = 0; i < g.size(); ++i) g[i] += os->grad[i] * as->data[i];
        }
    });
    return out;
}

template <typename T>
Tensor<T> scale(const Tensor<T>& a, T factor) {
    auto out = Tensor<T>::zeros(a.shape());
    auto dst = out.mutable_data();
    auto x = a.data();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = x[i] * factor;

    auto* as = a.storage();
    auto* os = out.storage();
    record<T>("scale", {a}, out, [as, os, factor] {
        auto& g = as->ensure_grad();
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += os->grad[i] * factor;
    });
    return out;
}

template <typename T>
Tensor<T> add_bias(const Tensor<T>& a, const Tensor<T>& bias) {
    require_rank(a, 2, "add_bias");
    const std::size_t m = a.dim(0), n = a.dim(1);
    if (bias.numel() != n) {
        throw ShapeError("add_bias: bias " + shape_str(bias.shape()) + " does not match " +
                         shape_str(a.shape()));
    }
    auto out = Tensor<T>::zeros(a.shape());
    auto dst = out.mutable_data();
    auto x = a.data(), b = bias.data();
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) dst[i * n + j] = x[i * n + j] + b[j];

    auto* as = a.storage();
    auto* bs = bias.storage();
    auto* os = out.storage();
    record<T>("add_bias", {a, bias}, out, [as, bs, os, m, n] {
        if (as->requires_grad) {
            auto& g = as->ensure_grad();
            for (std::size_t i = 0; i < g.size(); ++i) g[i] += os->grad[i];
        }
        if (bs->requires_grad) {
            auto& g = bs->ensure_grad();
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < n; ++j) g[j] += os->grad[i * n + j];
        }
    });
    return out;
}

template <typename T>
Tensor<T> softmax(const Tensor<T>& x, std::size_t axis) {
    if (axis >= x.rank()) {
        throw ShapeError("softmax: axis " + std::to_string(axis) + " out of range for " +
                         shape_str(x.shape()));
    }
    const auto& shape = x.shape();
    std::size_t outer = 1, inner = 1;
    for (std::size_t i = 0; i < axis; ++i) outer *= shape[i];
    for (std::size_t i = axis + 1; i < shape.size(); ++i) inner *= shape[i];
    const std::size_t len = shape[axis];

    auto out = Tensor<T>::zeros(shape);
    auto src = x.data();
    auto dst = out.mutable_data();
    for (std::size_t o = 0; o < outer; ++o) {
        for (std::size_t in = 0; in < inner; ++in) {
            const std::size_t base = o * len * inner + in;
            T mx = -std::numeric_limits<T>::infinity();
            for (std::size_t i = 0; i < len; ++i) {
                T v = src[base + i * inner];
                if (std::isnan(v)) throw std::domain_error("softmax: NaN input");
                mx = std::max(mx, v);
            }
            if (!std::isfinite(mx)) throw std::domain_error("softmax: no finite entry along axis");
            T total = T(0);
            for (std::size_t i = 0; i < len; ++i) {
                T e = std::exp(src[base + i * inner] - mx);
                dst[base + i * inner] = e;
                total += e;
            }
            for (std::size_t i = 0; i < len; ++i) dst[base + i * inner] /= total;
        }
    }

    auto* xs = x.storage();
    auto* os = out.storage();
    record<T>("softmax", {x}, out, [xs, os, outer, inner, len] {
        auto& g = xs->ensure_grad();
        for (std::size_t o = 0; o < outer; ++o) {
            for (std::size_t in = 0; in < inner; ++in) {
                const std::size_t base = o * len * inner + in;
                T inner_prod = T(0);
                for (std::size_t i = 0; i < len; ++i) {
                    auto idx = base + i * inner;
                    inner_prod += os->grad[idx] * os->data[idx];
                }
                for (std::size_t i = 0; i < len; ++i) {
                    auto idx = base + i * inner;
                    g[idx] += os->data[idx] * (os->grad[idx] - inner_prod);
                }
            }
        }
    });
    return out;
}

template <typename T>
Tensor<T> layer_norm(const Tensor<T>& x, const Tensor<T>& gain, const Tensor<T>& bias, T eps) {
    if (x.rank() == 0) throw ShapeError("layer_norm: scalar input");
    const std::size_t n = x.shape().back();
    if (gain.numel() != n || bias.numel() != n) {
        throw ShapeError("layer_norm: gain " + shape_str(gain.shape()) + " / bias " +
                         shape_str(bias.shape()) + " do not match last dim of " + shape_str(x.shape()));
    }
    const std::size_t rows = x.numel() / n;
    auto out = Tensor<T>::zeros(x.shape());
    // normalized values and inverse std are kept for the backward pass
    auto xhat = std::make_shared<std::vector<T>>(x.numel());
    auto inv_std = std::make_shared<std::vector<T>>(rows);
    auto src = x.data();
    auto dst = out.mutable_data();
    auto gv = gain.data(), bv = bias.data();
    for (std::size_t r = 0; r < rows; ++r) {
        const T* row = src.data() + r * n;
        T mean = T(0);
        for (std::size_t j = 0; j < n; ++j) mean += row[j];
        mean /= T(n);
        T var = T(0);
        for (std::size_t j = 0; j < n; ++j) var += (row[j] - mean) * (row[j] - mean);
        var /= T(n);
        T is = T(1) / std::sqrt(var + eps);
        (*inv_std)[r] = is;
        for (std::size_t j = 0; j < n; ++j) {
            T h = (row[j] - mean) * is;
            (*xhat)[r * n + j] = h;
            dst[r * n + j] = h * gv[j] + bv[j];
        }
    }

    auto* xs = x.storage();
    auto* gs = gain.storage();
    auto* bs = bias.storage();
    auto* os = out.storage();
    record<T>("layer_norm", {x, gain, bias}, out, [xs, gs, bs, os, xhat, inv_std, rows, n] {
        const auto& go = os->grad;
        if (gs->requires_grad) {
            auto& g = gs->ensure_grad();
            for (std::size_t r = 0; r < rows; ++r)
                for (std::size_t j = 0; j < n; ++j) g[j] += go[r * n + j] * (*xhat)[r * n + j];
        }
        if (bs->requires_grad) {
            auto& g = bs->ensure_grad();
            for (std::size_t r = 0; r < rows; ++r)
                for (std::size_t j = 0; j < n; ++j) g[j] += go[r * n + j];
        }
        if (xs->requires_grad) {
            auto& g = xs->ensure_grad();
            for (std::size_t r = 0; r < rows; ++r) {
                T mean_dh = T(0), mean_dh_h = T(0);
                for (std::size_t j = 0; j < n; ++j) {
                    T dh = go[r * n + j] * gs->data[j];
                    mean_dh += dh;
                    mean_dh_h += dh * (*xhat)[r * n + j];
                }
                mean_dh /= T(n);
                mean_dh_h /= T(n);
                for (std::size_t j = 0; j < n; ++j) {
                    T dh = go[r * n + j] * gs->data[j];
                    g[r * n + j] += (*inv_std)[r] * (dh - mean_dh - (*xhat)[r * n + j] * mean_dh_h);
                }
            }
        }
    });
    return out;
}

template <typename T>
Tensor<T> gelu(const Tensor<T>& x) {
    const T c = std::sqrt(T(2) / std::numbers::pi_v<T>);
    const T k = T(0.044715);
    auto out = Tensor<T>::zeros(x.shape());
    auto src = x.data();
    auto dst = out.mutable_data();
    for (std::size_t i = 0; i < src.size(); ++i) {
        T v = src[i];
        dst[i] = T(0.5) * v * (T(1) + std::tanh(c * (v + k * v * v * v)));
    }

    auto* xs = x.storage();
    auto* os = out.storage();
    record<T>("gelu", {x}, out, [xs, os, c, k] {
        auto& g = xs->ensure_grad();
        for (std::size_t i = 0; i < g.size(); ++i) {
            T v = xs->data[i];
            T th = std::tanh(c * (v + k * v * v * v));
            T d = T(0.5) * (T(1) + th) +
                  T(0.5) * v * (T(1) - th * th) * c * (T(1) + T(3) * k * v * v);
            g[i] += os->grad[i] * d;
        }
    });
    return out;
}

template <typename T>
Tensor<T> cross_entropy(const Tensor<T>& logits, std::size_t label) {
    const std::size_t n = logits.numel();
    if (label >= n) {
        throw std::out_of_range("cross_entropy: label " + std::to_string(label) + " out of range for " +
                                std::to_string(n) + " classes");
    }
    auto z = logits.data();
    T mx = *std::max_element(z.begin(), z.end());
    if (!std::isfinite(mx)) throw std::domain_error("cross_entropy: non-finite logits");
    T total = T(0);
    for (auto v : z) total += std::exp(v - mx);
    T log_norm = mx + std::log(total);
    auto out = Tensor<T>::scalar(log_norm - z[label]);

    auto* ls = logits.storage();
    auto* os = out.storage();
    record<T>("cross_entropy", {logits}, out, [ls, os, label, log_norm] {
        auto& g = ls->ensure_grad();
        T go = os->grad[0];
        for (std::size_t i = 0; i < g.size(); ++i) {
            T p = std::exp(ls->data[i] - log_norm);
            g[i] += go * (p - (i == label ? T(1) : T(0)));
        }
    });
    return out;
}

template <typename T>
Tensor<T> sum(const Tensor<T>& x) {
    T total = T(0);
    for (auto v : x.data()) total += v;
    auto out = Tensor<T>::scalar(total);
    auto* xs = x.storage();
    auto* os = out.storage();
    record<T>("sum", {x}, out, [xs, os] {
        auto& g = xs->ensure_grad();
        for (auto& v : g) v += os->grad[0];
    });
    return out;
}

template <typename T>
Tensor<T> dot(const Tensor<T>& a, const Tensor<T>& b) {
    return sum(mul(a, b));
}

template <typename T>
Tensor<T> reshape(const Tensor<T>& x, Shape shape) {
    if (shape_numel(shape) != x.numel()) {
        throw ShapeError("reshape: cannot view " + shape_str(x.shape()) + " as " + shape_str(shape));
    }
    Tensor<T> out(std::move(shape), std::vector<T>(x.data().begin(), x.data().end()));
    auto* xs = x.storage();
    auto* os = out.storage();
    record<T>("reshape", {x}, out, [xs, os] {
        auto& g = xs->ensure_grad();
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += os->grad[i];
    });
    return out;
}

template <typename T>
Tensor<T> slice_rows(const Tensor<T>& x, std::size_t begin, std::size_t end) {
    require_rank(x, 2, "slice_rows");
    if (begin > end || end > x.dim(0)) {
        throw ShapeError("slice_rows: [" + std::to_string(begin) + ", " + std::to_string(end) +
                         ") out of range for " + shape_str(x.shape()));
    }
    const std::size_t n = x.dim(1);
    auto src = x.data();
    Tensor<T> out({end - begin, n}, std::vector<T>(src.begin() + begin * n, src.begin() + end * n));
    auto* xs = x.storage();
    auto* os = out.storage();
    record<T>("slice_rows", {x}, out, [xs, os, begin, n] {
        auto& g = xs->ensure_grad();
        for (std::size_t i = 0; i < os->grad.size(); ++i) g[begin * n + i] += os->grad[i];
    });
    return out;
}

template <typename T>
Tensor<T> slice_cols(const Tensor<T>& x, std::size_t begin, std::size_t end) {
    require_rank(x, 2, "slice_cols");
    if (begin > end || end > x.dim(1)) {
        throw ShapeError("slice_cols: [" + std::to_string(begin) + ", " + std::to_string(end) +
                         ") out of range for " + shape_str(x.shape()));
    }
    const std::size_t m = x.dim(0), n = x.dim(1), w = end - begin;
    auto out = Tensor<T>::zeros({m, w});
    auto src = x.data();
    auto dst = out.mutable_data();
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < w; ++j) dst[i * w + j] = src[i * n + begin + j];
    auto* xs = x.storage();
    auto* os = out.storage();
    record<T>("slice_cols", {x}, out, [xs, os, begin, m, n, w] {
        auto& g = xs->ensure_grad();
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < w; ++j) g[i * n + begin + j] += os->grad[i * w + j];
    });
    return out;
}

template <typename T>
Tensor<T> concat_rows(std::span<const Tensor<T>> parts) {
    if (parts.empty()) throw ShapeError("concat_rows: no inputs");
    const std::size_t n = parts[0].dim(1);
    std::vector<T> data;
    std::size_t rows = 0;
    for (const auto& p : parts) {
        require_rank(p, 2, "concat_rows");
        if (p.dim(1) != n) {
            throw ShapeError("concat_rows: width mismatch " + shape_str(parts[0].shape()) + " vs " +
                             shape_str(p.shape()));
        }
        data.insert(data.end(), p.data().begin(), p.data().end());
        rows += p.dim(0);
    }
    Tensor<T> out({rows, n}, std::move(data));
    std::vector<Tensor<T>> inputs(parts.begin(), parts.end());
    std::vector<TensorStorage<T>*> stores;
    for (const auto& p : parts) stores.push_back(p.storage());
    auto* os = out.storage();
    record<T>("concat_rows", std::move(inputs), out, [stores, os] {
        std::size_t offset = 0;
        for (auto* s : stores) {
            if (s->requires_grad) {
                auto& g = s->ensure_grad();
                for (std::size_t i = 0; i < g.size(); ++i) g[i] += os->grad[offset + i];
            }
            offset += s->data.size();
        }
    });
    return out;
}

template <typename T>
Tensor<T> concat_cols(std::span<const Tensor<T>> parts) {
    if (parts.empty()) throw ShapeError("concat_cols: no inputs");
    const std::size_t m = parts[0].dim(0);
    std::size_t width = 0;
    for (const auto& p : parts) {
        require_rank(p, 2, "concat_cols");
        if (p.dim(0) != m) {
            throw ShapeError("concat_cols: height mismatch " + shape_str(parts[0].shape()) + " vs " +
                             shape_str(p.shape()));
        }
        width += p.dim(1);
    }
    auto out = Tensor<T>::zeros({m, width});
    auto dst = out.mutable_data();
    std::size_t col = 0;
    for (const auto& p : parts) {
        const std::size_t w = p.dim(1);
        auto src = p.data();
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < w; ++j) dst[i * width + col + j] = src[i * w + j];
        col += w;
    }
    std::vector<Tensor<T>> inputs(parts.begin(), parts.end());
    std::vector<TensorStorage<T>*> stores;
    for (const auto& p : parts) stores.push_back(p.storage());
    auto* os = out.storage();
    record<T>("concat_cols", std::move(inputs), out, [stores, os, m, width] {
        std::size_t col = 0;
        for (auto* s : stores) {
            const std::size_t w = s->shape[1];
            if (s->requires_grad) {
                auto& g = s->ensure_grad();
                for (std::size_t i = 0; i < m; ++i)
                    for (std::size_t j = 0; j < w; ++j) g[i * w + j] += os->grad[i * width + col + j];
            }
            col += w;
        }
    });
    return out;
}

template <typename T>
Tensor<T> gather_rows(const Tensor<T>& table, std::span<const std::int32_t> ids) {
    require_rank(table, 2, "gather_rows");
    const std::size_t rows = table.dim(0), n = table.dim(1);
    auto out = Tensor<T>::zeros({ids.size(), n});
    auto src = table.data();
    auto dst = out.mutable_data();
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (ids[i] < 0 || static_cast<std::size_t>(ids[i]) >= rows) {
            throw std::out_of_range("gather_rows: id " + std::to_string(ids[i]) + " outside table of " +
                                    std::to_string(rows) + " rows");
        }
        std::copy_n(src.begin() + ids[i] * n, n, dst.begin() + i * n);
    }
    std::vector<std::int32_t> idx(ids.begin(), ids.end());
    auto* ts = table.storage();
    auto* os = out.storage();
    record<T>("gather_rows", {table}, out, [ts, os, idx = std::move(idx), n] {
        auto& g = ts->ensure_grad();
        for (std::size_t i = 0; i < idx.size(); ++i)
            for (std::size_t j = 0; j < n; ++j) g[idx[i] * n + j] += os->grad[i * n + j];
    });
    return out;
}

template <typename T>
Tensor<T> dropout(const Tensor<T>& x, double rate, std::mt19937_64& rng) {
    if (rate <= 0.0) return x;
    if (rate >= 1.0) throw std::invalid_argument("dropout: rate must be < 1");
    std::bernoulli_distribution keep(1.0 - rate);
    const T factor = T(1.0 / (1.0 - rate));
    auto mask = Tensor<T>::zeros(x.shape());
    for (auto& m : mask.mutable_data()) m = keep(rng) ? factor : T(0);
    return mul(x, mask);
}

#define PGT_INSTANTIATE_OPS(T)                                                              \
    template Tensor<T> matmul(const Tensor<T>&, const Tensor<T>&);                          \
    template Tensor<T> transpose(const Tensor<T>&);                                         \
    template Tensor<T> add(const Tensor<T>&, const Tensor<T>&);                             \
    template Tensor<T> mul(const Tensor<T>&, const Tensor<T>&);                             \
    template Tensor<T> scale(const Tensor<T>&, T);                                          \
    template Tensor<T> add_bias(const Tensor<T>&, const Tensor<T>&);                        \
    template Tensor<T> softmax(const Tensor<T>&, std::size_t);                              \
    template Tensor<T> layer_norm(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, T); \
    template Tensor<T> gelu(const Tensor<T>&);                                              \
    template Tensor<T> cross_entropy(const Tensor<T>&, std::size_t);                        \
    template Tensor<T> sum(const Tensor<T>&);                                               \
    template Tensor<T> dot(const Tensor<T>&, const Tensor<T>&);                             \
    template Tensor<T> reshape(const Tensor<T>&, Shape);                                    \
    template Tensor<T> slice_rows(const Tensor<T>&, std::size_t, std::size_t);              \
    template Tensor<T> slice_cols(const Tensor<T>&, std::size_t, std::size_t);              \
    template Tensor<T> concat_rows(std::span<const Tensor<T>>);                             \
    template Tensor<T> concat_cols(std::span<const Tensor<T>>);                             \
    template Tensor<T> gather_rows(const Tensor<T>&, std::span<const std::int32_t>);        \
    template Tensor<T> dropout(const Tensor<T>&, double, std::mt19937_64&);

PGT_INSTANTIATE_OPS(float)
PGT_INSTANTIATE_OPS(double)

#undef PGT_INSTANTIATE_OPS

}  // namespace pgt
