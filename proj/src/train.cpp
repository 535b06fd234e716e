#include "pgt/train.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <ostream>
#include <numeric>
#include <random>
#include <stdexcept>
#include <thread>

#include "pgt/corpus_io.hpp"
#include "pgt/ops.hpp"

namespace pgt {

void TrainConfig::validate() const {
    if (epochs < 1) throw std::invalid_argument("train: epochs must be >= 1");
    if (batch_size < 1) throw std::invalid_argument("train: batch size must be >= 1");
    if (!(lr >= 0.0) || !std::isfinite(lr)) throw std::invalid_argument("train: lr must be finite and >= 0");
    if (k < 1) throw std::invalid_argument("train: k must be >= 1");
    if (workers < 1) throw std::invalid_argument("train: workers must be >= 1");
}

template <typename T>
Tensor<T> forward_logits(const ModelInput& input, const PgtWeights<T>& weights, const ModelConfig& config,
                         const ForwardOptions& options) {
    if (const auto* graph = std::get_if<PgtGraph>(&input)) return forward_pgt(*graph, weights, config, options);
    return forward_bert(std::get<NodeInput>(input), weights, config, options);
}

template Tensor<float> forward_logits(const ModelInput&, const PgtWeights<float>&, const ModelConfig&,
                                      const ForwardOptions&);
template Tensor<double> forward_logits(const ModelInput&, const PgtWeights<double>&, const ModelConfig&,
                                       const ForwardOptions&);

double relevance_score(const ModelInput& input, const PgtWeights<float>& weights, const ModelConfig& config) {
    NoGradScope<float> no_grad;
    auto logits = forward_logits(input, weights, config);
    return static_cast<double>(logits.at(1)) - static_cast<double>(logits.at(0));
}

namespace {

struct Adam {
    std::vector<std::vector<float>> m, v;
    std::size_t t = 0;

    explicit Adam(const std::vector<Tensor<float>>& params) {
        for (const auto& p : params) {
            m.emplace_back(p.numel(), 0.0f);
            v.emplace_back(p.numel(), 0.0f);
        }
    }

    void step(std::vector<Tensor<float>>& params, double lr, const TrainConfig& c) {
        ++t;
        const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(t));
        const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(t));
        for (std::size_t i = 0; i < params.size(); ++i) {
            auto& p = params[i];
            if (!p.has_grad()) continue;
            auto data = p.mutable_data();
            auto grad = p.grad();
            for (std::size_t j = 0; j < data.size(); ++j) {
                const double g = grad[j];
                m[i][j] = static_cast<float>(c.beta1 * m[i][j] + (1.0 - c.beta1) * g);
                v[i][j] = static_cast<float>(c.beta2 * v[i][j] + (1.0 - c.beta2) * g * g);
                const double mhat = m[i][j] / bc1, vhat = v[i][j] / bc2;
                data[j] = static_cast<float>(data[j] - lr * mhat / (std::sqrt(vhat) + c.adam_eps));
            }
        }
    }
};

// Forward + backward of one example; gradients accumulate into `weights`.
double accumulate_example(const LabeledInput& ex, const PgtWeights<float>& weights, const ModelConfig& config,
                          std::uint64_t dropout_seed, float loss_scale) {
    Tape<float> tape;
    TapeScope<float> scope(tape);
    std::mt19937_64 rng(dropout_seed);
    ForwardOptions options{true, &rng};
    auto logits = forward_logits(ex.input, weights, config, options);
    for (float v : logits.data()) {
        if (!std::isfinite(v)) return std::numeric_limits<double>::quiet_NaN();
    }
    auto loss = cross_entropy(logits, ex.label);
    const double value = loss.item();
    if (!std::isfinite(value)) return value;
    tape.backward(scale(loss, loss_scale));
    return value;
}

void copy_data(const std::vector<Tensor<float>>& from, std::vector<Tensor<float>>& to) {
    for (std::size_t i = 0; i < from.size(); ++i) {
        std::copy(from[i].data().begin(), from[i].data().end(), to[i].mutable_data().begin());
        to[i].zero_grad();
    }
}

}  // namespace

TrainResult train(const ModelConfig& config, const PgtWeights<float>& initial, std::span<const LabeledInput> examples,
                  const TrainConfig& tc) {
    tc.validate();
    if (examples.empty()) throw std::invalid_argument("train: no examples");
    for (const auto& ex : examples) {
        if (ex.label != 0 && ex.label != 1) throw std::invalid_argument("train: label must be 0 or 1 (" + ex.tag + ")");
    }

    TrainResult result{initial.clone(), {}};
    auto params = result.weights.parameters();
    Adam adam(params);

    const std::size_t n = examples.size();
    const std::size_t steps_per_epoch = (n + tc.batch_size - 1) / tc.batch_size;
    const std::size_t total_steps = steps_per_epoch * tc.epochs;
    std::mt19937_64 master(tc.seed);

    const std::size_t workers = std::min(tc.workers, tc.batch_size);
    std::vector<PgtWeights<float>> replicas;
    std::vector<std::vector<Tensor<float>>> replica_params;
    for (std::size_t w = 1; w < workers; ++w) {
        replicas.push_back(result.weights.clone());
        replica_params.push_back(replicas.back().parameters());
    }

    std::vector<std::size_t> order(n);
    std::size_t step = 0;
    for (std::size_t epoch = 0; epoch < tc.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), master);
        for (std::size_t start = 0; start < n; start += tc.batch_size, ++step) {
            const std::size_t end = std::min(n, start + tc.batch_size);
            const std::size_t count = end - start;
            std::vector<std::uint64_t> seeds(count);
            for (auto& s : seeds) s = master();
            const float loss_scale = 1.0f / static_cast<float>(count);
            std::vector<double> losses(count, 0.0);

            result.weights.zero_grad();
            const std::size_t used = std::min(workers, count);
            std::vector<std::exception_ptr> failures(used);
            auto run_slice = [&](std::size_t w, const PgtWeights<float>& wts) {
                const std::size_t lo = count * w / used, hi = count * (w + 1) / used;
                try {
                    for (std::size_t i = lo; i < hi; ++i) {
                        losses[i] = accumulate_example(examples[order[start + i]], wts, config, seeds[i], loss_scale);
                    }
                } catch (...) {
                    failures[w] = std::current_exception();
                }
            };
            if (used == 1) {
                run_slice(0, result.weights);
                if (failures[0]) std::rethrow_exception(failures[0]);
            } else {
                for (auto& rp : replica_params) copy_data(params, rp);
                std::vector<std::thread> threads;
                for (std::size_t w = 1; w < used; ++w) {
                    threads.emplace_back(run_slice, w, std::cref(replicas[w - 1]));
                }
                run_slice(0, result.weights);
                for (auto& t : threads) t.join();
                for (auto& f : failures) {
                    if (f) std::rethrow_exception(f);
                }
                for (std::size_t w = 1; w < used; ++w) {
                    for (std::size_t i = 0; i < params.size(); ++i) {
                        if (!replica_params[w - 1][i].has_grad()) continue;
                        auto src = replica_params[w - 1][i].grad();
                        auto dst = params[i].mutable_grad();
                        for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += src[j];
                    }
                }
            }

            double mean = 0.0;
            for (std::size_t i = 0; i < count; ++i) {
                if (!std::isfinite(losses[i])) {
                    throw std::runtime_error("train: non-finite loss at step " + std::to_string(step) + " (example " +
                                             examples[order[start + i]].tag + ")");
                }
                mean += losses[i];
            }
            mean /= static_cast<double>(count);
            const double lr = tc.lr * (1.0 - static_cast<double>(step) / static_cast<double>(total_steps));
            result.curve.push_back({step, lr, mean});
            adam.step(params, lr, tc);
        }
    }
    result.weights.zero_grad();
    return result;
}

void write_loss_curve(std::ostream& out, std::span<const LossPoint> curve) {
    out << "step,lr,loss\n";
    for (const auto& p : curve) out << p.step << ',' << format_score(p.lr) << ',' << format_score(p.loss) << '\n';
}

}  // namespace pgt
