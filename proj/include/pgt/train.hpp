#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "pgt/flops.hpp"
#include "pgt/graph.hpp"
#include "pgt/model.hpp"

namespace pgt {

struct TrainConfig {
    std::size_t epochs = 2;
    std::size_t batch_size = 8;  // examples per optimizer step
    double lr = 5e-6;            // peak rate, decayed linearly to 0 over all steps
    std::uint64_t seed = 1;
    int rel_threshold = 2;
    std::size_t k = 7;
    GraphVariant variant = GraphVariant::base;
    std::size_t workers = 1;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;

    void validate() const;
};

struct LossPoint {
    std::size_t step = 0;
    double lr = 0.0;
    double loss = 0.0;  // mean cross-entropy over the step's examples

    bool operator==(const LossPoint&) const = default;
};

/// A PGT graph, or one sequence for the single-sequence baselines.
using ModelInput = std::variant<PgtGraph, NodeInput>;

struct LabeledInput {
    ModelInput input;
    int label = 0;
    std::string tag;  // shown in diagnostics, e.g. "q12/D0042"
};

template <typename T>
Tensor<T> forward_logits(const ModelInput& input, const PgtWeights<T>& weights, const ModelConfig& config,
                         const ForwardOptions& options = {});

/// logit[1] - logit[0] of an inference pass.
double relevance_score(const ModelInput& input, const PgtWeights<float>& weights, const ModelConfig& config);

struct TrainResult {
    PgtWeights<float> weights;
    std::vector<LossPoint> curve;
};

/// Adam on mean cross-entropy with the rate lr * (1 - step / total_steps).
/// Each epoch visits the examples in a fresh seeded order; every example
/// gets its own dropout generator seeded from the master stream, so results
/// depend only on the seed and the worker count. With workers > 1 each
/// worker runs a contiguous slice of the batch on a private weight replica
/// and gradients are summed in worker order.
///
/// Throws std::runtime_error naming the step and example on a non-finite
/// loss.
TrainResult train(const ModelConfig& config, const PgtWeights<float>& initial, std::span<const LabeledInput> examples,
                  const TrainConfig& train_config);

/// step,lr,loss rows with a header.
void write_loss_curve(std::ostream& out, std::span<const LossPoint> curve);

}  // namespace pgt
