#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pgt/graph.hpp"
#include "pgt/tensor.hpp"

namespace pgt {

struct ModelConfig {
    std::size_t num_layers = 2;
    std::size_t hidden = 32;
    std::size_t heads = 2;
    std::size_t ffn = 64;
    std::size_t vocab_size = 0;
    std::size_t max_node_len = 128;
    std::size_t max_seq_len = 512;  // single-sequence budget for the BERT baselines
    std::vector<std::size_t> inter_layers;  // sorted, unique; empty disables inter-node attention
    GraphVariant variant = GraphVariant::base;
    double dropout = 0.1;
    std::uint64_t seed = 1;

    std::size_t head_dim() const { return hidden / heads; }
    bool is_inter_layer(std::size_t layer) const;
    std::size_t position_table_size() const { return std::max(max_node_len, max_seq_len); }

    /// Throws std::invalid_argument naming the violated constraint.
    void validate() const;

    bool operator==(const ModelConfig&) const = default;
};

/// The last three layers (clipped at 0).
std::vector<std::size_t> default_inter_layers(std::size_t num_layers);

template <typename T>
struct LayerWeights {
    Tensor<T> wq, bq, wk, bk, wv, bv, wo, bo;
    Tensor<T> ln1_gain, ln1_bias;
    Tensor<T> w1, b1, w2, b2;
    Tensor<T> ln2_gain, ln2_bias;
};

/// Hub attention over [CLS] states plus the projection that merges its
/// output with the intra-sequence [CLS] output.
template <typename T>
struct InterWeights {
    Tensor<T> wq, bq, wk, bk, wv, bv;
    Tensor<T> w_combine, b_combine;  // [2d x d], [d]
};

template <typename T>
struct PgtWeights {
    Tensor<T> token_embedding, segment_embedding, position_embedding;
    Tensor<T> embedding_ln_gain, embedding_ln_bias;
    std::vector<LayerWeights<T>> layers;
    std::map<std::size_t, InterWeights<T>> inter;  // keyed by layer index
    Tensor<T> w_score, b_score;  // per-node relevance projection, d -> 2
    Tensor<T> node_weight;       // u, d -> 1

    /// Every parameter with a stable dotted name, in a fixed order. Handles
    /// alias the weights.
    std::vector<std::pair<std::string, Tensor<T>>> named() const;
    std::vector<Tensor<T>> parameters() const;

    PgtWeights clone() const;
    void zero_grad() const;
};

/// Deterministic in config.seed. Inter-node parameters are uniform in
/// +-sqrt(6 / (fan_in + fan_out)); other matrices and embeddings are normal
/// (0, 0.02) truncated at 2 sigma; biases start at 0 and layer-norm gains at 1.
template <typename T>
PgtWeights<T> init_weights(const ModelConfig& config);

template <typename T>
PgtWeights<T> cast_weights(const PgtWeights<float>& w);

struct ForwardOptions {
    bool training = false;             // enables dropout
    std::mt19937_64* rng = nullptr;    // dropout randomness, required when training
};

/// Multi-head scaled dot-product self-attention within one sequence,
/// followed by the output projection. Keys with mask 0 are set to -inf
/// before the softmax. states: [n x d].
template <typename T>
Tensor<T> intra_attention(const LayerWeights<T>& layer, const Tensor<T>& states, std::span<const std::uint8_t> mask,
                          std::size_t heads);

template <typename T>
struct InterAttention {
    Tensor<T> output;   // [S x d]
    Tensor<T> weights;  // [S x S], row s = softmax over N(s), 0 elsewhere
};

/// Single-head attention among [CLS] states of neighboring nodes:
///   h_s = sum_{s' in N(s)} softmax_{s'}(q_s . k_s' / sqrt(d_k)) v_s'
template <typename T>
InterAttention<T> inter_cls_attention(const InterWeights<T>& inter, const Tensor<T>& cls_states,
                                      const std::vector<std::vector<std::size_t>>& adjacency, std::size_t head_dim);

/// One Transformer layer over every node. Nodes attend within themselves;
/// on inter layers the [CLS] rows are replaced by
/// combine(concat(intra_cls, inter_cls_attention(intra_cls))) before the
/// residual connection.
template <typename T>
std::vector<Tensor<T>> encoder_layer(std::size_t layer_index, const PgtWeights<T>& weights,
                                     const std::vector<Tensor<T>>& states,
                                     const std::vector<std::vector<std::size_t>>& adjacency,
                                     const ModelConfig& config, const ForwardOptions& options);

/// Token + segment + position embeddings of the real prefix of a node,
/// followed by layer norm: [length x d].
template <typename T>
Tensor<T> embed(const NodeInput& node, const PgtWeights<T>& weights, const ModelConfig& config,
                const ForwardOptions& options);

/// Final hidden states of every node (real prefix only).
template <typename T>
std::vector<Tensor<T>> encode_graph(const PgtGraph& graph, const PgtWeights<T>& weights, const ModelConfig& config,
                                    const ForwardOptions& options = {});

/// logits[2] = sum_s alpha_s (W_score h_s + b), alpha = softmax_s(u . h_s)
/// over the final [CLS] states h_s.
template <typename T>
Tensor<T> forward_pgt(const PgtGraph& graph, const PgtWeights<T>& weights, const ModelConfig& config,
                      const ForwardOptions& options = {});

/// Plain encoder over one sequence; logits = W_score h_cls + b.
template <typename T>
Tensor<T> forward_bert(const NodeInput& sequence, const PgtWeights<T>& weights, const ModelConfig& config,
                       const ForwardOptions& options = {});

/// Full-adjacency helper for S nodes.
std::vector<std::vector<std::size_t>> complete_adjacency(std::size_t nodes);

}  // namespace pgt
