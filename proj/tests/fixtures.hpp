#pragma once

#include <random>

#include "pgt/graph.hpp"
#include "pgt/model.hpp"

namespace pgt::test {

inline ModelConfig toy_config(std::size_t layers = 2, std::size_t hidden = 8, std::size_t heads = 2,
                              std::size_t vocab = 40, std::uint64_t seed = 1) {
    ModelConfig c;
    c.num_layers = layers;
    c.hidden = hidden;
    c.heads = heads;
    c.ffn = 2 * hidden;
    c.vocab_size = vocab;
    c.max_node_len = 16;
    c.max_seq_len = 64;
    c.inter_layers = default_inter_layers(layers);
    c.dropout = 0.0;
    c.seed = seed;
    return c;
}

inline TokenIds random_tokens(std::mt19937_64& rng, std::size_t n, std::size_t vocab) {
    TokenIds t(n);
    for (auto& id : t) id = static_cast<TokenId>(Vocabulary::kReserved + rng() % (vocab - Vocabulary::kReserved));
    return t;
}

/// Graph over random token spans; k in [1, max_k], lengths up to the node budget.
inline PgtGraph random_graph(std::mt19937_64& rng, const ModelConfig& config, std::size_t max_k = 4,
                             GraphVariant variant = GraphVariant::base) {
    const std::size_t k = 1 + rng() % max_k;
    auto q = random_tokens(rng, 1 + rng() % 3, config.vocab_size);
    auto dc = random_tokens(rng, rng() % 6, config.vocab_size);
    std::vector<TokenIds> fb;
    for (std::size_t i = 0; i < k; ++i) fb.push_back(random_tokens(rng, rng() % 10, config.vocab_size));
    return build_graph(q, dc, fb, variant, config.max_node_len);
}

/// Puts the weights of every parameter on a fresh random draw so that
/// zero-initialized biases and unit gains do not hide errors.
template <typename T>
void randomize(const PgtWeights<T>& w, std::mt19937_64& rng, double scale = 0.3) {
    std::normal_distribution<double> dist(0.0, scale);
    for (auto& [name, t] : w.named()) {
        auto handle = t;
        for (auto& v : handle.mutable_data()) v = static_cast<T>(v + dist(rng));
    }
}

}  // namespace pgt::test
