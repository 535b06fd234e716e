#include "pgt/model.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "pgt/ops.hpp"

namespace pgt {

bool ModelConfig::is_inter_layer(std::size_t layer) const {
    return std::find(inter_layers.begin(), inter_layers.end(), layer) != inter_layers.end();
}

void ModelConfig::validate() const {
    auto fail = [](const std::string& what) { throw std::invalid_argument("model config: " + what); };
    if (hidden == 0 || heads == 0) fail("hidden and heads must be positive");
    if (hidden % heads != 0) fail("hidden " + std::to_string(hidden) + " not divisible by heads " + std::to_string(heads));
    if (ffn == 0) fail("ffn must be positive");
    if (vocab_size < 4) fail("vocab_size must cover the reserved tokens");
    if (max_node_len < 8) fail("max_node_len must be >= 8");
    for (auto l : inter_layers) {
        if (l >= num_layers) fail("inter layer " + std::to_string(l) + " outside [0, " + std::to_string(num_layers) + ")");
    }
    if (dropout < 0.0 || dropout >= 1.0) fail("dropout must lie in [0, 1)");
}

std::vector<std::size_t> default_inter_layers(std::size_t num_layers) {
    std::vector<std::size_t> layers;
    for (std::size_t l = num_layers > 3 ? num_layers - 3 : 0; l < num_layers; ++l) layers.push_back(l);
    return layers;
}

std::vector<std::vector<std::size_t>> complete_adjacency(std::size_t nodes) {
    std::vector<std::vector<std::size_t>> adj(nodes, std::vector<std::size_t>(nodes));
    for (auto& row : adj) std::iota(row.begin(), row.end(), 0);
    return adj;
}

template <typename T>
std::vector<std::pair<std::string, Tensor<T>>> PgtWeights<T>::named() const {
    std::vector<std::pair<std::string, Tensor<T>>> out{
        {"embedding.token", token_embedding},
        {"embedding.segment", segment_embedding},
        {"embedding.position", position_embedding},
        {"embedding.ln_gain", embedding_ln_gain},
        {"embedding.ln_bias", embedding_ln_bias},
    };
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const auto& l = layers[i];
        const auto p = "layer." + std::to_string(i) + ".";
        for (auto& [name, t] : std::initializer_list<std::pair<const char*, const Tensor<T>*>>{
                 {"wq", &l.wq}, {"bq", &l.bq}, {"wk", &l.wk}, {"bk", &l.bk}, {"wv", &l.wv}, {"bv", &l.bv},
                 {"wo", &l.wo}, {"bo", &l.bo}, {"ln1_gain", &l.ln1_gain}, {"ln1_bias", &l.ln1_bias},
                 {"w1", &l.w1}, {"b1", &l.b1}, {"w2", &l.w2}, {"b2", &l.b2}, {"ln2_gain", &l.ln2_gain},
                 {"ln2_bias", &l.ln2_bias}}) {
            out.emplace_back(p + name, *t);
        }
    }
    for (const auto& [layer, w] : inter) {
        const auto p = "inter." + std::to_string(layer) + ".";
        for (auto& [name, t] : std::initializer_list<std::pair<const char*, const Tensor<T>*>>{
                 {"wq", &w.wq}, {"bq", &w.bq}, {"wk", &w.wk}, {"bk", &w.bk}, {"wv", &w.wv}, {"bv", &w.bv},
                 {"w_combine", &w.w_combine}, {"b_combine", &w.b_combine}}) {
            out.emplace_back(p + name, *t);
        }
    }
    out.emplace_back("score.w", w_score);
    out.emplace_back("score.b", b_score);
    out.emplace_back("score.node_weight", node_weight);
    return out;
}

template <typename T>
std::vector<Tensor<T>> PgtWeights<T>::parameters() const {
    std::vector<Tensor<T>> out;
    for (auto& [name, t] : named()) out.push_back(t);
    return out;
}

namespace {

template <typename T, typename S, typename Fn>
PgtWeights<T> map_weights(const PgtWeights<S>& src, Fn&& fn) {
    PgtWeights<T> w;
    w.token_embedding = fn(src.token_embedding);
    w.segment_embedding = fn(src.segment_embedding);
    w.position_embedding = fn(src.position_embedding);
    w.embedding_ln_gain = fn(src.embedding_ln_gain);
    w.embedding_ln_bias = fn(src.embedding_ln_bias);
    for (const auto& l : src.layers) {
        w.layers.push_back({fn(l.wq), fn(l.bq), fn(l.wk), fn(l.bk), fn(l.wv), fn(l.bv), fn(l.wo), fn(l.bo),
                            fn(l.ln1_gain), fn(l.ln1_bias), fn(l.w1), fn(l.b1), fn(l.w2), fn(l.b2), fn(l.ln2_gain),
                            fn(l.ln2_bias)});
    }
    for (const auto& [layer, i] : src.inter) {
        w.inter.emplace(layer, InterWeights<T>{fn(i.wq), fn(i.bq), fn(i.wk), fn(i.bk), fn(i.wv), fn(i.bv),
                                               fn(i.w_combine), fn(i.b_combine)});
    }
    w.w_score = fn(src.w_score);
    w.b_score = fn(src.b_score);
    w.node_weight = fn(src.node_weight);
    return w;
}

template <typename T>
Tensor<T> convert(const Tensor<float>& t) {
    std::vector<T> values(t.data().begin(), t.data().end());
    return Tensor<T>(t.shape(), std::move(values), t.requires_grad());
}

// Fills parameters in creation order from one generator.
template <typename T>
class Initializer {
  public:
    explicit Initializer(std::uint64_t seed) : rng_(seed) {}

    Tensor<T> truncated_normal(Shape shape, double stddev = 0.02) {
        std::normal_distribution<double> dist(0.0, stddev);
        auto t = Tensor<T>::zeros(std::move(shape), true);
        for (auto& v : t.mutable_data()) {
            double x;
            do {
                x = dist(rng_);
            } while (std::abs(x) > 2.0 * stddev);
            v = static_cast<T>(x);
        }
        return t;
    }

    Tensor<T> fan_uniform(std::size_t fan_in, std::size_t fan_out) {
        const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        std::uniform_real_distribution<double> dist(-bound, bound);
        auto t = Tensor<T>::zeros({fan_in, fan_out}, true);
        for (auto& v : t.mutable_data()) v = static_cast<T>(dist(rng_));
        return t;
    }

    static Tensor<T> constant(std::size_t n, T value) { return Tensor<T>::full({n}, value, true); }

  private:
    std::mt19937_64 rng_;
};

}  // namespace

template <typename T>
PgtWeights<T> PgtWeights<T>::clone() const {
    return map_weights<T>(*this, [](const Tensor<T>& t) { return t.clone(); });
}

template <typename T>
void PgtWeights<T>::zero_grad() const {
    for (auto& [name, t] : named()) {
        auto handle = t;
        handle.zero_grad();
    }
}

template <typename T>
PgtWeights<T> init_weights(const ModelConfig& config) {
    config.validate();
    const std::size_t d = config.hidden;
    Initializer<T> init(config.seed);
    PgtWeights<T> w;
    w.token_embedding = init.truncated_normal({config.vocab_size, d});
    w.segment_embedding = init.truncated_normal({2, d});
    w.position_embedding = init.truncated_normal({config.position_table_size(), d});
    w.embedding_ln_gain = Initializer<T>::constant(d, T(1));
    w.embedding_ln_bias = Initializer<T>::constant(d, T(0));
    for (std::size_t l = 0; l < config.num_layers; ++l) {
        LayerWeights<T> layer;
        layer.wq = init.truncated_normal({d, d});
        layer.bq = Initializer<T>::constant(d, T(0));
        layer.wk = init.truncated_normal({d, d});
        layer.bk = Initializer<T>::constant(d, T(0));
        layer.wv = init.truncated_normal({d, d});
        layer.bv = Initializer<T>::constant(d, T(0));
        layer.wo = init.truncated_normal({d, d});
        layer.bo = Initializer<T>::constant(d, T(0));
        layer.ln1_gain = Initializer<T>::constant(d, T(1));
        layer.ln1_bias = Initializer<T>::constant(d, T(0));
        layer.w1 = init.truncated_normal({d, config.ffn});
        layer.b1 = Initializer<T>::constant(config.ffn, T(0));
        layer.w2 = init.truncated_normal({config.ffn, d});
        layer.b2 = Initializer<T>::constant(d, T(0));
        layer.ln2_gain = Initializer<T>::constant(d, T(1));
        layer.ln2_bias = Initializer<T>::constant(d, T(0));
        w.layers.push_back(std::move(layer));
    }
    for (auto l : config.inter_layers) {
        InterWeights<T> inter;
        inter.wq = init.fan_uniform(d, d);
        inter.bq = Initializer<T>::constant(d, T(0));
        inter.wk = init.fan_uniform(d, d);
        inter.bk = Initializer<T>::constant(d, T(0));
        inter.wv = init.fan_uniform(d, d);
        inter.bv = Initializer<T>::constant(d, T(0));
        inter.w_combine = init.fan_uniform(2 * d, d);
        inter.b_combine = Initializer<T>::constant(d, T(0));
        w.inter.emplace(l, std::move(inter));
    }
    w.w_score = init.truncated_normal({d, 2});
    w.b_score = Initializer<T>::constant(2, T(0));
    w.node_weight = init.truncated_normal({d, 1});
    return w;
}

template <typename T>
PgtWeights<T> cast_weights(const PgtWeights<float>& w) {
    return map_weights<T>(w, [](const Tensor<float>& t) { return convert<T>(t); });
}

template <typename T>
Tensor<T> intra_attention(const LayerWeights<T>& layer, const Tensor<T>& states, std::span<const std::uint8_t> mask,
                          std::size_t heads) {
    const std::size_t n = states.dim(0), d = states.dim(1);
    if (mask.size() != n) {
        throw ShapeError("intra_attention: mask of " + std::to_string(mask.size()) + " for " + std::to_string(n) +
                         " positions");
    }
    if (std::none_of(mask.begin(), mask.end(), [](std::uint8_t m) { return m != 0; })) {
        throw std::invalid_argument("intra_attention: sequence is all padding");
    }
    const std::size_t dk = d / heads;
    const bool padded = std::any_of(mask.begin(), mask.end(), [](std::uint8_t m) { return m == 0; });

    auto q = add_bias(matmul(states, layer.wq), layer.bq);
    auto k = add_bias(matmul(states, layer.wk), layer.bk);
    auto v = add_bias(matmul(states, layer.wv), layer.bv);

    Tensor<T> key_mask;
    if (padded) {
        key_mask = Tensor<T>::zeros({n, n});
        auto m = key_mask.mutable_data();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (!mask[j]) m[i * n + j] = -std::numeric_limits<T>::infinity();
    }

    const T inv_sqrt = T(1) / std::sqrt(static_cast<T>(dk));
    std::vector<Tensor<T>> contexts;
    for (std::size_t h = 0; h < heads; ++h) {
        auto qh = heads == 1 ? q : slice_cols(q, h * dk, (h + 1) * dk);
        auto kh = heads == 1 ? k : slice_cols(k, h * dk, (h + 1) * dk);
        auto vh = heads == 1 ? v : slice_cols(v, h * dk, (h + 1) * dk);
        auto scores = scale(matmul(qh, transpose(kh)), inv_sqrt);
        if (padded) scores = add(scores, key_mask);
        contexts.push_back(matmul(softmax(scores, 1), vh));
    }
    auto context = heads == 1 ? contexts[0] : concat_cols<T>(contexts);
    return add_bias(matmul(context, layer.wo), layer.bo);
}

template <typename T>
InterAttention<T> inter_cls_attention(const InterWeights<T>& inter, const Tensor<T>& cls_states,
                                      const std::vector<std::vector<std::size_t>>& adjacency, std::size_t head_dim) {
    const std::size_t s = cls_states.dim(0);
    if (s == 0) throw ShapeError("inter_cls_attention: no nodes");
    if (adjacency.size() != s) {
        throw ShapeError("inter_cls_attention: adjacency for " + std::to_string(adjacency.size()) + " nodes, states for " +
                         std::to_string(s));
    }
    bool complete = true;
    auto neighbor_mask = Tensor<T>::full({s, s}, -std::numeric_limits<T>::infinity());
    auto m = neighbor_mask.mutable_data();
    for (std::size_t i = 0; i < s; ++i) {
        if (adjacency[i].empty()) throw std::invalid_argument("inter_cls_attention: node " + std::to_string(i) + " has no neighbors");
        for (auto j : adjacency[i]) {
            if (j >= s) throw std::out_of_range("inter_cls_attention: neighbor index out of range");
            m[i * s + j] = T(0);
        }
        if (adjacency[i].size() != s) complete = false;
    }

    auto q = add_bias(matmul(cls_states, inter.wq), inter.bq);
    auto k = add_bias(matmul(cls_states, inter.wk), inter.bk);
    auto v = add_bias(matmul(cls_states, inter.wv), inter.bv);
    auto scores = scale(matmul(q, transpose(k)), T(1) / std::sqrt(static_cast<T>(head_dim)));
    if (!complete) scores = add(scores, neighbor_mask);
    auto weights = softmax(scores, 1);
    return {matmul(weights, v), weights};
}

namespace {

template <typename T>
std::vector<Tensor<T>> layer_forward(std::size_t layer_index, const PgtWeights<T>& weights,
                                     const std::vector<Tensor<T>>& states,
                                     const std::vector<std::vector<std::size_t>>& adjacency, const ModelConfig& config,
                                     const ForwardOptions& options, bool use_inter) {
    const auto& layer = weights.layers.at(layer_index);
    const bool drop = options.training && config.dropout > 0.0;
    if (drop && !options.rng) throw std::invalid_argument("training forward needs a dropout generator");

    std::vector<Tensor<T>> attended;
    attended.reserve(states.size());
    for (const auto& x : states) {
        std::vector<std::uint8_t> full(x.dim(0), 1);
        attended.push_back(intra_attention(layer, x, full, config.heads));
    }

    if (use_inter && config.is_inter_layer(layer_index)) {
        const auto& inter = weights.inter.at(layer_index);
        std::vector<Tensor<T>> cls_rows;
        for (const auto& a : attended) cls_rows.push_back(slice_rows(a, 0, 1));
        auto cls = concat_rows<T>(cls_rows);
        auto hub = inter_cls_attention(inter, cls, adjacency, config.head_dim());
        const Tensor<T> merged_in[] = {cls, hub.output};
        auto merged = add_bias(matmul(concat_cols<T>(merged_in), inter.w_combine), inter.b_combine);
        for (std::size_t s = 0; s < attended.size(); ++s) {
            const std::size_t n = attended[s].dim(0);
            auto row = slice_rows(merged, s, s + 1);
            if (n == 1) {
                attended[s] = row;
            } else {
                const Tensor<T> parts[] = {row, slice_rows(attended[s], 1, n)};
                attended[s] = concat_rows<T>(parts);
            }
        }
    }

    std::vector<Tensor<T>> out;
    out.reserve(states.size());
    for (std::size_t s = 0; s < states.size(); ++s) {
        auto a = drop ? dropout(attended[s], config.dropout, *options.rng) : attended[s];
        auto h = layer_norm(add(states[s], a), layer.ln1_gain, layer.ln1_bias);
        auto f = add_bias(matmul(gelu(add_bias(matmul(h, layer.w1), layer.b1)), layer.w2), layer.b2);
        if (drop) f = dropout(f, config.dropout, *options.rng);
        out.push_back(layer_norm(add(h, f), layer.ln2_gain, layer.ln2_bias));
    }
    return out;
}

}  // namespace

template <typename T>
std::vector<Tensor<T>> encoder_layer(std::size_t layer_index, const PgtWeights<T>& weights,
                                     const std::vector<Tensor<T>>& states,
                                     const std::vector<std::vector<std::size_t>>& adjacency, const ModelConfig& config,
                                     const ForwardOptions& options) {
    return layer_forward(layer_index, weights, states, adjacency, config, options, true);
}

template <typename T>
Tensor<T> embed(const NodeInput& node, const PgtWeights<T>& weights, const ModelConfig& config,
                const ForwardOptions& options) {
    const std::size_t len = node.length();
    if (len == 0) throw std::invalid_argument("embed: empty sequence");
    for (std::size_t i = 0; i < len; ++i) {
        if (!node.mask[i]) throw std::invalid_argument("embed: mask is not a prefix of ones");
    }
    if (len > config.position_table_size()) {
        throw std::invalid_argument("embed: sequence of " + std::to_string(len) + " exceeds position table");
    }
    std::span<const TokenId> tokens(node.tokens.data(), len);
    std::span<const std::int32_t> segments(node.segments.data(), len);
    std::vector<std::int32_t> positions(len);
    std::iota(positions.begin(), positions.end(), 0);

    auto x = add(add(gather_rows(weights.token_embedding, tokens), gather_rows(weights.segment_embedding, segments)),
                 gather_rows<T>(weights.position_embedding, positions));
    x = layer_norm(x, weights.embedding_ln_gain, weights.embedding_ln_bias);
    if (options.training && config.dropout > 0.0) {
        if (!options.rng) throw std::invalid_argument("training forward needs a dropout generator");
        x = dropout(x, config.dropout, *options.rng);
    }
    return x;
}

template <typename T>
std::vector<Tensor<T>> encode_graph(const PgtGraph& graph, const PgtWeights<T>& weights, const ModelConfig& config,
                                    const ForwardOptions& options) {
    if (graph.nodes.empty()) throw std::invalid_argument("encode_graph: graph has no nodes");
    std::vector<Tensor<T>> states;
    for (const auto& node : graph.nodes) {
        if (node.length() > config.max_node_len) {
            throw std::invalid_argument("encode_graph: node of " + std::to_string(node.length()) +
                                        " tokens exceeds max_node_len " + std::to_string(config.max_node_len));
        }
        states.push_back(embed(node, weights, config, options));
    }
    for (std::size_t l = 0; l < config.num_layers; ++l) {
        states = layer_forward(l, weights, states, graph.adjacency, config, options, true);
    }
    return states;
}

template <typename T>
Tensor<T> forward_pgt(const PgtGraph& graph, const PgtWeights<T>& weights, const ModelConfig& config,
                      const ForwardOptions& options) {
    auto states = encode_graph(graph, weights, config, options);
    std::vector<Tensor<T>> cls_rows;
    for (const auto& s : states) cls_rows.push_back(slice_rows(s, 0, 1));
    auto cls = concat_rows<T>(cls_rows);
    auto alpha = softmax(matmul(cls, weights.node_weight), 0);
    auto node_logits = add_bias(matmul(cls, weights.w_score), weights.b_score);
    return reshape(matmul(transpose(alpha), node_logits), {2});
}

template <typename T>
Tensor<T> forward_bert(const NodeInput& sequence, const PgtWeights<T>& weights, const ModelConfig& config,
                       const ForwardOptions& options) {
    if (sequence.length() > config.max_seq_len) {
        throw std::invalid_argument("forward_bert: sequence of " + std::to_string(sequence.length()) +
                                    " tokens exceeds max_seq_len " + std::to_string(config.max_seq_len));
    }
    std::vector<Tensor<T>> states{embed(sequence, weights, config, options)};
    const auto adjacency = complete_adjacency(1);
    for (std::size_t l = 0; l < config.num_layers; ++l) {
        states = layer_forward(l, weights, states, adjacency, config, options, false);
    }
    auto cls = slice_rows(states[0], 0, 1);
    return reshape(add_bias(matmul(cls, weights.w_score), weights.b_score), {2});
}

#define PGT_INSTANTIATE_MODEL(T)                                                                                   \
    template struct PgtWeights<T>;                                                                                 \
    template PgtWeights<T> init_weights<T>(const ModelConfig&);                                                    \
    template PgtWeights<T> cast_weights<T>(const PgtWeights<float>&);                                              \
    template Tensor<T> intra_attention(const LayerWeights<T>&, const Tensor<T>&, std::span<const std::uint8_t>,    \
                                       std::size_t);                                                               \
    template InterAttention<T> inter_cls_attention(const InterWeights<T>&, const Tensor<T>&,                       \
                                                   const std::vector<std::vector<std::size_t>>&, std::size_t);     \
    template std::vector<Tensor<T>> encoder_layer(std::size_t, const PgtWeights<T>&, const std::vector<Tensor<T>>&, \
                                                  const std::vector<std::vector<std::size_t>>&,                    \
                                                  const ModelConfig&, const ForwardOptions&);                      \
    template Tensor<T> embed(const NodeInput&, const PgtWeights<T>&, const ModelConfig&, const ForwardOptions&);   \
    template std::vector<Tensor<T>> encode_graph(const PgtGraph&, const PgtWeights<T>&, const ModelConfig&,        \
                                                 const ForwardOptions&);                                           \
    template Tensor<T> forward_pgt(const PgtGraph&, const PgtWeights<T>&, const ModelConfig&, const ForwardOptions&); \
    template Tensor<T> forward_bert(const NodeInput&, const PgtWeights<T>&, const ModelConfig&, const ForwardOptions&);

PGT_INSTANTIATE_MODEL(float)
PGT_INSTANTIATE_MODEL(double)

#undef PGT_INSTANTIATE_MODEL

}  // namespace pgt
