#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pgt/text.hpp"

namespace pgt {

/// Which texts are prepended into feedback nodes and whether the special
/// (q, d_c) node exists.
enum class GraphVariant : std::uint8_t {
    base,          // feedback: [CLS] q [SEP] d_c [SEP] d_i [SEP]; node [CLS] q [SEP] d_c [SEP]
    no_pre_dc,     // feedback: [CLS] q [SEP] d_i [SEP]
    no_pre_q_dc,   // feedback: [CLS] d_i [SEP]
    no_node_dc,    // special node reduced to [CLS] q [SEP]
    no_node_q_dc,  // no special node; k nodes
};

inline constexpr GraphVariant kAllVariants[] = {GraphVariant::base, GraphVariant::no_pre_dc,
                                                GraphVariant::no_pre_q_dc, GraphVariant::no_node_dc,
                                                GraphVariant::no_node_q_dc};

std::string_view variant_name(GraphVariant v);
/// Accepts the names returned by variant_name().
GraphVariant parse_variant(std::string_view name);

enum class NodeKind : std::uint8_t { qdc_node, feedback_node };

/// One padded input sequence. `mask` is 1 over real tokens then 0.
struct NodeInput {
    TokenIds tokens;
    std::vector<std::int32_t> segments;
    std::vector<std::uint8_t> mask;
    NodeKind kind = NodeKind::feedback_node;

    /// Number of real (unpadded) positions.
    std::size_t length() const;
    bool operator==(const NodeInput&) const = default;
};

struct PgtGraph {
    std::vector<NodeInput> nodes;
    std::vector<std::vector<std::size_t>> adjacency;  // neighbors of each node, self included
    std::string query_id;
    std::string candidate_id;
    GraphVariant variant = GraphVariant::base;
    std::size_t k = 0;
};

/// Builds the PGT input graph for one (query, candidate) pair. The special
/// node, when the variant has one, comes first; feedback nodes follow in the
/// given order. Over-long nodes lose d_i tokens first, then d_c tokens;
/// query tokens are never removed, and every segment keeps its [SEP].
/// Throws std::invalid_argument for an empty query, no feedback, or a query
/// that alone does not fit max_node_len.
PgtGraph build_graph(const TokenIds& query, const TokenIds& candidate, std::span<const TokenIds> feedback,
                     GraphVariant variant, std::size_t max_node_len);

/// Concatenated single-sequence input
///   [CLS] q [SEP] d_c [SEP] d_1 [SEP] ... d_k [SEP]
/// with segment 0 for q and d_c and 1 for feedback text. With no feedback it
/// is the standard reranker pair input (q segment 0, d_c segment 1). Over
/// budget, the currently longest feedback document loses one token at a time.
NodeInput build_bertprf_input(const TokenIds& query, const TokenIds& candidate, std::span<const TokenIds> feedback,
                              std::size_t max_len = 512, std::size_t max_feedback = 5);

/// Human-readable node layout (debug CLI and golden files).
std::string render_graph(const PgtGraph& graph, const Vocabulary& vocab);
std::string render_node(const NodeInput& node, const Vocabulary& vocab);

}  // namespace pgt
