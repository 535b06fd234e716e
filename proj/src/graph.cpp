#include "pgt/graph.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace pgt {
namespace {

struct Segment {
    TokenIds tokens;
    std::int32_t segment_id;
    int truncation_rank;  // lower is truncated first; -1 never
};

// [CLS] seg_0 [SEP] seg_1 [SEP] ... padded to max_len.
NodeInput assemble(std::vector<Segment> segments, std::size_t max_len, NodeKind kind) {
    std::size_t required = 1;
    for (const auto& s : segments) required += s.tokens.size() + 1;
    if (required > max_len) {
        std::size_t overflow = required - max_len;
        std::vector<std::size_t> order(segments.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return segments[a].truncation_rank < segments[b].truncation_rank;
        });
        for (auto i : order) {
            if (overflow == 0) break;
            auto& s = segments[i];
            if (s.truncation_rank < 0) continue;
            const std::size_t cut = std::min(overflow, s.tokens.size());
            s.tokens.resize(s.tokens.size() - cut);
            overflow -= cut;
        }
        if (overflow > 0) {
            throw std::invalid_argument("query does not fit max_node_len " + std::to_string(max_len));
        }
    }

    NodeInput node;
    node.kind = kind;
    node.tokens.push_back(Vocabulary::kCls);
    node.segments.push_back(0);
    for (const auto& s : segments) {
        for (auto t : s.tokens) {
            node.tokens.push_back(t);
            node.segments.push_back(s.segment_id);
        }
        node.tokens.push_back(Vocabulary::kSep);
        node.segments.push_back(s.segment_id);
    }
    node.mask.assign(node.tokens.size(), 1);
    node.tokens.resize(max_len, Vocabulary::kPad);
    node.segments.resize(max_len, 0);
    node.mask.resize(max_len, 0);
    return node;
}

}  // namespace

std::string_view variant_name(GraphVariant v) {
    switch (v) {
        case GraphVariant::base: return "base";
        case GraphVariant::no_pre_dc: return "wo_pre_dc";
        case GraphVariant::no_pre_q_dc: return "wo_pre_q_dc";
        case GraphVariant::no_node_dc: return "wo_node_dc";
        case GraphVariant::no_node_q_dc: return "wo_node_q_dc";
    }
    return "?";
}

GraphVariant parse_variant(std::string_view name) {
    for (auto v : kAllVariants) {
        if (variant_name(v) == name) return v;
    }
    throw std::invalid_argument("unknown graph variant '" + std::string(name) +
                                "' (base, wo_pre_dc, wo_pre_q_dc, wo_node_dc, wo_node_q_dc)");
}

std::size_t NodeInput::length() const {
    return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
}

PgtGraph build_graph(const TokenIds& query, const TokenIds& candidate, std::span<const TokenIds> feedback,
                     GraphVariant variant, std::size_t max_node_len) {
    if (query.empty()) throw std::invalid_argument("build_graph: query is empty after tokenization");
    if (feedback.empty()) throw std::invalid_argument("build_graph: need k >= 1 feedback documents");
    if (max_node_len < 8) throw std::invalid_argument("build_graph: max_node_len must be >= 8");

    PgtGraph graph;
    graph.variant = variant;
    graph.k = feedback.size();

    switch (variant) {
        case GraphVariant::base:
        case GraphVariant::no_pre_dc:
        case GraphVariant::no_pre_q_dc:
            graph.nodes.push_back(assemble({{query, 0, -1}, {candidate, 1, 0}}, max_node_len, NodeKind::qdc_node));
            break;
        case GraphVariant::no_node_dc:
            graph.nodes.push_back(assemble({{query, 0, -1}}, max_node_len, NodeKind::qdc_node));
            break;
        case GraphVariant::no_node_q_dc:
            break;
    }

    for (const auto& doc : feedback) {
        std::vector<Segment> segs;
        switch (variant) {
            case GraphVariant::base:
            case GraphVariant::no_node_dc:
            case GraphVariant::no_node_q_dc:
                segs = {{query, 0, -1}, {candidate, 0, 1}, {doc, 1, 0}};
                break;
            case GraphVariant::no_pre_dc:
                segs = {{query, 0, -1}, {doc, 1, 0}};
                break;
            case GraphVariant::no_pre_q_dc:
                segs = {{doc, 1, 0}};
                break;
        }
        graph.nodes.push_back(assemble(std::move(segs), max_node_len, NodeKind::feedback_node));
    }

    const std::size_t n = graph.nodes.size();
    graph.adjacency.assign(n, {});
    for (std::size_t i = 0; i < n; ++i) {
        graph.adjacency[i].resize(n);
        std::iota(graph.adjacency[i].begin(), graph.adjacency[i].end(), 0);
    }
    return graph;
}

NodeInput build_bertprf_input(const TokenIds& query, const TokenIds& candidate, std::span<const TokenIds> feedback,
                              std::size_t max_len, std::size_t max_feedback) {
    if (feedback.size() > max_feedback) {
        throw std::invalid_argument("build_bertprf_input: " + std::to_string(feedback.size()) +
                                    " feedback documents exceed the cap of " + std::to_string(max_feedback));
    }
    std::vector<TokenIds> docs(feedback.begin(), feedback.end());
    std::size_t required = 1 + query.size() + 1 + candidate.size() + 1;
    for (const auto& d : docs) required += d.size() + 1;
    while (required > max_len) {
        auto longest = std::max_element(docs.begin(), docs.end(),
                                        [](const TokenIds& a, const TokenIds& b) { return a.size() < b.size(); });
        if (longest == docs.end() || longest->empty()) {
            throw std::invalid_argument("build_bertprf_input: query and candidate exceed max_len " +
                                        std::to_string(max_len));
        }
        longest->pop_back();
        --required;
    }

    const std::int32_t candidate_segment = docs.empty() ? 1 : 0;
    std::vector<Segment> segs{{query, 0, -1}, {candidate, candidate_segment, -1}};
    for (auto& d : docs) segs.push_back({std::move(d), 1, -1});
    return assemble(std::move(segs), max_len, NodeKind::qdc_node);
}

std::string render_node(const NodeInput& node, const Vocabulary& vocab) {
    std::ostringstream out;
    const std::size_t len = node.length();
    out << "kind=" << (node.kind == NodeKind::qdc_node ? "qdc_node" : "feedback_node") << " len=" << len << '\n';
    out << "  tokens:";
    for (std::size_t i = 0; i < len; ++i) out << ' ' << vocab.token(node.tokens[i]);
    out << "\n  segments:";
    for (std::size_t i = 0; i < len; ++i) out << ' ' << node.segments[i];
    out << '\n';
    return out.str();
}

std::string render_graph(const PgtGraph& graph, const Vocabulary& vocab) {
    std::ostringstream out;
    out << "variant=" << variant_name(graph.variant) << " k=" << graph.k << " nodes=" << graph.nodes.size() << '\n';
    for (std::size_t i = 0; i < graph.nodes.size(); ++i) out << "node " << i << ' ' << render_node(graph.nodes[i], vocab);
    out << "adjacency:\n";
    for (std::size_t i = 0; i < graph.adjacency.size(); ++i) {
        out << "  " << i << ':';
        for (auto j : graph.adjacency[i]) out << ' ' << j;
        out << '\n';
    }
    return out.str();
}

}  // namespace pgt
