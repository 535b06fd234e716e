#pragma once

#include <span>

#include "pgt/index.hpp"

namespace pgt {

struct Rm3Params {
    std::size_t fb_docs = 10;
    std::size_t fb_terms = 10;
    double mix = 0.5;  // weight of the original query
};

/// Relevance-model expansion.
///
///   doc weight   w_d  = softmax of the first-pass scores over the top fb_docs
///   RM(t)             = sum_d tf(t, d) / |d| * w_d, cut to the fb_terms
///                       heaviest terms and renormalized
///   expanded(t)       = mix * P(t | q) + (1 - mix) * RM(t), normalized
///
/// With no feedback documents the normalized original query is returned.
WeightedQuery rm3_expand(const InvertedIndex& index, const TokenIds& query, std::span<const RunEntry> feedback,
                         const Rm3Params& params);

/// BM25 first pass, RM3 expansion, BM25 second pass with the expanded query.
RunList rm3_run(const InvertedIndex& index, const QueryMap& queries, const Bm25Params& bm25,
                const Rm3Params& rm3, std::size_t top_k, const std::string& tag = "rm3");

}  // namespace pgt
