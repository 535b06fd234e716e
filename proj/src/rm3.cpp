#include "pgt/rm3.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace pgt {
namespace {

void normalize(WeightedQuery& q) {
    double total = 0.0;
    for (auto& [t, w] : q) total += w;
    if (total <= 0.0) return;
    for (auto& [t, w] : q) w /= total;
}

}  // namespace

WeightedQuery rm3_expand(const InvertedIndex& index, const TokenIds& query, std::span<const RunEntry> feedback,
                         const Rm3Params& params) {
    if (params.mix < 0.0 || params.mix > 1.0) throw std::invalid_argument("rm3: mix must lie in [0, 1]");
    WeightedQuery original = count_query(query);
    normalize(original);

    const std::size_t n_fb = std::min(params.fb_docs, feedback.size());
    if (n_fb == 0) return original;

    double max_score = feedback[0].score;
    for (std::size_t i = 0; i < n_fb; ++i) max_score = std::max(max_score, feedback[i].score);
    std::vector<double> doc_weight(n_fb);
    double z = 0.0;
    for (std::size_t i = 0; i < n_fb; ++i) z += doc_weight[i] = std::exp(feedback[i].score - max_score);
    for (auto& w : doc_weight) w /= z;

    WeightedQuery relevance;
    for (std::size_t i = 0; i < n_fb; ++i) {
        const auto doc = index.doc_number(feedback[i].doc_id);
        const double len = index.doc_length(doc);
        if (len == 0.0) continue;
        for (auto p : index.doc_terms(doc)) relevance[static_cast<TokenId>(p.doc)] += p.tf / len * doc_weight[i];
    }

    std::vector<std::pair<TokenId, double>> ranked(relevance.begin(), relevance.end());
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    if (ranked.size() > params.fb_terms) ranked.resize(params.fb_terms);
    WeightedQuery kept(ranked.begin(), ranked.end());
    normalize(kept);

    WeightedQuery expanded;
    for (auto& [t, w] : original) expanded[t] += params.mix * w;
    for (auto& [t, w] : kept) expanded[t] += (1.0 - params.mix) * w;
    std::erase_if(expanded, [](const auto& kv) { return kv.second <= 0.0; });
    normalize(expanded);
    return expanded;
}

RunList rm3_run(const InvertedIndex& index, const QueryMap& queries, const Bm25Params& bm25, const Rm3Params& rm3,
                std::size_t top_k, const std::string& tag) {
    RunList run;
    run.tag = tag;
    for (const auto& [qid, text] : queries) {
        auto tokens = tokenize(text, index.vocab());
        auto first = bm25_search(index, tokens, bm25, rm3.fb_docs);
        auto hits = bm25_search(index, rm3_expand(index, tokens, first, rm3), bm25, top_k);
        if (!hits.empty()) run.queries.emplace(qid, std::move(hits));
    }
    return run;
}

}  // namespace pgt
