#include "pgt/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace pgt {

std::optional<double> ndcg_at_k(std::span<const std::string> ranking, const Grades& grades, std::size_t k) {
    std::vector<int> ideal;
    for (const auto& [doc, g] : grades) {
        if (g > 0) ideal.push_back(g);
    }
    if (ideal.empty()) return std::nullopt;
    std::sort(ideal.begin(), ideal.end(), std::greater<>());

    auto gain = [](int g) { return std::exp2(static_cast<double>(g)) - 1.0; };
    double idcg = 0.0;
    for (std::size_t i = 0; i < std::min(k, ideal.size()); ++i) idcg += gain(ideal[i]) / std::log2(i + 2.0);

    double dcg = 0.0;
    for (std::size_t i = 0; i < std::min(k, ranking.size()); ++i) {
        auto it = grades.find(ranking[i]);
        if (it != grades.end() && it->second > 0) dcg += gain(it->second) / std::log2(i + 2.0);
    }
    return dcg / idcg;
}

std::optional<double> map_at_k(std::span<const std::string> ranking, const Grades& grades, std::size_t k,
                               int rel_threshold) {
    auto total_relevant = std::count_if(grades.begin(), grades.end(),
                                        [&](const auto& kv) { return kv.second >= rel_threshold; });
    if (total_relevant == 0) return std::nullopt;
    double sum_precision = 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < std::min(k, ranking.size()); ++i) {
        auto it = grades.find(ranking[i]);
        if (it != grades.end() && it->second >= rel_threshold) {
            ++hits;
            sum_precision += static_cast<double>(hits) / static_cast<double>(i + 1);
        }
    }
    return sum_precision / static_cast<double>(total_relevant);
}

std::vector<std::string> doc_ids(const std::vector<RunEntry>& entries) {
    std::vector<std::string> ids;
    ids.reserve(entries.size());
    for (const auto& e : entries) ids.push_back(e.doc_id);
    return ids;
}

EvalResult evaluate(const RunList& run, const Qrels& qrels, int rel_threshold) {
    EvalResult result;
    double ndcg = 0.0, map10 = 0.0, map100 = 0.0;
    for (const auto& [qid, entries] : run.queries) {
        if (!qrels.has_query(qid)) {
            result.warnings.push_back("query " + qid + " has no judgments; skipped");
            continue;
        }
        const auto& grades = qrels.judgments(qid);
        auto ranking = doc_ids(entries);
        QueryMetrics m{ndcg_at_k(ranking, grades, 10), map_at_k(ranking, grades, 10, rel_threshold),
                       map_at_k(ranking, grades, 100, rel_threshold)};
        if (m.ndcg10) {
            ndcg += *m.ndcg10;
            ++result.ndcg_queries;
        }
        if (m.map10) {
            map10 += *m.map10;
            map100 += *m.map100;
            ++result.map_queries;
        }
        result.per_query.emplace(qid, m);
    }
    if (result.ndcg_queries) result.ndcg10 = ndcg / static_cast<double>(result.ndcg_queries);
    if (result.map_queries) {
        result.map10 = map10 / static_cast<double>(result.map_queries);
        result.map100 = map100 / static_cast<double>(result.map_queries);
    }
    return result;
}

}  // namespace pgt
