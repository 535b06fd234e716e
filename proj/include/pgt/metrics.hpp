#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pgt/collection.hpp"

namespace pgt {

using Grades = std::map<std::string, int>;

/// NDCG@k with gain 2^g - 1 and discount log2(rank + 1). The ideal ordering
/// is taken over every judged document of the query. nullopt when the query
/// has no document with positive grade.
std::optional<double> ndcg_at_k(std::span<const std::string> ranking, const Grades& grades, std::size_t k = 10);

/// AP@k = (1/R) sum_{i <= k, rel_i} P@i with R the query's total number of
/// documents graded >= rel_threshold (not capped at k). nullopt when R == 0.
std::optional<double> map_at_k(std::span<const std::string> ranking, const Grades& grades, std::size_t k,
                               int rel_threshold = 2);

struct QueryMetrics {
    std::optional<double> ndcg10;
    std::optional<double> map10;
    std::optional<double> map100;
};

struct EvalResult {
    std::map<std::string, QueryMetrics> per_query;
    double ndcg10 = 0.0;
    double map10 = 0.0;
    double map100 = 0.0;
    std::size_t ndcg_queries = 0;  // queries contributing to the NDCG mean
    std::size_t map_queries = 0;   // queries contributing to the MAP means
    std::size_t depth = 0;         // rerank depth r, 0 for a first-stage run
    std::vector<std::string> warnings;
};

std::vector<std::string> doc_ids(const std::vector<RunEntry>& entries);

/// Means over queries present in both the run and the qrels. Run queries
/// absent from the qrels are skipped and reported in `warnings`.
EvalResult evaluate(const RunList& run, const Qrels& qrels, int rel_threshold = 2);

}  // namespace pgt
