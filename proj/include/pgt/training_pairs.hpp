#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pgt/collection.hpp"

namespace pgt {

struct TrainingExample {
    std::string query_id;
    std::string doc_id;
    int label = 0;  // 1 relevant, 0 not

    bool operator==(const TrainingExample&) const = default;
};

/// Balanced positive/negative pairs per query.
///
/// Positives are judged documents with grade >= rel_threshold. Negatives are
/// drawn without replacement from the query's run entries whose grade is
/// below the threshold or missing. Each retained query contributes
/// min(#positives, #negative candidates) of each label; queries that end up
/// with none are dropped. Output is grouped by query in id order, positives
/// before negatives.
std::vector<TrainingExample> sample_training_pairs(const Qrels& qrels, const RunList& run,
                                                   int rel_threshold, std::uint64_t seed);

}  // namespace pgt
