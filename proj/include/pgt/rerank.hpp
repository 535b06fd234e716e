#pragma once

#include <functional>
#include <limits>
#include <string>

#include "pgt/collection.hpp"

namespace pgt {

/// Score for one run entry; `rank` is 0-based in the incoming list. Called
/// concurrently from several threads when workers > 1.
using Scorer = std::function<double(const std::string& query_id, const RunEntry& entry, std::size_t rank)>;

inline constexpr std::size_t kFullDepth = std::numeric_limits<std::size_t>::max();

/// Rescores the top `depth` entries of every query and sorts them by score
/// descending, ties by doc_id. The remaining entries follow in their
/// original order; their scores are shifted down by a common offset when
/// needed so the list stays score-descending. Queries are processed in
/// parallel across `workers` threads.
RunList rerank(const RunList& run, std::size_t depth, const Scorer& scorer, std::size_t workers = 1,
               const std::string& tag = "");

}  // namespace pgt
