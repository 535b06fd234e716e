#include "pgt/rerank.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

namespace pgt {
namespace {

std::vector<RunEntry> rerank_query(const std::string& qid, const std::vector<RunEntry>& entries, std::size_t depth,
                                   const Scorer& scorer) {
    const std::size_t r = std::min(depth, entries.size());
    std::vector<RunEntry> out;
    out.reserve(entries.size());
    for (std::size_t i = 0; i < r; ++i) out.push_back({entries[i].doc_id, scorer(qid, entries[i], i)});
    std::sort(out.begin(), out.end(), [](const RunEntry& a, const RunEntry& b) {
        return a.score != b.score ? a.score > b.score : a.doc_id < b.doc_id;
    });
    if (r == entries.size()) return out;

    double tail_max = entries[r].score;
    for (std::size_t i = r; i < entries.size(); ++i) tail_max = std::max(tail_max, entries[i].score);
    const double block_min = out.empty() ? tail_max + 1.0 : out.back().score;
    const double offset = tail_max >= block_min ? tail_max - block_min + 1.0 : 0.0;
    for (std::size_t i = r; i < entries.size(); ++i) out.push_back({entries[i].doc_id, entries[i].score - offset});
    return out;
}

}  // namespace

RunList rerank(const RunList& run, std::size_t depth, const Scorer& scorer, std::size_t workers,
               const std::string& tag) {
    if (depth == 0) throw std::invalid_argument("rerank: depth must be >= 1");
    if (workers == 0) throw std::invalid_argument("rerank: workers must be >= 1");

    std::vector<const std::pair<const std::string, std::vector<RunEntry>>*> items;
    for (const auto& kv : run.queries) items.push_back(&kv);
    std::vector<std::vector<RunEntry>> results(items.size());

    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        for (std::size_t i = next++; i < items.size(); i = next++) {
            try {
                results[i] = rerank_query(items[i]->first, items[i]->second, depth, scorer);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> threads;
    for (std::size_t w = 1; w < std::min(workers, items.size()); ++w) threads.emplace_back(work);
    work();
    for (auto& t : threads) t.join();
    if (error) std::rethrow_exception(error);

    RunList out;
    out.tag = tag.empty() ? run.tag : tag;
    for (std::size_t i = 0; i < items.size(); ++i) out.queries.emplace(items[i]->first, std::move(results[i]));
    return out;
}

}  // namespace pgt
