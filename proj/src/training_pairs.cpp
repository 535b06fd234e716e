#include "pgt/training_pairs.hpp"

#include <algorithm>
#include <random>

namespace pgt {

std::vector<TrainingExample> sample_training_pairs(const Qrels& qrels, const RunList& run,
                                                   int rel_threshold, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<TrainingExample> out;
    for (const auto& [qid, entries] : run.queries) {
        std::vector<std::string> positives;
        for (const auto& [doc, grade] : qrels.judgments(qid)) {
            if (grade >= rel_threshold) positives.push_back(doc);
        }
        std::vector<std::string> negatives;
        for (const auto& e : entries) {
            auto g = qrels.grade(qid, e.doc_id);
            if (!g || *g < rel_threshold) negatives.push_back(e.doc_id);
        }
        const std::size_t n = std::min(positives.size(), negatives.size());
        if (n == 0) continue;

        std::shuffle(negatives.begin(), negatives.end(), rng);
        if (positives.size() > n) {
            std::shuffle(positives.begin(), positives.end(), rng);
            positives.resize(n);
            std::sort(positives.begin(), positives.end());
        }
        negatives.resize(n);
        for (auto& d : positives) out.push_back({qid, d, 1});
        for (auto& d : negatives) out.push_back({qid, d, 0});
    }
    return out;
}

}  // namespace pgt
