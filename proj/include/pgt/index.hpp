#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "pgt/collection.hpp"
#include "pgt/text.hpp"

namespace pgt {

struct Posting {
    std::uint32_t doc;  // position in corpus order
    std::uint32_t tf;

    bool operator==(const Posting&) const = default;
};

/// term -> weight. Plain queries carry term counts; RM3 output is a
/// distribution summing to 1.
using WeightedQuery = std::map<TokenId, double>;

class InvertedIndex {
  public:
    InvertedIndex() = default;
    static InvertedIndex build(const Corpus& corpus, const Vocabulary& vocab);

    const Vocabulary& vocab() const { return vocab_; }
    std::size_t num_docs() const { return doc_ids_.size(); }
    double avgdl() const { return avgdl_; }

    std::span<const Posting> postings(TokenId term) const;
    std::size_t df(TokenId term) const { return postings(term).size(); }
    std::uint32_t doc_length(std::uint32_t doc) const { return lengths_.at(doc); }
    const std::string& doc_id(std::uint32_t doc) const { return doc_ids_.at(doc); }
    std::uint32_t doc_number(const std::string& doc_id) const;

    /// Forward view: (term, tf) pairs of one document, term-sorted.
    std::span<const Posting> doc_terms(std::uint32_t doc) const { return forward_.at(doc); }

    void save(const std::filesystem::path& path) const;
    static InvertedIndex load(const std::filesystem::path& path);

    bool operator==(const InvertedIndex& other) const;

  private:
    void finalize();

    Vocabulary vocab_;
    std::vector<std::string> doc_ids_;
    std::unordered_map<std::string, std::uint32_t> doc_numbers_;
    std::vector<std::uint32_t> lengths_;
    std::vector<std::vector<Posting>> postings_;  // indexed by term id
    std::vector<std::vector<Posting>> forward_;   // indexed by doc; Posting::doc holds the term id
    double avgdl_ = 0.0;
};

struct Bm25Params {
    double k1 = 0.9;
    double b = 0.4;
};

/// ln(1 + (N - df + 0.5) / (df + 0.5)); positive for every df <= N.
double bm25_idf(std::size_t df, std::size_t num_docs);

/// tf (k1 + 1) / (tf + k1 (1 - b + b |d| / avgdl))
double bm25_tf_weight(double tf, double doc_length, double avgdl, const Bm25Params& params);

WeightedQuery count_query(const TokenIds& query);

/// Top-k by score desc, ties by doc_id asc. Only documents matching at least
/// one query term are returned; an empty query returns nothing.
std::vector<RunEntry> bm25_search(const InvertedIndex& index, const WeightedQuery& query,
                                  const Bm25Params& params, std::size_t top_k);
std::vector<RunEntry> bm25_search(const InvertedIndex& index, const TokenIds& query,
                                  const Bm25Params& params, std::size_t top_k);

RunList bm25_run(const InvertedIndex& index, const QueryMap& queries, const Bm25Params& params,
                 std::size_t top_k, const std::string& tag = "bm25");

struct SweepResult {
    Bm25Params best;
    double best_metric = 0.0;
    struct Cell {
        double k1, b, metric;
    };
    std::vector<Cell> grid;
};

using RunMetric = std::function<double(const RunList&)>;

/// Exhaustive grid search for the metric argmax. Ties go to the smaller k1,
/// then the smaller b.
SweepResult sweep_bm25(const InvertedIndex& index, const QueryMap& queries, std::vector<double> k1_grid,
                       std::vector<double> b_grid, const RunMetric& metric, std::size_t top_k = 100);

/// Same, scoring cells by mean MAP@100 against `qrels`.
SweepResult sweep_bm25(const InvertedIndex& index, const QueryMap& queries, const Qrels& qrels,
                       std::vector<double> k1_grid, std::vector<double> b_grid, int rel_threshold = 2);

}  // namespace pgt
