#include "pgt/index.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "binary_io.hpp"
#include "pgt/metrics.hpp"

namespace pgt {
namespace {

constexpr char kIndexMagic[] = "PGTIDX01";

}  // namespace

InvertedIndex InvertedIndex::build(const Corpus& corpus, const Vocabulary& vocab) {
    InvertedIndex index;
    index.vocab_ = vocab;
    index.postings_.resize(vocab.size());
    index.forward_.resize(corpus.size());
    for (std::size_t pos = 0; pos < corpus.size(); ++pos) {
        const auto doc = static_cast<std::uint32_t>(pos);
        auto tokens = tokenize(corpus.text_at(pos), vocab);
        index.doc_ids_.push_back(corpus.id_at(pos));
        index.lengths_.push_back(static_cast<std::uint32_t>(tokens.size()));

        std::map<TokenId, std::uint32_t> tf;
        for (auto t : tokens) {
            if (t != Vocabulary::kUnk) ++tf[t];
        }
        for (auto [term, count] : tf) {
            index.postings_[static_cast<std::size_t>(term)].push_back({doc, count});
            index.forward_[pos].push_back({static_cast<std::uint32_t>(term), count});
        }
    }
    index.finalize();
    return index;
}

void InvertedIndex::finalize() {
    doc_numbers_.clear();
    for (std::size_t i = 0; i < doc_ids_.size(); ++i) doc_numbers_.emplace(doc_ids_[i], static_cast<std::uint32_t>(i));
    double total = 0.0;
    for (auto len : lengths_) total += len;
    avgdl_ = lengths_.empty() ? 0.0 : total / static_cast<double>(lengths_.size());
}

std::span<const Posting> InvertedIndex::postings(TokenId term) const {
    if (term < 0 || static_cast<std::size_t>(term) >= postings_.size()) return {};
    return postings_[static_cast<std::size_t>(term)];
}

std::uint32_t InvertedIndex::doc_number(const std::string& doc_id) const {
    auto it = doc_numbers_.find(doc_id);
    if (it == doc_numbers_.end()) throw std::out_of_range("doc_id '" + doc_id + "' not in index");
    return it->second;
}

bool InvertedIndex::operator==(const InvertedIndex& other) const {
    return vocab_ == other.vocab_ && doc_ids_ == other.doc_ids_ && lengths_ == other.lengths_ &&
           postings_ == other.postings_ && forward_ == other.forward_;
}

void InvertedIndex::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.write(kIndexMagic, 8);
    binary::write<std::uint64_t>(out, vocab_.size());
    for (std::size_t i = Vocabulary::kReserved; i < vocab_.size(); ++i) binary::write_string(out, vocab_.tokens()[i]);
    binary::write<std::uint64_t>(out, doc_ids_.size());
    for (const auto& id : doc_ids_) binary::write_string(out, id);
    binary::write_vector(out, lengths_);
    for (const auto& plist : postings_) binary::write_vector(out, plist);
}

InvertedIndex InvertedIndex::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    binary::expect_magic(in, std::string(kIndexMagic, 8), "pgt index");
    InvertedIndex index;
    auto vocab_size = binary::read<std::uint64_t>(in);
    for (std::size_t i = Vocabulary::kReserved; i < vocab_size; ++i) index.vocab_.add(binary::read_string(in));
    auto n_docs = binary::read<std::uint64_t>(in);
    for (std::size_t i = 0; i < n_docs; ++i) index.doc_ids_.push_back(binary::read_string(in));
    index.lengths_ = binary::read_vector<std::uint32_t>(in);
    index.postings_.resize(vocab_size);
    index.forward_.resize(n_docs);
    for (std::size_t t = 0; t < vocab_size; ++t) {
        index.postings_[t] = binary::read_vector<Posting>(in);
        for (auto p : index.postings_[t]) index.forward_.at(p.doc).push_back({static_cast<std::uint32_t>(t), p.tf});
    }
    index.finalize();
    return index;
}

double bm25_idf(std::size_t df, std::size_t num_docs) {
    const double n = static_cast<double>(num_docs), d = static_cast<double>(df);
    return std::log(1.0 + (n - d + 0.5) / (d + 0.5));
}

double bm25_tf_weight(double tf, double doc_length, double avgdl, const Bm25Params& params) {
    const double norm = avgdl > 0.0 ? doc_length / avgdl : 1.0;
    return tf * (params.k1 + 1.0) / (tf + params.k1 * (1.0 - params.b + params.b * norm));
}

WeightedQuery count_query(const TokenIds& query) {
    WeightedQuery q;
    for (auto t : query) {
        if (t != Vocabulary::kUnk) q[t] += 1.0;
    }
    return q;
}

std::vector<RunEntry> bm25_search(const InvertedIndex& index, const WeightedQuery& query,
                                  const Bm25Params& params, std::size_t top_k) {
    if (params.k1 < 0.0 || params.b < 0.0 || params.b > 1.0) {
        throw std::invalid_argument("bm25: need k1 >= 0 and 0 <= b <= 1");
    }
    std::vector<double> acc(index.num_docs(), 0.0);
    std::vector<char> seen(index.num_docs(), 0);
    std::vector<std::uint32_t> touched;
    for (auto [term, weight] : query) {
        auto plist = index.postings(term);
        if (plist.empty()) continue;
        const double idf = bm25_idf(plist.size(), index.num_docs());
        for (auto p : plist) {
            if (!seen[p.doc]) {
                seen[p.doc] = 1;
                touched.push_back(p.doc);
            }
            acc[p.doc] += weight * idf * bm25_tf_weight(p.tf, index.doc_length(p.doc), index.avgdl(), params);
        }
    }
    std::vector<RunEntry> hits;
    hits.reserve(touched.size());
    for (auto d : touched) hits.push_back({index.doc_id(d), acc[d]});
    auto better = [](const RunEntry& a, const RunEntry& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.doc_id < b.doc_id;
    };
    if (hits.size() > top_k) {
        std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(top_k), hits.end(), better);
        hits.resize(top_k);
    } else {
        std::sort(hits.begin(), hits.end(), better);
    }
    return hits;
}

std::vector<RunEntry> bm25_search(const InvertedIndex& index, const TokenIds& query, const Bm25Params& params,
                                  std::size_t top_k) {
    return bm25_search(index, count_query(query), params, top_k);
}

RunList bm25_run(const InvertedIndex& index, const QueryMap& queries, const Bm25Params& params,
                 std::size_t top_k, const std::string& tag) {
    RunList run;
    run.tag = tag;
    for (const auto& [qid, text] : queries) {
        auto hits = bm25_search(index, tokenize(text, index.vocab()), params, top_k);
        if (!hits.empty()) run.queries.emplace(qid, std::move(hits));
    }
    return run;
}

SweepResult sweep_bm25(const InvertedIndex& index, const QueryMap& queries, std::vector<double> k1_grid,
                       std::vector<double> b_grid, const RunMetric& metric, std::size_t top_k) {
    if (k1_grid.empty() || b_grid.empty()) throw std::invalid_argument("sweep_bm25: empty grid");
    std::sort(k1_grid.begin(), k1_grid.end());
    std::sort(b_grid.begin(), b_grid.end());
    SweepResult result;
    bool first = true;
    for (double k1 : k1_grid) {
        for (double b : b_grid) {
            Bm25Params params{k1, b};
            double value = metric(bm25_run(index, queries, params, top_k));
            result.grid.push_back({k1, b, value});
            if (first || value > result.best_metric) {
                result.best = params;
                result.best_metric = value;
                first = false;
            }
        }
    }
    return result;
}

SweepResult sweep_bm25(const InvertedIndex& index, const QueryMap& queries, const Qrels& qrels,
                       std::vector<double> k1_grid, std::vector<double> b_grid, int rel_threshold) {
    auto metric = [&](const RunList& run) { return evaluate(run, qrels, rel_threshold).map100; };
    return sweep_bm25(index, queries, std::move(k1_grid), std::move(b_grid), metric, 100);
}

}  // namespace pgt
