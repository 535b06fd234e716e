#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace pgt {

/// doc_id -> text, iterated in insertion order.
class Corpus {
  public:
    /// Throws std::invalid_argument on a duplicate id.
    void add(std::string doc_id, std::string text);

    std::size_t size() const { return ids_.size(); }
    bool empty() const { return ids_.empty(); }
    bool contains(const std::string& doc_id) const { return index_.count(doc_id) != 0; }

    /// Position of doc_id in insertion order.
    std::size_t position(const std::string& doc_id) const;
    const std::string& text(const std::string& doc_id) const { return texts_[position(doc_id)]; }
    const std::string& text_at(std::size_t pos) const { return texts_.at(pos); }
    const std::string& id_at(std::size_t pos) const { return ids_.at(pos); }
    const std::vector<std::string>& ids() const { return ids_; }

    /// Mean token count (rule tokenizer) over all documents.
    double avg_doc_length() const;

    bool operator==(const Corpus& other) const { return ids_ == other.ids_ && texts_ == other.texts_; }

  private:
    std::vector<std::string> ids_;
    std::vector<std::string> texts_;
    std::unordered_map<std::string, std::size_t> index_;
    std::size_t total_tokens_ = 0;
};

/// query_id -> query text
using QueryMap = std::map<std::string, std::string>;

/// Graded judgments on the four-point scale (0..3); binary files are a subset.
class Qrels {
  public:
    static constexpr int kMaxGrade = 3;

    void set(const std::string& query_id, const std::string& doc_id, int grade);
    std::optional<int> grade(const std::string& query_id, const std::string& doc_id) const;

    /// Judgments for one query (empty map when the query is unjudged).
    const std::map<std::string, int>& judgments(const std::string& query_id) const;
    bool has_query(const std::string& query_id) const { return grades_.count(query_id) != 0; }
    const std::map<std::string, std::map<std::string, int>>& all() const { return grades_; }

    /// Number of documents with grade >= threshold.
    std::size_t relevant_count(const std::string& query_id, int threshold) const;

    bool operator==(const Qrels& other) const { return grades_ == other.grades_; }

  private:
    std::map<std::string, std::map<std::string, int>> grades_;
};

struct RunEntry {
    std::string doc_id;
    double score = 0.0;

    bool operator==(const RunEntry&) const = default;
};

/// Ranked lists per query; rank is the position in the vector (1-based on disk).
struct RunList {
    std::map<std::string, std::vector<RunEntry>> queries;
    std::string tag = "pgt";

    const std::vector<RunEntry>& ranking(const std::string& query_id) const;
    bool operator==(const RunList&) const = default;
};

struct ParseError : std::runtime_error {
    ParseError(const std::string& source, std::size_t line, const std::string& what)
        : std::runtime_error(source + ":" + std::to_string(line) + ": " + what), line_number(line) {}
    std::size_t line_number;
};

}  // namespace pgt
