#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "pgt/collection.hpp"

namespace pgt {

// File conventions:
//   corpus   doc_id<TAB>text
//   queries  query_id<TAB>text
//   qrels    query_id 0 doc_id grade
//   run      query_id Q0 doc_id rank score tag
// Malformed lines raise ParseError carrying the 1-based line number.

Corpus read_tsv_corpus(std::istream& in, const std::string& source = "<corpus>");
QueryMap read_tsv_queries(std::istream& in, const std::string& source = "<queries>");
Qrels read_trec_qrels(std::istream& in, const std::string& source = "<qrels>");
RunList read_trec_run(std::istream& in, const std::string& source = "<run>");

Corpus load_tsv_corpus(const std::filesystem::path& path);
QueryMap load_tsv_queries(const std::filesystem::path& path);
Qrels load_trec_qrels(const std::filesystem::path& path);
RunList load_trec_run(const std::filesystem::path& path);

void write_tsv_corpus(std::ostream& out, const Corpus& corpus);
void write_tsv_queries(std::ostream& out, const QueryMap& queries);
void write_trec_qrels(std::ostream& out, const Qrels& qrels);
void write_trec_run(std::ostream& out, const RunList& run);

void save_tsv_corpus(const std::filesystem::path& path, const Corpus& corpus);
void save_tsv_queries(const std::filesystem::path& path, const QueryMap& queries);
void save_trec_qrels(const std::filesystem::path& path, const Qrels& qrels);
void save_trec_run(const std::filesystem::path& path, const RunList& run);

/// Shortest decimal text that parses back to the same double.
std::string format_score(double value);

}  // namespace pgt
