#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "pgt/collection.hpp"

namespace pgt {

struct SyntheticCollection {
    Corpus corpus;
    QueryMap queries;
    Qrels qrels;
};

/// Desk-scale graded collection.
///
/// Every query owns a set of topic words; its text is the first three. Per
/// query the generator writes:
///   - relevant documents, graded 1..3, carrying g query words and g + 2
///     further topic words (4, 6 or 8 topic words in total) in general
///     filler text;
///   - keyword-stuffed distractors (judged 0) repeating the query words in
///     boilerplate text, which lexical scoring tends to over-rank;
/// and the remaining documents are unjudged background filler, some with a
/// stray topic word. Document order and ids are shuffled. Deterministic in
/// `seed`.
SyntheticCollection generate_synthetic_corpus(std::size_t n_docs, std::size_t n_queries,
                                              std::size_t vocab_size, std::uint64_t seed);

/// Pronounceable pseudo-word for generator word index i (distinct per index).
std::string synthetic_word(std::size_t index);

}  // namespace pgt
