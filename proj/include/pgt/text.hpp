#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pgt/collection.hpp"

namespace pgt {

using TokenId = std::int32_t;
using TokenIds = std::vector<TokenId>;

/// Dense token <-> id bijection with four reserved ids.
class Vocabulary {
  public:
    static constexpr TokenId kPad = 0;
    static constexpr TokenId kUnk = 1;
    static constexpr TokenId kCls = 2;
    static constexpr TokenId kSep = 3;
    static constexpr std::size_t kReserved = 4;

    Vocabulary();

    /// Appends a token if absent; returns its id either way.
    TokenId add(const std::string& token);

    /// kUnk for unknown tokens.
    TokenId id(std::string_view token) const;
    bool contains(std::string_view token) const;
    const std::string& token(TokenId id) const;
    std::size_t size() const { return tokens_.size(); }
    const std::vector<std::string>& tokens() const { return tokens_; }

    bool operator==(const Vocabulary& other) const { return tokens_ == other.tokens_; }

  private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, TokenId> ids_;
};

/// Lowercases ASCII and splits on whitespace and ASCII punctuation; the
/// separators themselves are dropped. Bytes >= 0x80 are word characters so
/// UTF-8 text survives intact.
std::vector<std::string> split_words(std::string_view text);

/// Tokens with corpus frequency >= min_freq, ordered by frequency desc then
/// lexicographically, after the reserved ids.
Vocabulary build_vocab(const Corpus& corpus, std::size_t min_freq = 1);

/// Word ids only; specials are the sequence builder's job.
TokenIds tokenize(std::string_view text, const Vocabulary& vocab);

}  // namespace pgt
