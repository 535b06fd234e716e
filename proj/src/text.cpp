#include "pgt/text.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace pgt {
namespace {

bool is_word_byte(unsigned char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

}  // namespace

Vocabulary::Vocabulary() {
    for (const char* special : {"[PAD]", "[UNK]", "[CLS]", "[SEP]"}) add(special);
}

TokenId Vocabulary::add(const std::string& token) {
    auto it = ids_.find(token);
    if (it != ids_.end()) return it->second;
    auto id = static_cast<TokenId>(tokens_.size());
    tokens_.push_back(token);
    ids_.emplace(token, id);
    return id;
}

TokenId Vocabulary::id(std::string_view token) const {
    auto it = ids_.find(std::string(token));
    return it == ids_.end() ? kUnk : it->second;
}

bool Vocabulary::contains(std::string_view token) const {
    return ids_.count(std::string(token)) != 0;
}

const std::string& Vocabulary::token(TokenId id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size()) {
        throw std::out_of_range("token id " + std::to_string(id) + " outside vocabulary of " +
                                std::to_string(tokens_.size()));
    }
    return tokens_[static_cast<std::size_t>(id)];
}

std::vector<std::string> split_words(std::string_view text) {
    std::vector<std::string> words;
    std::string current;
    for (char ch : text) {
        auto c = static_cast<unsigned char>(ch);
        if (is_word_byte(c)) {
            current.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : ch);
        } else if (!current.empty()) {
            words.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) words.push_back(std::move(current));
    return words;
}

Vocabulary build_vocab(const Corpus& corpus, std::size_t min_freq) {
    std::unordered_map<std::string, std::size_t> freq;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        for (auto& w : split_words(corpus.text_at(i))) ++freq[w];
    }
    std::vector<std::pair<std::string, std::size_t>> kept;
    for (auto& [word, count] : freq) {
        if (count >= min_freq) kept.emplace_back(word, count);
    }
    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    Vocabulary vocab;
    for (auto& [word, count] : kept) vocab.add(word);
    return vocab;
}

TokenIds tokenize(std::string_view text, const Vocabulary& vocab) {
    TokenIds ids;
    for (auto& w : split_words(text)) ids.push_back(vocab.id(w));
    return ids;
}

}  // namespace pgt
