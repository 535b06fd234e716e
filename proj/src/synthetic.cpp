#include "pgt/synthetic.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

namespace pgt {
namespace {

constexpr std::size_t kTopicWords = 8;
constexpr std::size_t kQueryWords = 3;
constexpr std::size_t kMaxRelevant = 6;
constexpr std::size_t kMaxDistractors = 6;

std::string padded(char prefix, std::size_t value, std::size_t width) {
    auto digits = std::to_string(value);
    return std::string(1, prefix) + std::string(width > digits.size() ? width - digits.size() : 0, '0') + digits;
}

class Draw {
  public:
    explicit Draw(std::uint64_t seed) : rng_(seed) {}

    std::size_t between(std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
    }
    bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }

    template <typename V>
    const typename V::value_type& pick(const V& pool) {
        return pool[between(0, pool.size() - 1)];
    }

    template <typename V>
    void shuffle(V& v) {
        std::shuffle(v.begin(), v.end(), rng_);
    }

  private:
    std::mt19937_64 rng_;
};

std::string join(const std::vector<std::string>& words) {
    std::string out;
    for (const auto& w : words) {
        if (!out.empty()) out.push_back(' ');
        out += w;
    }
    return out;
}

}  // namespace

std::string synthetic_word(std::size_t index) {
    static constexpr char kConsonants[] = "bdfgklmnprstvz";
    static constexpr char kVowels[] = "aeiou";
    constexpr std::size_t nc = sizeof(kConsonants) - 1, nv = sizeof(kVowels) - 1, ns = nc * nv;
    auto syllable = [&](std::size_t s) { return std::string{kConsonants[s / nv], kVowels[s % nv]}; };
    // Two syllables always; extra leading syllables encode the high digits.
    std::string word = syllable(index % ns) + syllable((index / ns) % ns);
    for (std::size_t rest = index / (ns * ns); rest > 0; rest /= ns) word = syllable(rest % ns) + word;
    return word;
}

SyntheticCollection generate_synthetic_corpus(std::size_t n_docs, std::size_t n_queries,
                                              std::size_t vocab_size, std::uint64_t seed) {
    if (n_docs == 0 || n_queries == 0 || vocab_size == 0) {
        throw std::invalid_argument("synthetic corpus sizes must be >= 1");
    }
    Draw draw(seed);

    std::vector<std::string> words(std::max<std::size_t>(vocab_size, 16));
    for (std::size_t i = 0; i < words.size(); ++i) words[i] = synthetic_word(i);
    draw.shuffle(words);

    const std::size_t n_boiler = std::max<std::size_t>(4, words.size() / 25);
    std::vector<std::string> boilerplate(words.begin(), words.begin() + n_boiler);
    std::vector<std::string> general(words.begin() + n_boiler, words.end());

    // Topic sets are consecutive slices of the general pool; they stay
    // disjoint whenever the pool is large enough.
    std::vector<std::vector<std::string>> topics(n_queries);
    for (std::size_t q = 0; q < n_queries; ++q) {
        for (std::size_t t = 0; t < kTopicWords; ++t) topics[q].push_back(general[(q * kTopicWords + t) % general.size()]);
    }
    std::vector<std::string> filler;
    const std::size_t used = n_queries * kTopicWords;
    for (std::size_t i = used; i < general.size(); ++i) filler.push_back(general[i]);
    if (filler.size() < 8) filler = general;

    struct Doc {
        std::string text;
        std::size_t query = 0;
        int grade = -1;  // -1 unjudged
    };
    std::vector<Doc> docs;

    const std::size_t budget = n_docs / n_queries;
    const std::size_t n_rel = std::clamp<std::size_t>(budget / 2, 1, kMaxRelevant);
    const std::size_t n_dis = std::min(kMaxDistractors, budget > n_rel ? budget - n_rel : 0);

    SyntheticCollection out;
    for (std::size_t q = 0; q < n_queries && docs.size() < n_docs; ++q) {
        const auto& topic = topics[q];
        for (std::size_t r = 0; r < n_rel && docs.size() < n_docs; ++r) {
            const int grade = 3 - static_cast<int>(r % 3);
            const auto g = static_cast<std::size_t>(grade);
            std::vector<std::string> body(topic.begin(), topic.begin() + g);  // query words
            std::vector<std::string> extra(topic.begin() + kQueryWords, topic.end());
            draw.shuffle(extra);
            body.insert(body.end(), extra.begin(), extra.begin() + std::min(g + 2, extra.size()));
            for (std::size_t i = 0, n = draw.between(14, 24); i < n; ++i) body.push_back(draw.pick(filler));
            draw.shuffle(body);
            docs.push_back({join(body), q, grade});
        }
        for (std::size_t r = 0; r < n_dis && docs.size() < n_docs; ++r) {
            std::vector<std::string> body;
            const std::size_t stuffed = draw.between(2, kQueryWords);
            for (std::size_t w = 0; w < stuffed; ++w)
                for (std::size_t rep = 0, n = draw.between(2, 3); rep < n; ++rep) body.push_back(topic[w]);
            for (std::size_t i = 0, n = draw.between(10, 14); i < n; ++i) body.push_back(draw.pick(boilerplate));
            for (std::size_t i = 0, n = draw.between(2, 4); i < n; ++i) body.push_back(draw.pick(filler));
            draw.shuffle(body);
            docs.push_back({join(body), q, 0});
        }
    }
    while (docs.size() < n_docs) {
        std::vector<std::string> body;
        for (std::size_t i = 0, n = draw.between(14, 26); i < n; ++i) body.push_back(draw.pick(filler));
        if (draw.chance(0.3)) body.push_back(draw.pick(topics[draw.between(0, n_queries - 1)]));
        if (draw.chance(0.15))
            for (std::size_t i = 0, n = draw.between(6, 10); i < n; ++i) body.push_back(draw.pick(boilerplate));
        draw.shuffle(body);
        docs.push_back({join(body), 0, -1});
    }
    draw.shuffle(docs);

    const std::size_t doc_width = std::to_string(n_docs - 1).size();
    const std::size_t query_width = std::to_string(n_queries - 1).size();
    for (std::size_t q = 0; q < n_queries; ++q) {
        std::vector<std::string> text(topics[q].begin(), topics[q].begin() + kQueryWords);
        out.queries.emplace(padded('Q', q, query_width), join(text));
    }
    for (std::size_t i = 0; i < docs.size(); ++i) {
        auto id = padded('D', i, doc_width);
        if (docs[i].grade >= 0) out.qrels.set(padded('Q', docs[i].query, query_width), id, docs[i].grade);
        out.corpus.add(std::move(id), std::move(docs[i].text));
    }
    return out;
}

}  // namespace pgt
