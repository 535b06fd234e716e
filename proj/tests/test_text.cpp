#include <doctest.h>

#include <set>
#include <sstream>

#include "pgt/corpus_io.hpp"
#include "pgt/synthetic.hpp"
#include "pgt/text.hpp"
#include "pgt/training_pairs.hpp"

using namespace pgt;

namespace {

Corpus corpus_of(std::initializer_list<std::pair<const char*, const char*>> docs) {
    Corpus c;
    for (auto& [id, text] : docs) c.add(id, text);
    return c;
}

}  // namespace

TEST_CASE("split_words lowercases and drops punctuation") {
    auto w = split_words("Hello, WORLD!  it's 3.5\tcaf\xc3\xa9");
    std::vector<std::string> expected{"hello", "world", "it", "s", "3", "5", "caf\xc3\xa9"};
    CHECK(w == expected);
    CHECK(split_words("").empty());
    CHECK(split_words(" ,.; ").empty());
}

TEST_CASE("build_vocab examples") {
    auto v = build_vocab(corpus_of({{"d1", "A a b."}}));
    CHECK(v.size() == 6);
    CHECK(v.id("a") == 4);
    CHECK(v.id("b") == 5);
    CHECK(v.token(Vocabulary::kPad) == "[PAD]");
    CHECK(v.token(Vocabulary::kCls) == "[CLS]");

    CHECK(build_vocab(corpus_of({{"d1", "..."}})).size() == 4);

    auto f = build_vocab(corpus_of({{"d1", "a a b"}}), 2);
    CHECK(f.size() == 5);
    CHECK(f.contains("a"));
    CHECK_FALSE(f.contains("b"));
}

TEST_CASE("build_vocab orders by frequency then lexicographically") {
    auto v = build_vocab(corpus_of({{"d1", "zeta beta alpha"}, {"d2", "zeta beta gamma"}}));
    std::vector<std::string> expected{"[PAD]", "[UNK]", "[CLS]", "[SEP]", "beta", "zeta", "alpha", "gamma"};
    CHECK(v.tokens() == expected);
}

TEST_CASE("tokenize examples") {
    auto v = build_vocab(corpus_of({{"d1", "a b"}}));
    CHECK(tokenize("", v).empty());
    CHECK(tokenize("a b", v) == TokenIds{v.id("a"), v.id("b")});
    CHECK(tokenize("a zzz", v) == TokenIds{v.id("a"), Vocabulary::kUnk});
    CHECK(tokenize("A, b", v) == tokenize("a b", v));
}

TEST_CASE("loaders parse single lines") {
    std::istringstream c("d1\thello world\n");
    auto corpus = read_tsv_corpus(c);
    CHECK(corpus.size() == 1);
    CHECK(corpus.text("d1") == "hello world");

    std::istringstream q("q1 0 d1 2\n");
    CHECK(read_trec_qrels(q).grade("q1", "d1") == 2);

    std::istringstream r("q1 Q0 d9 1 12.5 tag\n");
    auto run = read_trec_run(r);
    REQUIRE(run.ranking("q1").size() == 1);
    CHECK(run.ranking("q1")[0].doc_id == "d9");
    CHECK(run.ranking("q1")[0].score == 12.5);
    CHECK(run.tag == "tag");
}

TEST_CASE("parse errors carry the line number") {
    auto line_of = [](auto&& fn) -> std::size_t {
        try {
            fn();
        } catch (const ParseError& e) {
            return e.line_number;
        }
        return 0;
    };
    CHECK(line_of([] {
              std::istringstream in("d1\tok\nbroken line\n");
              read_tsv_corpus(in);
          }) == 2);
    CHECK(line_of([] {
              std::istringstream in("q1 0 d1 1\nq1 0 d2 x\n");
              read_trec_qrels(in);
          }) == 2);
    CHECK(line_of([] {
              std::istringstream in("q1 0 d1 7\n");
              read_trec_qrels(in);
          }) == 1);
    CHECK(line_of([] {
              std::istringstream in("q1 Q0 d1 1 2.0 t\nq1 Q0 d2 2 1.0\n");
              read_trec_run(in);
          }) == 2);
    CHECK_THROWS([] {
        std::istringstream in("d1\ta\nd1\tb\n");
        read_tsv_corpus(in);
    }());
}

TEST_CASE("write then read round-trips every file kind") {
    auto data = generate_synthetic_corpus(60, 4, 300, 3);
    std::stringstream cs, qs, rs, runs;
    write_tsv_corpus(cs, data.corpus);
    write_tsv_queries(qs, data.queries);
    write_trec_qrels(rs, data.qrels);
    CHECK(read_tsv_corpus(cs) == data.corpus);
    CHECK(read_tsv_queries(qs) == data.queries);
    CHECK(read_trec_qrels(rs) == data.qrels);

    RunList run;
    run.tag = "x";
    run.queries["q1"] = {{"d3", 1.0 / 3.0}, {"d1", -2.5e-17}, {"d2", -7.0}};
    run.queries["q2"] = {{"d9", 0.1}};
    write_trec_run(runs, run);
    CHECK(read_trec_run(runs) == run);
}

TEST_CASE("avg_doc_length follows mutation") {
    Corpus c;
    c.add("a", "one two");
    CHECK(c.avg_doc_length() == 2.0);
    c.add("b", "three");
    CHECK(c.avg_doc_length() == 1.5);
}

TEST_CASE("sample_training_pairs examples") {
    Qrels qrels;
    qrels.set("q1", "p1", 3);
    qrels.set("q1", "p2", 2);
    qrels.set("q1", "n1", 1);
    qrels.set("q2", "x", 1);
    RunList run;
    for (int i = 0; i < 100; ++i) run.queries["q1"].push_back({"r" + std::to_string(i), 100.0 - i});
    run.queries["q2"] = {{"x", 1.0}, {"y", 0.5}};

    auto pairs = sample_training_pairs(qrels, run, 2, 42);
    CHECK(pairs.size() == 4);
    std::size_t pos = 0, neg = 0;
    for (const auto& p : pairs) {
        CHECK(p.query_id == "q1");
        (p.label == 1 ? pos : neg) += 1;
        if (p.label == 1) CHECK(qrels.grade("q1", p.doc_id).value_or(0) >= 2);
        if (p.label == 0) CHECK(qrels.grade("q1", p.doc_id).value_or(0) < 2);
    }
    CHECK(pos == 2);
    CHECK(neg == 2);
    CHECK(sample_training_pairs(qrels, run, 2, 42) == pairs);
}

TEST_CASE("sample_training_pairs keeps every retained query balanced") {
    auto data = generate_synthetic_corpus(400, 12, 500, 5);
    RunList run;
    for (const auto& [qid, grades] : data.qrels.all()) {
        for (const auto& [doc, g] : grades) run.queries[qid].push_back({doc, 1.0});
        for (std::size_t i = 0; i < 30; ++i) run.queries[qid].push_back({data.corpus.id_at(i), 0.5});
    }
    auto pairs = sample_training_pairs(data.qrels, run, 2, 1);
    std::map<std::string, int> balance;
    for (const auto& p : pairs) balance[p.query_id] += p.label == 1 ? 1 : -1;
    CHECK_FALSE(balance.empty());
    for (const auto& [q, b] : balance) CHECK(b == 0);
}

TEST_CASE("synthetic corpus construction guarantees") {
    auto one = generate_synthetic_corpus(10, 1, 200, 9);
    CHECK(one.corpus.size() == 10);
    REQUIRE(one.queries.size() == 1);
    const auto& qid = one.queries.begin()->first;
    bool has_relevant = false;
    for (const auto& [doc, g] : one.qrels.judgments(qid)) has_relevant |= g >= 1;
    CHECK(has_relevant);

    auto a = generate_synthetic_corpus(300, 5, 400, 21);
    auto b = generate_synthetic_corpus(300, 5, 400, 21);
    CHECK(a.corpus == b.corpus);
    CHECK(a.queries == b.queries);
    CHECK(a.qrels == b.qrels);
    CHECK_FALSE(generate_synthetic_corpus(300, 5, 400, 22).corpus == a.corpus);
}

TEST_CASE("synthetic grade-3 documents carry more topic words than grade-1") {
    auto data = generate_synthetic_corpus(2000, 70, 1500, 7);
    // Topic words of a query: words of its judged relevant documents that no
    // other query's relevant documents use, recovered from the output only.
    std::map<std::string, std::map<std::string, int>> word_queries;
    for (const auto& [qid, grades] : data.qrels.all()) {
        for (const auto& [doc, g] : grades) {
            if (g < 1) continue;
            for (const auto& w : split_words(data.corpus.text(doc))) word_queries[w][qid] = 1;
        }
    }
    std::size_t compared = 0;
    for (const auto& [qid, grades] : data.qrels.all()) {
        auto topic_count = [&](const std::string& doc) {
            std::set<std::string> words;
            for (const auto& w : split_words(data.corpus.text(doc))) {
                if (word_queries[w].size() == 1 && word_queries[w].count(qid)) words.insert(w);
            }
            return words.size();
        };
        std::size_t min3 = SIZE_MAX, max1 = 0;
        for (const auto& [doc, g] : grades) {
            if (g == 3) min3 = std::min(min3, topic_count(doc));
            if (g == 1) max1 = std::max(max1, topic_count(doc));
        }
        if (min3 != SIZE_MAX && max1 > 0) {
            CHECK(min3 > max1);
            ++compared;
        }
    }
    CHECK(compared > 10);
}
