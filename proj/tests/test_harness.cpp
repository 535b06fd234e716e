#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "pgt/checkpoint.hpp"
#include "pgt/cli.hpp"
#include "pgt/corpus_io.hpp"
#include "pgt/metrics.hpp"
#include "pgt/pipeline.hpp"
#include "pgt/rerank.hpp"
#include "pgt/train.hpp"

using namespace pgt;
namespace fs = std::filesystem;
using pgt::test::brute_ap;
using pgt::test::brute_ndcg;

namespace {

RunList run_from(const std::map<std::string, std::vector<std::string>>& lists) {
    RunList run;
    for (const auto& [q, docs] : lists) {
        double s = 100.0;
        for (const auto& d : docs) run.queries[q].push_back({d, s--});
    }
    return run;
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

int cli(std::vector<std::string> args, std::string* out = nullptr, std::string* err = nullptr) {
    args.insert(args.begin(), "pgt");
    std::vector<const char*> argv;
    for (auto& a : args) argv.push_back(a.c_str());
    std::ostringstream o, e;
    int code = run_cli(static_cast<int>(argv.size()), argv.data(), o, e);
    if (out) *out = o.str();
    if (err) *err = e.str();
    return code;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("ndcg examples") {
    Grades g{{"a", 3}, {"b", 0}};
    const std::vector<std::string> perfect{"a", "b"}, swapped{"b", "a"};
    CHECK(*ndcg_at_k(perfect, g) == 1.0);
    CHECK(*ndcg_at_k(swapped, g) == doctest::Approx(1.0 / std::log2(3.0)).epsilon(1e-12));
    CHECK(*ndcg_at_k(swapped, g) == doctest::Approx(0.6309).epsilon(1e-4));
    CHECK_FALSE(ndcg_at_k(perfect, Grades{{"a", 0}, {"b", 0}}).has_value());
}

TEST_CASE("map examples") {
    const std::vector<std::string> r{"x", "a", "b"};
    CHECK(*map_at_k(r, Grades{{"a", 2}}, 10) == 0.5);
    const std::vector<std::string> r2{"a", "b"};
    CHECK(*map_at_k(r2, Grades{{"a", 2}, {"b", 3}}, 10) == 1.0);
    Grades many;
    for (int i = 0; i < 95; ++i) many["d" + std::to_string(i)] = 2;
    const std::vector<std::string> r3{"d0", "z1", "z2"};
    CHECK(*map_at_k(r3, many, 10) == doctest::Approx(1.0 / 95).epsilon(1e-15));
    CHECK_FALSE(map_at_k(r3, Grades{{"d0", 1}}, 10, 2).has_value());
    CHECK(*map_at_k(r3, Grades{{"d0", 1}}, 10, 1) == 1.0);
}

TEST_CASE("metrics agree with a brute-force evaluator on fuzzed fixtures") {
    std::mt19937_64 rng(21);
    double worst = 0.0;
    for (int trial = 0; trial < 2000; ++trial) {
        const std::size_t judged = 1 + rng() % 6;
        Grades grades;
        std::vector<std::string> pool;
        for (std::size_t i = 0; i < judged + 6; ++i) pool.push_back("d" + std::to_string(i));
        std::shuffle(pool.begin(), pool.end(), rng);
        for (std::size_t i = 0; i < judged; ++i) grades[pool[i]] = static_cast<int>(rng() % 4);
        std::shuffle(pool.begin(), pool.end(), rng);
        pool.resize(rng() % pool.size() + 1);
        const std::size_t k = 1 + rng() % 12;
        const int threshold = 1 + static_cast<int>(rng() % 3);

        auto n1 = ndcg_at_k(pool, grades, k), n2 = brute_ndcg(pool, grades, k);
        REQUIRE(n1.has_value() == n2.has_value());
        if (n1) worst = std::max(worst, std::abs(*n1 - *n2));
        auto a1 = map_at_k(pool, grades, k, threshold), a2 = brute_ap(pool, grades, k, threshold);
        REQUIRE(a1.has_value() == a2.has_value());
        if (a1) worst = std::max(worst, std::abs(*a1 - *a2));
    }
    CHECK(worst <= 1e-9);
}

TEST_CASE("evaluate: hand-built three-query fixture") {
    Qrels qrels;
    qrels.set("q1", "a", 3);
    qrels.set("q1", "b", 1);
    qrels.set("q2", "c", 2);
    qrels.set("q2", "d", 2);
    qrels.set("q3", "e", 0);
    auto run = run_from({{"q1", {"b", "a"}}, {"q2", {"x", "c", "d"}}, {"q3", {"e"}}, {"q9", {"a"}}});
    auto r = evaluate(run, qrels);
    // q1: dcg = 1 + 7/log2 3, idcg = 7 + 1/log2 3
    const double l3 = std::log2(3.0);
    const double n1 = (1 + 7 / l3) / (7 + 1 / l3);
    // q2: dcg = 3/log2 3 + 3/2, idcg = 3 + 3/log2 3
    const double n2 = (3 / l3 + 1.5) / (3 + 3 / l3);
    CHECK(r.ndcg_queries == 2);
    CHECK(r.ndcg10 == doctest::Approx((n1 + n2) / 2).epsilon(1e-12));
    // MAP at threshold 2: q1 R = 1, hit at 2 -> 0.5; q2 R = 2: (1/2 + 2/3) / 2
    CHECK(r.map_queries == 2);
    CHECK(r.map10 == doctest::Approx((0.5 + (0.5 + 2.0 / 3) / 2) / 2).epsilon(1e-12));
    CHECK(r.map100 == r.map10);
    REQUIRE(r.warnings.size() == 1);
    CHECK(r.warnings[0].find("q9") != std::string::npos);
    CHECK_FALSE(r.per_query.at("q3").ndcg10.has_value());
}

TEST_CASE("evaluate: ideal ordering and empty intersection") {
    Qrels qrels;
    qrels.set("q1", "a", 1);
    qrels.set("q1", "b", 3);
    qrels.set("q1", "c", 2);
    CHECK(evaluate(run_from({{"q1", {"b", "c", "a"}}}), qrels).ndcg10 == 1.0);
    auto none = evaluate(run_from({{"q1", {"x", "y"}}}), qrels);
    CHECK(none.map10 == 0.0);
    CHECK(none.map100 == 0.0);
    CHECK(none.ndcg10 == 0.0);
}

TEST_CASE("metrics depend only on order") {
    std::mt19937_64 rng(22);
    auto data = generate_synthetic_corpus(200, 5, 300, 4);
    auto vocab = build_vocab(data.corpus);
    auto index = InvertedIndex::build(data.corpus, vocab);
    auto run = bm25_run(index, data.queries, {}, 50);
    auto base = evaluate(run, data.qrels);
    auto transformed = run;
    for (auto& [q, entries] : transformed.queries)
        for (auto& e : entries) e.score = 3.0 * std::exp(e.score / 10.0) - 7.0;
    auto t = evaluate(transformed, data.qrels);
    CHECK(t.ndcg10 == base.ndcg10);
    CHECK(t.map10 == base.map10);
    CHECK(t.map100 == base.map100);
}

TEST_CASE("rerank contracts") {
    RunList run;
    for (int i = 0; i < 1000; ++i) run.queries["q1"].push_back({"d" + std::to_string(1000 + i), 1000.0 - i});
    run.queries["q2"] = {{"a", 3.0}, {"b", 2.0}, {"c", 1.0}};

    Scorer passthrough = [](const std::string&, const RunEntry& e, std::size_t) { return e.score; };
    CHECK(rerank(run, kFullDepth, passthrough) == run);

    Scorer reverse = [](const std::string&, const RunEntry&, std::size_t rank) { return static_cast<double>(rank); };
    auto top1 = rerank(run, 1, reverse);
    CHECK(doc_ids(top1.ranking("q1")) == doc_ids(run.ranking("q1")));

    std::size_t calls = 0;
    Scorer counting = [&](const std::string& q, const RunEntry&, std::size_t rank) {
        if (q == "q1") ++calls;
        return static_cast<double>(rank);
    };
    auto half = rerank(run, 500, counting);
    CHECK(calls == 500);
    const auto& q1 = half.ranking("q1");
    REQUIRE(q1.size() == 1000);
    for (std::size_t i = 0; i < 500; ++i) CHECK(q1[i].doc_id == run.ranking("q1")[499 - i].doc_id);
    for (std::size_t i = 500; i < 1000; ++i) CHECK(q1[i].doc_id == run.ranking("q1")[i].doc_id);
    for (std::size_t i = 1; i < 1000; ++i) CHECK(q1[i - 1].score > q1[i].score);

    CHECK_THROWS(rerank(run, 0, passthrough));
}

TEST_CASE("rerank ties break by doc_id and full-depth rerank is idempotent") {
    RunList run;
    run.queries["q"] = {{"c", 5.0}, {"a", 4.0}, {"b", 3.0}, {"d", 2.0}};
    Scorer fixed = [](const std::string&, const RunEntry& e, std::size_t) { return e.doc_id == "d" ? 1.0 : 0.0; };
    auto once = rerank(run, kFullDepth, fixed);
    CHECK(doc_ids(once.ranking("q")) == std::vector<std::string>{"d", "a", "b", "c"});
    CHECK(rerank(once, kFullDepth, fixed) == once);
}

TEST_CASE("rerank with several workers matches one worker") {
    RunList run;
    for (int q = 0; q < 9; ++q)
        for (int i = 0; i < 20; ++i) run.queries["q" + std::to_string(q)].push_back({"d" + std::to_string(i), 20.0 - i});
    Scorer hash = [](const std::string& q, const RunEntry& e, std::size_t) {
        return static_cast<double>(std::hash<std::string>{}(q + e.doc_id) % 1000);
    };
    CHECK(rerank(run, 10, hash, 4) == rerank(run, 10, hash, 1));
    Scorer throwing = [](const std::string& q, const RunEntry&, std::size_t) -> double {
        if (q == "q4") throw std::runtime_error("boom");
        return 0.0;
    };
    CHECK_THROWS_WITH(rerank(run, 10, throwing, 3), "boom");
}

namespace {

std::vector<LabeledInput> toy_examples(const ModelConfig& c, std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<LabeledInput> out;
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back({pgt::test::random_graph(rng, c, 2), static_cast<int>(i % 2), "ex" + std::to_string(i)});
    }
    return out;
}

}  // namespace

TEST_CASE("train with lr = 0 leaves weights unchanged") {
    auto c = pgt::test::toy_config();
    auto w0 = init_weights<float>(c);
    auto ex = toy_examples(c, 16, 1);
    TrainConfig tc;
    tc.lr = 0.0;
    tc.epochs = 2;
    c.dropout = 0.0;
    auto r = train(c, w0, ex, tc);
    auto a = w0.named(), b = r.weights.named();
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(std::equal(a[i].second.data().begin(), a[i].second.data().end(), b[i].second.data().begin()));
    CHECK(r.curve.size() == 4);
    // Same examples every epoch in a different order: epoch means agree.
    CHECK((r.curve[0].loss + r.curve[1].loss) == doctest::Approx(r.curve[2].loss + r.curve[3].loss).epsilon(1e-5));
    for (const auto& p : r.curve) CHECK(p.lr == 0.0);
}

TEST_CASE("train overfits a 32-example toy set") {
    auto c = pgt::test::toy_config(2, 16, 2);
    auto ex = toy_examples(c, 32, 2);
    TrainConfig tc;
    tc.epochs = 50;  // 4 steps per epoch -> 200 steps
    tc.lr = 3e-3;
    auto r = train(c, init_weights<float>(c), ex, tc);
    REQUIRE(r.curve.size() == 200);
    CHECK(r.curve.back().loss <= 0.05);
    CHECK(r.curve.front().lr == 3e-3);
    CHECK(r.curve.back().lr == doctest::Approx(3e-3 / 200));
}

TEST_CASE("train is deterministic per seed and worker count") {
    auto c = pgt::test::toy_config();
    c.dropout = 0.1;
    auto ex = toy_examples(c, 20, 3);
    TrainConfig tc;
    tc.lr = 1e-3;
    auto a = train(c, init_weights<float>(c), ex, tc);
    auto b = train(c, init_weights<float>(c), ex, tc);
    CHECK(a.curve == b.curve);
    tc.workers = 3;
    auto p1 = train(c, init_weights<float>(c), ex, tc);
    auto p2 = train(c, init_weights<float>(c), ex, tc);
    CHECK(p1.curve == p2.curve);
    for (std::size_t i = 0; i < a.curve.size(); ++i) CHECK(p1.curve[i].loss == doctest::Approx(a.curve[i].loss).epsilon(1e-3));
    tc.workers = 1;
    tc.seed = 99;
    CHECK_FALSE(train(c, init_weights<float>(c), ex, tc).curve == a.curve);
}

TEST_CASE("train reports the step of a non-finite loss") {
    auto c = pgt::test::toy_config();
    auto w = init_weights<float>(c);
    w.w_score.mutable_data()[0] = NAN;
    auto ex = toy_examples(c, 8, 4);
    CHECK_THROWS_WITH(train(c, w, ex, TrainConfig{}), doctest::Contains("step 0"));
    CHECK_THROWS(train(c, init_weights<float>(c), {}, TrainConfig{}));
    TrainConfig bad;
    bad.epochs = 0;
    CHECK_THROWS(train(c, init_weights<float>(c), ex, bad));
}

TEST_CASE("checkpoint round-trip") {
    TempDir dir("pgt_ckpt_test");
    Checkpoint ck;
    ck.config = pgt::test::toy_config();
    ck.config.variant = GraphVariant::no_pre_dc;
    ck.arch = Arch::bert_prf;
    ck.k = 5;
    ck.vocab.add("alpha");
    ck.vocab.add("beta");
    ck.weights = init_weights<float>(ck.config);
    std::mt19937_64 rng(1);
    pgt::test::randomize(ck.weights, rng);
    save_checkpoint(dir.path / "m.ckpt", ck);
    auto back = load_checkpoint(dir.path / "m.ckpt");
    CHECK(back.config == ck.config);
    CHECK(back.arch == ck.arch);
    CHECK(back.k == 5);
    CHECK(back.vocab == ck.vocab);
    auto a = ck.weights.named(), b = back.weights.named();
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].first == b[i].first);
        CHECK(std::equal(a[i].second.data().begin(), a[i].second.data().end(), b[i].second.data().begin()));
    }

    auto bytes = slurp(dir.path / "m.ckpt");
    bytes[8] = 9;  // version field
    std::ofstream(dir.path / "v9.ckpt", std::ios::binary) << bytes;
    CHECK_THROWS_WITH(load_checkpoint(dir.path / "v9.ckpt"), doctest::Contains("version"));
    std::ofstream(dir.path / "junk.ckpt") << "not a checkpoint";
    CHECK_THROWS(load_checkpoint(dir.path / "junk.ckpt"));
}

TEST_CASE("feedback selection skips the candidate") {
    TokenizedCollection t;
    for (auto id : {"a", "b", "c", "d"}) t.docs[id] = {Vocabulary::kReserved};
    std::vector<RunEntry> ranking{{"a", 4}, {"b", 3}, {"c", 2}, {"d", 1}};
    CHECK(select_feedback(t, ranking, "b", 2).size() == 2);
    CHECK(select_feedback(t, ranking, "z", 10).size() == 4);
    CHECK(select_feedback(t, ranking, "a", 10).size() == 3);
    CHECK(select_feedback(t, ranking, "a", 10, false).size() == 4);
}

TEST_CASE("cli: usage errors exit nonzero with help text") {
    std::string out, err;
    CHECK(cli({"eval", "--bogus"}, &out, &err) != 0);
    CHECK((out + err).find("Usage") != std::string::npos);
    CHECK(cli({}, &out, &err) != 0);
    CHECK(cli({"--help"}, &out, &err) == 0);
}

TEST_CASE("cli: flops prints two reports and a ratio") {
    std::string out;
    REQUIRE(cli({"flops", "--arch", "pgt", "--k", "5"}, &out) == 0);
    CHECK(out.find("pgt.total=") != std::string::npos);
    CHECK(out.find("bert_prf.total=") != std::string::npos);
    CHECK(out.find("ratio=") != std::string::npos);
    CHECK(out.find("depth_scaled_ratio=") != std::string::npos);
}

TEST_CASE("cli: graph layout") {
    std::string out;
    REQUIRE(cli({"graph", "--variant", "wo_node_q_dc", "--k", "3"}, &out) == 0);
    CHECK(out.find("nodes=3") != std::string::npos);
    CHECK(cli({"graph", "--variant", "nope"}, &out) != 0);
}

TEST_CASE("cli: end-to-end pipeline is reproducible") {
    TempDir dir("pgt_cli_e2e");
    auto p = [&](const char* name) { return (dir.path / name).string(); };
    auto pipeline = [&](const std::string& tag) {
        std::string out;
        REQUIRE(cli({"--seed", "7", "synth", "--docs", "150", "--queries", "8", "--test-queries", "3", "--vocab", "300",
                     "--out", p("data")}) == 0);
        REQUIRE(cli({"index", "--corpus", p("data/corpus.tsv"), "--out", p("idx.bin")}) == 0);
        REQUIRE(cli({"sweep", "--index", p("idx.bin"), "--queries", p("data/train_queries.tsv"), "--qrels",
                     p("data/qrels.txt")}, &out) == 0);
        CHECK(out.find("k1=") == 0);
        REQUIRE(cli({"search", "--index", p("idx.bin"), "--queries", p("data/queries.tsv"), "--topk", "30", "--out",
                     p("bm25.run")}) == 0);
        REQUIRE(cli({"rm3", "--index", p("idx.bin"), "--queries", p("data/queries.tsv"), "--topk", "30", "--out",
                     p("rm3.run")}) == 0);
        REQUIRE(cli({"--seed", "7", "train", "--corpus", p("data/corpus.tsv"), "--queries", p("data/queries.tsv"),
                     "--qrels", p("data/qrels.txt"), "--run", p("bm25.run"), "--k", "2", "--hidden", "8", "--ffn",
                     "16", "--max-node-len", "48", "--lr", "1e-3", "--out", p("m.ckpt"), "--loss-curve",
                     p("loss.csv")}) == 0);
        REQUIRE(cli({"rerank", "--model", p("m.ckpt"), "--corpus", p("data/corpus.tsv"), "--queries",
                     p("data/test_queries.tsv"), "--run", p("bm25.run"), "--depth", "10", "--out", p("rr.run")}) == 0);
        REQUIRE(cli({"eval", "--run", p("rr.run"), "--qrels", p("data/qrels.txt"), "--csv"}, &out) == 0);
        CHECK(out.find("metric,value,queries\nndcg@10,") == 0);
        return tag + slurp(p("loss.csv")) + slurp(p("rr.run")) + out;
    };
    auto first = pipeline("");
    auto second = pipeline("");
    CHECK(first == second);
    CHECK(slurp(p("loss.csv")).find("step,lr,loss\n0,0.001,") == 0);

    std::string table;
    REQUIRE(cli({"eval", "--run", p("bm25.run"), "--qrels", p("data/qrels.txt")}, &table) == 0);
    CHECK(table.find("ndcg@10") != std::string::npos);
    CHECK(table.find("map@100") != std::string::npos);
}

TEST_CASE("cli: config file supplies options") {
    TempDir dir("pgt_cli_cfg");
    std::ofstream(dir.path / "flops.ini") << "[flops]\nk=7\narch=pgt\n";
    std::string a, b;
    REQUIRE(cli({"--config", (dir.path / "flops.ini").string(), "flops"}, &a) == 0);
    REQUIRE(cli({"flops", "--k", "7"}, &b) == 0);
    CHECK(a == b);
}
