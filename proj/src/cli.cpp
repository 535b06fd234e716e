#include "pgt/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "pgt/corpus_io.hpp"
#include "pgt/pipeline.hpp"
#include "pgt/rm3.hpp"

namespace pgt {
namespace {

namespace fs = std::filesystem;

// Writes to `path`, or to `out` when path is empty.
template <typename Fn>
void emit(const std::string& path, std::ostream& out, Fn&& write) {
    if (path.empty()) {
        write(out);
        return;
    }
    std::ofstream file(path);
    if (!file) throw std::runtime_error("cannot write " + path);
    write(file);
}

struct SynthArgs {
    std::size_t docs = 2000, queries = 70, test_queries = 20, vocab = 1500;
    std::string out_dir;
};

struct IndexArgs {
    std::string corpus, out;
    std::size_t min_freq = 1;
};

struct SearchArgs {
    std::string index, queries, out, tag = "bm25";
    double k1 = 0.9, b = 0.4;
    std::size_t topk = 1000;
};

struct SweepArgs {
    std::string index, queries, qrels;
    std::vector<double> k1_grid{0.6, 0.9, 1.2, 1.5}, b_grid{0.2, 0.4, 0.6, 0.75};
    int rel_threshold = 2;
};

struct Rm3Args {
    std::string index, queries, out;
    double k1 = 0.9, b = 0.4, mix = 0.5;
    std::size_t fb_docs = 10, fb_terms = 10, topk = 1000;
};

struct GraphArgs {
    std::string variant = "base", query = "graph attention reranking", candidate = "candidate passage about reranking";
    std::vector<std::string> feedback;
    std::size_t k = 2, max_node_len = 32;
    bool bertprf = false;
};

struct ModelArgs {
    std::string arch = "pgt", variant = "base";
    std::size_t k = 7, layers = 2, hidden = 32, heads = 2, ffn = 64, max_node_len = 128, max_seq_len = 512;
    std::vector<std::size_t> inter_layers;
    double dropout = 0.1;
};

struct TrainArgs {
    ModelArgs model;
    std::string corpus, queries, qrels, run, out, loss_curve;
    std::size_t epochs = 2, batch = 8, workers = 1, min_freq = 1;
    double lr = 5e-6;
    int rel_threshold = 2;
};

struct RerankArgs {
    std::string model, corpus, queries, run, out;
    std::size_t depth = 1000, workers = 1;
};

struct EvalArgs {
    std::string run, qrels;
    int rel_threshold = 2;
    bool csv = false, per_query = false;
};

struct FlopsArgs {
    std::string arch = "pgt", vs = "bert_prf", variant = "base";
    std::size_t k = 5, layers = 12, hidden = 768, heads = 12, ffn = 3072, node_len = 128, seq_len = 512;
    std::size_t depth = 500, vs_depth = 1000;
};

ModelConfig model_config(const ModelArgs& a, std::size_t vocab_size, std::uint64_t seed) {
    ModelConfig c;
    c.num_layers = a.layers;
    c.hidden = a.hidden;
    c.heads = a.heads;
    c.ffn = a.ffn;
    c.vocab_size = vocab_size;
    c.max_node_len = a.max_node_len;
    c.max_seq_len = a.max_seq_len;
    c.inter_layers = a.inter_layers.empty() ? default_inter_layers(a.layers) : a.inter_layers;
    std::sort(c.inter_layers.begin(), c.inter_layers.end());
    c.inter_layers.erase(std::unique(c.inter_layers.begin(), c.inter_layers.end()), c.inter_layers.end());
    c.variant = parse_variant(a.variant);
    c.dropout = a.dropout;
    c.seed = seed;
    c.validate();
    return c;
}

void run_synth(const SynthArgs& a, std::uint64_t seed, std::ostream& out) {
    if (a.test_queries > a.queries) throw std::invalid_argument("synth: --test-queries exceeds --queries");
    auto data = generate_synthetic_corpus(a.docs, a.queries, a.vocab, seed);
    fs::create_directories(a.out_dir);
    const fs::path dir(a.out_dir);
    save_tsv_corpus(dir / "corpus.tsv", data.corpus);
    save_tsv_queries(dir / "queries.tsv", data.queries);
    save_trec_qrels(dir / "qrels.txt", data.qrels);
    auto [train_q, test_q] = split_queries(data.queries, a.queries - a.test_queries);
    save_tsv_queries(dir / "train_queries.tsv", train_q);
    save_tsv_queries(dir / "test_queries.tsv", test_q);
    out << "docs=" << data.corpus.size() << "\nqueries=" << data.queries.size() << "\ntrain_queries="
        << train_q.size() << "\ntest_queries=" << test_q.size() << "\ndir=" << a.out_dir << '\n';
}

void run_index(const IndexArgs& a, std::ostream& out) {
    auto corpus = load_tsv_corpus(a.corpus);
    auto index = InvertedIndex::build(corpus, build_vocab(corpus, a.min_freq));
    index.save(a.out);
    out << "docs=" << index.num_docs() << "\nvocab=" << index.vocab().size() << "\navgdl=" << index.avgdl() << '\n';
}

void run_search(const SearchArgs& a, std::ostream& out) {
    auto index = InvertedIndex::load(a.index);
    auto run = bm25_run(index, load_tsv_queries(a.queries), {a.k1, a.b}, a.topk, a.tag);
    emit(a.out, out, [&](std::ostream& o) { write_trec_run(o, run); });
}

void run_sweep(const SweepArgs& a, std::ostream& out) {
    auto index = InvertedIndex::load(a.index);
    auto result = sweep_bm25(index, load_tsv_queries(a.queries), load_trec_qrels(a.qrels), a.k1_grid, a.b_grid,
                             a.rel_threshold);
    out << "k1=" << format_score(result.best.k1) << "\nb=" << format_score(result.best.b)
        << "\nmap100=" << format_score(result.best_metric) << '\n';
}

void run_rm3(const Rm3Args& a, std::ostream& out) {
    auto index = InvertedIndex::load(a.index);
    auto run = rm3_run(index, load_tsv_queries(a.queries), {a.k1, a.b}, {a.fb_docs, a.fb_terms, a.mix}, a.topk);
    emit(a.out, out, [&](std::ostream& o) { write_trec_run(o, run); });
}

void run_graph(const GraphArgs& a, std::ostream& out) {
    auto feedback_text = a.feedback;
    for (std::size_t i = feedback_text.size(); i < a.k; ++i) {
        feedback_text.push_back("feedback document " + std::to_string(i + 1) + " about graph reranking");
    }
    Corpus texts;
    texts.add("q", a.query);
    texts.add("dc", a.candidate);
    for (std::size_t i = 0; i < feedback_text.size(); ++i) texts.add("d" + std::to_string(i + 1), feedback_text[i]);
    auto vocab = build_vocab(texts);
    std::vector<TokenIds> feedback;
    for (const auto& t : feedback_text) feedback.push_back(tokenize(t, vocab));
    const auto q = tokenize(a.query, vocab), dc = tokenize(a.candidate, vocab);
    if (a.bertprf) {
        out << render_node(build_bertprf_input(q, dc, feedback, a.max_node_len), vocab);
    } else {
        out << render_graph(build_graph(q, dc, feedback, parse_variant(a.variant), a.max_node_len), vocab);
    }
}

void run_train(const TrainArgs& a, std::uint64_t seed, std::ostream& out) {
    auto corpus = load_tsv_corpus(a.corpus);
    auto queries = load_tsv_queries(a.queries);
    auto qrels = load_trec_qrels(a.qrels);
    auto first_stage = load_trec_run(a.run);
    auto vocab = build_vocab(corpus, a.min_freq);
    auto tokens = TokenizedCollection::build(corpus, queries, vocab);
    const auto arch = parse_arch(a.model.arch);
    auto config = model_config(a.model, vocab.size(), seed);

    TrainConfig tc;
    tc.epochs = a.epochs;
    tc.batch_size = a.batch;
    tc.lr = a.lr;
    tc.seed = seed;
    tc.rel_threshold = a.rel_threshold;
    tc.k = a.model.k;
    tc.variant = config.variant;
    tc.workers = a.workers;

    auto pairs = sample_training_pairs(qrels, first_stage, a.rel_threshold, seed);
    if (pairs.empty()) throw std::runtime_error("train: no training pairs (check qrels, run and --rel-threshold)");
    auto inputs = build_training_inputs(arch, config, tc.k, tokens, pairs, first_stage);
    auto result = train(config, init_weights<float>(config), inputs, tc);
    save_checkpoint(a.out, {config, arch, tc.k, vocab, result.weights});
    if (!a.loss_curve.empty()) emit(a.loss_curve, out, [&](std::ostream& o) { write_loss_curve(o, result.curve); });
    out << "examples=" << inputs.size() << "\nsteps=" << result.curve.size()
        << "\nfinal_loss=" << format_score(result.curve.back().loss) << "\nmodel=" << a.out << '\n';
}

void run_rerank(const RerankArgs& a, std::ostream& out) {
    auto model = load_checkpoint(a.model);
    auto corpus = load_tsv_corpus(a.corpus);
    auto queries = load_tsv_queries(a.queries);
    auto first_stage = load_trec_run(a.run);
    // only the queries in --queries are reranked and written
    std::erase_if(first_stage.queries, [&](const auto& kv) { return !queries.count(kv.first); });
    auto tokens = TokenizedCollection::build(corpus, queries, model.vocab);
    auto run = rerank(first_stage, a.depth, model_scorer(model, tokens, first_stage), a.workers,
                      std::string(arch_name(model.arch)));
    emit(a.out, out, [&](std::ostream& o) { write_trec_run(o, run); });
}

void run_eval(const EvalArgs& a, std::ostream& out, std::ostream& err) {
    auto result = evaluate(load_trec_run(a.run), load_trec_qrels(a.qrels), a.rel_threshold);
    for (const auto& w : result.warnings) err << "warning: " << w << '\n';
    const std::pair<const char*, double> rows[] = {
        {"ndcg@10", result.ndcg10}, {"map@10", result.map10}, {"map@100", result.map100}};
    const std::size_t counts[] = {result.ndcg_queries, result.map_queries, result.map_queries};
    auto cell = [](const std::optional<double>& v) { return v ? format_score(*v) : std::string("-"); };
    if (a.csv) {
        out << "metric,value,queries\n";
        for (std::size_t i = 0; i < 3; ++i) out << rows[i].first << ',' << format_score(rows[i].second) << ',' << counts[i] << '\n';
        if (a.per_query) {
            out << "query,ndcg@10,map@10,map@100\n";
            for (const auto& [qid, m] : result.per_query) {
                out << qid << ',' << cell(m.ndcg10) << ',' << cell(m.map10) << ',' << cell(m.map100) << '\n';
            }
        }
        return;
    }
    out << std::left << std::setw(10) << "metric" << std::setw(10) << "value" << "queries\n";
    for (std::size_t i = 0; i < 3; ++i) {
        std::ostringstream v;
        v << std::fixed << std::setprecision(4) << rows[i].second;
        out << std::left << std::setw(10) << rows[i].first << std::setw(10) << v.str() << counts[i] << '\n';
    }
    if (a.per_query) {
        out << '\n' << std::left << std::setw(12) << "query" << std::setw(12) << "ndcg@10" << std::setw(12) << "map@10"
            << "map@100\n";
        for (const auto& [qid, m] : result.per_query) {
            out << std::left << std::setw(12) << qid << std::setw(12) << cell(m.ndcg10) << std::setw(12)
                << cell(m.map10) << cell(m.map100) << '\n';
        }
    }
}

std::vector<std::size_t> flop_lengths(Arch arch, const FlopsArgs& a, GraphVariant variant) {
    if (arch != Arch::pgt) return {a.seq_len};
    const std::size_t nodes = variant == GraphVariant::no_node_q_dc ? a.k : a.k + 1;
    return std::vector<std::size_t>(nodes, a.node_len);
}

void run_flops(const FlopsArgs& a, std::ostream& out) {
    ModelConfig c;
    c.num_layers = a.layers;
    c.hidden = a.hidden;
    c.heads = a.heads;
    c.ffn = a.ffn;
    c.vocab_size = 4;
    c.inter_layers = default_inter_layers(a.layers);
    const auto variant = parse_variant(a.variant);
    const auto arch = parse_arch(a.arch), vs = parse_arch(a.vs);
    auto lhs = count_flops(c, arch, flop_lengths(arch, a, variant));
    auto rhs = count_flops(c, vs, flop_lengths(vs, a, variant));
    out << format_flop_report(lhs, std::string(arch_name(arch)) + ".")
        << format_flop_report(rhs, std::string(arch_name(vs)) + ".");
    auto scaled = depth_scaled_ratio(lhs.total, a.depth, rhs.total, a.vs_depth);
    out << std::setprecision(6) << "ratio=" << static_cast<double>(lhs.total) / static_cast<double>(rhs.total) << '\n'
        << "depth_scaled_ratio=" << scaled.value() << " (depths " << a.depth << '/' << a.vs_depth << ")\n";
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"pgt: first-stage retrieval, graph reranking and evaluation"};
    app.set_config("--config", "", "key=value config file ([subcommand] sections or subcommand.key=value)");
    app.failure_message(CLI::FailureMessage::help);
    app.require_subcommand(1);
    app.fallthrough();
    std::uint64_t seed = 1;
    app.add_option("--seed", seed, "seed for every random choice")->capture_default_str();

    SynthArgs synth;
    auto* s_synth = app.add_subcommand("synth", "write a synthetic graded collection");
    s_synth->add_option("--docs", synth.docs)->capture_default_str();
    s_synth->add_option("--queries", synth.queries)->capture_default_str();
    s_synth->add_option("--test-queries", synth.test_queries)->capture_default_str();
    s_synth->add_option("--vocab", synth.vocab)->capture_default_str();
    s_synth->add_option("--out", synth.out_dir, "output directory")->required();

    IndexArgs index;
    auto* s_index = app.add_subcommand("index", "build a binary inverted index from a corpus TSV");
    s_index->add_option("--corpus", index.corpus)->required()->check(CLI::ExistingFile);
    s_index->add_option("--out", index.out)->required();
    s_index->add_option("--min-freq", index.min_freq)->capture_default_str();

    SearchArgs search;
    auto* s_search = app.add_subcommand("search", "BM25 retrieval to a TREC run");
    s_search->add_option("--index", search.index)->required()->check(CLI::ExistingFile);
    s_search->add_option("--queries", search.queries)->required()->check(CLI::ExistingFile);
    s_search->add_option("--k1", search.k1)->capture_default_str();
    s_search->add_option("--b", search.b)->capture_default_str();
    s_search->add_option("--topk", search.topk)->capture_default_str();
    s_search->add_option("--tag", search.tag)->capture_default_str();
    s_search->add_option("--out", search.out, "run file (default: stdout)");

    SweepArgs sweep;
    auto* s_sweep = app.add_subcommand("sweep", "grid search of BM25 k1, b by MAP@100");
    s_sweep->add_option("--index", sweep.index)->required()->check(CLI::ExistingFile);
    s_sweep->add_option("--queries", sweep.queries)->required()->check(CLI::ExistingFile);
    s_sweep->add_option("--qrels", sweep.qrels)->required()->check(CLI::ExistingFile);
    s_sweep->add_option("--k1-grid", sweep.k1_grid)->delimiter(',')->capture_default_str();
    s_sweep->add_option("--b-grid", sweep.b_grid)->delimiter(',')->capture_default_str();
    s_sweep->add_option("--rel-threshold", sweep.rel_threshold)->capture_default_str();

    Rm3Args rm3;
    auto* s_rm3 = app.add_subcommand("rm3", "BM25 + RM3 expansion to a TREC run");
    s_rm3->add_option("--index", rm3.index)->required()->check(CLI::ExistingFile);
    s_rm3->add_option("--queries", rm3.queries)->required()->check(CLI::ExistingFile);
    s_rm3->add_option("--k1", rm3.k1)->capture_default_str();
    s_rm3->add_option("--b", rm3.b)->capture_default_str();
    s_rm3->add_option("--fb-docs", rm3.fb_docs)->capture_default_str();
    s_rm3->add_option("--fb-terms", rm3.fb_terms)->capture_default_str();
    s_rm3->add_option("--mix", rm3.mix)->capture_default_str();
    s_rm3->add_option("--topk", rm3.topk)->capture_default_str();
    s_rm3->add_option("--out", rm3.out, "run file (default: stdout)");

    GraphArgs graph;
    auto* s_graph = app.add_subcommand("graph", "print the node layout of one input graph");
    s_graph->add_option("--variant", graph.variant)->capture_default_str();
    s_graph->add_option("--k", graph.k)->capture_default_str();
    s_graph->add_option("--max-node-len", graph.max_node_len)->capture_default_str();
    s_graph->add_option("--query", graph.query)->capture_default_str();
    s_graph->add_option("--candidate", graph.candidate)->capture_default_str();
    s_graph->add_option("--feedback", graph.feedback, "feedback texts (padded with filler up to --k)");
    s_graph->add_flag("--bertprf", graph.bertprf, "print the concatenated single-sequence input instead");

    auto add_model_options = [](CLI::App* sub, ModelArgs& m) {
        sub->add_option("--arch", m.arch, "pgt, bert_prf or bert")->capture_default_str();
        sub->add_option("--variant", m.variant)->capture_default_str();
        sub->add_option("--k", m.k, "feedback documents per candidate")->capture_default_str();
        sub->add_option("--layers", m.layers)->capture_default_str();
        sub->add_option("--hidden", m.hidden)->capture_default_str();
        sub->add_option("--heads", m.heads)->capture_default_str();
        sub->add_option("--ffn", m.ffn)->capture_default_str();
        sub->add_option("--max-node-len", m.max_node_len)->capture_default_str();
        sub->add_option("--max-seq-len", m.max_seq_len)->capture_default_str();
        sub->add_option("--inter-layers", m.inter_layers, "default: last three layers")->delimiter(',');
        sub->add_option("--dropout", m.dropout)->capture_default_str();
    };

    TrainArgs tr;
    auto* s_train = app.add_subcommand("train", "train a reranker on sampled pairs");
    add_model_options(s_train, tr.model);
    s_train->add_option("--corpus", tr.corpus)->required()->check(CLI::ExistingFile);
    s_train->add_option("--queries", tr.queries)->required()->check(CLI::ExistingFile);
    s_train->add_option("--qrels", tr.qrels)->required()->check(CLI::ExistingFile);
    s_train->add_option("--run", tr.run, "first-stage run (negatives and feedback)")->required()->check(CLI::ExistingFile);
    s_train->add_option("--epochs", tr.epochs)->capture_default_str();
    s_train->add_option("--batch", tr.batch)->capture_default_str();
    s_train->add_option("--lr", tr.lr)->capture_default_str();
    s_train->add_option("--workers", tr.workers)->capture_default_str();
    s_train->add_option("--rel-threshold", tr.rel_threshold)->capture_default_str();
    s_train->add_option("--min-freq", tr.min_freq)->capture_default_str();
    s_train->add_option("--out", tr.out, "checkpoint path")->required();
    s_train->add_option("--loss-curve", tr.loss_curve, "CSV of step,lr,loss");

    RerankArgs rr;
    auto* s_rerank = app.add_subcommand("rerank", "rescore the top of a run with a trained model");
    s_rerank->add_option("--model", rr.model)->required()->check(CLI::ExistingFile);
    s_rerank->add_option("--corpus", rr.corpus)->required()->check(CLI::ExistingFile);
    s_rerank->add_option("--queries", rr.queries)->required()->check(CLI::ExistingFile);
    s_rerank->add_option("--run", rr.run)->required()->check(CLI::ExistingFile);
    s_rerank->add_option("--depth", rr.depth)->capture_default_str()->check(CLI::PositiveNumber);
    s_rerank->add_option("--workers", rr.workers)->capture_default_str();
    s_rerank->add_option("--out", rr.out, "run file (default: stdout)");

    EvalArgs ev;
    auto* s_eval = app.add_subcommand("eval", "NDCG@10, MAP@10 and MAP@100 of a run");
    s_eval->add_option("--run", ev.run)->required()->check(CLI::ExistingFile);
    s_eval->add_option("--qrels", ev.qrels)->required()->check(CLI::ExistingFile);
    s_eval->add_option("--rel-threshold", ev.rel_threshold)->capture_default_str();
    s_eval->add_flag("--csv", ev.csv);
    s_eval->add_flag("--per-query", ev.per_query);

    FlopsArgs fl;
    auto* s_flops = app.add_subcommand("flops", "multiply+add counts of two architectures and their ratio");
    s_flops->add_option("--arch", fl.arch)->capture_default_str();
    s_flops->add_option("--vs", fl.vs, "architecture to compare against")->capture_default_str();
    s_flops->add_option("--variant", fl.variant)->capture_default_str();
    s_flops->add_option("--k", fl.k)->capture_default_str();
    s_flops->add_option("--layers", fl.layers)->capture_default_str();
    s_flops->add_option("--hidden", fl.hidden)->capture_default_str();
    s_flops->add_option("--heads", fl.heads)->capture_default_str();
    s_flops->add_option("--ffn", fl.ffn)->capture_default_str();
    s_flops->add_option("--node-len", fl.node_len)->capture_default_str();
    s_flops->add_option("--seq-len", fl.seq_len)->capture_default_str();
    s_flops->add_option("--depth", fl.depth, "rerank depth of --arch")->capture_default_str();
    s_flops->add_option("--vs-depth", fl.vs_depth, "rerank depth of --vs")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (s_synth->parsed()) run_synth(synth, seed, out);
        else if (s_index->parsed()) run_index(index, out);
        else if (s_search->parsed()) run_search(search, out);
        else if (s_sweep->parsed()) run_sweep(sweep, out);
        else if (s_rm3->parsed()) run_rm3(rm3, out);
        else if (s_graph->parsed()) run_graph(graph, out);
        else if (s_train->parsed()) run_train(tr, seed, out);
        else if (s_rerank->parsed()) run_rerank(rr, out);
        else if (s_eval->parsed()) run_eval(ev, out, err);
        else if (s_flops->parsed()) run_flops(fl, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace pgt
