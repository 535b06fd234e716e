#include "pgt/pipeline.hpp"

#include <stdexcept>

namespace pgt {

TokenizedCollection TokenizedCollection::build(const Corpus& corpus, const QueryMap& queries,
                                               const Vocabulary& vocab) {
    TokenizedCollection t;
    for (std::size_t i = 0; i < corpus.size(); ++i) t.docs.emplace(corpus.id_at(i), tokenize(corpus.text_at(i), vocab));
    for (const auto& [id, text] : queries) t.queries.emplace(id, tokenize(text, vocab));
    return t;
}

const TokenIds& TokenizedCollection::doc(const std::string& id) const {
    auto it = docs.find(id);
    if (it == docs.end()) throw std::out_of_range("document '" + id + "' not in corpus");
    return it->second;
}

const TokenIds& TokenizedCollection::query(const std::string& id) const {
    auto it = queries.find(id);
    if (it == queries.end()) throw std::out_of_range("query '" + id + "' not in query set");
    return it->second;
}

std::vector<TokenIds> select_feedback(const TokenizedCollection& tokens, const std::vector<RunEntry>& ranking,
                                      const std::string& candidate, std::size_t k, bool exclude_candidate) {
    std::vector<TokenIds> out;
    for (const auto& e : ranking) {
        if (out.size() == k) break;
        if (!exclude_candidate || e.doc_id != candidate) out.push_back(tokens.doc(e.doc_id));
    }
    return out;
}

ModelInput build_model_input(Arch arch, const ModelConfig& config, std::size_t k, const TokenizedCollection& tokens,
                             const std::string& query_id, const std::string& candidate,
                             const std::vector<RunEntry>& first_stage) {
    const auto& q = tokens.query(query_id);
    const auto& dc = tokens.doc(candidate);
    switch (arch) {
        case Arch::pgt: {
            auto feedback = select_feedback(tokens, first_stage, candidate, k);
            auto graph = build_graph(q, dc, feedback, config.variant, config.max_node_len);
            graph.query_id = query_id;
            graph.candidate_id = candidate;
            return graph;
        }
        case Arch::bert_prf: {
            auto feedback = select_feedback(tokens, first_stage, candidate, std::min<std::size_t>(k, 5));
            return build_bertprf_input(q, dc, feedback, config.max_seq_len);
        }
        case Arch::bert:
            return build_bertprf_input(q, dc, {}, config.max_seq_len);
    }
    throw std::logic_error("unhandled arch");
}

std::vector<LabeledInput> build_training_inputs(Arch arch, const ModelConfig& config, std::size_t k,
                                                const TokenizedCollection& tokens,
                                                const std::vector<TrainingExample>& examples,
                                                const RunList& first_stage) {
    std::vector<LabeledInput> out;
    out.reserve(examples.size());
    for (const auto& ex : examples) {
        out.push_back({build_model_input(arch, config, k, tokens, ex.query_id, ex.doc_id,
                                         first_stage.ranking(ex.query_id)),
                       ex.label, ex.query_id + "/" + ex.doc_id});
    }
    return out;
}

Scorer model_scorer(const Checkpoint& model, const TokenizedCollection& tokens, const RunList& first_stage) {
    return [&model, &tokens, &first_stage](const std::string& qid, const RunEntry& entry, std::size_t) {
        auto input = build_model_input(model.arch, model.config, model.k, tokens, qid, entry.doc_id,
                                       first_stage.ranking(qid));
        return relevance_score(input, model.weights, model.config);
    };
}

std::pair<QueryMap, QueryMap> split_queries(const QueryMap& queries, std::size_t n_train) {
    std::pair<QueryMap, QueryMap> out;
    std::size_t i = 0;
    for (const auto& kv : queries) (i++ < n_train ? out.first : out.second).insert(kv);
    return out;
}

DeskSetup prepare_desk(const DeskOptions& options) {
    DeskSetup desk;
    desk.options = options;
    desk.data = generate_synthetic_corpus(options.n_docs, options.n_train_queries + options.n_test_queries,
                                          options.vocab_size, options.seed);
    std::tie(desk.train_queries, desk.test_queries) = split_queries(desk.data.queries, options.n_train_queries);
    desk.vocab = build_vocab(desk.data.corpus);
    desk.index = InvertedIndex::build(desk.data.corpus, desk.vocab);
    desk.sweep = sweep_bm25(desk.index, desk.train_queries, desk.data.qrels, {0.6, 0.9, 1.2, 1.5},
                            {0.2, 0.4, 0.6, 0.75});
    desk.train_run = bm25_run(desk.index, desk.train_queries, desk.sweep.best, options.run_depth);
    desk.test_run = bm25_run(desk.index, desk.test_queries, desk.sweep.best, options.run_depth);
    desk.tokens = TokenizedCollection::build(desk.data.corpus, desk.data.queries, desk.vocab);
    return desk;
}

ExperimentResult run_experiment(const DeskSetup& desk, Arch arch, const ModelConfig& config,
                                const TrainConfig& train_config, std::size_t depth) {
    auto pairs = sample_training_pairs(desk.data.qrels, desk.train_run, train_config.rel_threshold, train_config.seed);
    auto inputs = build_training_inputs(arch, config, train_config.k, desk.tokens, pairs, desk.train_run);

    ExperimentResult result;
    auto trained = train(config, init_weights<float>(config), inputs, train_config);
    result.model = {config, arch, train_config.k, desk.vocab, std::move(trained.weights)};
    result.curve = std::move(trained.curve);
    result.reranked = rerank(desk.test_run, depth, model_scorer(result.model, desk.tokens, desk.test_run),
                             train_config.workers, std::string(arch_name(arch)));
    result.eval = evaluate(result.reranked, desk.data.qrels, train_config.rel_threshold);
    result.eval.depth = depth;
    return result;
}

}  // namespace pgt
