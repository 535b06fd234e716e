#pragma once

#include <map>
#include <string>
#include <vector>

#include "pgt/checkpoint.hpp"
#include "pgt/index.hpp"
#include "pgt/metrics.hpp"
#include "pgt/rerank.hpp"
#include "pgt/synthetic.hpp"
#include "pgt/train.hpp"
#include "pgt/training_pairs.hpp"

namespace pgt {

/// Token ids of every document and query, computed once.
struct TokenizedCollection {
    std::map<std::string, TokenIds> docs;
    std::map<std::string, TokenIds> queries;

    static TokenizedCollection build(const Corpus& corpus, const QueryMap& queries, const Vocabulary& vocab);
    const TokenIds& doc(const std::string& id) const;
    const TokenIds& query(const std::string& id) const;
};

/// The first k documents of the query's first-stage ranking, by default
/// skipping the candidate itself.
std::vector<TokenIds> select_feedback(const TokenizedCollection& tokens, const std::vector<RunEntry>& ranking,
                                      const std::string& candidate, std::size_t k, bool exclude_candidate = true);

/// Input for one (query, candidate) pair: a graph for pgt, the pair
/// sequence for bert, the concatenated sequence (at most 5 feedback
/// documents) for bert_prf.
ModelInput build_model_input(Arch arch, const ModelConfig& config, std::size_t k, const TokenizedCollection& tokens,
                             const std::string& query_id, const std::string& candidate,
                             const std::vector<RunEntry>& first_stage);

std::vector<LabeledInput> build_training_inputs(Arch arch, const ModelConfig& config, std::size_t k,
                                                const TokenizedCollection& tokens,
                                                const std::vector<TrainingExample>& examples,
                                                const RunList& first_stage);

/// Scorer over a trained model; feedback comes from `first_stage`.
Scorer model_scorer(const Checkpoint& model, const TokenizedCollection& tokens, const RunList& first_stage);

struct DeskOptions {
    std::size_t n_docs = 2000;
    std::size_t n_train_queries = 50;
    std::size_t n_test_queries = 20;
    std::size_t vocab_size = 1500;
    std::size_t run_depth = 100;
    std::uint64_t seed = 7;
};

/// Synthetic collection split into train and test queries, with the index,
/// swept BM25 parameters (tuned on the training queries) and first-stage
/// runs for both splits.
struct DeskSetup {
    DeskOptions options;
    SyntheticCollection data;
    QueryMap train_queries, test_queries;
    Vocabulary vocab;
    InvertedIndex index;
    SweepResult sweep;
    RunList train_run, test_run;
    TokenizedCollection tokens;
};

DeskSetup prepare_desk(const DeskOptions& options);

/// Query ids split deterministically: the first n_train in id order train.
std::pair<QueryMap, QueryMap> split_queries(const QueryMap& queries, std::size_t n_train);

struct ExperimentResult {
    Checkpoint model;
    std::vector<LossPoint> curve;
    RunList reranked;
    EvalResult eval;
};

/// Samples pairs from the training run, trains, reranks the test run to
/// `depth` and evaluates against the test qrels.
ExperimentResult run_experiment(const DeskSetup& desk, Arch arch, const ModelConfig& config,
                                const TrainConfig& train_config, std::size_t depth);

}  // namespace pgt
