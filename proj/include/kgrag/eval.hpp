#pragma once

#include "kgrag/pipeline.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace kgrag {

struct Metrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

// F1 as the harmonic mean, 0 when both components vanish.
Metrics metrics_from_pr(double precision, double recall);

// Token-level QA scoring: both strings normalized (case fold, punctuation
// stripped, articles dropped), then multiset token overlap. Both empty
// after normalization scores 1.0 across the board; one empty scores 0.
Metrics answer_metrics(const std::string& prediction, const std::string& gold);

// Set overlap over chunk ids. Empty retrieved gives precision 0; empty
// gold is treated as vacuously recalled.
Metrics retrieval_metrics(const std::set<std::string>& retrieved,
                          const std::set<std::string>& gold);

// ---------------------------------------------------------------------------
// entity shuffling
// ---------------------------------------------------------------------------

struct ShuffledData {
    std::vector<Document> documents;
    std::vector<Chunk> chunks;
    std::vector<Triplet> triplets;
    std::vector<QaExample> examples;
    std::map<std::string, std::string> mapping;     // surface -> replacement
    std::vector<std::string> singleton_categories;  // categories left as identity
};

// Draws a within-category derangement (singletons stay put, flagged) and
// rewrites every surface occurrence across document texts and titles,
// chunk texts, questions, answers, and triplet heads/tails. Replacement is
// simultaneous: outputs are never re-matched, so A->B, B->A swaps work.
// Identifiers (doc ids, chunk ids, source chunks) never change.
ShuffledData shuffle_entities(std::span<const Document> documents,
                              std::span<const Chunk> chunks,
                              std::span<const Triplet> triplets,
                              std::span<const QaExample> examples,
                              const std::map<std::string, std::string>& category_map,
                              std::uint64_t seed);

// Category map file: JSONL lines {"entity": ..., "category": ...}.
std::map<std::string, std::string> load_category_map(const std::string& path);

// ---------------------------------------------------------------------------
// dataset evaluation
// ---------------------------------------------------------------------------

enum class EvalSetting { Distractor, Fullwiki };

struct EvalConfig {
    PipelineConfig pipeline;
    EvalSetting setting = EvalSetting::Distractor;
    std::size_t parallelism = 1;
};

struct ExampleOutcome {
    std::string query_id;
    bool failed = false;
    std::string error;
    std::string predicted;
    Metrics answer;
    Metrics retrieval;
    std::size_t retrieved_count = 0;
};

struct EvalReport {
    std::vector<ExampleOutcome> outcomes; // dataset order
    std::size_t evaluated = 0;            // successes
    std::size_t failed = 0;
    Metrics answer_mean;    // over successes
    Metrics retrieval_mean; // over successes
    double avg_retrieved = 0.0;
    EvalConfig config;

    nlohmann::json to_json() const;
    std::string to_table() const;
};

// Runs the pipeline over every example. The distractor setting confines
// each example to its own context documents (seed candidates and KG alike);
// fullwiki uses the global index. Failures are recorded per example and
// excluded from the means. Results are identical for any parallelism.
EvalReport run_eval(const CorpusStore& corpus, const AssociationKG& kg,
                    const VectorIndex& index, std::span<const QaExample> examples,
                    EmbeddingProvider& provider, Reranker& reranker, LlmClient& llm,
                    const EvalConfig& config);

} // namespace kgrag
