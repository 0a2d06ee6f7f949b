#pragma once

#include "kgrag/corpus.hpp"
#include "kgrag/embedding.hpp"
#include "kgrag/generation.hpp"
#include "kgrag/kg.hpp"
#include "kgrag/organizer.hpp"
#include "kgrag/rerank.hpp"
#include "kgrag/retrieval.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>

namespace kgrag {

// Documents and their chunks, addressable by id. The unit the engine
// snapshots alongside the KG and the vector index.
struct CorpusStore {
    std::map<std::string, Document> documents;
    std::map<std::string, Chunk> chunks;

    void add_document(const Document& doc, std::span<const Chunk> doc_chunks);
    std::size_t remove_document(const std::string& doc_id); // chunks removed
    const std::string* chunk_text(const std::string& chunk_id) const;
    std::vector<Chunk> chunks_of(const std::string& doc_id) const; // seq order
    std::set<std::string> chunk_ids_of_docs(const std::set<std::string>& doc_ids) const;
    ChunkTextLookup lookup() const;
};

struct PipelineConfig {
    ChunkingConfig chunking;
    std::size_t seed_k = 10;
    std::size_t budget_k = 10;
    std::size_t hops = 1;
    bool keep_unlinked_seeds = true;
    bool expansion = true;
    bool organization = true;
    std::size_t max_context_chars = 32000;
    RetryPolicy llm_retry;

    void validate() const; // budget_k >= 1, seed_k >= 1
};

struct RetrievalResult {
    SeedSet seeds;
    ExpandedResult expanded;
    std::vector<SpanningTree> trees; // rerank order; empty when organization is off
    ContextBundle bundle;
};

struct QueryResult {
    RetrievalResult retrieval;
    AnswerPrompt prompt;
    GeneratedAnswer answer;
};

// Retrieval-only pipeline: seeds, hop expansion (hops forced to 0 when
// expansion is off), then either MST organization into a budgeted bundle
// or, with organization off, every expanded chunk in similarity order with
// no cap. restrict_chunks narrows seed candidates; callers wanting the
// expansion confined too should pass a KG restricted to the same chunks.
RetrievalResult run_retrieval(const std::string& question, const PipelineConfig& cfg,
                              const AssociationKG& kg, const VectorIndex& index,
                              EmbeddingProvider& provider, Reranker& reranker,
                              const std::set<std::string>* restrict_chunks = nullptr);

// Full pipeline: retrieval, prompt assembly over the corpus texts, answer.
QueryResult run_query(const std::string& question, const PipelineConfig& cfg,
                      const CorpusStore& corpus, const AssociationKG& kg,
                      const VectorIndex& index, EmbeddingProvider& provider, Reranker& reranker,
                      LlmClient& llm, const std::set<std::string>* restrict_chunks = nullptr);

// Provenance dump for --explain and /retrieve: seeds, subgraph size, trees
// with their edges and scores, and the bundle. Stable key order and
// deterministic for fixed inputs.
nlohmann::json explain_json(const RetrievalResult& result,
                            const QueryResult* full = nullptr);

} // namespace kgrag
