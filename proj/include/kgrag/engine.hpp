#pragma once

#include "kgrag/eval.hpp"
#include "kgrag/kg_builder.hpp"
#include "kgrag/pipeline.hpp"

#include <memory>
#include <mutex>
#include <shared_mutex>
#include <span>
#include <string>

namespace kgrag {

struct EngineHealth {
    std::size_t corpus_size = 0; // chunk count
    std::size_t kg_triplets = 0;
};

struct IngestReport {
    std::size_t docs_added = 0;
    std::size_t docs_updated = 0;
    std::size_t docs_skipped = 0; // unchanged, left alone
    std::size_t chunks_added = 0;
    bool extracted = false;
    ExtractionReport extraction;
};

struct PreparedDoc {
    Document doc;
    std::vector<Chunk> chunks;
};

// Chunks a free-text document with the generic sentence splitter. Callers
// with authoritative chunk boundaries (the QA corpus loader) build
// PreparedDocs themselves.
PreparedDoc prepare_document(const Document& doc, const ChunkingConfig& cfg);

// File layout for one engine state directory.
struct StatePaths {
    std::string documents; // documents.jsonl
    std::string chunks;    // chunks.jsonl
    std::string kg;        // kg snapshot
    std::string index;     // vector index jsonl
    std::string ledger;    // extraction ledger, one chunk id per line

    static StatePaths in_dir(const std::string& dir);
};

// Owns the corpus, KG, and vector index behind an immutable snapshot that
// writers replace atomically: queries in flight keep the snapshot they
// started with, ingestion serializes on a writer lock.
class RagEngine {
public:
    struct Snapshot {
        CorpusStore corpus;
        AssociationKG kg;
        VectorIndex index;
    };

    RagEngine(PipelineConfig cfg, std::shared_ptr<EmbeddingProvider> provider,
              std::shared_ptr<Reranker> reranker, std::shared_ptr<LlmClient> llm,
              std::string created_at = "");

    // --- state -----------------------------------------------------------
    void bootstrap(CorpusStore corpus, AssociationKG kg, VectorIndex index);
    void load_state(const StatePaths& paths);       // missing files -> empty state
    void save_state(const StatePaths& paths) const; // atomic per file (tmp + rename)

    // --- writes -----------------------------------------------------------
    // Unchanged documents (same title and text) are skipped; changed ones
    // are replaced wholesale. extract=true runs triplet extraction over the
    // new chunks with the engine's LLM.
    IngestReport ingest(std::span<const PreparedDoc> docs, bool extract,
                        const ExtractionOptions& options = {});
    // Extraction over every chunk the ledger has not seen yet.
    ExtractionReport extract_pending(const ExtractionOptions& options = {});
    std::size_t remove_document(const std::string& doc_id); // chunks removed, 0 = unknown

    // --- reads -------------------------------------------------------------
    RetrievalResult retrieve(const std::string& question,
                             const PipelineConfig* override_cfg = nullptr) const;
    QueryResult query(const std::string& question,
                      const PipelineConfig* override_cfg = nullptr) const;
    EvalReport evaluate(std::span<const QaExample> examples, EvalConfig config) const;
    EngineHealth health() const;
    std::shared_ptr<const Snapshot> snapshot() const;

    const PipelineConfig& config() const { return cfg_; }
    LlmClient& llm() { return *llm_; }

private:
    std::shared_ptr<Snapshot> copy_snapshot() const;
    void swap_snapshot(std::shared_ptr<const Snapshot> next);

    PipelineConfig cfg_;
    std::shared_ptr<EmbeddingProvider> provider_;
    std::shared_ptr<Reranker> reranker_;
    std::shared_ptr<LlmClient> llm_;
    std::string created_at_;

    mutable std::shared_mutex snapshot_mu_;
    std::shared_ptr<const Snapshot> snapshot_;
    std::mutex writer_mu_;
};

} // namespace kgrag
