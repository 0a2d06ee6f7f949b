#pragma once

#include "kgrag/corpus.hpp"
#include "kgrag/kg.hpp"
#include "kgrag/llm.hpp"

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace kgrag {

// Chat messages asking the model to emit triplet JSONL for one chunk.
std::vector<ChatMessage> build_extraction_prompt(const Chunk& chunk);

struct ParseResult {
    std::vector<Triplet> triplets; // source_chunk filled from the argument
    std::size_t skipped_lines = 0; // non-blank lines that failed to parse
};

// Tolerant JSONL parse of a model response. Blank lines are ignored; a
// non-blank line that is not a JSON object with non-empty string fields
// head/relation/tail counts as skipped.
ParseResult parse_extraction_output(const std::string& output, const std::string& chunk_id);

struct ExtractionOptions {
    std::size_t parallelism = 1;
    std::size_t retry_limit = 2; // retries after the first attempt
};

struct ExtractionReport {
    std::size_t chunks_processed = 0;
    std::size_t chunks_skipped = 0; // ledger said already done
    std::size_t triplets_inserted = 0;
    std::size_t lines_skipped = 0;
    std::vector<std::string> failed_chunks; // provider gave up; left unmarked
};

// Runs extraction over every chunk not yet in the ledger. Model calls may
// fan out, but insertion happens serially in chunk order, so the resulting
// store is independent of parallelism. Failed chunks stay off the ledger
// and are retried by the next run.
ExtractionReport extract_corpus(AssociationKG& kg, std::span<const Chunk> chunks,
                                LlmClient& llm, const ExtractionOptions& options = {});

struct ExtractionStats {
    std::size_t triplet_count = 0;
    std::size_t entity_count = 0;
    std::size_t relation_count = 0;
    std::map<std::size_t, std::size_t> per_chunk;    // triplets-per-chunk -> #chunks
    std::map<std::size_t, std::size_t> per_document; // triplets-per-doc -> #docs
};

// Histograms over the registered chunk/document universe, so chunks that
// yielded nothing appear in the zero bucket.
ExtractionStats triplet_stats(const AssociationKG& kg);

// Pre-extracted triplets as JSONL ({head, relation, tail, chunk_id} per
// line). Used to seed a store without a model.
std::vector<Triplet> load_triplets_jsonl(const std::string& path);
void save_triplets_jsonl(const std::string& path, std::span<const Triplet> triplets);

} // namespace kgrag
