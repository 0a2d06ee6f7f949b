#pragma once

#include <string>
#include <vector>

namespace kgrag {

struct Document {
    std::string doc_id;
    std::string title;
    std::string text;
};

struct Chunk {
    std::string chunk_id;
    std::string doc_id;
    int seq = 0;
    std::string text;
};

struct ChunkingConfig {
    int max_units = 100; // cap per chunk, whitespace-delimited tokens
    std::string sentence_splitter = "default";
};

struct QaExample {
    std::string query_id;
    std::string question;
    std::string gold_answer;
    std::vector<std::string> gold_support; // chunk ids, sorted unique
    std::vector<std::string> context_docs; // doc ids provided with the example
};

// Chunk ids are a pure function of (doc_id, seq) so re-ingestion is stable.
std::string chunk_id_for(const std::string& doc_id, int seq);
std::string doc_of_chunk(const std::string& chunk_id);

// Splits on ./!/? followed by whitespace, with a guard list for common
// abbreviations and single-letter initials.
std::vector<std::string> split_into_sentences(const std::string& txt);

// Greedy packing: sentences are appended to the current chunk until adding
// the next one would exceed max_units. A lone sentence longer than the cap
// becomes its own oversized chunk. sentence_to_seq (optional) receives, per sentence,
// the seq of the chunk it landed in.
std::vector<Chunk> pack_sentences(const std::string& doc_id,
                                  const std::vector<std::string>& sentences,
                                  const ChunkingConfig& cfg,
                                  std::vector<int>* sentence_to_seq = nullptr);

std::vector<Chunk> split_document(const Document& doc, const ChunkingConfig& cfg);

struct HotpotLoad {
    std::vector<Document> documents;
    std::vector<Chunk> chunks;
    std::vector<QaExample> examples;
    std::vector<std::string> warnings;
};

// Loads a HotpotQA-shape JSON array: records with question, answer,
// context = [[title, [sentences]]], supporting_facts = [[title, sent_idx]].
// Context documents are chunked from their given sentence lists so that
// supporting facts resolve exactly to the chunk containing the sentence.
HotpotLoad load_hotpot_corpus(const std::string& path, const ChunkingConfig& cfg);

// Chunk persistence: JSONL, one chunk per line with
// {chunk_id, doc_id, seq, text}.
void save_chunks_jsonl(const std::string& path, const std::vector<Chunk>& chunks);
std::vector<Chunk> load_chunks_jsonl(const std::string& path);

// Document persistence: JSONL lines {doc_id, title, text}. Doubles as the
// plain-corpus input format for ingestion.
void save_documents_jsonl(const std::string& path, const std::vector<Document>& docs);
std::vector<Document> load_documents_jsonl(const std::string& path);

} // namespace kgrag
