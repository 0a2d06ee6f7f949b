#pragma once

#include "kgrag/corpus.hpp"

#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace kgrag {

// Text -> unit vector. Implementations must be deterministic for a given
// fingerprint; the fingerprint is persisted with indexes so a stale index
// is detected instead of silently scored with mismatched vectors.
class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual std::vector<std::vector<double>> embed(std::span<const std::string> texts) = 0;
    virtual std::size_t dim() const = 0;
    virtual std::string fingerprint() const = 0;
};

// Hashed bag-of-words embedding. No external model: each token increments
// the bucket chosen by its 64-bit hash, then the vector is L2-normalized.
// Crude semantics, exact determinism; the default for tests and offline use.
class MockEmbeddingProvider : public EmbeddingProvider {
public:
    explicit MockEmbeddingProvider(std::size_t dim = 64) : dim_(dim) {}
    std::vector<std::vector<double>> embed(std::span<const std::string> texts) override;
    std::size_t dim() const override { return dim_; }
    std::string fingerprint() const override;

private:
    std::size_t dim_;
};

double cosine(const std::vector<double>& a, const std::vector<double>& b);

struct ScoredChunk {
    std::string chunk_id;
    double score = 0.0;
};

// Chunk-id -> embedding store with exhaustive cosine scoring. Ties break
// toward the lexicographically smaller id, making every ranking total.
class VectorIndex {
public:
    VectorIndex() = default;
    VectorIndex(std::string fingerprint, std::size_t dim)
        : fingerprint_(std::move(fingerprint)), dim_(dim) {}

    void add(const std::string& chunk_id, std::vector<double> vec);
    bool contains(const std::string& chunk_id) const { return vectors_.count(chunk_id) > 0; }
    std::size_t remove_document(const std::string& doc_id);
    const std::vector<double>& vector_of(const std::string& chunk_id) const;

    std::size_t size() const { return vectors_.size(); }
    std::size_t dim() const { return dim_; }
    const std::string& fingerprint() const { return fingerprint_; }
    const std::map<std::string, std::vector<double>>& vectors() const { return vectors_; }

    std::vector<ScoredChunk> score_all(const std::vector<double>& query) const;
    std::vector<ScoredChunk> top_k(const std::vector<double>& query, std::size_t k) const;
    // Ranking restricted to the allowed ids (the distractor setting).
    std::vector<ScoredChunk> top_k_within(const std::vector<double>& query, std::size_t k,
                                          const std::set<std::string>& allowed) const;

    std::string to_jsonl() const;
    void save(const std::string& path) const;
    static VectorIndex from_jsonl(const std::string& data);
    static VectorIndex load(const std::string& path);

private:
    std::string fingerprint_;
    std::size_t dim_ = 0;
    std::map<std::string, std::vector<double>> vectors_;
};

// Embeds chunk texts (optionally in parallel) and indexes them.
VectorIndex build_index(EmbeddingProvider& provider, std::span<const Chunk> chunks,
                        std::size_t parallelism = 1);

// Per-query memo of s(query, chunk). Seed retrieval pre-fills the scores it
// computed; expansion asks for source chunks that may not have been seeds.
class QuerySimilarityCache {
public:
    explicit QuerySimilarityCache(const VectorIndex& index) : index_(&index) {}
    QuerySimilarityCache(std::vector<double> query_vec, const VectorIndex& index)
        : query_(std::move(query_vec)), index_(&index) {}

    void set_query_vector(std::vector<double> v) { query_ = std::move(v); }
    double score(const std::string& chunk_id);
    void put(const std::string& chunk_id, double score) { memo_[chunk_id] = score; }
    const std::vector<double>& query_vector() const { return query_; }

private:
    std::vector<double> query_;
    const VectorIndex* index_;
    std::unordered_map<std::string, double> memo_;
};

} // namespace kgrag
