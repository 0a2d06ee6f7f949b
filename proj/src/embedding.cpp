#include "kgrag/embedding.hpp"

#include "kgrag/text.hpp"
#include "kgrag/util.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace kgrag {

using nlohmann::json;

// ---------------------------------------------------------------------------
// mock provider
// ---------------------------------------------------------------------------

std::vector<std::vector<double>> MockEmbeddingProvider::embed(
    std::span<const std::string> texts) {
    std::vector<std::vector<double>> out;
    out.reserve(texts.size());
    for (const auto& text : texts) {
        std::vector<double> v(dim_, 0.0);
        auto tokens = text::alnum_tokens(text);
        if (tokens.empty()) {
            v[fnv1a64("") % dim_] = 1.0;
        } else {
            for (const auto& tok : tokens) v[fnv1a64(tok) % dim_] += 1.0;
        }
        double norm = 0.0;
        for (double x : v) norm += x * x;
        norm = std::sqrt(norm);
        for (double& x : v) x /= norm;
        out.push_back(std::move(v));
    }
    return out;
}

std::string MockEmbeddingProvider::fingerprint() const {
    return "mock-bow-" + std::to_string(dim_) + "-v1";
}

// ---------------------------------------------------------------------------
// cosine
// ---------------------------------------------------------------------------

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("cosine: dimension mismatch " + std::to_string(a.size()) +
                                    " vs " + std::to_string(b.size()));
    }
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) throw std::invalid_argument("cosine: zero-norm vector");
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

// ---------------------------------------------------------------------------
// index
// ---------------------------------------------------------------------------

void VectorIndex::add(const std::string& chunk_id, std::vector<double> vec) {
    if (vec.size() != dim_) {
        throw std::invalid_argument("vector for " + chunk_id + " has dim " +
                                    std::to_string(vec.size()) + ", index expects " +
                                    std::to_string(dim_));
    }
    auto [it, inserted] = vectors_.emplace(chunk_id, std::move(vec));
    if (!inserted) throw std::invalid_argument("chunk already indexed: " + chunk_id);
}

std::size_t VectorIndex::remove_document(const std::string& doc_id) {
    std::size_t removed = 0;
    for (auto it = vectors_.begin(); it != vectors_.end();) {
        if (doc_of_chunk(it->first) == doc_id) {
            it = vectors_.erase(it);
            ++removed;
        } else {
            ++it;
        }
    }
    return removed;
}

const std::vector<double>& VectorIndex::vector_of(const std::string& chunk_id) const {
    auto it = vectors_.find(chunk_id);
    if (it == vectors_.end()) throw std::out_of_range("chunk not indexed: " + chunk_id);
    return it->second;
}

std::vector<ScoredChunk> VectorIndex::score_all(const std::vector<double>& query) const {
    std::vector<ScoredChunk> scored;
    scored.reserve(vectors_.size());
    for (const auto& [id, vec] : vectors_) scored.push_back({id, cosine(query, vec)});
    std::stable_sort(scored.begin(), scored.end(), [](const ScoredChunk& a, const ScoredChunk& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.chunk_id < b.chunk_id;
    });
    return scored;
}

std::vector<ScoredChunk> VectorIndex::top_k(const std::vector<double>& query,
                                            std::size_t k) const {
    auto scored = score_all(query);
    if (scored.size() > k) scored.resize(k);
    return scored;
}

std::vector<ScoredChunk> VectorIndex::top_k_within(const std::vector<double>& query,
                                                   std::size_t k,
                                                   const std::set<std::string>& allowed) const {
    std::vector<ScoredChunk> scored;
    for (const auto& id : allowed) {
        auto it = vectors_.find(id);
        if (it == vectors_.end()) continue;
        scored.push_back({id, cosine(query, it->second)});
    }
    std::stable_sort(scored.begin(), scored.end(), [](const ScoredChunk& a, const ScoredChunk& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.chunk_id < b.chunk_id;
    });
    if (scored.size() > k) scored.resize(k);
    return scored;
}

// ---------------------------------------------------------------------------
// persistence
// ---------------------------------------------------------------------------

std::string VectorIndex::to_jsonl() const {
    std::ostringstream out;
    json header{{"fingerprint", fingerprint_}, {"dim", dim_}, {"chunks", vectors_.size()}};
    out << header.dump() << '\n';
    for (const auto& [id, vec] : vectors_) {
        json line{{"chunk_id", id}, {"vector", vec}};
        out << line.dump() << '\n';
    }
    return out.str();
}

void VectorIndex::save(const std::string& path) const { write_file(path, to_jsonl()); }

VectorIndex VectorIndex::from_jsonl(const std::string& data) {
    std::istringstream in(data);
    std::string line;
    if (!std::getline(in, line)) throw LoadError("empty index file", 0);
    json header;
    try {
        header = json::parse(line);
    } catch (const json::parse_error& e) {
        throw LoadError(std::string("bad index header: ") + e.what(), e.byte);
    }
    if (!header.contains("fingerprint") || !header.contains("dim")) {
        throw LoadError("index header missing fingerprint/dim", 0);
    }

    VectorIndex index(header["fingerprint"], header["dim"]);
    std::size_t offset = line.size() + 1;
    while (std::getline(in, line)) {
        if (!line.empty()) {
            json j;
            try {
                j = json::parse(line);
            } catch (const json::parse_error& e) {
                throw LoadError(std::string("bad index line: ") + e.what(), offset + e.byte - 1);
            }
            if (!j.contains("chunk_id") || !j.contains("vector")) {
                throw LoadError("index line missing chunk_id/vector", offset);
            }
            index.add(j["chunk_id"], j["vector"].get<std::vector<double>>());
        }
        offset += line.size() + 1;
    }
    if (header.contains("chunks") && header["chunks"] != index.size()) {
        throw LoadError("index truncated: header says " + header["chunks"].dump() +
                            " chunks, found " + std::to_string(index.size()),
                        offset);
    }
    return index;
}

VectorIndex VectorIndex::load(const std::string& path) { return from_jsonl(read_file(path)); }

VectorIndex build_index(EmbeddingProvider& provider, std::span<const Chunk> chunks,
                        std::size_t parallelism) {
    VectorIndex index(provider.fingerprint(), provider.dim());
    std::vector<std::vector<double>> vecs(chunks.size());
    if (parallelism <= 1) {
        std::vector<std::string> texts;
        texts.reserve(chunks.size());
        for (const auto& c : chunks) texts.push_back(c.text);
        vecs = provider.embed(texts);
    } else {
        parallel_for(chunks.size(), parallelism, [&](std::size_t i) {
            std::vector<std::string> one{chunks[i].text};
            vecs[i] = provider.embed(one).at(0);
        });
    }
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        index.add(chunks[i].chunk_id, std::move(vecs[i]));
    }
    return index;
}

double QuerySimilarityCache::score(const std::string& chunk_id) {
    auto it = memo_.find(chunk_id);
    if (it != memo_.end()) return it->second;
    if (query_.empty()) throw std::logic_error("similarity cache has no query vector");
    double s = cosine(query_, index_->vector_of(chunk_id));
    memo_.emplace(chunk_id, s);
    return s;
}

} // namespace kgrag
