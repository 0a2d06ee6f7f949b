#pragma once

#include "kgrag/embedding.hpp"

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace kgrag {

// Relevance scorer for (query, document) pairs. Implementations: HTTP
// cross-encoder client, embedding-cosine stand-in below. Throws on
// transport failure; callers decide the fallback.
class Reranker {
public:
    virtual ~Reranker() = default;
    virtual std::vector<double> score(const std::string& query,
                                      std::span<const std::string> documents) = 0;
    virtual std::string name() const = 0;
};

// Cosine of provider embeddings standing in for a cross-encoder. Exact and
// deterministic with the mock provider, which is what tests and offline
// runs want.
class EmbeddingReranker : public Reranker {
public:
    explicit EmbeddingReranker(std::shared_ptr<EmbeddingProvider> provider)
        : provider_(std::move(provider)) {}

    std::vector<double> score(const std::string& query,
                              std::span<const std::string> documents) override;
    std::string name() const override { return "embedding-cosine(" + provider_->fingerprint() + ")"; }

private:
    std::shared_ptr<EmbeddingProvider> provider_;
};

} // namespace kgrag
