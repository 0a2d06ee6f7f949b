#pragma once

#include "kgrag/embedding.hpp"
#include "kgrag/llm.hpp"
#include "kgrag/rerank.hpp"

#include <cstddef>
#include <string>

namespace kgrag {

// OpenAI-style chat completion client: POST {base_url}/v1/chat/completions
// with {model, messages}, answer read from choices[0].message.content.
// Transport, HTTP, and shape errors all surface as ProviderError; retries
// are the caller's policy. A fresh connection per call keeps the client
// usable from concurrent requests.
class OpenAiChatClient : public LlmClient {
public:
    OpenAiChatClient(std::string base_url, std::string model, std::string api_key = "",
                     int timeout_seconds = 60)
        : base_url_(std::move(base_url)),
          model_(std::move(model)),
          api_key_(std::move(api_key)),
          timeout_seconds_(timeout_seconds) {}

    std::string complete(const std::vector<ChatMessage>& messages) override;
    std::string model_name() const override { return model_; }

private:
    std::string base_url_;
    std::string model_;
    std::string api_key_;
    int timeout_seconds_;
};

// Embedding service client: POST {base_url}/embed with {"texts": [...]},
// response {"vectors": [[...]]}. The fingerprint folds in the model name
// and dimension so stale indexes are rejected on load.
class HttpEmbeddingProvider : public EmbeddingProvider {
public:
    HttpEmbeddingProvider(std::string base_url, std::string model, std::size_t dim,
                          int timeout_seconds = 60)
        : base_url_(std::move(base_url)),
          model_(std::move(model)),
          dim_(dim),
          timeout_seconds_(timeout_seconds) {}

    std::vector<std::vector<double>> embed(std::span<const std::string> texts) override;
    std::size_t dim() const override { return dim_; }
    std::string fingerprint() const override {
        return "http-" + model_ + "-" + std::to_string(dim_);
    }

private:
    std::string base_url_;
    std::string model_;
    std::size_t dim_;
    int timeout_seconds_;
};

// Cross-encoder service client: POST {base_url}/rerank with
// {"query": ..., "documents": [...]}, response {"scores": [...]}.
class HttpReranker : public Reranker {
public:
    explicit HttpReranker(std::string base_url, int timeout_seconds = 60)
        : base_url_(std::move(base_url)), timeout_seconds_(timeout_seconds) {}

    std::vector<double> score(const std::string& query,
                              std::span<const std::string> documents) override;
    std::string name() const override { return "http-reranker(" + base_url_ + ")"; }

private:
    std::string base_url_;
    int timeout_seconds_;
};

} // namespace kgrag
