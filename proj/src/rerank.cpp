#include "kgrag/rerank.hpp"

namespace kgrag {

std::vector<double> EmbeddingReranker::score(const std::string& query,
                                             std::span<const std::string> documents) {
    std::vector<std::string> texts;
    texts.reserve(documents.size() + 1);
    texts.push_back(query);
    for (const auto& d : documents) texts.push_back(d);
    auto vecs = provider_->embed(texts);
    std::vector<double> out;
    out.reserve(documents.size());
    for (std::size_t i = 1; i < vecs.size(); ++i) out.push_back(cosine(vecs[0], vecs[i]));
    return out;
}

} // namespace kgrag
