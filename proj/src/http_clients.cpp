#include "kgrag/http_clients.hpp"

#include "kgrag/util.hpp"

#include <httplib.h>
#include <json.hpp>

namespace kgrag {

using nlohmann::json;

namespace {

json post_json(const std::string& base_url, const std::string& path, const json& body,
               int timeout_seconds, const std::string& bearer = "") {
    httplib::Client client(base_url);
    client.set_connection_timeout(timeout_seconds);
    client.set_read_timeout(timeout_seconds);
    httplib::Headers headers;
    if (!bearer.empty()) headers.emplace("Authorization", "Bearer " + bearer);

    auto res = client.Post(path, headers, body.dump(), "application/json");
    if (!res) {
        throw ProviderError("no response from " + base_url + path + ": " +
                            httplib::to_string(res.error()));
    }
    if (res->status < 200 || res->status >= 300) {
        throw ProviderError("HTTP " + std::to_string(res->status) + " from " + base_url + path +
                            ": " + res->body.substr(0, 200));
    }
    json parsed = json::parse(res->body, nullptr, false);
    if (parsed.is_discarded()) {
        throw ProviderError("unparseable response from " + base_url + path);
    }
    return parsed;
}

} // namespace

std::string OpenAiChatClient::complete(const std::vector<ChatMessage>& messages) {
    json body{{"model", model_}, {"messages", json::array()}};
    for (const auto& m : messages) {
        body["messages"].push_back({{"role", m.role}, {"content", m.content}});
    }
    json res = post_json(base_url_, "/v1/chat/completions", body, timeout_seconds_, api_key_);
    if (!res.contains("choices") || !res["choices"].is_array() || res["choices"].empty() ||
        !res["choices"][0].contains("message") ||
        !res["choices"][0]["message"].contains("content") ||
        !res["choices"][0]["message"]["content"].is_string()) {
        throw ProviderError("chat response missing choices[0].message.content");
    }
    return res["choices"][0]["message"]["content"];
}

std::vector<std::vector<double>> HttpEmbeddingProvider::embed(
    std::span<const std::string> texts) {
    json body{{"texts", json::array()}};
    for (const auto& t : texts) body["texts"].push_back(t);
    json res = post_json(base_url_, "/embed", body, timeout_seconds_);
    if (!res.contains("vectors") || !res["vectors"].is_array() ||
        res["vectors"].size() != texts.size()) {
        throw ProviderError("embedding response missing vectors or wrong count");
    }
    std::vector<std::vector<double>> out;
    out.reserve(texts.size());
    for (const auto& v : res["vectors"]) {
        if (!v.is_array() || v.size() != dim_) {
            throw ProviderError("embedding vector has wrong dimension");
        }
        out.push_back(v.get<std::vector<double>>());
    }
    return out;
}

std::vector<double> HttpReranker::score(const std::string& query,
                                        std::span<const std::string> documents) {
    json body{{"query", query}, {"documents", json::array()}};
    for (const auto& d : documents) body["documents"].push_back(d);
    json res = post_json(base_url_, "/rerank", body, timeout_seconds_);
    if (!res.contains("scores") || !res["scores"].is_array() ||
        res["scores"].size() != documents.size()) {
        throw ProviderError("rerank response missing scores or wrong count");
    }
    return res["scores"].get<std::vector<double>>();
}

} // namespace kgrag
