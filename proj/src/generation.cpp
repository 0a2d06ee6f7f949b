#include "kgrag/generation.hpp"

#include "kgrag/prompts.hpp"
#include "kgrag/util.hpp"

#include <json.hpp>

#include <chrono>
#include <stdexcept>
#include <thread>

namespace kgrag {

using nlohmann::json;

std::vector<ChatMessage> AnswerPrompt::messages() const {
    std::string user = prompts::kAnswerContextHeaderV1 + context +
                       prompts::kAnswerQuestionHeaderV1 + question;
    return {{"system", system}, {"user", user}};
}

AnswerPrompt assemble_prompt(const ContextBundle& bundle, const ChunkTextLookup& chunks,
                             const std::string& question, std::size_t max_context_chars) {
    AnswerPrompt prompt;
    prompt.system = prompts::kAnswerSystemV1;
    prompt.question = question;

    bool have_prev = false;
    int prev_rank = 0;
    for (const auto& entry : bundle.entries) {
        const std::string* text = chunks(entry.chunk_id);
        if (!text) throw std::out_of_range("bundle references unknown chunk " + entry.chunk_id);

        std::string sep;
        if (have_prev) sep = (entry.tree_rank == prev_rank) ? "\n" : "\n\n";
        if (prompt.context.size() + sep.size() + text->size() > max_context_chars) {
            prompt.truncated = true;
            break;
        }
        prompt.context += sep;
        prompt.context += *text;
        prompt.included_chunks.push_back(entry.chunk_id);
        have_prev = true;
        prev_rank = entry.tree_rank;
    }
    return prompt;
}

GeneratedAnswer generate_answer(LlmClient& llm, const AnswerPrompt& prompt,
                                const RetryPolicy& policy) {
    auto messages = prompt.messages();
    std::string last_error;
    auto start = std::chrono::steady_clock::now();
    for (std::size_t attempt = 1; attempt <= policy.max_retries + 1; ++attempt) {
        try {
            std::string raw = llm.complete(messages);
            auto end = std::chrono::steady_clock::now();

            std::size_t lo = raw.find_first_not_of(" \t\r\n");
            std::size_t hi = raw.find_last_not_of(" \t\r\n");
            GeneratedAnswer answer;
            answer.text = (lo == std::string::npos) ? "" : raw.substr(lo, hi - lo + 1);
            answer.model_id = llm.model_name();
            answer.attempts = attempt;
            answer.latency_ms =
                std::chrono::duration_cast<std::chrono::milliseconds>(end - start).count();
            answer.empty_response = answer.text.empty();
            return answer;
        } catch (const std::exception& e) {
            last_error = e.what();
            if (attempt <= policy.max_retries && policy.backoff_ms > 0) {
                std::this_thread::sleep_for(std::chrono::milliseconds(policy.backoff_ms));
            }
        }
    }
    throw ProviderError("llm failed after " + std::to_string(policy.max_retries + 1) +
                            " attempts: " + last_error,
                        policy.max_retries + 1);
}

// ---------------------------------------------------------------------------
// mock client
// ---------------------------------------------------------------------------

std::string MockLlmClient::prompt_key(const std::vector<ChatMessage>& messages) {
    std::string buf;
    for (const auto& m : messages) {
        buf += m.role;
        buf += '\x1e';
        buf += m.content;
        buf += '\x1e';
    }
    return fnv1a64_hex(buf);
}

void MockLlmClient::script(const std::vector<ChatMessage>& messages, std::string response) {
    responses_[prompt_key(messages)] = std::move(response);
}

void MockLlmClient::script_key(const std::string& key, std::string response) {
    responses_[key] = std::move(response);
}

std::string MockLlmClient::complete(const std::vector<ChatMessage>& messages) {
    auto it = responses_.find(prompt_key(messages));
    return it != responses_.end() ? it->second : default_response_;
}

MockLlmClient MockLlmClient::from_json_file(const std::string& path,
                                            std::string default_response) {
    MockLlmClient client(std::move(default_response));
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw LoadError(std::string("bad llm fixture: ") + e.what(), e.byte);
    }
    if (!j.is_object()) throw LoadError("llm fixture must be a JSON object", 0);
    for (auto& [key, value] : j.items()) {
        if (!value.is_string()) throw LoadError("llm fixture values must be strings", 0);
        client.responses_[key] = value;
    }
    return client;
}

} // namespace kgrag
