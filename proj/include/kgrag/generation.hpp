#pragma once

#include "kgrag/corpus.hpp"
#include "kgrag/llm.hpp"
#include "kgrag/organizer.hpp"

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace kgrag {

struct AnswerPrompt {
    std::string system;
    std::string context;  // bundle chunk texts; blank line at tree boundaries
    std::string question;
    bool truncated = false; // character ceiling dropped tail chunks
    std::vector<std::string> included_chunks;

    std::vector<ChatMessage> messages() const;
};

struct GeneratedAnswer {
    std::string text; // provider output, trimmed
    std::string model_id;
    std::size_t attempts = 0;
    long long latency_ms = 0;
    bool empty_response = false;
};

using ChunkTextLookup = std::function<const std::string*(const std::string& chunk_id)>;

// Bundle order becomes context order verbatim: consecutive chunks of the
// same tree join with one newline, a tree change inserts a blank line.
// Chunks are dropped whole from the tail once the character ceiling would
// be crossed. Unresolvable ids mean corrupted state and throw.
AnswerPrompt assemble_prompt(const ContextBundle& bundle, const ChunkTextLookup& chunks,
                             const std::string& question,
                             std::size_t max_context_chars = 32000);

struct RetryPolicy {
    std::size_t max_retries = 2; // attempts = max_retries + 1
    std::size_t backoff_ms = 250;
};

// Calls the provider, retrying transport failures. Throws ProviderError
// carrying the attempt count once the budget is spent.
GeneratedAnswer generate_answer(LlmClient& llm, const AnswerPrompt& prompt,
                                const RetryPolicy& policy = {});

// Scripted provider: responses keyed by a hash of the exact message list,
// with a fixed default for unknown prompts. Drives offline runs and tests.
class MockLlmClient : public LlmClient {
public:
    explicit MockLlmClient(std::string default_response = "")
        : default_response_(std::move(default_response)) {}

    static std::string prompt_key(const std::vector<ChatMessage>& messages);
    void script(const std::vector<ChatMessage>& messages, std::string response);
    void script_key(const std::string& key, std::string response);

    std::string complete(const std::vector<ChatMessage>& messages) override;
    std::string model_name() const override { return "mock-llm-v1"; }

    // Fixture file: JSON object of prompt key -> response.
    static MockLlmClient from_json_file(const std::string& path,
                                        std::string default_response = "");

private:
    std::string default_response_;
    std::map<std::string, std::string> responses_;
};

} // namespace kgrag
