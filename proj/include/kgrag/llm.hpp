#pragma once

#include <string>
#include <vector>

namespace kgrag {

struct ChatMessage {
    std::string role; // "system", "user", "assistant"
    std::string content;
};

// Minimal chat interface. Implementations: OpenAiChatClient (wire),
// scripted fakes in tests. Throws ProviderError when the backend stays
// unreachable after retries.
class LlmClient {
public:
    virtual ~LlmClient() = default;
    virtual std::string complete(const std::vector<ChatMessage>& messages) = 0;
    virtual std::string model_name() const = 0;
};

} // namespace kgrag
