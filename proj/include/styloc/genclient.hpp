#pragma once

#include <set>
#include <string>

#include "styloc/sample.hpp"
#include "styloc/templates.hpp"

namespace styloc {

struct GenerationSettings {
    std::string endpoint;  // scheme://host[:port]
    std::string path = "/api/v1/chat/completions";
    std::string model;
    std::string api_key;  // from the environment, never logged
    double timeout_seconds = 120.0;
    int max_retries = 3;
};

// Chat transport, virtual so tests can substitute canned replies.
class ChatClient {
public:
    virtual ~ChatClient() = default;
    virtual std::string complete(const std::string& system_prompt,
                                 const std::string& user_prompt) = 0;
};

// HTTPS chat-completions client with retry/backoff; 429/5xx responses are
// retried honoring Retry-After, other failures raise ExternalToolError.
class HttpChatClient : public ChatClient {
public:
    explicit HttpChatClient(GenerationSettings settings);
    std::string complete(const std::string& system_prompt,
                         const std::string& user_prompt) override;

private:
    GenerationSettings settings_;
};

struct CodeExtraction {
    std::string code;
    std::set<std::string> flags;
};

// First fenced code block wins; prose-only replies fall back to the whole
// reply and are flagged; multi-block replies are flagged.
CodeExtraction extract_code_reply(const std::string& reply);

const char* generation_system_prompt();

CodeSample generate(ChatClient& client, const PromptInstance& instance,
                    const std::string& model_name);

}  // namespace styloc
