#include "styloc/genclient.hpp"

#include <chrono>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "styloc/ioutil.hpp"

namespace styloc {

const char* generation_system_prompt() {
    return "You are a C programming assistant. Answer with exactly one "
           "complete, compilable C program inside a single ```c code block. "
           "Do not include any other code blocks.";
}

HttpChatClient::HttpChatClient(GenerationSettings settings)
    : settings_(std::move(settings)) {
    if (settings_.endpoint.empty()) {
        throw UsageError("generation endpoint is not configured");
    }
    if (settings_.api_key.empty()) {
        throw UsageError("generation API credential is not configured");
    }
}

std::string HttpChatClient::complete(const std::string& system_prompt,
                                     const std::string& user_prompt) {
    nlohmann::json body;
    body["model"] = settings_.model;
    body["messages"] = nlohmann::json::array(
        {{{"role", "system"}, {"content", system_prompt}},
         {{"role", "user"}, {"content", user_prompt}}});

    httplib::Client cli(settings_.endpoint);
    cli.set_connection_timeout(std::chrono::seconds(15));
    cli.set_read_timeout(std::chrono::duration<double>(
        settings_.timeout_seconds));
    httplib::Headers headers = {
        {"Authorization", "Bearer " + settings_.api_key}};

    std::string last_error;
    for (int attempt = 0; attempt <= settings_.max_retries; ++attempt) {
        auto res = cli.Post(settings_.path, headers, body.dump(),
                            "application/json");
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
        } else if (res->status == 200) {
            try {
                nlohmann::json reply = nlohmann::json::parse(res->body);
                return reply.at("choices").at(0).at("message").at("content")
                    .get<std::string>();
            } catch (const nlohmann::json::exception& e) {
                throw ExternalToolError(
                    std::string("malformed completion response: ") + e.what());
            }
        } else if (res->status == 429 || res->status >= 500) {
            std::string retry_after = res->get_header_value("Retry-After");
            last_error = "HTTP " + std::to_string(res->status) +
                         (retry_after.empty()
                              ? ""
                              : " (Retry-After: " + retry_after + "s)");
            if (attempt < settings_.max_retries) {
                double wait = retry_after.empty()
                                  ? static_cast<double>(1 << attempt)
                                  : std::stod(retry_after);
                std::this_thread::sleep_for(
                    std::chrono::duration<double>(wait));
                continue;
            }
        } else {
            throw ExternalToolError("generation request failed: HTTP " +
                                    std::to_string(res->status) + " " +
                                    res->body.substr(0, 200));
        }
        if (attempt >= settings_.max_retries) break;
        std::this_thread::sleep_for(
            std::chrono::seconds(1LL << attempt));
    }
    throw ExternalToolError("generation request failed after retries: " +
                            last_error);
}

CodeExtraction extract_code_reply(const std::string& reply) {
    CodeExtraction out;
    std::size_t fence = reply.find("```");
    if (fence == std::string::npos) {
        out.code = reply;
        out.flags.insert(flags::kNoFence);
    } else {
        std::size_t body_start = reply.find('\n', fence);
        if (body_start == std::string::npos) {
            out.code = "";
            out.flags.insert(flags::kEmptyCode);
            return out;
        }
        ++body_start;
        std::size_t close = reply.find("```", body_start);
        if (close == std::string::npos) {
            out.code = reply.substr(body_start);
        } else {
            out.code = reply.substr(body_start, close - body_start);
            if (reply.find("```", close + 3) != std::string::npos) {
                out.flags.insert(flags::kMultiBlock);
            }
        }
    }
    bool all_space = true;
    for (char c : out.code) {
        if (!std::isspace(static_cast<unsigned char>(c))) {
            all_space = false;
            break;
        }
    }
    if (all_space) out.flags.insert(flags::kEmptyCode);
    return out;
}

CodeSample generate(ChatClient& client, const PromptInstance& instance,
                    const std::string& model_name) {
    std::string reply =
        client.complete(generation_system_prompt(), instance.text);
    CodeExtraction ex = extract_code_reply(reply);
    CodeSample sample = make_sample(model_name, instance.template_id,
                                    instance.text, std::move(ex.code));
    sample.flags = std::move(ex.flags);
    return sample;
}

}  // namespace styloc
