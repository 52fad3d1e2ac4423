#include "tcva/judge.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>

#include <json.hpp>

#include "tcva/error.hpp"

#ifdef TCVA_HAVE_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

namespace tcva {

using nlohmann::json;

void EvaluationSample::validate() const {
    if (id.empty()) fail(Errc::schema, "sample id must be nonempty");
    if (answer.empty()) fail(Errc::schema, "sample '" + id + "': answer must be nonempty");
    if (human_score && !(*human_score >= 0.0 && *human_score <= 1.0))
        fail(Errc::schema, "sample '" + id + "': human_score outside [0,1]");
}

void MetricConfig::validate() const {
    if (metric_name.empty()) fail(Errc::config, "metric_name must be nonempty");
    if (max_claims < 1 || max_claims > 50)
        fail(Errc::config, "max_claims must lie in [1, 50]");
}

std::vector<std::string> split_sentences(const std::string& text) {
    std::vector<std::string> sentences;
    std::string current;
    for (char c : text) {
        current.push_back(c);
        if (c == '.' || c == '!' || c == '?') {
            while (!current.empty() && std::isspace(static_cast<unsigned char>(current.front())))
                current.erase(current.begin());
            if (!current.empty()) sentences.push_back(current);
            current.clear();
        }
    }
    while (!current.empty() && std::isspace(static_cast<unsigned char>(current.front())))
        current.erase(current.begin());
    if (!current.empty()) sentences.push_back(current);
    return sentences;
}

ScriptedJudge::Script ScriptedJudge::load_script(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Errc::io, "cannot open mock script '" + path + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        fail(Errc::schema, "mock script '" + path + "': " + e.what());
    }

    Script script;
    if (doc.contains("model_id")) script.model_id = doc.at("model_id").get<std::string>();
    if (doc.contains("default_level")) {
        const auto name = doc.at("default_level").get<std::string>();
        const auto level = parse_verdict_level(name);
        if (!level) fail(Errc::schema, "mock script: unknown default_level '" + name + "'");
        script.default_level = *level;
    }
    if (doc.contains("claims")) {
        for (const auto& [sample_id, claims] : doc.at("claims").items()) {
            script.claims_by_sample[sample_id] = claims.get<std::vector<std::string>>();
        }
    }
    if (doc.contains("verdicts")) {
        for (const auto& [claim_text, verdict] : doc.at("verdicts").items()) {
            Script::Verdict v;
            const auto name = verdict.at("level").get<std::string>();
            const auto level = parse_verdict_level(name);
            if (!level)
                fail(Errc::schema, "mock script: unknown level '" + name + "' for claim '" +
                                       claim_text + "'");
            v.level = *level;
            if (verdict.contains("reasoning"))
                v.reasoning = verdict.at("reasoning").get<std::string>();
            script.verdict_by_claim[claim_text] = std::move(v);
        }
    }
    return script;
}

std::string ScriptedJudge::complete(const JudgeRequest& request) {
    if (request.kind == JudgeRequest::Kind::ClaimExtraction) {
        json claims = json::array();
        auto it = script_.claims_by_sample.find(request.sample_id);
        if (it != script_.claims_by_sample.end()) {
            for (const auto& claim : it->second) claims.push_back(claim);
        } else {
            // unscripted sample: one claim per sentence of the answer
            for (const auto& sentence : split_sentences(request.answer)) claims.push_back(sentence);
        }
        return json{{"claims", claims}}.dump();
    }

    Script::Verdict verdict;
    auto it = script_.verdict_by_claim.find(request.claim_text);
    if (it != script_.verdict_by_claim.end()) {
        verdict = it->second;
    } else {
        verdict.level = script_.default_level;
    }
    if (verdict.reasoning.empty())
        verdict.reasoning = "Scripted verdict for this claim.";
    std::string level_name(to_string(verdict.level));
    for (auto& c : level_name) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return json{{"grounding", ""}, {"level", level_name}, {"reasoning", verdict.reasoning}}.dump();
}

RemoteJudge::RemoteJudge(RemoteJudgeConfig config) : config_(std::move(config)) {
    if (config_.endpoint.empty()) fail(Errc::config, "remote judge: endpoint must be set");
    if (const char* key = std::getenv(config_.api_key_env.c_str())) {
        api_key_ = key;
    }
    if (config_.endpoint.rfind("https://", 0) == 0) {
        use_tls_ = true;
        host_ = config_.endpoint.substr(8);
    } else if (config_.endpoint.rfind("http://", 0) == 0) {
        host_ = config_.endpoint.substr(7);
    } else {
        host_ = config_.endpoint;
    }
    // a path segment in the endpoint overrides the default completion path
    if (auto slash = host_.find('/'); slash != std::string::npos) {
        config_.path = host_.substr(slash);
        host_ = host_.substr(0, slash);
    }
#ifndef TCVA_HAVE_OPENSSL
    if (use_tls_)
        fail(Errc::config, "remote judge: built without TLS support; use an http:// endpoint "
                           "or rebuild with OpenSSL");
#endif
}

std::string RemoteJudge::complete(const JudgeRequest& request) {
    json messages = json::array();
    for (const auto& message : request.messages)
        messages.push_back({{"role", message.role}, {"content", message.content}});
    const std::string body = json{{"model", config_.model},
                                  {"messages", messages},
                                  {"temperature", config_.request_temperature}}
                                 .dump();

    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

    auto post = [&](auto& client) {
        client.set_read_timeout(config_.timeout_seconds, 0);
        client.set_connection_timeout(config_.timeout_seconds, 0);
        return client.Post(config_.path, headers, body, "application/json");
    };

    httplib::Result result = [&] {
#ifdef TCVA_HAVE_OPENSSL
        if (use_tls_) {
            httplib::SSLClient client(host_);
            return post(client);
        }
#endif
        httplib::Client client(host_);
        return post(client);
    }();

    if (!result)
        fail(Errc::transport, "remote judge: request to " + host_ + config_.path +
                                  " failed: " + httplib::to_string(result.error()));
    if (result->status == 429 || result->status >= 500)
        fail(Errc::transport,
             "remote judge: HTTP " + std::to_string(result->status) + " from " + host_);
    if (result->status != 200)
        fail(Errc::config, "remote judge: HTTP " + std::to_string(result->status) + ": " +
                               result->body.substr(0, 500));

    try {
        const json reply = json::parse(result->body);
        return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
        fail(Errc::parse, std::string("remote judge: malformed completion payload: ") + e.what());
    }
}

} // namespace tcva
