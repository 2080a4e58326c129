#include <cstdlib>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "timepoint/transport.hpp"

namespace timepoint {

namespace {

struct Endpoint {
  std::string base;
  std::string path;
};

Endpoint split_endpoint(const std::string& url) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos) throw TransportError("endpoint '" + url + "' has no scheme");
  const auto slash = url.find('/', scheme + 3);
  if (slash == std::string::npos) return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

}  // namespace

HttpSettings HttpSettings::from_environment() { return from_environment(HttpSettings{}); }

HttpSettings HttpSettings::from_environment(HttpSettings defaults) {
  if (const char* v = std::getenv("TIMEPOINT_LLM_ENDPOINT"); v && *v) defaults.endpoint = v;
  if (const char* v = std::getenv("TIMEPOINT_LLM_API_KEY"); v && *v) defaults.api_key = v;
  if (const char* v = std::getenv("TIMEPOINT_LLM_MODEL"); v && *v) defaults.model = v;
  return defaults;
}

HttpTransport::HttpTransport(HttpSettings settings) : settings_(std::move(settings)) {
  split_endpoint(settings_.endpoint);
}

TransportResponse HttpTransport::complete(const TransportRequest& request) {
  const auto [base, path] = split_endpoint(settings_.endpoint);
  httplib::Client client(base);
  client.set_connection_timeout(settings_.timeout);
  client.set_read_timeout(settings_.timeout);

  nlohmann::json body{{"model", request.model.empty() ? settings_.model : request.model},
                      {"temperature", request.temperature},
                      {"max_tokens", request.max_tokens},
                      {"messages", nlohmann::json::array()}};
  for (const auto& m : request.messages) body["messages"].push_back({{"role", m.role}, {"content", m.content}});

  httplib::Headers headers;
  if (!settings_.api_key.empty()) headers.emplace("Authorization", "Bearer " + settings_.api_key);

  const auto start = std::chrono::steady_clock::now();
  auto result = client.Post(path, headers, body.dump(), "application/json");
  const auto latency =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
  if (!result) throw TransportError("request to " + base + " failed: " + httplib::to_string(result.error()));
  if (result->status != 200) {
    throw TransportError("endpoint returned HTTP " + std::to_string(result->status) + ": " +
                         result->body.substr(0, 200));
  }
  try {
    const auto j = nlohmann::json::parse(result->body);
    const auto& choice = j.at("choices").at(0);
    auto finish = choice.contains("finish_reason") && choice.at("finish_reason").is_string()
                      ? choice.at("finish_reason").get<std::string>()
                      : std::string("stop");
    return {choice.at("message").at("content").get<std::string>(), std::move(finish), latency};
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(std::string("malformed completion response: ") + e.what());
  }
}

}  // namespace timepoint
