#include "timepoint/transport.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

namespace timepoint {

using json = nlohmann::ordered_json;

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error("CryptoError", "SHA-256 digest failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

namespace {

json request_json(const TransportRequest& r) {
  json messages = json::array();
  for (const auto& m : r.messages) messages.push_back({{"role", m.role}, {"content", m.content}});
  return {{"model", r.model},
          {"messages", std::move(messages)},
          {"temperature", r.temperature},
          {"max_tokens", r.max_tokens},
          {"sample", r.sample}};
}

TransportRequest request_from(const nlohmann::json& j) {
  TransportRequest r;
  r.model = j.at("model").get<std::string>();
  for (const auto& m : j.at("messages")) {
    r.messages.push_back({m.at("role").get<std::string>(), m.at("content").get<std::string>()});
  }
  r.temperature = j.value("temperature", 0.0);
  r.max_tokens = j.value("max_tokens", 256);
  r.sample = j.value("sample", 0);
  return r;
}

std::vector<std::string> string_or_list(const nlohmann::json& j) {
  if (j.is_string()) return {j.get<std::string>()};
  return j.get<std::vector<std::string>>();
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

std::string TransportRequest::to_json() const { return request_json(*this).dump(); }

TransportRequest TransportRequest::from_json(std::string_view text) {
  try {
    return request_from(nlohmann::json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(e.what(), 1, 1);
  }
}

std::string TransportRequest::content_hash() const { return sha256_hex(to_json()); }

MockTransport::MockTransport(std::vector<Rule> rules, std::string default_response)
    : rules_(std::move(rules)), default_(std::move(default_response)) {}

std::unique_ptr<MockTransport> MockTransport::from_script(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    std::vector<Rule> rules;
    for (const auto& r : j.value("rules", nlohmann::json::array())) {
      Rule rule;
      rule.contains = string_or_list(r.at("contains"));
      if (r.contains("response")) rule.responses = string_or_list(r.at("response"));
      if (r.contains("error")) rule.error = r.at("error").get<std::string>();
      if (rule.responses.empty() && !rule.error) {
        throw ParseError("mock rule needs 'response' or 'error'", 1, 1);
      }
      rules.push_back(std::move(rule));
    }
    return std::make_unique<MockTransport>(std::move(rules), j.value("default", std::string()));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("mock script: ") + e.what(), 1, 1);
  }
}

std::unique_ptr<MockTransport> MockTransport::from_script_file(const std::filesystem::path& path) {
  return from_script(read_file(path));
}

TransportResponse MockTransport::complete(const TransportRequest& request) {
  {
    std::lock_guard lock(mutex_);
    ++calls_;
  }
  const std::string prompt = request.messages.empty() ? std::string() : request.messages.back().content;
  for (const auto& rule : rules_) {
    const bool match = std::ranges::all_of(
        rule.contains, [&](const std::string& s) { return prompt.find(s) != std::string::npos; });
    if (!match) continue;
    if (rule.error) throw TransportError(*rule.error);
    const auto i = static_cast<std::size_t>(request.sample) % rule.responses.size();
    return {rule.responses[i], "stop", std::chrono::milliseconds{0}};
  }
  return {default_, "stop", std::chrono::milliseconds{0}};
}

std::size_t MockTransport::calls() const {
  std::lock_guard lock(mutex_);
  return calls_;
}

CachingTransport::CachingTransport(std::filesystem::path directory, std::shared_ptr<Transport> inner)
    : directory_(std::move(directory)), inner_(std::move(inner)) {
  std::error_code ec;
  std::filesystem::create_directories(directory_, ec);
  if (ec && !std::filesystem::is_directory(directory_)) {
    throw IoError("cannot create cache directory '" + directory_.string() + "'");
  }
}

std::filesystem::path CachingTransport::entry_path(const TransportRequest& request) const {
  return directory_ / (request.content_hash() + ".json");
}

TransportResponse CachingTransport::complete(const TransportRequest& request) {
  const auto path = entry_path(request);
  if (std::filesystem::exists(path)) {
    try {
      const auto j = nlohmann::json::parse(read_file(path));
      const auto& r = j.at("response");
      {
        std::lock_guard lock(mutex_);
        ++hits_;
      }
      return {r.at("text").get<std::string>(), r.value("finish_reason", std::string("stop")),
              std::chrono::milliseconds{r.value("latency_ms", 0)}};
    } catch (const nlohmann::json::exception& e) {
      throw TransportError("corrupt cache entry '" + path.string() + "': " + e.what());
    }
  }
  {
    std::lock_guard lock(mutex_);
    ++misses_;
  }
  if (!inner_) throw TransportError("no cached response for request " + request.content_hash());
  auto response = inner_->complete(request);

  json entry{{"request", request_json(request)},
             {"response",
              {{"text", response.text},
               {"finish_reason", response.finish_reason},
               {"latency_ms", response.latency.count()}}}};
  static std::atomic<unsigned long> counter{0};
  auto tmp = path;
  tmp += ".tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id())) + "." +
         std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write cache entry '" + tmp.string() + "'");
    out << entry.dump(2) << '\n';
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot store cache entry '" + path.string() + "'");
  }
  return response;
}

std::size_t CachingTransport::hits() const {
  std::lock_guard lock(mutex_);
  return hits_;
}

std::size_t CachingTransport::misses() const {
  std::lock_guard lock(mutex_);
  return misses_;
}

PacedTransport::PacedTransport(std::shared_ptr<Transport> inner, PacingOptions options)
    : inner_(std::move(inner)), options_(options) {
  if (!inner_) throw DomainError("paced transport needs an inner transport");
  if (options_.max_retries < 0) throw DomainError("max_retries must be non-negative");
}

void PacedTransport::wait_turn() {
  std::chrono::steady_clock::time_point slot;
  {
    std::lock_guard lock(mutex_);
    const auto now = std::chrono::steady_clock::now();
    slot = std::max(now, next_slot_);
    next_slot_ = slot + options_.min_interval;
  }
  std::this_thread::sleep_until(slot);
}

TransportResponse PacedTransport::complete(const TransportRequest& request) {
  auto backoff = options_.initial_backoff;
  for (int attempt = 0;; ++attempt) {
    wait_turn();
    try {
      return inner_->complete(request);
    } catch (const TransportError&) {
      if (attempt >= options_.max_retries) throw;
    }
    std::this_thread::sleep_for(backoff);
    backoff = std::chrono::milliseconds{
        static_cast<long long>(static_cast<double>(backoff.count()) * options_.backoff_factor)};
  }
}

}  // namespace timepoint
