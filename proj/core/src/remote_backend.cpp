#include <condition_variable>
#include <cstdlib>
#include <mutex>
#include <random>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "montage/backend.hpp"
#include "montage/error.hpp"

namespace montage {

using json = nlohmann::json;

struct RemoteBackend::Limiter {
  explicit Limiter(unsigned capacity) : available(capacity) {}

  void acquire() {
    std::unique_lock lock(mutex);
    cv.wait(lock, [&] { return available > 0; });
    --available;
  }
  void release() {
    {
      std::lock_guard lock(mutex);
      ++available;
    }
    cv.notify_one();
  }

  std::mutex mutex;
  std::condition_variable cv;
  unsigned available;
};

namespace {

struct Endpoint {
  std::string scheme_host_port;
  std::string path_prefix;
};

Endpoint split_endpoint(const std::string& url) {
  const std::size_t scheme_end = url.find("://");
  const std::size_t path_start =
      scheme_end == std::string::npos ? std::string::npos : url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, ""};
  return {url.substr(0, path_start), url.substr(path_start)};
}

struct Attempt {
  enum class Outcome { ok, retryable, fatal } outcome;
  Errc code = Errc::transport_failure;
  std::string text;  // response text on success, diagnostic otherwise
};

Attempt classify_transport(httplib::Error err) {
  const std::string why = httplib::to_string(err);
  switch (err) {
    case httplib::Error::Read:
    case httplib::Error::Write:
    case httplib::Error::ConnectionTimeout:
      return {Attempt::Outcome::retryable, Errc::timeout, why};
    default:
      return {Attempt::Outcome::retryable, Errc::transport_failure, why};
  }
}

Attempt parse_body(const std::string& body) {
  try {
    const json j = json::parse(body);
    const json& content = j.at("choices").at(0).at("message").at("content");
    if (!content.is_string())
      return {Attempt::Outcome::fatal, Errc::transport_failure, "message content is not text"};
    return {Attempt::Outcome::ok, Errc::transport_failure, content.get<std::string>()};
  } catch (const json::exception& e) {
    return {Attempt::Outcome::fatal, Errc::transport_failure,
            std::string("unexpected response body: ") + e.what()};
  }
}

std::chrono::milliseconds backoff_delay(std::chrono::milliseconds base, unsigned attempt) {
  thread_local std::mt19937_64 jitter{std::random_device{}()};
  std::uniform_real_distribution<double> factor(0.5, 1.5);
  const double scale = static_cast<double>(1ULL << std::min(attempt, 10u)) * factor(jitter);
  return std::chrono::milliseconds(static_cast<long long>(base.count() * scale));
}

}  // namespace

RemoteBackend::RemoteBackend(BackendDescriptor descriptor)
    : descriptor_(std::move(descriptor)),
      limiter_(std::make_unique<Limiter>(std::max(1u, descriptor_.max_in_flight))) {}

RemoteBackend::~RemoteBackend() = default;

std::string RemoteBackend::complete(const CompletionRequest& request) {
  const Endpoint endpoint = split_endpoint(descriptor_.endpoint);
  const std::string path = endpoint.path_prefix + "/chat/completions";

  json body;
  body["model"] = request.model.empty() ? descriptor_.model : request.model;
  body["messages"] = json::array({{{"role", "user"}, {"content", request.prompt}}});
  body["temperature"] = request.temperature;
  body["max_tokens"] = request.max_output;
  const std::string payload = body.dump();

  httplib::Headers headers;
  if (const char* key = std::getenv("ALIGN_API_KEY"); key && *key)
    headers.emplace("Authorization", std::string("Bearer ") + key);

  const auto timeout = descriptor_.request_timeout;
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);

  Attempt last{Attempt::Outcome::fatal, Errc::transport_failure, "no attempt made"};
  for (unsigned attempt = 0; attempt <= descriptor_.max_retries; ++attempt) {
    if (attempt > 0)
      std::this_thread::sleep_for(backoff_delay(descriptor_.backoff_base, attempt - 1));

    limiter_->acquire();
    httplib::Result result = [&] {
      httplib::Client client(endpoint.scheme_host_port);
      client.set_connection_timeout(secs.count(), usecs.count());
      client.set_read_timeout(secs.count(), usecs.count());
      client.set_write_timeout(secs.count(), usecs.count());
      return client.Post(path, headers, payload, "application/json");
    }();
    limiter_->release();

    if (!result) {
      last = classify_transport(result.error());
    } else if (result->status == 200) {
      last = parse_body(result->body);
    } else if (result->status == 429) {
      last = {Attempt::Outcome::retryable, Errc::rate_limited, "HTTP 429"};
    } else if (result->status >= 500) {
      last = {Attempt::Outcome::retryable, Errc::transport_failure,
              "HTTP " + std::to_string(result->status)};
    } else {
      last = {Attempt::Outcome::fatal, Errc::transport_failure,
              "HTTP " + std::to_string(result->status) + ": " + result->body.substr(0, 200)};
    }
    if (last.outcome != Attempt::Outcome::retryable) break;
  }
  if (last.outcome == Attempt::Outcome::ok) return last.text;
  if (last.outcome == Attempt::Outcome::retryable)
    last.text += " (after " + std::to_string(descriptor_.max_retries + 1) + " attempts)";
  throw Error(last.code, last.text);
}

}  // namespace montage
