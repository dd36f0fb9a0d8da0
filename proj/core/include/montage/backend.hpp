#pragma once

// Backends answer rendered prompts. Every LLM-backed step goes through this
// interface so a scripted backend can replay a whole pipeline offline.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

namespace montage {

struct CompletionRequest {
  std::string prompt;
  double temperature = 0.0;
  std::uint32_t max_output = 2048;
  std::string model;
};

enum class BackendKind { remote, scripted };

struct BackendDescriptor {
  BackendKind kind = BackendKind::scripted;
  std::string endpoint;               // remote: base URL, "/chat/completions" is appended
  std::filesystem::path fixture;      // scripted: JSONL of {prompt_sha256, response}
  std::string model = "gpt-4o-mini-2024-07-18";
  std::chrono::milliseconds request_timeout{120'000};
  unsigned max_retries = 4;
  unsigned max_in_flight = 8;
  std::chrono::milliseconds backoff_base{500};
};

/// "scripted:<fixture>" or an http(s) URL. Throws Errc::usage otherwise.
BackendDescriptor parse_backend(std::string_view text);

/// Safe for concurrent calls from multiple threads.
class Backend {
public:
  virtual ~Backend() = default;

  /// Raw model text for `request`. Failures are Errc::timeout,
  /// Errc::rate_limited, Errc::transport_failure or Errc::no_scripted_response.
  virtual std::string complete(const CompletionRequest& request) = 0;

  virtual std::string model() const = 0;
};

/// Sends `prompt` at temperature 0 with the backend's model. Throws
/// Errc::usage for an empty prompt.
std::string ask(Backend& backend, std::string prompt);

/// Lowercase hex SHA-256 of the UTF-8 bytes of `text`.
std::string sha256_hex(std::string_view text);

/// Replays responses keyed by the SHA-256 of the prompt.
class ScriptedBackend final : public Backend {
public:
  explicit ScriptedBackend(std::string model = "scripted");

  /// Loads a fixture file. Later lines override earlier ones for a hash.
  static ScriptedBackend from_fixture(const std::filesystem::path& path,
                                      std::string model = "scripted");

  void add(std::string_view prompt, std::string response);
  void add_hash(std::string sha256, std::string response);
  std::size_t size() const noexcept { return responses_.size(); }

  std::string complete(const CompletionRequest& request) override;
  std::string model() const override { return model_; }

private:
  std::string model_;
  std::map<std::string, std::string, std::less<>> responses_;
};

/// Backend whose answers come from a function; the building block for
/// programmable test doubles.
class CallbackBackend final : public Backend {
public:
  using Handler = std::function<std::string(const CompletionRequest&)>;

  CallbackBackend(std::string model, Handler handler)
      : model_(std::move(model)), handler_(std::move(handler)) {}

  std::string complete(const CompletionRequest& request) override { return handler_(request); }
  std::string model() const override { return model_; }

private:
  std::string model_;
  Handler handler_;
};

struct Exchange {
  std::string prompt;
  std::string response;
};

/// Forwards to another backend and keeps every successful exchange, so a
/// live run can be frozen into a scripted fixture.
class RecordingBackend final : public Backend {
public:
  explicit RecordingBackend(Backend& inner) : inner_(inner) {}

  std::string complete(const CompletionRequest& request) override;
  std::string model() const override { return inner_.model(); }

  std::vector<Exchange> exchanges() const;
  /// Writes {prompt_sha256, response} lines sorted by hash, one per prompt.
  void write_fixture(const std::filesystem::path& path) const;

private:
  Backend& inner_;
  mutable std::mutex mutex_;
  std::map<std::string, Exchange> by_hash_;
};

/// Chat-completions client: POST {endpoint}/chat/completions with
/// {model, messages:[{role:"user", content}], temperature, max_tokens}. The
/// bearer token is read from ALIGN_API_KEY. 429, 5xx and transport errors are
/// retried with jittered exponential backoff; at most max_in_flight requests
/// are outstanding at once.
class RemoteBackend final : public Backend {
public:
  explicit RemoteBackend(BackendDescriptor descriptor);
  ~RemoteBackend() override;

  std::string complete(const CompletionRequest& request) override;
  std::string model() const override { return descriptor_.model; }

private:
  struct Limiter;
  BackendDescriptor descriptor_;
  std::unique_ptr<Limiter> limiter_;
};

std::unique_ptr<Backend> make_backend(const BackendDescriptor& descriptor);

}  // namespace montage
