#include "montage/backend.hpp"

#include <openssl/evp.h>

#include <fstream>

#include "json.hpp"
#include "montage/corpus.hpp"
#include "montage/error.hpp"
#include "montage/prompts.hpp"
#include "montage/text.hpp"

namespace montage {

using json = nlohmann::ordered_json;

BackendDescriptor parse_backend(std::string_view text) {
  BackendDescriptor d;
  constexpr std::string_view kScripted = "scripted:";
  if (text.substr(0, kScripted.size()) == kScripted) {
    d.kind = BackendKind::scripted;
    d.fixture = std::string(text.substr(kScripted.size()));
    if (d.fixture.empty()) throw Error(Errc::usage, "scripted backend needs a fixture path");
    return d;
  }
  if (text.rfind("http://", 0) == 0 || text.rfind("https://", 0) == 0) {
    d.kind = BackendKind::remote;
    d.endpoint = std::string(text);
    while (!d.endpoint.empty() && d.endpoint.back() == '/') d.endpoint.pop_back();
    return d;
  }
  throw Error(Errc::usage, "backend must be an http(s) URL or scripted:<fixture>, got '" +
                               std::string(text) + "'");
}

std::string ask(Backend& backend, std::string prompt) {
  if (prompt.empty()) throw Error(Errc::usage, "empty prompt");
  CompletionRequest request;
  request.prompt = std::move(prompt);
  request.model = backend.model();
  return backend.complete(request);
}

std::string sha256_hex(std::string_view text) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error(Errc::invariant_violation, "SHA-256 digest failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

ScriptedBackend::ScriptedBackend(std::string model) : model_(std::move(model)) {}

ScriptedBackend ScriptedBackend::from_fixture(const std::filesystem::path& path,
                                              std::string model) {
  ScriptedBackend backend(std::move(model));
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_failure, "cannot open fixture " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(Errc::malformed_line, "fixture line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("prompt_sha256") || !j["prompt_sha256"].is_string())
      throw Error(Errc::missing_field, "fixture line " + std::to_string(line_no) + ": prompt_sha256");
    if (!j.contains("response") || !j["response"].is_string())
      throw Error(Errc::missing_field, "fixture line " + std::to_string(line_no) + ": response");
    backend.add_hash(j["prompt_sha256"].get<std::string>(), j["response"].get<std::string>());
  }
  return backend;
}

void ScriptedBackend::add(std::string_view prompt, std::string response) {
  add_hash(sha256_hex(prompt), std::move(response));
}

void ScriptedBackend::add_hash(std::string sha256, std::string response) {
  responses_[to_lower_ascii(sha256)] = std::move(response);
}

std::string ScriptedBackend::complete(const CompletionRequest& request) {
  const std::string key = sha256_hex(request.prompt);
  auto it = responses_.find(key);
  if (it == responses_.end()) {
    std::string detail = "prompt " + key.substr(0, 16);
    if (auto id = prompts::identify(request.prompt)) detail += " (" + id->prompt->name() + ")";
    throw Error(Errc::no_scripted_response, detail);
  }
  return it->second;
}

std::string RecordingBackend::complete(const CompletionRequest& request) {
  std::string response = inner_.complete(request);
  std::lock_guard lock(mutex_);
  by_hash_[sha256_hex(request.prompt)] = Exchange{request.prompt, response};
  return response;
}

std::vector<Exchange> RecordingBackend::exchanges() const {
  std::lock_guard lock(mutex_);
  std::vector<Exchange> out;
  for (const auto& [hash, ex] : by_hash_) out.push_back(ex);
  return out;
}

void RecordingBackend::write_fixture(const std::filesystem::path& path) const {
  std::string content;
  {
    std::lock_guard lock(mutex_);
    for (const auto& [hash, ex] : by_hash_) {
      json j;
      j["prompt_sha256"] = hash;
      j["response"] = ex.response;
      content += j.dump() + "\n";
    }
  }
  write_text_file(path, content);
}

std::unique_ptr<Backend> make_backend(const BackendDescriptor& descriptor) {
  if (descriptor.kind == BackendKind::scripted)
    return std::make_unique<ScriptedBackend>(
        ScriptedBackend::from_fixture(descriptor.fixture, descriptor.model));
  return std::make_unique<RemoteBackend>(descriptor);
}

}  // namespace montage
