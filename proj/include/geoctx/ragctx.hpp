#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "geoctx/config.hpp"
#include "geoctx/geomodel.hpp"
#include "geoctx/geotext.hpp"
#include "geoctx/spatial_embed.hpp"
#include "geoctx/vectorstore.hpp"

namespace geoctx {

enum class Intent { retrieval, computational };

std::string_view intent_name(Intent intent);

struct PlaceMatch {
  Token token;
  std::string id;  // gazetteer id
  std::optional<GeoPoint> point;
};

struct PromptAnalysis {
  std::string prompt;
  Intent intent = Intent::retrieval;
  std::vector<PlaceMatch> places;
  std::vector<GeoPoint> coords;
  std::optional<TimeWindow> time_hint;  // first YYYY-MM-DD in the prompt, as that UTC day
  std::vector<Token> query_tokens;

  /// Lowercased content words of the query tokens.
  std::vector<std::string> terms() const;
};

/// Throws Error{empty_prompt} for blank text.
PromptAnalysis analyze_prompt(std::string_view text, const Gazetteer& g);

/// True when one of the computational trigger phrases occurs as whole words.
bool is_computational(std::string_view text);

struct Passage {
  std::string doc_id;
  std::string text;
  std::string source;
  double score = 0.0;
};

struct Citation {
  std::string doc_id;
  std::string source;

  friend bool operator==(const Citation&, const Citation&) = default;
};

struct ContextPackage {
  std::vector<Passage> passages;  // descending score
  std::vector<Citation> citations;
};

/// The point a query is anchored to: first place with a point (or the mean of
/// all of them in centroid mode), else the first parsed coordinate.
std::optional<GeoPoint> query_anchor(const PromptAnalysis& a, AnchorMode mode);

/// Throws Error{empty_store}, Error{invalid_n} for k = 0. `time` overrides the
/// prompt's time hint.
ContextPackage retrieve_context(const PromptAnalysis& a, const VectorStore& store, std::size_t k,
                                const EngineConfig& cfg, std::optional<std::int64_t> time = std::nullopt);
ContextPackage retrieve_context(const PromptAnalysis& a, const VectorStore& store, std::size_t k,
                                const SpatialEncoder& encoder, std::optional<std::int64_t> time = std::nullopt);

/// "Context:\n[1] text [source: S; doc: D]\n...\n\nQuestion: prompt". Passages
/// are dropped whole from the bottom until the total fits in `max_chars`; the
/// question is always kept.
std::string assemble_prompt(std::string_view user_prompt, const ContextPackage& ctx, std::size_t max_chars);

class LLMClient {
 public:
  virtual ~LLMClient() = default;
  virtual std::string complete(const std::string& augmented_prompt) const = 0;
  virtual bool deterministic() const noexcept = 0;
};

/// Answers from the assembled context alone: "Based on {n} sources: {first
/// sentence of passage 1}" followed by the citation list.
class OfflineResponder final : public LLMClient {
 public:
  static constexpr std::string_view kNoContext = "No supporting context found.";

  std::string complete(const std::string& augmented_prompt) const override;
  bool deterministic() const noexcept override { return true; }
};

struct HttpClientOptions {
  std::string endpoint;  // http://host[:port]/path
  std::string token_env = "GCE_LLM_TOKEN";
  std::chrono::seconds timeout{30};
};

/// POSTs {"prompt": ...} and expects {"response": ...}. The bearer token is
/// read from the environment variable named in the options, if set.
class HttpLLMClient final : public LLMClient {
 public:
  /// Throws Error{client_error} for an unusable endpoint.
  explicit HttpLLMClient(HttpClientOptions options);
  std::string complete(const std::string& augmented_prompt) const override;
  bool deterministic() const noexcept override { return false; }

 private:
  HttpClientOptions options_;
  std::string host_;
  int port_ = 80;
  std::string path_;
};

/// Client output; anything the client throws becomes Error{client_error}.
std::string respond(const std::string& augmented, const LLMClient& client);

/// Text first sentences are cut at: up to and including the first '.', '!'
/// or '?' followed by whitespace or the end.
std::string first_sentence(std::string_view text);

struct QueryResult {
  PromptAnalysis analysis;
  ContextPackage context;
  std::string augmented;
  std::string response;
};

/// JSON body shared by the CLI's --json output and the service:
/// {"response": ..., "citations": [{"doc_id", "source"}], "intent": ...}.
std::string query_result_json(const QueryResult& r);

/// Store, gazetteer and configuration bundled for answering prompts.
class Engine {
 public:
  Engine(EngineConfig cfg, VectorStore store, Gazetteer gazetteer, std::shared_ptr<const LLMClient> client = nullptr);

  const EngineConfig& config() const noexcept { return cfg_; }
  const VectorStore& store() const noexcept { return store_; }
  const Gazetteer& gazetteer() const noexcept { return gazetteer_; }

  /// Computational prompts get a pointer to the compute command and no
  /// retrieval; everything else goes analyze, retrieve, assemble, respond.
  QueryResult query(std::string_view prompt, std::optional<std::size_t> k = std::nullopt,
                    std::optional<std::int64_t> time = std::nullopt) const;

  static constexpr std::string_view kComputeHint =
      "This looks like a computation request. Run the compute command with --op and the input files.";

 private:
  EngineConfig cfg_;
  VectorStore store_;
  Gazetteer gazetteer_;
  SpatialEncoder encoder_;
  std::shared_ptr<const LLMClient> client_;
};

}  // namespace geoctx
