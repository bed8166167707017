#pragma once

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

#include "vague/explorer.h"
#include "vague/trace.h"

namespace vague {

struct ApiResponse {
  int status = 200;
  std::string body;  // JSON
};

// JSON handlers over one immutable trace. Every handler is a pure function of
// the trace, the session defaults and the request, so identical requests
// give byte-identical bodies.
class ExplorerApi {
 public:
  ExplorerApi(const HiddenTrace& trace, double default_threshold = kDefaultThreshold);

  // GET /api/meta
  ApiResponse meta() const;
  // GET /api/tokens?offset=&count=
  ApiResponse tokens(std::size_t offset, std::size_t count) const;
  // POST /api/select {"phrase":[a,b], "context":[a,b]?, "tau"?, "mode"?}
  ApiResponse select(std::string_view body) const;
  // POST /api/match {"query_dims":[...], "tau"?, "max_len"?, "top_k"?, "within_sentence"?}
  ApiResponse match(std::string_view body) const;

  const HiddenTrace& trace() const { return trace_; }
  double default_threshold() const { return default_threshold_; }

 private:
  const HiddenTrace& trace_;
  double default_threshold_;
};

// Serialized match list shared by the HTTP API and the CLI.
std::string match_response_json(const HiddenTrace& trace, std::span<const MatchResult> matches,
                                std::size_t query_size);

class BindError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// HTTP/1.1 front end for an ExplorerApi, with CORS headers for a local UI and
// optional static file serving.
class ExplorerServer {
 public:
  explicit ExplorerServer(const ExplorerApi& api, std::string static_dir = {});
  ~ExplorerServer();
  ExplorerServer(const ExplorerServer&) = delete;
  ExplorerServer& operator=(const ExplorerServer&) = delete;

  // Returns the bound port (port 0 picks a free one). Throws BindError.
  int bind(const std::string& host, int port);
  // Serves until stop(); requires a successful bind().
  void listen();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace vague
