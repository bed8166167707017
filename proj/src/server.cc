#include "vague/server.h"

#include <httplib.h>

#include "json.hpp"
#include "vague/error.h"

namespace vague {
namespace {

using nlohmann::json;

ApiResponse ok(const json& j) { return {200, j.dump()}; }

ApiResponse bad_request(const std::string& message) { return {400, json{{"error", message}}.dump()}; }

TokenSpan parse_span(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number_unsigned() || !v[1].is_number_unsigned()) {
    throw PreconditionError(std::string("'") + key + "' must be a pair of non-negative integers");
  }
  return {v[0].get<std::size_t>(), v[1].get<std::size_t>()};
}

double threshold_field(const json& j, double fallback) {
  if (!j.contains("tau") || j["tau"].is_null()) return fallback;
  if (!j["tau"].is_number()) throw PreconditionError("'tau' must be a number");
  return j["tau"].get<double>();
}

std::size_t size_field(const json& j, const char* key, std::size_t fallback) {
  if (!j.contains(key) || j[key].is_null()) return fallback;
  if (!j[key].is_number_unsigned()) throw PreconditionError(std::string("'") + key + "' must be a non-negative integer");
  return j[key].get<std::size_t>();
}

}  // namespace

ExplorerApi::ExplorerApi(const HiddenTrace& trace, double default_threshold)
    : trace_(trace), default_threshold_(default_threshold) {
  if (!(default_threshold > 0.0 && default_threshold < 1.0)) {
    throw PreconditionError("default threshold must lie in (0, 1)");
  }
}

ApiResponse ExplorerApi::meta() const {
  return ok({{"token_count", trace_.size()},
             {"l", trace_.dim()},
             {"vague_token_count", trace_.vague_count()},
             {"format_version", "VLTRACE1"},
             {"default_tau", default_threshold_}});
}

ApiResponse ExplorerApi::tokens(std::size_t offset, std::size_t count) const {
  if (offset >= trace_.size()) {
    return bad_request("offset " + std::to_string(offset) + " out of range [0, " + std::to_string(trace_.size()) + ")");
  }
  const auto end = offset + std::min(count, trace_.size() - offset);
  json items = json::array();
  for (auto t = offset; t < end; ++t) {
    const auto& tok = trace_.token(t);
    const auto vec = trace_.vector(t);
    items.push_back({{"index", t},
                     {"surface", tok.surface},
                     {"is_vague", tok.is_vague},
                     {"is_boundary", tok.is_boundary},
                     {"vector", std::vector<float>(vec.begin(), vec.end())}});
  }
  return ok({{"offset", offset}, {"count", end - offset}, {"tokens", items}});
}

ApiResponse ExplorerApi::select(std::string_view body) const {
  try {
    const auto req = json::parse(body);
    Selection sel;
    sel.phrase = parse_span(req, "phrase");
    sel.context = req.contains("context") && !req["context"].is_null() ? parse_span(req, "context") : sel.phrase;
    sel.threshold = threshold_field(req, default_threshold_);
    const auto mode = parse_mode(req.value("mode", std::string("intersection")));
    const auto r = query_dimensions(trace_, sel, mode);
    return ok({{"s1", r.phrase_dims},
               {"s2", r.context_dims},
               {"query_dims", r.query},
               {"tau", sel.threshold},
               {"mode", mode_name(mode)}});
  } catch (const json::exception& e) {
    return bad_request(std::string("malformed request: ") + e.what());
  } catch (const std::invalid_argument& e) {
    return bad_request(e.what());
  }
}

std::string match_response_json(const HiddenTrace& trace, std::span<const MatchResult> matches,
                                 std::size_t query_size) {
  json items = json::array();
  for (const auto& m : matches) {
    json surfaces = json::array();
    for (auto t = m.region.first; t <= m.region.last; ++t) surfaces.push_back(trace.token(t).surface);
    items.push_back({{"rank", m.rank},
                     {"span", {m.region.first, m.region.last}},
                     {"length", m.length()},
                     {"extra_on_count", m.extra_on_count},
                     {"query_size", query_size},
                     {"truncated", m.truncated},
                     {"text", span_text(trace, m.region)},
                     {"tokens", surfaces}});
  }
  json hist = json::array();
  for (const auto& [len, count] : length_histogram(matches)) hist.push_back({{"length", len}, {"count", count}});
  return json{{"matches", items}, {"length_histogram", hist}}.dump();
}

ApiResponse ExplorerApi::match(std::string_view body) const {
  try {
    const auto req = json::parse(body);
    const auto& dims = req.at("query_dims");
    if (!dims.is_array()) throw PreconditionError("'query_dims' must be an array");
    DimensionSet query;
    for (const auto& d : dims) {
      if (!d.is_number_unsigned()) throw PreconditionError("'query_dims' entries must be non-negative integers");
      query.push_back(d.get<std::size_t>());
    }
    std::sort(query.begin(), query.end());
    query.erase(std::unique(query.begin(), query.end()), query.end());
    MatchOptions opts;
    opts.threshold = threshold_field(req, default_threshold_);
    opts.max_len = size_field(req, "max_len", opts.max_len);
    opts.top_k = size_field(req, "top_k", opts.top_k);
    opts.within_sentence = req.value("within_sentence", false);
    const auto matches = find_matches(trace_, query, opts);
    return {200, match_response_json(trace_, matches, query.size())};
  } catch (const json::exception& e) {
    return bad_request(std::string("malformed request: ") + e.what());
  } catch (const std::invalid_argument& e) {
    return bad_request(e.what());
  }
}

struct ExplorerServer::Impl {
  explicit Impl(const ExplorerApi& a) : api(a) {}
  const ExplorerApi& api;
  httplib::Server http;
};

ExplorerServer::ExplorerServer(const ExplorerApi& api, std::string static_dir)
    : impl_(std::make_unique<Impl>(api)) {
  auto& http = impl_->http;
  const auto& a = impl_->api;
  auto reply = [](httplib::Response& res, const ApiResponse& r) {
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  // The library default also sets SO_REUSEPORT, which lets a second server
  // share a busy port instead of failing.
  http.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
  });
  http.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                            {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                            {"Access-Control-Allow-Headers", "Content-Type"}});
  http.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  http.Get("/api/meta", [&a, reply](const httplib::Request&, httplib::Response& res) { reply(res, a.meta()); });
  http.Get("/api/tokens", [&a, reply](const httplib::Request& req, httplib::Response& res) {
    std::size_t offset = 0;
    std::size_t count = 100;
    try {
      if (req.has_param("offset")) offset = std::stoull(req.get_param_value("offset"));
      if (req.has_param("count")) count = std::stoull(req.get_param_value("count"));
    } catch (const std::exception&) {
      reply(res, {400, nlohmann::json{{"error", "offset and count must be non-negative integers"}}.dump()});
      return;
    }
    reply(res, a.tokens(offset, count));
  });
  http.Post("/api/select",
            [&a, reply](const httplib::Request& req, httplib::Response& res) { reply(res, a.select(req.body)); });
  http.Post("/api/match",
            [&a, reply](const httplib::Request& req, httplib::Response& res) { reply(res, a.match(req.body)); });
  if (!static_dir.empty() && !http.set_mount_point("/", static_dir)) {
    throw DataError("static directory '" + static_dir + "' does not exist");
  }
}

ExplorerServer::~ExplorerServer() { stop(); }

int ExplorerServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = impl_->http.bind_to_any_port(host);
    if (bound <= 0) throw BindError("cannot bind " + host + " to any port");
    return bound;
  }
  if (!impl_->http.bind_to_port(host, port)) {
    throw BindError("cannot bind " + host + ":" + std::to_string(port) + " (address in use?)");
  }
  return port;
}

void ExplorerServer::listen() { impl_->http.listen_after_bind(); }

void ExplorerServer::stop() {
  if (impl_) impl_->http.stop();
}

void ExplorerServer::wait_until_ready() const { impl_->http.wait_until_ready(); }

}  // namespace vague
