#include "anxmap/service.hpp"

#include <charconv>

#include "httplib.h"

#include "anxmap/error.hpp"
#include "anxmap/json_io.hpp"

namespace anxmap {

namespace {

using json = json_io::json;

ApiResponse ok(const json& body) { return {200, body.dump()}; }

ApiResponse from_error(const Error& e) {
  switch (e.code()) {
    case ErrorCode::Io:
    case ErrorCode::UnreadableSource:
      return api_error(500, to_string(e.code()), e.what());
    default:
      return api_error(400, to_string(e.code()), e.what());
  }
}

// A 400 whose code has no ErrorCode counterpart (BadCell, BadPage limits).
struct ParamError {
  std::string code;
  std::string message;
};

std::optional<std::string_view> param(const QueryParams& params, std::string_view key) {
  auto it = params.find(key);
  if (it == params.end()) return std::nullopt;
  return std::string_view(it->second);
}

std::int64_t parse_int(std::string_view text, std::string_view code, std::string_view key) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ParamError{std::string(code), std::string(key) + " must be an integer"};
  }
  return v;
}

Zoom zoom_param(const QueryParams& params) {
  auto z = param(params, "zoom");
  return z ? parse_zoom(*z) : Zoom::Province;
}

// nullopt when the store is empty and the range was left open.
std::optional<TimeRange> range_param(const QueryParams& params, const Snapshot& snap) {
  const auto full = snap.full_range();
  auto from_text = param(params, "from");
  auto to_text = param(params, "to");
  std::optional<Instant> from = from_text ? std::optional(parse_utc(*from_text)) : std::nullopt;
  std::optional<Instant> to = to_text ? std::optional(parse_utc(*to_text)) : std::nullopt;
  if (!from && full) from = full->from;
  if (!to && full) to = full->to;
  if (!from || !to) return std::nullopt;
  return TimeRange::make(*from, *to);
}

std::optional<GridCell> cell_param(const QueryParams& params, Zoom zoom, bool required) {
  auto row = param(params, "row");
  auto col = param(params, "col");
  if (!row && !col && !required) return std::nullopt;
  if (!row || !col) throw ParamError{"BadCell", "row and col must be given together"};
  return GridCell{zoom, parse_int(*row, "BadCell", "row"), parse_int(*col, "BadCell", "col")};
}

template <typename Fn>
ApiResponse guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const ParamError& e) {
    return api_error(400, e.code, e.message);
  } catch (const Error& e) {
    return from_error(e);
  } catch (const std::exception& e) {
    return api_error(500, "Internal", e.what());
  }
}

ApiResponse not_ready() { return api_error(503, "NotReady", "store snapshot not loaded yet"); }

}  // namespace

ApiResponse api_error(int status, std::string_view code, std::string_view message) {
  json err;
  err["status"] = status;
  err["code"] = code;
  err["message"] = message;
  json body;
  body["error"] = std::move(err);
  return {status, body.dump()};
}

Service::Service(std::shared_ptr<const Store> store, std::shared_ptr<const ClassifierModel> model)
    : store_(std::move(store)), model_(std::move(model)) {}

ApiResponse Service::meta() const {
  auto snap = store_->snapshot();
  if (!snap) return not_ready();
  return ok(json_io::meta(snap->meta(), snap->grid(), model_->config()));
}

ApiResponse Service::regions(const QueryParams& params) const {
  return guarded([&] {
    auto snap = store_->snapshot();
    if (!snap) return not_ready();
    const Zoom zoom = zoom_param(params);
    const auto range = range_param(params, *snap);
    if (!range) return ok(json::array());
    return ok(json_io::regions(snap->aggregate(*range, zoom)));
  });
}

ApiResponse Service::tweets(const QueryParams& params) const {
  return guarded([&] {
    auto snap = store_->snapshot();
    if (!snap) return not_ready();
    const Zoom zoom = zoom_param(params);
    const GridCell cell = *cell_param(params, zoom, true);
    const auto offset_text = param(params, "offset");
    const auto limit_text = param(params, "limit");
    const std::int64_t offset = offset_text ? parse_int(*offset_text, "BadPage", "offset") : 0;
    const std::int64_t limit =
        limit_text ? parse_int(*limit_text, "BadPage", "limit") : kDefaultPageLimit;
    if (limit > kMaxPageLimit) {
      throw ParamError{"BadPage", "limit must be at most " + std::to_string(kMaxPageLimit)};
    }
    if (offset < 0 || limit < 0) throw ParamError{"BadPage", "offset and limit must be non-negative"};
    const auto q = param(params, "q");
    const auto filter = q ? parse_word_query(*q) : std::vector<WordQuery>{};
    const auto range = range_param(params, *snap);
    if (!range) {
      MessagePage empty;
      empty.region = cell.id();
      empty.offset = offset;
      empty.limit = limit;
      return ok(json_io::message_page(empty));
    }
    return ok(json_io::message_page(snap->region_messages(cell, *range, filter, offset, limit)));
  });
}

ApiResponse Service::wordcloud(const QueryParams& params) const {
  return guarded([&] {
    auto snap = store_->snapshot();
    if (!snap) return not_ready();
    const Zoom zoom = zoom_param(params);
    const auto cell = cell_param(params, zoom, false);
    const auto k_text = param(params, "k");
    const std::int64_t k = k_text ? parse_int(*k_text, "InvalidArgument", "k") : kDefaultCloudSize;
    if (k < 1) throw ParamError{"InvalidArgument", "k must be at least 1"};
    const auto range = range_param(params, *snap);
    if (!range) return ok(json::array());
    return ok(json_io::word_cloud(snap->word_cloud(cell, *range, k)));
  });
}

ApiResponse Service::classify(std::string_view body) const {
  return guarded([&] {
    json req;
    try {
      req = json::parse(body);
    } catch (const nlohmann::json::parse_error&) {
      return api_error(400, "BadRequest", "body must be a JSON object");
    }
    if (!req.is_object()) return api_error(400, "BadRequest", "body must be a JSON object");
    const bool has_text = req.contains("text");
    const bool has_tokens = req.contains("tokens");
    if (has_text == has_tokens) {
      return api_error(400, "BadRequest", "exactly one of text or tokens is required");
    }
    double threshold = model_->config().threshold;
    Smoothing smoothing = model_->config().smoothing;
    if (req.contains("threshold")) {
      if (!req["threshold"].is_number() || !(req["threshold"].get<double>() > 0.0)) {
        return api_error(400, "BadRequest", "threshold must be a positive number");
      }
      threshold = req["threshold"].get<double>();
    }
    if (req.contains("smoothing")) {
      if (!req["smoothing"].is_boolean()) return api_error(400, "BadRequest", "smoothing must be boolean");
      smoothing = req["smoothing"].get<bool>() ? Smoothing::On : Smoothing::Off;
    }

    TokenSequence seq;
    if (has_text) {
      if (!req["text"].is_string()) return api_error(400, "BadRequest", "text must be a string");
      seq = fallback_tokenize(req["text"].get<std::string>());
    } else {
      const auto& toks = req["tokens"];
      if (toks.is_string()) {
        seq = parse_tagged_text(toks.get<std::string>());
      } else if (toks.is_array()) {
        for (const auto& pair : toks) {
          if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() || !pair[1].is_string()) {
            return api_error(400, "BadRequest", "tokens must be [surface, pos] pairs");
          }
          Token tok{pair[0].get<std::string>(), pair[1].get<std::string>()};
          if (tok.surface.empty() || !is_valid_pos(tok.pos)) {
            throw Error(ErrorCode::MalformedToken, "invalid token", seq.size());
          }
          seq.push_back(std::move(tok));
        }
      } else {
        return api_error(400, "BadRequest", "tokens must be an array or a tagged string");
      }
    }
    seq = filter_significant(seq, model_->config().pos_filter);
    return ok(json_io::classification(classify_ratio(*model_, seq, threshold, smoothing)));
  });
}

ApiResponse Service::handle(std::string_view method, std::string_view path, const QueryParams& params,
                            std::string_view body) const {
  if (method == "GET") {
    if (path == "/api/meta") return meta();
    if (path == "/api/regions") return regions(params);
    if (path == "/api/tweets") return tweets(params);
    if (path == "/api/wordcloud") return wordcloud(params);
  } else if (method == "POST" && path == "/api/classify") {
    return classify(body);
  }
  return api_error(404, "NotFound", "no such endpoint");
}

std::pair<std::string, int> parse_bind_address(std::string_view address) {
  const auto colon = address.rfind(':');
  if (colon == std::string_view::npos || colon == 0) {
    throw Error(ErrorCode::InvalidArgument, "bind address must be host:port");
  }
  int port = -1;
  const auto port_text = address.substr(colon + 1);
  auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
  if (ec != std::errc{} || ptr != port_text.data() + port_text.size() || port < 0 || port > 65535) {
    throw Error(ErrorCode::InvalidArgument, "bad port in bind address");
  }
  return {std::string(address.substr(0, colon)), port};
}

// --- HTTP -----------------------------------------------------------------

struct HttpServer::Impl {
  const Service& service;
  ServerOptions options;
  httplib::Server server;
  bool bound = false;

  Impl(const Service& s, ServerOptions o) : service(s), options(std::move(o)) {}

  static QueryParams params_of(const httplib::Request& req) {
    QueryParams out;
    // first occurrence wins
    for (const auto& [k, v] : req.params) out.emplace(k, v);
    return out;
  }

  void reply(httplib::Response& res, const ApiResponse& api) const {
    res.status = api.status;
    res.set_content(api.body, "application/json");
    if (!options.cors_origin.empty()) {
      res.set_header("Access-Control-Allow-Origin", options.cors_origin);
    }
  }

  void routes() {
    // SO_REUSEPORT would let a second server share an occupied port
    server.set_socket_options([](socket_t sock) {
      int yes = 1;
      ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
    });
    server.set_tcp_nodelay(true);
    for (const char* path : {"/api/meta", "/api/regions", "/api/tweets", "/api/wordcloud"}) {
      server.Get(path, [this](const httplib::Request& req, httplib::Response& res) {
        reply(res, service.handle("GET", req.path, params_of(req), {}));
      });
    }
    server.Post("/api/classify", [this](const httplib::Request& req, httplib::Response& res) {
      reply(res, service.classify(req.body));
    });
    server.Options("/api/classify", [this](const httplib::Request&, httplib::Response& res) {
      res.status = 204;
      if (!options.cors_origin.empty()) {
        res.set_header("Access-Control-Allow-Origin", options.cors_origin);
        res.set_header("Access-Control-Allow-Methods", "POST, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
      }
    });
    if (options.ui_dir) server.set_mount_point("/", options.ui_dir->string());
    server.set_error_handler([this](const httplib::Request& req, httplib::Response& res) {
      if (res.status == 404 && req.path.rfind("/api/", 0) == 0) {
        reply(res, api_error(404, "NotFound", "no such endpoint"));
      }
    });
    if (options.logger) {
      server.set_logger([this](const httplib::Request& req, const httplib::Response& res) {
        std::string line = req.method + " " + req.path;
        if (!req.params.empty()) {
          char sep = '?';
          for (const auto& [k, v] : req.params) {
            line += sep + k + "=" + v;
            sep = '&';
          }
        }
        line += " " + std::to_string(res.status) + " " + std::to_string(res.body.size()) + "B";
        options.logger(line);
      });
    }
  }
};

HttpServer::HttpServer(const Service& service, ServerOptions options)
    : impl_(std::make_unique<Impl>(service, std::move(options))) {
  impl_->routes();
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind() {
  auto& o = impl_->options;
  int port = -1;
  if (o.port == 0) {
    port = impl_->server.bind_to_any_port(o.host);
  } else if (impl_->server.bind_to_port(o.host, o.port)) {
    port = o.port;
  }
  if (port <= 0) {
    throw Error(ErrorCode::Io, "cannot bind " + o.host + ":" + std::to_string(o.port));
  }
  impl_->bound = true;
  return port;
}

void HttpServer::listen() {
  if (!impl_->bound) bind();
  impl_->server.listen_after_bind();
}

void HttpServer::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

bool HttpServer::running() const { return impl_->server.is_running(); }

}  // namespace anxmap
