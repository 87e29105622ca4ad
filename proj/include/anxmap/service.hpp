#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "anxmap/classifier.hpp"
#include "anxmap/geostore.hpp"

namespace anxmap {

struct ApiResponse {
  int status = 200;
  std::string body;  // always JSON
};

using QueryParams = std::map<std::string, std::string, std::less<>>;

inline constexpr std::int64_t kDefaultPageLimit = 50;
inline constexpr std::int64_t kMaxPageLimit = 500;
inline constexpr std::int64_t kDefaultCloudSize = 50;

// Read-only query layer. Each call binds one store snapshot for its duration,
// so handlers can run concurrently with ingestion and with each other.
class Service {
 public:
  Service(std::shared_ptr<const Store> store, std::shared_ptr<const ClassifierModel> model);

  ApiResponse meta() const;
  ApiResponse regions(const QueryParams& params) const;
  ApiResponse tweets(const QueryParams& params) const;
  ApiResponse wordcloud(const QueryParams& params) const;
  ApiResponse classify(std::string_view body) const;

  // Dispatches on path; unknown paths give 404.
  ApiResponse handle(std::string_view method, std::string_view path, const QueryParams& params,
                     std::string_view body) const;

 private:
  std::shared_ptr<const Store> store_;
  std::shared_ptr<const ClassifierModel> model_;
};

ApiResponse api_error(int status, std::string_view code, std::string_view message);

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::string cors_origin;
  std::optional<std::filesystem::path> ui_dir;
  // Called once per request with a ready-made log line.
  std::function<void(const std::string&)> logger;
};

// "host:port" -> (host, port). Throws InvalidArgument.
std::pair<std::string, int> parse_bind_address(std::string_view address);

// HTTP front end over a Service.
class HttpServer {
 public:
  HttpServer(const Service& service, ServerOptions options);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Binds the socket; returns the bound port. Throws Io when the address is taken.
  int bind();
  // Blocks until stop().
  void listen();
  void stop();
  bool running() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace anxmap
