#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "tempnet/corpus.hpp"
#include "tempnet/search.hpp"

namespace tempnet {

struct BookConfig {
  std::string id;
  std::string title;
  std::vector<std::string> volumes;
  std::filesystem::path graph;  // exported graph document
};

struct PortalConfig {
  std::filesystem::path store;
  std::vector<BookConfig> books;
  int window = 1;
  std::uint64_t seed = 0;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::size_t page_size = 20;
};

/// Reads a JSON config. Relative paths resolve against the file's directory;
/// a book without a `graph` path uses `<store>/graphs/<id>.json`.
PortalConfig load_portal_config(const std::filesystem::path& path);
PortalConfig parse_portal_config(std::string_view content, const std::filesystem::path& base_dir);

struct ApiResponse {
  int status = 200;
  std::string body;
};

using QueryParams = std::map<std::string, std::string, std::less<>>;

/// Read-only API over the build artifacts. Every payload is compact JSON
/// with stable field order; errors are
///
///   {"error": {"code": <unknown_book|empty_query|missing_artifact|not_found>,
///              "message": ...}}
///
/// All methods are const and safe to call from many threads.
class Portal {
 public:
  /// Loads the store, index and graph documents. Throws MissingArtifact
  /// naming the first absent file.
  explicit Portal(PortalConfig config);

  ApiResponse books() const;
  ApiResponse graph(std::string_view book) const;
  ApiResponse entity(std::string_view book, std::string_view name, std::string_view page) const;
  ApiResponse search(std::string_view q, std::string_view book, std::string_view page) const;
  ApiResponse chapter(std::string_view chapter_id) const;

  /// Dispatches a GET by path; unknown paths give not_found.
  ApiResponse route(std::string_view path, const QueryParams& params) const;

  const PortalConfig& config() const { return config_; }

 private:
  const BookConfig* find_book(std::string_view id) const;

  PortalConfig config_;
  ChapterStore store_;
  InvertedIndex index_;
  std::unique_ptr<Searcher> searcher_;
  std::map<std::string, std::string, std::less<>> graphs_;
};

/// HTTP server on a background thread.
class PortalServer {
 public:
  /// Binds config.host:config.port (port 0 picks a free port) and starts
  /// serving.
  explicit PortalServer(const Portal& portal);
  ~PortalServer();
  PortalServer(const PortalServer&) = delete;
  PortalServer& operator=(const PortalServer&) = delete;

  int port() const;
  void stop();
  /// Blocks until the server stops.
  void wait();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Blocks serving requests until the process is stopped.
void serve(const PortalConfig& config);

}  // namespace tempnet
