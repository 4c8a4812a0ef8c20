#include "tempnet/portal.hpp"

#include <charconv>
#include <set>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "tempnet/error.hpp"
#include "tempnet/pipeline.hpp"

namespace tempnet {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

PortalConfig parse_portal_config(std::string_view content, const fs::path& base_dir) {
  json doc;
  try {
    doc = json::parse(content);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedInput, std::string("portal config: ") + e.what());
  }
  auto resolve = [&](const std::string& p) {
    fs::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  };
  try {
    PortalConfig cfg;
    cfg.store = resolve(doc.at("store").get<std::string>());
    cfg.window = doc.value("window", 1);
    cfg.seed = doc.value("seed", std::uint64_t{0});
    cfg.page_size = doc.value("page_size", std::size_t{20});
    const std::string listen = doc.value("listen", std::string("127.0.0.1:8080"));
    const auto colon = listen.rfind(':');
    if (colon == std::string::npos) throw Error(ErrorCode::kMalformedInput, "listen must be host:port");
    cfg.host = listen.substr(0, colon);
    cfg.port = std::stoi(listen.substr(colon + 1));
    if (cfg.page_size == 0) throw Error(ErrorCode::kMalformedInput, "page_size must be positive");

    std::set<std::string> ids;
    for (const auto& b : doc.at("books")) {
      BookConfig book;
      book.id = b.at("id").get<std::string>();
      book.title = b.value("title", book.id);
      book.volumes = b.at("volumes").get<std::vector<std::string>>();
      book.graph = b.contains("graph") ? resolve(b.at("graph").get<std::string>())
                                       : cfg.store / "graphs" / (book.id + ".json");
      if (!ids.insert(book.id).second) {
        throw Error(ErrorCode::kMalformedInput, "duplicate book id '" + book.id + "'");
      }
      cfg.books.push_back(std::move(book));
    }
    return cfg;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedInput, std::string("portal config: ") + e.what());
  } catch (const std::logic_error& e) {
    throw Error(ErrorCode::kMalformedInput, std::string("portal config: ") + e.what());
  }
}

PortalConfig load_portal_config(const fs::path& path) {
  return parse_portal_config(read_file(path), path.parent_path());
}

namespace {

std::string_view wire_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnknownBook:
      return "unknown_book";
    case ErrorCode::kEmptyQuery:
      return "empty_query";
    case ErrorCode::kMissingArtifact:
      return "missing_artifact";
    default:
      return "not_found";
  }
}

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyQuery:
      return 400;
    case ErrorCode::kMissingArtifact:
      return 500;
    default:
      return 404;
  }
}

ApiResponse error_response(ErrorCode code, const std::string& message) {
  ordered_json body;
  body["error"] = {{"code", wire_code(code)}, {"message", message}};
  return {http_status(code), body.dump()};
}

ApiResponse ok(const ordered_json& body) { return {200, body.dump()}; }

ordered_json snippets_json(const std::vector<Snippet>& snippets) {
  ordered_json out = ordered_json::array();
  for (const auto& s : snippets) {
    ordered_json spans = ordered_json::array();
    for (const auto& h : s.highlights) spans.push_back({h.start, h.end});
    out.push_back({{"text", s.excerpt}, {"highlights", spans}});
  }
  return out;
}

// 1-based page number; empty means the first page.
std::size_t parse_page(std::string_view page) {
  if (page.empty()) return 1;
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(page.data(), page.data() + page.size(), value);
  if (ec != std::errc() || ptr != page.data() + page.size() || value == 0) {
    throw Error(ErrorCode::kNotFound, "invalid page '" + std::string(page) + "'");
  }
  return value;
}

template <typename Fn>
ApiResponse guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    return error_response(e.code(), e.what());
  }
}

}  // namespace

Portal::Portal(PortalConfig config) : config_(std::move(config)) {
  if (!fs::is_directory(config_.store) || !fs::is_regular_file(config_.store / "meta")) {
    throw Error(ErrorCode::kMissingArtifact, (config_.store / "meta").string());
  }
  store_ = ChapterStore::open(config_.store);
  index_ = InvertedIndex::load(config_.store / kIndexFile);
  for (const auto& book : config_.books) {
    for (const auto& v : book.volumes) {
      if (store_.find_volume(v) == nullptr) {
        throw Error(ErrorCode::kMissingArtifact, "volume '" + v + "' of book '" + book.id + "'");
      }
    }
    if (!fs::is_regular_file(book.graph)) throw Error(ErrorCode::kMissingArtifact, book.graph.string());
    graphs_.emplace(book.id, read_file(book.graph));
  }
  searcher_ = std::make_unique<Searcher>(index_, store_);
}

const BookConfig* Portal::find_book(std::string_view id) const {
  for (const auto& b : config_.books) {
    if (b.id == id) return &b;
  }
  return nullptr;
}

ApiResponse Portal::books() const {
  ordered_json list = ordered_json::array();
  for (const auto& b : config_.books) {
    list.push_back({{"id", b.id}, {"title", b.title}, {"volumes", b.volumes}});
  }
  return ok({{"books", list}});
}

ApiResponse Portal::graph(std::string_view book) const {
  auto it = graphs_.find(book);
  if (it == graphs_.end()) return error_response(ErrorCode::kUnknownBook, std::string(book));
  return {200, it->second};
}

ApiResponse Portal::entity(std::string_view book, std::string_view name, std::string_view page) const {
  return guarded([&] {
    const BookConfig* b = find_book(book);
    if (b == nullptr) throw Error(ErrorCode::kUnknownBook, std::string(book));
    const std::size_t page_no = parse_page(page);
    const auto result = searcher_->entity_occurrences(name, b->volumes);

    // Page over chapters in group order, then regroup the page.
    const std::size_t first = (page_no - 1) * config_.page_size;
    const std::size_t last = first + config_.page_size;
    ordered_json groups = ordered_json::array();
    std::size_t k = 0;
    for (const auto& g : result.groups) {
      ordered_json chapters = ordered_json::array();
      for (const auto& c : g.chapters) {
        if (k >= first && k < last) {
          const Chapter& ch = store_.get(c.chapter_id);
          ordered_json spans = ordered_json::array();
          for (const auto& o : c.occurrences) spans.push_back({o.start, o.end});
          chapters.push_back({{"chapter_id", c.chapter_id},
                              {"volume_id", c.volume_id},
                              {"title", ch.title},
                              {"ordinal", c.ordinal},
                              {"year", c.year},
                              {"occurrences", spans},
                              {"snippets", snippets_json(c.snippets)}});
        }
        ++k;
      }
      if (!chapters.empty()) groups.push_back({{"year", g.year}, {"chapters", chapters}});
    }
    ordered_json body;
    body["book"] = b->id;
    body["entity"] = result.entity;
    body["page"] = page_no;
    body["page_size"] = config_.page_size;
    body["total_chapters"] = result.total_chapters;
    body["total_occurrences"] = result.total_occurrences;
    body["groups"] = groups;
    return ok(body);
  });
}

ApiResponse Portal::search(std::string_view q, std::string_view book, std::string_view page) const {
  return guarded([&] {
    std::vector<std::string> volumes;
    if (!book.empty()) {
      const BookConfig* b = find_book(book);
      if (b == nullptr) throw Error(ErrorCode::kUnknownBook, std::string(book));
      volumes = b->volumes;
    }
    const std::size_t page_no = parse_page(page);
    const auto result =
        searcher_->search(q, config_.page_size, (page_no - 1) * config_.page_size, volumes);
    ordered_json hits = ordered_json::array();
    for (const auto& h : result.hits) {
      const Chapter& ch = store_.get(h.chapter_id);
      const VolumeInfo* v = store_.find_volume(h.volume_id);
      hits.push_back({{"chapter_id", h.chapter_id},
                      {"volume_id", h.volume_id},
                      {"volume_title", v ? v->title : h.volume_id},
                      {"chapter_title", ch.title},
                      {"ordinal", h.ordinal},
                      {"year", h.year},
                      {"score", h.score},
                      {"snippets", snippets_json(h.snippets)}});
    }
    ordered_json body;
    body["query"] = std::string(q);
    body["book"] = book.empty() ? ordered_json(nullptr) : ordered_json(std::string(book));
    body["page"] = page_no;
    body["page_size"] = config_.page_size;
    body["total"] = result.total;
    body["hits"] = hits;
    return ok(body);
  });
}

ApiResponse Portal::chapter(std::string_view chapter_id) const {
  const Chapter* c = store_.find(chapter_id);
  if (c == nullptr) return error_response(ErrorCode::kNotFound, "chapter " + std::string(chapter_id));
  const VolumeInfo* v = store_.find_volume(c->volume_id);
  ordered_json body;
  body["chapter_id"] = c->chapter_id;
  body["volume_id"] = c->volume_id;
  body["volume_title"] = v ? v->title : c->volume_id;
  body["ordinal"] = c->ordinal;
  body["title"] = c->title;
  body["year"] = c->year ? ordered_json(*c->year) : ordered_json(nullptr);
  body["text"] = c->text;
  return ok(body);
}

ApiResponse Portal::route(std::string_view path, const QueryParams& params) const {
  auto param = [&](std::string_view key) -> std::string_view {
    auto it = params.find(key);
    return it == params.end() ? std::string_view{} : std::string_view(it->second);
  };
  if (path == "/api/books") return books();
  if (path == "/api/graph") return graph(param("book"));
  if (path == "/api/entity") return entity(param("book"), param("name"), param("page"));
  if (path == "/api/search") return search(param("q"), param("book"), param("page"));
  constexpr std::string_view kChapterPrefix = "/api/chapter/";
  if (path.starts_with(kChapterPrefix) && path.size() > kChapterPrefix.size()) {
    return chapter(path.substr(kChapterPrefix.size()));
  }
  return error_response(ErrorCode::kNotFound, "no route " + std::string(path));
}

// ---------------------------------------------------------------------------
// HTTP

struct PortalServer::Impl {
  const Portal& portal;
  httplib::Server server;
  std::thread thread;
  int port = 0;

  explicit Impl(const Portal& p) : portal(p) {}
};

PortalServer::PortalServer(const Portal& portal) : impl_(std::make_unique<Impl>(portal)) {
  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    QueryParams params;
    for (const auto& [k, v] : req.params) params.emplace(k, v);  // first value wins
    const ApiResponse r = impl_->portal.route(req.path, params);
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  impl_->server.Get(".*", handler);

  const auto& cfg = portal.config();
  if (cfg.port == 0) {
    impl_->port = impl_->server.bind_to_any_port(cfg.host);
  } else {
    impl_->port = impl_->server.bind_to_port(cfg.host, cfg.port) ? cfg.port : -1;
  }
  if (impl_->port <= 0) {
    throw Error(ErrorCode::kStorageFailure,
                "cannot listen on " + cfg.host + ":" + std::to_string(cfg.port));
  }
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

PortalServer::~PortalServer() { stop(); }

int PortalServer::port() const { return impl_->port; }

void PortalServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

void PortalServer::wait() {
  if (impl_->thread.joinable()) impl_->thread.join();
}

void serve(const PortalConfig& config) {
  const Portal portal(config);
  PortalServer server(portal);
  server.wait();
}

}  // namespace tempnet
