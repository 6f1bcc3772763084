#include "turkann/http.hpp"

#include <charconv>

#include "httplib.h"
#include "turkann/report.hpp"

namespace turkann {
namespace {

constexpr const char* kJson = "application/json";

void reply(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

int status_for(ServiceErrorKind kind) {
  switch (kind) {
    case ServiceErrorKind::UnknownDataset:
    case ServiceErrorKind::UnknownEntry:
    case ServiceErrorKind::UnknownSlot: return 404;
    case ServiceErrorKind::ValidationFailed: return 422;
    case ServiceErrorKind::BadRequest: return 400;
  }
  return 500;
}

Json error_body(const ServiceError& e) {
  Json j;
  j["error"] = to_string(e.kind());
  j["message"] = e.what();
  if (e.code_error()) j["code_error"] = to_string(*e.code_error());
  Json diags = Json::array();
  for (const auto& d : e.diagnostics()) diags.push_back(to_json(d));
  j["diagnostics"] = diags;
  return j;
}

std::optional<std::string> param(const httplib::Request& req, const char* name) {
  if (!req.has_param(name)) return std::nullopt;
  return req.get_param_value(name);
}

std::size_t size_param(const httplib::Request& req, const char* name, std::size_t fallback) {
  const auto text = param(req, name);
  if (!text) return fallback;
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(text->data(), text->data() + text->size(), value);
  if (ec != std::errc() || ptr != text->data() + text->size())
    throw ServiceError(ServiceErrorKind::BadRequest, std::string("'") + name + "' must be a non-negative integer");
  return value;
}

bool bool_param(const httplib::Request& req, const char* name) {
  const auto text = param(req, name);
  if (!text || *text == "false" || *text == "0") return false;
  if (*text == "true" || *text == "1" || text->empty()) return true;
  throw ServiceError(ServiceErrorKind::BadRequest, std::string("'") + name + "' must be true or false");
}

std::string required(const httplib::Request& req, const char* name) {
  auto value = param(req, name);
  if (!value || value->empty())
    throw ServiceError(ServiceErrorKind::BadRequest, std::string("missing parameter '") + name + "'");
  return *value;
}

SimilarityConfig similarity_params(const httplib::Request& req) {
  SimilarityConfig cfg;
  if (auto tau = param(req, "tau")) {
    try {
      std::size_t used = 0;
      cfg.threshold = std::stod(*tau, &used);
      if (used != tau->size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw ServiceError(ServiceErrorKind::BadRequest, "'tau' must be a number in [0, 1]");
    }
  }
  if (auto metric = param(req, "metric")) {
    auto m = metric_from_string(*metric);
    if (!m)
      throw ServiceError(ServiceErrorKind::BadRequest,
                         "'metric' must be normalized-levenshtein or lcsr");
    cfg.metric = *m;
  }
  return cfg;
}

Json session_json(const SessionState& s) {
  Json j;
  j["dataset_id"] = s.dataset_id;
  j["annotator_id"] = s.annotator_id;
  j["cursor"] = s.cursor;
  j["completed"] = s.completed;
  j["total"] = s.total;
  return j;
}

// Runs a handler, translating service errors into JSON error responses.
template <typename F>
httplib::Server::Handler guarded(F&& f) {
  return [f = std::forward<F>(f)](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const ServiceError& e) {
      Json body = error_body(e);
      if (req.method == "PUT") body["accepted"] = false;
      reply(res, status_for(e.kind()), body);
    } catch (const std::exception& e) {
      reply(res, 500, Json{{"error", "Internal"}, {"message", e.what()}});
    }
  };
}

}  // namespace

struct HttpServer::Impl {
  explicit Impl(AnnotationService& s) : service(s) {}
  AnnotationService& service;
  httplib::Server server;
};

HttpServer::HttpServer(AnnotationService& service) : impl_(std::make_unique<Impl>(service)) {
  auto& svc = impl_->service;
  auto& srv = impl_->server;

  srv.Get("/datasets", guarded([&svc](const httplib::Request&, httplib::Response& res) {
            Json list = Json::array();
            for (const auto& d : svc.list_datasets())
              list.push_back({{"id", d.id}, {"entries", d.entries}});
            reply(res, 200, Json{{"datasets", list}});
          }));

  srv.Get(R"(/datasets/([^/]+)/entries)",
          guarded([&svc](const httplib::Request& req, httplib::Response& res) {
            EntryFilter filter;
            filter.unannotated_by = param(req, "unannotated_by");
            const auto page = svc.list_entries(req.matches[1], size_param(req, "page", 0),
                                               size_param(req, "page_size", kDefaultPageSize),
                                               filter);
            Json entries = Json::array();
            for (const auto& status : page.entries) {
              Json e = to_json(*status.entry);
              Json done = Json::object();
              for (const auto& [annotator, complete] : status.complete) done[annotator] = complete;
              e["completion"] = done;
              entries.push_back(e);
            }
            reply(res, 200,
                  Json{{"dataset_id", page.dataset_id},
                       {"page", page.page},
                       {"page_size", page.page_size},
                       {"total", page.total},
                       {"entries", entries}});
          }));

  srv.Put("/annotations", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
            const std::string& ds = svc.resolve_dataset(param(req, "dataset"));
            const auto result = svc.submit_annotation_line(ds, req.body);
            Json diags = Json::array();
            for (const auto& d : result.diagnostics) diags.push_back(to_json(d));
            reply(res, 200,
                  Json{{"accepted", true},
                       {"dataset_id", ds},
                       {"record", to_json(result.record)},
                       {"diagnostics", diags}});
          }));

  srv.Get("/agreement", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
            const std::string& ds = svc.resolve_dataset(param(req, "dataset"));
            KappaOptions kappa;
            if (auto ci = param(req, "ci")) {
              auto method = ci_method_from_string(*ci);
              if (!method)
                throw ServiceError(ServiceErrorKind::BadRequest,
                                   "'ci' must be large-sample or fleiss-cohen-everitt");
              kappa.ci_method = *method;
            }
            const auto report = svc.agreement_report(ds, required(req, "a"), required(req, "b"),
                                                     bool_param(req, "restricted"), kappa);
            Json body = to_json(report, svc.reported_values(ds));
            body["dataset_id"] = ds;
            reply(res, 200, body);
          }));

  srv.Get("/suggest", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
            const std::string& ds = svc.resolve_dataset(param(req, "dataset"));
            const std::string entry_id = required(req, "entry");
            const SimilarityConfig cfg = similarity_params(req);
            const auto partition = svc.suggest(ds, entry_id, cfg);
            // Prefill classes: canonical numbering by first slot of each block.
            Json classes = Json::array();
            const auto& blocks = partition.blocks();
            for (std::size_t b = 0; b < blocks.size(); ++b) {
              for (const Slot& s : blocks[b]) {
                classes.push_back({{"language", language_name(s.language)},
                                   {"lexeme_index", s.lexeme_index},
                                   {"cognate_class", b + 1}});
              }
            }
            Json body;
            body["dataset_id"] = ds;
            body["entry_id"] = entry_id;
            body["threshold"] = cfg.threshold;
            body["metric"] = to_string(cfg.metric);
            body["partition"] = to_json(partition);
            body["suggested_classes"] = classes;
            body["persisted"] = false;
            reply(res, 200, body);
          }));

  srv.Get(R"(/progress/([^/]+))", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
            const std::string& ds = svc.resolve_dataset(param(req, "dataset"));
            reply(res, 200, session_json(svc.progress(ds, req.matches[1])));
          }));
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port < 0 || port > 65535) throw std::runtime_error("port must be in 0..65535");
  int bound = port == 0 ? impl_->server.bind_to_any_port(host) : port;
  if (port != 0 && !impl_->server.bind_to_port(host, port)) bound = -1;
  if (bound < 0) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
  return bound;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_->server.is_running()) impl_->server.stop();
}

bool HttpServer::is_running() const { return impl_->server.is_running(); }

}  // namespace turkann
