#pragma once

// HTTP endpoints over one immutable dataset.
//
//   GET  /api/health       200 "ok"
//   GET  /api/dataset      canonical dataset document
//   POST /api/score        {"weights": {...}, "dataset"?: id | document, "view"?: ...}
//   POST /api/sensitivity  {"baseline"?: {...}, "variants": [{...}], "level"?: "ivmf" | "tm"}
//
// Handlers are plain const member functions so they can be exercised without
// a socket; mount() wires them into an httplib server.

#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "httplib.h"

#include "ivmf/core_model.hpp"
#include "ivmf/dataset_io.hpp"
#include "ivmf/error.hpp"
#include "ivmf/report.hpp"
#include "ivmf/scoring.hpp"
#include "ivmf/stats.hpp"

namespace ivmf {

inline constexpr int default_service_port = 8642;
inline constexpr std::string_view json_content_type = "application/json; charset=utf-8";

struct Response {
  int status = 200;
  std::string body;
  std::string content_type = std::string(json_content_type);
};

namespace detail {

inline Response error_response(int status, std::string_view code, const std::string& message,
                               const std::vector<Diagnostic>& diagnostics = {}) {
  json list = json::array();
  for (const auto& d : diagnostics) list.push_back({{"field", d.location}, {"message", d.message}});
  json body = {{"error", code}, {"message", message}, {"diagnostics", std::move(list)}};
  return {status, body.dump(2) + "\n"};
}

inline Response error_response(const Error& e) {
  std::vector<Diagnostic> diagnostics;
  if (const auto* doc = dynamic_cast<const DocumentError*>(&e)) diagnostics = doc->diagnostics();
  const int status = e.code() == Errc::too_few_protocols ? 422 : 400;
  std::string message = e.what();
  if (auto nl = message.find('\n'); nl != std::string::npos) message.resize(nl);
  return error_response(status, errc_name(e.code()), message, diagnostics);
}

inline bool only_too_few(const DocumentError& e) {
  for (const auto& d : e.diagnostics()) {
    if (d.message != "at least 2 protocols are required") return false;
  }
  return !e.diagnostics().empty();
}

inline json parse_body(const std::string& body) {
  json doc = parse_json_text(body);
  if (!doc.is_object()) {
    throw DocumentError(Errc::schema_violation, {{"", "request body must be an object"}});
  }
  return doc;
}

inline void reject_unknown_fields(const json& body, std::initializer_list<std::string_view> allowed) {
  std::vector<Diagnostic> diagnostics;
  for (const auto& [key, _] : body.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      diagnostics.push_back({key, "unknown field"});
    }
  }
  if (!diagnostics.empty()) throw DocumentError(Errc::schema_violation, std::move(diagnostics));
}

}  // namespace detail

class Service {
 public:
  explicit Service(Dataset dataset, std::string dataset_id = "ivmf-2024")
      : dataset_(std::move(dataset)),
        dataset_id_(std::move(dataset_id)),
        dataset_document_(serialize_dataset(dataset_)) {}

  [[nodiscard]] const Dataset& dataset() const { return dataset_; }
  [[nodiscard]] const std::string& dataset_id() const { return dataset_id_; }

  [[nodiscard]] Response health() const { return {200, "ok", "text/plain; charset=utf-8"}; }

  [[nodiscard]] Response get_dataset() const { return {200, dataset_document_}; }

  [[nodiscard]] Response score(const std::string& body) const {
    try {
      const json request = detail::parse_body(body);
      detail::reject_unknown_fields(request, {"weights", "dataset", "view"});
      auto it = request.find("weights");
      if (it == request.end()) {
        throw DocumentError(Errc::schema_violation, {{"weights", "required field missing"}});
      }
      const WeightScheme scheme = weights_from_json(*it, "weights");
      TableView view = TableView::ivmf_rank;
      if (auto v = request.find("view"); v != request.end()) {
        const std::string name = v->is_string() ? v->get<std::string>() : "";
        if (name == "tm") {
          view = TableView::tm_rank;
        } else if (name == "breakdown") {
          view = TableView::breakdown;
        } else if (name != "ivmf") {
          throw DocumentError(Errc::schema_violation,
                              {{"view", "expected one of ivmf, tm, breakdown"}});
        }
      }
      const Dataset selected = select_dataset(request);
      if (!scheme.valid_for_ranking()) {
        throw DocumentError(Errc::invalid_argument,
                            {{"weights.tm", "all property weights are zero"}});
      }
      return {200, score_table_to_json(ivmf_scores(selected, scheme), view).dump(2) + "\n"};
    } catch (const Error& e) {
      return detail::error_response(e);
    }
  }

  [[nodiscard]] Response sensitivity(const std::string& body) const {
    try {
      const json request = detail::parse_body(body);
      detail::reject_unknown_fields(request, {"baseline", "variants", "level"});
      Level level = Level::ivmf;
      if (auto it = request.find("level"); it != request.end()) {
        if (!it->is_string()) {
          throw DocumentError(Errc::type_error, {{"level", "expected string"}});
        }
        try {
          level = parse_level(it->get<std::string>());
        } catch (const Error& e) {
          throw DocumentError(Errc::schema_violation, {{"level", e.what()}});
        }
      }
      WeightScheme baseline = default_scheme();
      if (auto it = request.find("baseline"); it != request.end()) {
        baseline = weights_from_json(*it, "baseline");
      }
      auto it = request.find("variants");
      if (it == request.end()) {
        throw DocumentError(Errc::schema_violation, {{"variants", "required field missing"}});
      }
      if (!it->is_array()) throw DocumentError(Errc::type_error, {{"variants", "expected array"}});
      if (it->empty()) {
        throw DocumentError(Errc::schema_violation, {{"variants", "at least one variant required"}});
      }
      std::vector<WeightScheme> variants;
      for (std::size_t i = 0; i < it->size(); ++i) {
        variants.push_back(weights_from_json((*it)[i], "variants[" + std::to_string(i) + "]"));
      }
      const auto rows = sensitivity_table(dataset_, baseline, variants, level);
      return {200, sensitivity_to_json(rows).dump(2) + "\n"};
    } catch (const Error& e) {
      return detail::error_response(e);
    }
  }

 private:
  Dataset select_dataset(const json& request) const {
    auto it = request.find("dataset");
    if (it == request.end() || it->is_null()) return dataset_;
    if (it->is_string()) {
      if (it->get<std::string>() == dataset_id_) return dataset_;
      throw DocumentError(Errc::schema_violation,
                          {{"dataset", "unknown dataset '" + it->get<std::string>() +
                                           "' (serving '" + dataset_id_ + "')"}});
    }
    try {
      return dataset_from_json(*it);
    } catch (const DocumentError& e) {
      if (detail::only_too_few(e)) throw Error(Errc::too_few_protocols, e.diagnostics().front().message);
      throw;
    }
  }

  Dataset dataset_;
  std::string dataset_id_;
  std::string dataset_document_;
};

// `cors_origin` empty disables CORS headers.
inline void mount(httplib::Server& server, const Service& service,
                  const std::string& cors_origin = {}) {
  auto send = [cors_origin](httplib::Response& res, const Response& r) {
    res.status = r.status;
    res.set_content(r.body, r.content_type);
    if (!cors_origin.empty()) {
      res.set_header("Access-Control-Allow-Origin", cors_origin);
      res.set_header("Vary", "Origin");
    }
  };
  server.Get("/api/health",
             [&service, send](const httplib::Request&, httplib::Response& res) {
               send(res, service.health());
             });
  server.Get("/api/dataset",
             [&service, send](const httplib::Request&, httplib::Response& res) {
               send(res, service.get_dataset());
             });
  server.Post("/api/score", [&service, send](const httplib::Request& req, httplib::Response& res) {
    send(res, service.score(req.body));
  });
  server.Post("/api/sensitivity",
              [&service, send](const httplib::Request& req, httplib::Response& res) {
                send(res, service.sensitivity(req.body));
              });
  if (!cors_origin.empty()) {
    server.Options(R"(/api/.*)", [cors_origin](const httplib::Request&, httplib::Response& res) {
      res.status = 204;
      res.set_header("Access-Control-Allow-Origin", cors_origin);
      res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
      res.set_header("Vary", "Origin");
    });
  }
}

struct ServeOptions {
  std::string host = "127.0.0.1";
  int port = default_service_port;
  std::string cors_origin;
};

// Blocks until the server stops. Returns false if the socket could not be bound.
inline bool serve(const Service& service, const ServeOptions& options, std::ostream& log) {
  httplib::Server server;
  mount(server, service, options.cors_origin);
  if (!server.bind_to_port(options.host, options.port)) {
    log << "error: cannot bind " << options.host << ":" << options.port << "\n";
    return false;
  }
  log << "serving " << service.dataset_id() << " (" << service.dataset().size()
      << " protocols) on http://" << options.host << ":" << options.port << "\n";
  log.flush();
  return server.listen_after_bind();
}

}  // namespace ivmf
