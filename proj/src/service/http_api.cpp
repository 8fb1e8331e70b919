#include <httplib.h>

#include "roadchat/errors.hpp"
#include "roadchat/service.hpp"

namespace roadchat::service {

namespace {

void send_json(httplib::Response& res, const nlohmann::json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& code, const std::string& message) {
  send_json(res, {{"error", code}, {"message", message}}, status);
}

int status_for(const Error& e) {
  if (dynamic_cast<const UnknownRun*>(&e) || dynamic_cast<const UnknownSession*>(&e)) return 404;
  if (dynamic_cast<const InvalidArgument*>(&e) || dynamic_cast<const ParseError*>(&e)) return 400;
  return 500;
}

// Wraps a handler so domain errors and malformed bodies become JSON error replies.
template <class F>
httplib::Server::Handler guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const Error& e) {
      send_error(res, status_for(e), e.code(), e.what());
    } catch (const nlohmann::json::exception& e) {
      send_error(res, 400, "BadRequest", e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, "InternalError", e.what());
    }
  };
}

nlohmann::json body_of(const httplib::Request& req) {
  auto j = nlohmann::json::parse(req.body);
  if (!j.is_object()) throw InvalidArgument("request body must be a JSON object");
  return j;
}

}  // namespace

struct HttpApi::Impl {
  Service& service;
  httplib::Server server;

  explicit Impl(Service& s) : service(s) { routes(); }

  void routes() {
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
    server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
      res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
      res.status = 204;
    });

    server.Get("/health", [](const httplib::Request&, httplib::Response& res) { send_json(res, {{"status", "ok"}}); });

    server.Post("/sessions", guarded([this](const httplib::Request&, httplib::Response& res) {
                  send_json(res, {{"session_id", service.create_session()}}, 201);
                }));

    server.Post(R"(/sessions/([A-Za-z0-9_-]+)/turns)",
                guarded([this](const httplib::Request& req, httplib::Response& res) {
                  const auto body = body_of(req);
                  if (!body.contains("text") || !body.at("text").is_string()) {
                    throw InvalidArgument("body needs a string field 'text'");
                  }
                  send_json(res, to_json(service.handle_turn(req.matches[1], body.at("text").get<std::string>())));
                }));

    server.Get(R"(/sessions/([A-Za-z0-9_-]+)/history)",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 nlohmann::json turns = nlohmann::json::array();
                 for (const auto& t : service.history(req.matches[1])) turns.push_back(to_json(t));
                 send_json(res, {{"session_id", req.matches[1]}, {"turns", turns}});
               }));

    server.Get(R"(/sessions/([A-Za-z0-9_-]+)/runs)",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 service.history(req.matches[1]);  // 404 for unknown sessions
                 nlohmann::json runs = nlohmann::json::array();
                 for (const auto& r : service.list_runs(std::string(req.matches[1]))) runs.push_back(to_json(r));
                 send_json(res, {{"session_id", req.matches[1]}, {"runs", runs}});
               }));

    server.Get(R"(/runs/([A-Za-z0-9_-]+)/metrics)", guarded([this](const httplib::Request& req, httplib::Response& res) {
                 res.set_content(service.run_file(req.matches[1], "metrics"), "application/json");
               }));

    server.Get(R"(/runs/([A-Za-z0-9_-]+)/files/(net|rou|add|sumocfg))",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 res.set_content(service.run_file(req.matches[1], req.matches[2]), "application/xml");
               }));

    server.Get(R"(/runs/([A-Za-z0-9_-]+)/geometry)", guarded([this](const httplib::Request& req, httplib::Response& res) {
                 send_json(res, service.geometry(req.matches[1]));
               }));

    server.Post("/compare", guarded([this](const httplib::Request& req, httplib::Response& res) {
                  const auto body = body_of(req);
                  const auto a = body.at("run_a").get<std::string>();
                  const auto b = body.at("run_b").get<std::string>();
                  send_json(res, analysis::to_json(service.compare_runs(a, b)));
                }));
  }
};

HttpApi::HttpApi(Service& service) : impl_(std::make_unique<Impl>(service)) {}

HttpApi::~HttpApi() = default;

bool HttpApi::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }

int HttpApi::bind_any_port(const std::string& host) { return impl_->server.bind_to_any_port(host); }

bool HttpApi::listen_after_bind() { return impl_->server.listen_after_bind(); }

void HttpApi::stop() { impl_->server.stop(); }

void HttpApi::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace roadchat::service
