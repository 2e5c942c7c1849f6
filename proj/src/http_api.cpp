#include "ecu/http_api.hpp"

#include "httplib.h"

namespace ecu {

using nlohmann::json;

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& code, const std::string& message) {
  send_json(res, status, {{"error", {{"code", code}, {"message", message}}}});
}

std::string bearer(const httplib::Request& req) {
  const auto h = req.get_header_value("Authorization");
  const std::string prefix = "Bearer ";
  return h.rfind(prefix, 0) == 0 ? h.substr(prefix.size()) : std::string{};
}

json body_of(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    auto j = json::parse(req.body);
    if (!j.is_object()) throw ServiceError("bad_request", "request body must be a JSON object");
    return j;
  } catch (const json::parse_error&) {
    throw ServiceError("bad_request", "request body is not valid JSON");
  }
}

/// Maps every exception to the error envelope.
template <class F>
httplib::Server::Handler guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const ServiceError& e) {
      send_error(res, e.status(), e.code(), e.what());
    } catch (const json::exception& e) {
      send_error(res, 400, "bad_request", e.what());
    } catch (const std::invalid_argument& e) {
      send_error(res, 400, "bad_request", e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, "internal", e.what());
    }
  };
}

SwitchResponse switch_from(const json& b, const SessionService& service) {
  if (b.contains("choices")) {
    std::vector<Choice> rows;
    for (const auto& c : b.at("choices")) rows.push_back(parse_choice(c.get<std::string>()));
    const int stage = b.at("stage").get<int>();
    const auto expected = stage == 2 ? service.content().config.y_grid.size()
                                     : static_cast<std::size_t>(service.content().config.stage1_rows);
    if (rows.size() != expected)
      throw ServiceError("invalid_switch", "expected " + std::to_string(expected) + " row choices");
    auto crossing = first_crossing(rows, stage);
    if (crossing.crossings > 1)
      throw ServiceError("multi_switch", "choices switch " + std::to_string(crossing.crossings) + " times");
    return crossing.response;
  }
  SwitchResponse r;
  r.stage = b.at("stage").get<int>();
  r.direction = parse_direction(b.at("direction").get<std::string>());
  r.switch_after_row = b.at("switch_after_row").get<int>();
  return r;
}

}  // namespace

json tasks_view(const StageTable& tasks) {
  json out = json::array();
  for (const auto& t : tasks)
    out.push_back({{"id", t.id},
                   {"stage", t.stage},
                   {"row", t.row},
                   {"option_a", to_string(t.option_a)},
                   {"option_b", to_string(t.option_b)},
                   {"note", t.note}});
  return out;
}

json session_view(const Session& s) {
  auto j = to_json(s);
  j.erase("token");
  j.erase("seed");
  return j;
}

void register_routes(httplib::Server& server, SessionService& service, std::string operator_token) {
  const std::string id = R"(/sessions/([0-9a-f]+))";

  server.Post("/sessions", guarded([&service](const httplib::Request& req, httplib::Response& res) {
                const auto b = body_of(req);
                std::optional<std::uint64_t> seed;
                if (b.contains("seed")) seed = b.at("seed").get<std::uint64_t>();
                const auto c = service.create(seed);
                send_json(res, 201, {{"id", c.id}, {"token", c.token}, {"stage", to_string(c.stage)}});
              }));

  server.Get(id, guarded([&service](const httplib::Request& req, httplib::Response& res) {
               send_json(res, 200, session_view(service.get(req.matches[1], bearer(req))));
             }));

  server.Post(id + "/quiz", guarded([&service](const httplib::Request& req, httplib::Response& res) {
                const auto b = body_of(req);
                const auto s = service.submit_quiz(req.matches[1], bearer(req), b.at("answers").get<std::vector<int>>());
                const int remaining = std::max(0, service.content().max_quiz_attempts - s.quiz_attempts_used);
                const char* result = s.quiz_passed ? "passed" : s.stage == Stage::LockedOut ? "locked_out" : "retry";
                send_json(res, 200, {{"result", result}, {"remaining", remaining}, {"stage", to_string(s.stage)}});
              }));

  server.Get(id + "/tasks", guarded([&service](const httplib::Request& req, httplib::Response& res) {
               const auto s = service.get(req.matches[1], bearer(req));
               send_json(res, 200,
                         {{"stage", to_string(s.stage)}, {"tasks", tasks_view(service.tasks(req.matches[1], bearer(req)))}});
             }));

  server.Post(id + "/switch", guarded([&service](const httplib::Request& req, httplib::Response& res) {
                const auto token = bearer(req);
                service.get(req.matches[1], token);
                const auto r = switch_from(body_of(req), service);
                send_json(res, 200, session_view(service.submit_switch(req.matches[1], token, r)));
              }));

  server.Post(id + "/stage3", guarded([&service](const httplib::Request& req, httplib::Response& res) {
                const auto b = body_of(req);
                const auto s = service.submit_stage3(req.matches[1], bearer(req), b.at("task_id").get<std::string>(),
                                                     parse_choice(b.at("choice").get<std::string>()));
                send_json(res, 200, session_view(s));
              }));

  server.Get(id + "/review", guarded([&service](const httplib::Request& req, httplib::Response& res) {
               send_json(res, 200, session_view(service.review(req.matches[1], bearer(req))));
             }));

  server.Get("/export.csv", guarded([&service, operator_token](const httplib::Request& req, httplib::Response& res) {
               if (operator_token.empty())
                 throw ServiceError("export_disabled", "no operator token is configured", 403);
               if (bearer(req) != operator_token) throw ServiceError("forbidden", "operator token required", 403);
               res.status = 200;
               res.set_content(service.export_csv(), "text/csv");
             }));

  server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("ok\n", "text/plain");
  });
}

}  // namespace ecu
