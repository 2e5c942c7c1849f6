#pragma once

#include <string>

#include "ecu/session_store.hpp"

namespace httplib {
class Server;
}

namespace ecu {

/// Installs the participant and operator routes. An empty operator token
/// disables /export.csv (403).
void register_routes(httplib::Server& server, SessionService& service, std::string operator_token);

nlohmann::json session_view(const Session& s);
nlohmann::json tasks_view(const StageTable& tasks);

}  // namespace ecu
