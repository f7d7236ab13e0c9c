#include <httplib.h>

#include <csignal>
#include <iostream>

#include "ontoapi/gateway/gateway.h"

namespace ontoapi::gateway {

namespace {

httplib::Server* gRunning = nullptr;

void stopOnSignal(int) {
  if (gRunning != nullptr) gRunning->stop();
}

}  // namespace

// ____________________________________________________________________________
void mountGateway(Gateway& gateway, httplib::Server& server) {
  auto handler = [&gateway](const httplib::Request& req, httplib::Response& res) {
    Request request{.method = req.method, .path = req.path, .params = req.params,
                    .body = req.body};
    if (req.has_header("Authorization")) {
      request.authorization = req.get_header_value("Authorization");
    }
    Response response = gateway.handle(request);
    res.status = response.status;
    for (const auto& [name, value] : response.headers) res.set_header(name, value);
    if (response.status != 204) res.set_content(response.body, response.contentType);
  };
  server.Get(".*", handler);
  server.Post(".*", handler);
  server.Put(".*", handler);
  server.Delete(".*", handler);
  server.Patch(".*", handler);
}

// ____________________________________________________________________________
int runServer(Gateway& gateway) {
  const auto& config = gateway.config();
  httplib::Server server;
  mountGateway(gateway, server);
  server.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  if (!server.bind_to_port(config.host, config.port)) {
    std::cerr << "error: cannot bind " << config.host << ":" << config.port << "\n";
    return 1;
  }
  gRunning = &server;
  std::signal(SIGINT, stopOnSignal);
  std::signal(SIGTERM, stopOnSignal);
  std::cout << "serving " << gateway.artifacts().spec.paths.size() << " routes on http://"
            << config.host << ":" << config.port << std::endl;
  bool ok = server.listen_after_bind();
  gRunning = nullptr;
  return ok ? 0 : 1;
}

}  // namespace ontoapi::gateway
