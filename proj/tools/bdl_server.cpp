// bdl-server: central ingestion, registry and query service.

#include <CLI11.hpp>

#include <csignal>
#include <iostream>

#include "bdl/core/error.hpp"
#include "bdl/server/http_api.hpp"

namespace {
bdl::server::ApiServer* g_server = nullptr;
void on_signal(int) {
  if (g_server) g_server->stop();
}
}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Building Data Lite central server"};
  std::string config_path, storage_dir, listen;
  std::optional<int> port;
  app.add_option("-c,--config", config_path, "server configuration file")->check(CLI::ExistingFile);
  app.add_option("--storage", storage_dir, "storage directory (overrides config; in-memory when unset)");
  app.add_option("--listen", listen, "listen address");
  app.add_option("-p,--port", port, "port (0 picks a free one)");
  CLI11_PARSE(app, argc, argv);

  try {
    bdl::server::ServerConfig cfg;
    if (!config_path.empty()) cfg = bdl::server::load_server_config(config_path);
    if (!storage_dir.empty()) cfg.storage_dir = storage_dir;
    if (!listen.empty()) cfg.listen_address = listen;
    if (port) cfg.port = *port;

    bdl::SystemClock clock;
    auto store = cfg.storage_dir ? std::make_unique<bdl::server::CentralStore>(clock, *cfg.storage_dir)
                                 : std::make_unique<bdl::server::CentralStore>(clock);
    bdl::server::ApiServer server(*store, cfg);
    int bound = server.bind();
    g_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::cout << "listening on " << cfg.listen_address << ":" << bound
              << (cfg.storage_dir ? " storage " + *cfg.storage_dir : std::string(" (in-memory)")) << std::endl;
    server.serve();
    g_server = nullptr;
  } catch (const bdl::Error& e) {
    std::cerr << "bdl-server: " << e.what() << '\n';
    return 1;
  }
}
