#pragma once

#include "kgrag/engine.hpp"

#include <memory>
#include <string>
#include <thread>

namespace httplib {
class Server;
}

namespace kgrag {

// JSON-over-HTTP front for one RagEngine. start() binds and serves from a
// background thread; stop() joins it. Request bodies are parsed strictly:
// malformed input is 400, provider outages 503, unknown documents 404.
class HttpService {
public:
    explicit HttpService(RagEngine& engine);
    ~HttpService();

    HttpService(const HttpService&) = delete;
    HttpService& operator=(const HttpService&) = delete;

    // port 0 picks a free port; the chosen one is in port() after start.
    bool start(const std::string& host, int port);
    void stop();
    int port() const { return port_; }

private:
    void route();

    RagEngine& engine_;
    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
    int port_ = 0;
};

} // namespace kgrag
