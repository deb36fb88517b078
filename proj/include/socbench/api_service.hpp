#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "socbench/error.hpp"

namespace socbench {

struct ServiceConfig {
    std::string host = "127.0.0.1";
    /// 0 picks a free port.
    int port = 8080;
    std::filesystem::path root = "socbench-data";
    /// When set, every request except GET /health needs "Authorization: Bearer <token>".
    std::optional<std::string> auth_token;
    std::size_t max_upload_bytes = std::size_t{512} * 1024 * 1024;
    /// On stop: cancel running injections (true) or let them finish (false).
    bool cancel_injections_on_shutdown = true;
};

/// HTTP status for a library error code.
int http_status(ErrorCode code);

/// HTTP/JSON facade over a Workspace and an Injector.
class ApiService {
public:
    explicit ApiService(ServiceConfig config);
    ~ApiService();
    ApiService(const ApiService&) = delete;
    ApiService& operator=(const ApiService&) = delete;

    /// Binds and starts serving on a background thread; returns the bound
    /// port. Throws BindFailure.
    int start();
    /// Blocks until stop() is called from another thread or a signal handler.
    void wait();
    /// Stops accepting requests, finishes or cancels injections, drains jobs.
    void stop();

    int port() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace socbench
