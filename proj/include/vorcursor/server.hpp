#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "vorcursor/live_session.hpp"

namespace vorcursor {

struct ServerOptions {
    std::string host = "127.0.0.1";
    /// 0 picks an ephemeral port (see LiveServer::port()).
    unsigned short port = 8765;
    /// Stop after this many frames (tests); empty runs until stop().
    std::optional<long> max_frames;
};

/// Tick timing collected by the simulation loop.
struct TickStats {
    long ticks = 0;
    double mean_period_ms = 0.0;
    /// Largest |period - nominal| over the run.
    double max_jitter_ms = 0.0;
    /// 99th percentile of |period - nominal|.
    double p99_jitter_ms = 0.0;
};

/// Real-time WebSocket front end for a LiveSession: 60 Hz tick owner on one
/// thread, network I/O on another. Snapshots fan out latest-wins per client.
class LiveServer {
public:
    LiveServer(const SimConfig& config, ServerOptions options);
    ~LiveServer();

    LiveServer(const LiveServer&) = delete;
    LiveServer& operator=(const LiveServer&) = delete;

    /// Binds and listens; throws IoError when the port is unavailable.
    void start();
    unsigned short port() const;
    /// Blocks until stop() or max_frames.
    void wait();
    /// Waits up to `timeout`; true once the loop has ended.
    bool wait_for(std::chrono::milliseconds timeout);
    void stop();

    TickStats tick_stats() const;
    int client_count() const;

    struct Impl;  // opaque; defined in server.cpp

private:
    std::unique_ptr<Impl> impl_;
};

}  // namespace vorcursor
