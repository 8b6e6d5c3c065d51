#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "hqsim/plan.hpp"
#include "hqsim/session.hpp"

namespace hqsim::telemetry {

struct ServerOptions {
    std::string bind_address = "127.0.0.1";
    // 0 picks a free port; see Server::port().
    std::uint16_t port = 0;
    std::vector<SessionPlan> plans;
    std::filesystem::path data_dir = "data";
    SessionSettings settings;
    // Wall-clock pacing: 1 runs ticks in real time, 4 runs them four times
    // faster. Simulation time is tick-counted either way.
    double time_scale = 1.0;
    // Per-connection outbound queue length before state frames are coalesced.
    std::size_t max_queued_frames = 64;
    // Queue length (after coalescing) at which a client is dropped.
    std::size_t max_queued_total = 1024;
};

struct ServerStats {
    std::uint64_t connections = 0;
    std::uint64_t messages_in = 0;
    std::uint64_t stale_discarded = 0;
    std::uint64_t observer_rejected = 0;
    std::uint64_t protocol_errors = 0;
    std::uint64_t frames_sent = 0;
    std::uint64_t frames_coalesced = 0;
    std::uint64_t slow_disconnects = 0;
    std::uint64_t ticks = 0;
    std::uint64_t sessions_persisted = 0;
};

/// Hosts sessions for one pilot and any number of observers. Runs a network
/// thread and a session thread; the session thread is the only writer of
/// simulation state.
class Server {
public:
    explicit Server(ServerOptions options);
    ~Server();

    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    /// Binds and starts both threads. Throws hqsim::Error if the port is busy.
    void start();
    /// Stops both threads. A flight in progress is aborted and persisted.
    void stop();
    /// Blocks until stop() is called from another thread.
    void wait();

    std::uint16_t port() const;
    ServerStats stats() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace hqsim::telemetry
