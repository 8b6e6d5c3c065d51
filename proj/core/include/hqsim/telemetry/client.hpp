#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "hqsim/telemetry/wire.hpp"

namespace hqsim::telemetry {

/// Blocking client for scripts and tests. A background thread reads and
/// queues incoming messages.
class Client {
public:
    Client();
    ~Client();

    Client(const Client&) = delete;
    Client& operator=(const Client&) = delete;

    /// Throws hqsim::Error if the connection fails.
    void connect(const std::string& host, std::uint16_t port);
    void close();
    bool connected() const;

    /// Sends with the next sequence number and returns it.
    std::uint64_t send(wire::Kind kind, nlohmann::json payload = nlohmann::json::object());
    /// Sends as given, including its sequence number.
    void send_raw(const wire::Message& m);
    /// Sends an arbitrary line (a newline is appended).
    void send_line(const std::string& line);

    /// Next queued message, or nullopt on timeout or after the server closed
    /// the connection and the queue drained.
    std::optional<wire::Message> receive(std::chrono::milliseconds timeout);

    /// Discards messages until `match` accepts one.
    std::optional<wire::Message> wait_for(const std::function<bool(const wire::Message&)>& match,
                                          std::chrono::milliseconds timeout);
    std::optional<wire::Message> wait_for_event(const std::string& name, std::chrono::milliseconds timeout);

    /// Sends hello and returns the server's hello reply.
    wire::Message hello(const std::string& role, std::chrono::milliseconds timeout = std::chrono::seconds(5));

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace hqsim::telemetry
