#include "hqsim/telemetry/client.hpp"

#include <condition_variable>
#include <deque>
#include <mutex>
#include <thread>

#include <boost/asio.hpp>

namespace hqsim::telemetry {

namespace asio = boost::asio;
using asio::ip::tcp;

struct Client::Impl {
    asio::io_context io;
    tcp::socket socket{io};
    std::thread reader;
    std::mutex write_mu;
    std::uint64_t seq = 0;

    std::mutex mu;
    std::condition_variable cv;
    std::deque<wire::Message> queue;
    bool open = false;

    void read_loop() {
        asio::streambuf buf;
        boost::system::error_code ec;
        for (;;) {
            asio::read_until(socket, buf, '\n', ec);
            if (ec) break;
            std::istream in(&buf);
            std::string line;
            std::getline(in, line);
            if (line.empty()) continue;
            try {
                auto m = wire::decode(line);
                std::lock_guard lk(mu);
                queue.push_back(std::move(m));
            } catch (const wire::ProtocolError&) {
                continue;
            }
            cv.notify_all();
        }
        {
            std::lock_guard lk(mu);
            open = false;
        }
        cv.notify_all();
    }
};

Client::Client() : impl_(std::make_unique<Impl>()) {}

Client::~Client() {
    close();
}

void Client::connect(const std::string& host, std::uint16_t port) {
    try {
        tcp::resolver resolver(impl_->io);
        asio::connect(impl_->socket, resolver.resolve(host, std::to_string(port)));
        impl_->socket.set_option(tcp::no_delay(true));
    } catch (const boost::system::system_error& e) {
        throw Error("connect to " + host + ":" + std::to_string(port) + " failed: " + e.what());
    }
    {
        std::lock_guard lk(impl_->mu);
        impl_->open = true;
    }
    impl_->reader = std::thread([this] { impl_->read_loop(); });
}

void Client::close() {
    boost::system::error_code ignored;
    impl_->socket.shutdown(tcp::socket::shutdown_both, ignored);
    if (impl_->reader.joinable()) impl_->reader.join();
    impl_->socket.close(ignored);
}

bool Client::connected() const {
    std::lock_guard lk(impl_->mu);
    return impl_->open;
}

std::uint64_t Client::send(wire::Kind kind, nlohmann::json payload) {
    wire::Message m;
    m.kind = kind;
    m.payload = std::move(payload);
    {
        std::lock_guard lk(impl_->write_mu);
        m.seq = ++impl_->seq;
    }
    send_raw(m);
    return m.seq;
}

void Client::send_raw(const wire::Message& m) {
    const std::string line = wire::encode(m);
    std::lock_guard lk(impl_->write_mu);
    if (m.seq > impl_->seq) impl_->seq = m.seq;
    boost::system::error_code ec;
    asio::write(impl_->socket, asio::buffer(line), ec);
    if (ec) throw Error("send failed: " + ec.message());
}

void Client::send_line(const std::string& line) {
    std::lock_guard lk(impl_->write_mu);
    boost::system::error_code ec;
    asio::write(impl_->socket, asio::buffer(line + "\n"), ec);
    if (ec) throw Error("send failed: " + ec.message());
}

std::optional<wire::Message> Client::receive(std::chrono::milliseconds timeout) {
    std::unique_lock lk(impl_->mu);
    impl_->cv.wait_for(lk, timeout, [&] { return !impl_->queue.empty() || !impl_->open; });
    if (impl_->queue.empty()) return std::nullopt;
    auto m = std::move(impl_->queue.front());
    impl_->queue.pop_front();
    return m;
}

std::optional<wire::Message> Client::wait_for(const std::function<bool(const wire::Message&)>& match,
                                              std::chrono::milliseconds timeout) {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    for (;;) {
        const auto left =
            std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
        if (left.count() <= 0) return std::nullopt;
        auto m = receive(left);
        if (!m) return std::nullopt;
        if (match(*m)) return m;
    }
}

std::optional<wire::Message> Client::wait_for_event(const std::string& name,
                                                    std::chrono::milliseconds timeout) {
    return wait_for(
        [&](const wire::Message& m) {
            return m.kind == wire::Kind::event && m.payload.value("name", "") == name;
        },
        timeout);
}

wire::Message Client::hello(const std::string& role, std::chrono::milliseconds timeout) {
    send(wire::Kind::hello, {{"version", wire::kProtocolVersion}, {"role", role}});
    auto reply = wait_for([](const wire::Message& m) { return m.kind == wire::Kind::hello; }, timeout);
    if (!reply) throw Error("no hello reply from server");
    return *reply;
}

}  // namespace hqsim::telemetry
