#include "vorcursor/server.hpp"

#include <algorithm>
#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <thread>
#include <vector>

#include "json.hpp"
#include "vorcursor/error.hpp"

namespace vorcursor {
namespace {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;
using Message = std::shared_ptr<const std::string>;

std::string role_json(bool steering) {
    return nlohmann::json{{"type", "hello"}, {"role", steering ? "steering" : "observer"}}.dump();
}

}  // namespace

class ClientSession;

struct LiveServer::Impl {
    SimConfig config;
    ServerOptions options;
    net::io_context ioc;
    tcp::acceptor acceptor{ioc};
    std::thread io_thread;
    std::thread sim_thread;
    std::atomic<bool> stopping{false};
    std::atomic<bool> done{false};
    std::mutex done_mutex;
    std::condition_variable done_cv;

    // Touched only on the io thread.
    std::vector<std::shared_ptr<ClientSession>> clients;
    std::atomic<int> client_total{0};

    struct Pending {
        std::weak_ptr<ClientSession> from;
        InputEvent event;
    };
    std::mutex input_mutex;
    std::deque<Pending> inputs;

    mutable std::mutex stats_mutex;
    std::vector<double> jitter_ms;
    double period_sum_ms = 0.0;

    Impl(const SimConfig& c, ServerOptions o) : config(c), options(std::move(o)) {}

    void do_accept();
    void on_client_open(const std::shared_ptr<ClientSession>& client);
    void on_client_closed(ClientSession* client);
    void broadcast(Message msg);
    void sim_loop();
    void finish();
};

class ClientSession : public std::enable_shared_from_this<ClientSession> {
public:
    ClientSession(tcp::socket socket, LiveServer::Impl& server) : ws_(std::move(socket)), server_(server) {}

    void start() {
        ws_.text(true);
        ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
        ws_.async_accept([self = shared_from_this()](beast::error_code ec) {
            if (ec) return;
            self->open_ = true;
            self->server_.on_client_open(self);
            self->read();
        });
    }

    bool steering() const { return steering_; }
    void set_steering(bool steering) {
        steering_ = steering;
        send_control(std::make_shared<const std::string>(role_json(steering)));
    }

    // Snapshots replace whatever snapshot is still waiting (latest wins).
    void send_snapshot(Message msg) {
        if (!open_) return;
        pending_snapshot_ = std::move(msg);
        write_next();
    }

    // Control messages (hello, errors) are never dropped.
    void send_control(Message msg) {
        if (!open_) return;
        control_.push_back(std::move(msg));
        write_next();
    }

    void close() {
        if (!open_) return;
        open_ = false;
        beast::error_code ec;
        beast::get_lowest_layer(ws_).socket().shutdown(tcp::socket::shutdown_both, ec);
        beast::get_lowest_layer(ws_).socket().close(ec);
    }

private:
    void read() {
        ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (ec) {
                self->fail();
                return;
            }
            const std::string text = beast::buffers_to_string(self->buffer_.data());
            self->buffer_.consume(self->buffer_.size());
            self->handle(text);
            self->read();
        });
    }

    void handle(const std::string& text) {
        InputEvent event;
        try {
            event = parse_input_message(text);
        } catch (const ProtocolError& e) {
            send_control(std::make_shared<const std::string>(error_to_json(e.what())));
            return;
        }
        if (!steering_) {
            send_control(std::make_shared<const std::string>(error_to_json("read-only client: input ignored")));
            return;
        }
        std::lock_guard lock(server_.input_mutex);
        server_.inputs.push_back({weak_from_this(), event});
    }

    void write_next() {
        if (writing_ || !open_) return;
        Message msg;
        if (!control_.empty()) {
            msg = std::move(control_.front());
            control_.pop_front();
        } else if (pending_snapshot_) {
            msg = std::move(pending_snapshot_);
            pending_snapshot_.reset();
        } else {
            return;
        }
        writing_ = true;
        ws_.async_write(net::buffer(*msg), [self = shared_from_this(), msg](beast::error_code ec, std::size_t) {
            self->writing_ = false;
            if (ec) {
                self->fail();
                return;
            }
            self->write_next();
        });
    }

    void fail() {
        if (closed_) return;
        closed_ = true;
        open_ = false;
        server_.on_client_closed(this);
    }

    websocket::stream<beast::tcp_stream> ws_;
    LiveServer::Impl& server_;
    beast::flat_buffer buffer_;
    std::deque<Message> control_;
    Message pending_snapshot_;
    bool writing_ = false;
    bool open_ = false;
    bool closed_ = false;
    bool steering_ = false;
};

void LiveServer::Impl::do_accept() {
    acceptor.async_accept(net::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
        if (ec) return;  // acceptor closed
        std::make_shared<ClientSession>(std::move(socket), *this)->start();
        do_accept();
    });
}

void LiveServer::Impl::on_client_open(const std::shared_ptr<ClientSession>& client) {
    const bool has_steering =
        std::any_of(clients.begin(), clients.end(), [](const auto& c) { return c->steering(); });
    clients.push_back(client);
    client_total = static_cast<int>(clients.size());
    client->set_steering(!has_steering);
}

void LiveServer::Impl::on_client_closed(ClientSession* client) {
    const auto it = std::find_if(clients.begin(), clients.end(), [&](const auto& c) { return c.get() == client; });
    if (it == clients.end()) return;
    const bool was_steering = (*it)->steering();
    clients.erase(it);
    client_total = static_cast<int>(clients.size());
    // The longest-connected observer inherits steering.
    if (was_steering && !clients.empty()) clients.front()->set_steering(true);
}

void LiveServer::Impl::broadcast(Message msg) {
    for (const auto& c : clients) c->send_snapshot(msg);
}

void LiveServer::Impl::sim_loop() {
    LiveSession session(config);
    using clock = std::chrono::steady_clock;
    const auto period = std::chrono::duration_cast<clock::duration>(std::chrono::duration<double>(config.dt()));
    const double nominal_ms = 1000.0 * config.dt();
    auto next = clock::now();
    auto last = next;
    bool first = true;
    while (!stopping) {
        std::this_thread::sleep_until(next);
        const auto now = clock::now();
        if (!first) {
            const double ms = std::chrono::duration<double, std::milli>(now - last).count();
            std::lock_guard lock(stats_mutex);
            jitter_ms.push_back(std::abs(ms - nominal_ms));
            period_sum_ms += ms;
        }
        first = false;
        last = now;

        std::deque<Pending> batch;
        {
            std::lock_guard lock(input_mutex);
            batch.swap(inputs);
        }
        for (auto& p : batch) {
            try {
                session.apply(p.event);
            } catch (const Error& e) {
                auto msg = std::make_shared<const std::string>(error_to_json(e.what()));
                net::post(ioc, [from = p.from, msg] {
                    if (auto c = from.lock()) c->send_control(msg);
                });
            }
        }
        session.tick();
        auto msg = std::make_shared<const std::string>(snapshot_to_json(session.snapshot()));
        net::post(ioc, [this, msg] { broadcast(msg); });

        if (options.max_frames && session.frame() >= *options.max_frames) break;
        next += period;
        // After a long stall, resynchronise instead of bursting.
        if (clock::now() - next > 5 * period) next = clock::now();
    }
    finish();
}

void LiveServer::Impl::finish() {
    net::post(ioc, [this] {
        beast::error_code ec;
        acceptor.close(ec);
        for (const auto& c : clients) c->close();
        clients.clear();
        client_total = 0;
    });
    {
        std::lock_guard lock(done_mutex);
        done = true;
    }
    done_cv.notify_all();
}

LiveServer::LiveServer(const SimConfig& config, ServerOptions options)
    : impl_(std::make_unique<Impl>(config, std::move(options))) {
    config.validate();
}

LiveServer::~LiveServer() {
    stop();
}

void LiveServer::start() {
    Impl& s = *impl_;
    beast::error_code ec;
    const auto address = net::ip::make_address(s.options.host, ec);
    if (ec) throw ConfigError("invalid host '" + s.options.host + "'");
    const tcp::endpoint endpoint(address, s.options.port);
    s.acceptor.open(endpoint.protocol(), ec);
    if (!ec) s.acceptor.set_option(net::socket_base::reuse_address(true), ec);
    if (!ec) s.acceptor.bind(endpoint, ec);
    if (!ec) s.acceptor.listen(net::socket_base::max_listen_connections, ec);
    if (ec) throw IoError("cannot listen on " + s.options.host + ":" + std::to_string(s.options.port) + ": " +
                          ec.message());
    s.do_accept();
    s.io_thread = std::thread([&s] {
        auto guard = net::make_work_guard(s.ioc);
        s.ioc.run();
    });
    s.sim_thread = std::thread([&s] { s.sim_loop(); });
}

unsigned short LiveServer::port() const {
    beast::error_code ec;
    const auto ep = impl_->acceptor.local_endpoint(ec);
    return ec ? impl_->options.port : ep.port();
}

void LiveServer::wait() {
    std::unique_lock lock(impl_->done_mutex);
    impl_->done_cv.wait(lock, [this] { return impl_->done.load(); });
}

bool LiveServer::wait_for(std::chrono::milliseconds timeout) {
    std::unique_lock lock(impl_->done_mutex);
    return impl_->done_cv.wait_for(lock, timeout, [this] { return impl_->done.load(); });
}

void LiveServer::stop() {
    Impl& s = *impl_;
    s.stopping = true;
    if (s.sim_thread.joinable()) s.sim_thread.join();
    if (s.io_thread.joinable()) {
        // Let the close handlers posted by finish() run before stopping.
        net::post(s.ioc, [&s] { s.ioc.stop(); });
        s.io_thread.join();
    }
}

TickStats LiveServer::tick_stats() const {
    std::lock_guard lock(impl_->stats_mutex);
    TickStats st;
    st.ticks = static_cast<long>(impl_->jitter_ms.size());
    if (st.ticks == 0) return st;
    st.mean_period_ms = impl_->period_sum_ms / st.ticks;
    std::vector<double> j = impl_->jitter_ms;
    std::sort(j.begin(), j.end());
    st.max_jitter_ms = j.back();
    st.p99_jitter_ms = j[std::min(j.size() - 1, static_cast<std::size_t>(std::ceil(0.99 * j.size())) - 1)];
    return st;
}

int LiveServer::client_count() const {
    return impl_->client_total;
}

}  // namespace vorcursor
