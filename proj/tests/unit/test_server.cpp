#include <gtest/gtest.h>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <chrono>
#include <thread>

#include "json.hpp"
#include "vorcursor/error.hpp"
#include "vorcursor/server.hpp"

using namespace vorcursor;
using nlohmann::json;
namespace net = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;

namespace {

SimConfig quiet() {
    SimConfig c;
    c.noise = NoiseParams::none();
    return c;
}

class Client {
public:
    explicit Client(unsigned short port) : ws_(ioc_) {
        tcp::resolver resolver(ioc_);
        net::connect(ws_.next_layer(), resolver.resolve("127.0.0.1", std::to_string(port)));
        ws_.handshake("127.0.0.1", "/");
    }

    json read() {
        buffer_.consume(buffer_.size());
        ws_.read(buffer_);
        return json::parse(beast::buffers_to_string(buffer_.data()));
    }

    // Reads until a message of the given type arrives.
    json read_type(const std::string& type, int limit = 2000) {
        for (int i = 0; i < limit; ++i) {
            json m = read();
            if (m["type"] == type) return m;
        }
        return {};
    }

    void send(const json& msg) { ws_.write(net::buffer(msg.dump())); }
    void send_raw(const std::string& text) { ws_.write(net::buffer(text)); }

    void close() {
        beast::error_code ec;
        ws_.close(websocket::close_code::normal, ec);
    }

private:
    net::io_context ioc_;
    websocket::stream<tcp::socket> ws_;
    beast::flat_buffer buffer_;
};

json input_msg(const std::string& event, json fields = json::object()) {
    fields["type"] = "input";
    fields["event"] = event;
    return fields;
}

struct Running {
    LiveServer server;
    explicit Running(SimConfig cfg = quiet(), std::optional<long> max_frames = std::nullopt)
        : server(cfg, ServerOptions{"127.0.0.1", 0, max_frames}) {
        server.start();
    }
    ~Running() { server.stop(); }
};

}  // namespace

TEST(Server, HelloAndSnapshots) {
    Running r;
    Client c(r.server.port());
    const json hello = c.read_type("hello");
    EXPECT_EQ(hello["role"], "steering");
    long last = -1;
    for (int i = 0; i < 20; ++i) {
        const json s = c.read_type("state");
        ASSERT_EQ(s["type"], "state");
        EXPECT_GT(s["frame"].get<long>(), last);
        last = s["frame"];
    }
}

TEST(Server, TrialScriptEndsInSuccess) {
    Running r;
    Client c(r.server.port());
    c.read_type("hello");
    c.send(input_msg("set_mode", {{"mode", "smooth"}}));
    c.send(input_msg("set_target", {{"cx", 960}, {"cy", 540}, {"size_px", 100}}));
    c.send(input_msg("start_trial", {{"seed", 5}}));
    bool saw_running = false;
    std::string final_status;
    for (int i = 0; i < 60 * 40; ++i) {
        const json s = c.read_type("state");
        const std::string t = s["trial"];
        if (t == "running") saw_running = true;
        if (saw_running && t != "running") {
            final_status = t;
            EXPECT_EQ(s["metrics"]["trials"], 1);
            break;
        }
    }
    EXPECT_TRUE(saw_running);
    EXPECT_EQ(final_status, "success");
}

TEST(Server, HeadRateClampEchoed) {
    Running r;
    Client c(r.server.port());
    c.read_type("hello");
    c.send(input_msg("head_rate", {{"yaw_dps", 500}, {"pitch_dps", -7}}));
    for (int i = 0; i < 120; ++i) {
        const json s = c.read_type("state");
        if (s["head"]["yaw_rate"] != 0.0) {
            EXPECT_EQ(s["head"]["yaw_rate"], 60.0);
            EXPECT_EQ(s["head"]["pitch_rate"], -7.0);
            return;
        }
    }
    FAIL() << "head rate never applied";
}

TEST(Server, MalformedInputKeepsConnection) {
    Running r;
    Client c(r.server.port());
    c.read_type("hello");
    c.send_raw("{not json");
    const json err = c.read_type("error");
    EXPECT_EQ(err["type"], "error");
    EXPECT_FALSE(err["message"].get<std::string>().empty());
    // session-level rejection arrives as an error too
    c.send(input_msg("start_trial", {{"seed", 1}}));
    EXPECT_EQ(c.read_type("error")["type"], "error");
    EXPECT_EQ(c.read_type("state")["type"], "state");
}

TEST(Server, ObserversAreReadOnlyAndInheritSteering) {
    Running r;
    auto first = std::make_unique<Client>(r.server.port());
    EXPECT_EQ(first->read_type("hello")["role"], "steering");
    Client second(r.server.port());
    EXPECT_EQ(second.read_type("hello")["role"], "observer");
    second.send(input_msg("pause"));
    const json err = second.read_type("error");
    EXPECT_NE(err["message"].get<std::string>().find("read-only"), std::string::npos);
    first->close();
    first.reset();
    EXPECT_EQ(second.read_type("hello")["role"], "steering");
}

TEST(Server, StopsAfterMaxFrames) {
    Running r(quiet(), 30);
    EXPECT_TRUE(r.server.wait_for(std::chrono::seconds(5)));
    EXPECT_EQ(r.server.tick_stats().ticks, 29);
}

TEST(Server, PortInUseIsIoError) {
    Running r;
    LiveServer other(quiet(), ServerOptions{"127.0.0.1", r.server.port(), std::nullopt});
    EXPECT_THROW(other.start(), IoError);
    LiveServer bad(quiet(), ServerOptions{"not-an-ip", 0, std::nullopt});
    EXPECT_THROW(bad.start(), ConfigError);
}

TEST(Server, TickJitterWithThreeClients) {
    Running r(SimConfig{}, 180);
    std::vector<std::thread> readers;
    std::atomic<int> received{0};
    for (int i = 0; i < 3; ++i)
        readers.emplace_back([&] {
            Client c(r.server.port());
            try {
                for (;;) {
                    c.read();
                    ++received;
                }
            } catch (const std::exception&) {
                // server closed the connection at max_frames
            }
        });
    r.server.wait();
    r.server.stop();
    for (auto& t : readers) t.join();
    const TickStats st = r.server.tick_stats();
    EXPECT_GT(received.load(), 100);
    EXPECT_NEAR(st.mean_period_ms, 1000.0 / 60.0, 0.5);
    EXPECT_LE(st.p99_jitter_ms, 2.0) << "max " << st.max_jitter_ms;
}
