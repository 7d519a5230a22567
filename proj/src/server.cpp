#include "evstl/server.hpp"

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include <chrono>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <thread>

#include "json_io.hpp"

namespace evstl {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;
using Clock = std::chrono::steady_clock;

ClientMessage parse_client_message(const std::string& text, const Declarations& decls) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error&) {
    throw ProtocolError("message is not JSON");
  }
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
    throw ProtocolError("message needs a string 'type'");
  }
  const auto type = j["type"].get<std::string>();
  ClientMessage m;
  if (type == "start") {
    m.type = ClientMessage::Type::Start;
  } else if (type == "pause") {
    m.type = ClientMessage::Type::Pause;
  } else if (type == "reset") {
    m.type = ClientMessage::Type::Reset;
  } else if (type == "set_events") {
    m.type = ClientMessage::Type::SetEvents;
    if (!j.contains("events") || !j["events"].is_array()) throw ProtocolError("set_events needs an 'events' array");
    for (const auto& e : j["events"]) {
      if (!e.is_string()) throw ProtocolError("event names must be strings");
      auto name = e.get<std::string>();
      if (!decls.is_event(name)) throw ProtocolError("undeclared event '" + name + "'");
      m.events.insert(name);
    }
  } else {
    throw ProtocolError("unknown message type '" + type + "'");
  }
  return m;
}

std::string state_frame(const SampleRecord& r, const std::vector<SafeSet>& safe_sets) {
  json sets = json::array();
  for (const auto& s : safe_sets) {
    json one{{"prop", s.prop}, {"kind", s.kind}, {"dims", s.dims}, {"radius", s.radius}};
    if (!s.center.empty()) one["center"] = s.center;
    sets.push_back(std::move(one));
  }
  json cbf = json::array();
  for (const auto& c : r.cbf) cbf.push_back(c ? json(*c) : json(nullptr));
  return json{{"type", "state"},
              {"t", r.t},
              {"x", vector_json(r.x)},
              {"sigma", r.sigma},
              {"buchi_state", r.state},
              {"active_props", r.active_props},
              {"cbf", cbf},
              {"safe_sets", sets}}
      .dump();
}

std::string feedback_frame(const FeedbackEvent& event) {
  json j = feedback_json(event);
  j["type"] = "feedback";
  return j.dump();
}

std::string status_frame(TerminalStatus status, bool running) {
  json j{{"type", "status"}, {"running", running}};
  j["terminal"] = status == TerminalStatus::Running ? json(nullptr) : json(to_string(status));
  return j.dump();
}

std::string error_frame(const std::string& message) { return json{{"type", "error"}, {"message", message}}.dump(); }

std::string ack_frame(const std::set<std::string>& events) {
  return json{{"type", "ack"}, {"request", "set_events"}, {"events", events}}.dump();
}

class Session;

struct Server::Impl {
  Impl(const Scenario& s, const CompiledSpec& c, ServeOptions o)
      : scenario(s), compiled(c), options(std::move(o)), acceptor(ioc), sim(s, c) {}

  const Scenario& scenario;
  const CompiledSpec& compiled;
  ServeOptions options;

  // io thread only
  net::io_context ioc;
  tcp::acceptor acceptor;
  std::set<std::shared_ptr<Session>> sessions;
  std::string last_state;
  std::string last_status;

  std::mutex inbox_mutex;
  std::condition_variable inbox_cv;
  std::deque<ClientMessage> inbox;
  bool stopping = false;

  // sim thread; read elsewhere under sim_mutex
  mutable std::mutex sim_mutex;
  Simulation sim;
  std::vector<Changepoint> changepoints;

  std::thread io_thread;
  std::thread sim_thread;
  Clock::time_point epoch = Clock::now();

  void accept();
  void broadcast(std::string frame, bool is_state = false, bool is_status = false);
  void push(ClientMessage m) {
    {
      std::lock_guard lock(inbox_mutex);
      inbox.push_back(std::move(m));
    }
    inbox_cv.notify_all();
  }
  void sim_loop();
  void note(const std::string& line) {
    if (options.log) *options.log << line << std::endl;
  }
  double wall() const { return std::chrono::duration<double>(Clock::now() - epoch).count(); }
};

class Session : public std::enable_shared_from_this<Session> {
 public:
  Session(tcp::socket socket, Server::Impl& server) : ws_(std::move(socket)), server_(server) {}

  void run() {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept([self = shared_from_this()](beast::error_code ec) {
      if (ec) return;
      self->server_.sessions.insert(self);
      if (!self->server_.last_status.empty()) self->send(self->server_.last_status);
      for (const auto& e : self->server_.compiled.apriori()) self->send(feedback_frame(e));
      if (!self->server_.last_state.empty()) self->send(self->server_.last_state);
      self->read();
    });
  }

  void send(std::string frame) {
    queue_.push_back(std::move(frame));
    if (queue_.size() == 1) write();
  }

  void close() {
    beast::error_code ec;
    beast::get_lowest_layer(ws_).socket().close(ec);
  }

 private:
  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->server_.sessions.erase(self);
        return;
      }
      std::string text = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      try {
        self->server_.push(parse_client_message(text, self->server_.scenario.decls));
      } catch (const ProtocolError& e) {
        self->send(error_frame(e.what()));
      }
      self->read();
    });
  }

  void write() {
    ws_.text(true);
    ws_.async_write(net::buffer(queue_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->server_.sessions.erase(self);
        return;
      }
      self->queue_.pop_front();
      if (!self->queue_.empty()) self->write();
    });
  }

  websocket::stream<beast::tcp_stream> ws_;
  Server::Impl& server_;
  beast::flat_buffer buffer_;
  std::deque<std::string> queue_;
};

void Server::Impl::accept() {
  acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
    if (ec) return;
    std::make_shared<Session>(std::move(socket), *this)->run();
    accept();
  });
}

void Server::Impl::broadcast(std::string frame, bool is_state, bool is_status) {
  net::post(ioc, [this, frame = std::move(frame), is_state, is_status] {
    if (is_state) last_state = frame;
    if (is_status) last_status = frame;
    for (const auto& s : sessions) s->send(frame);
  });
}

void Server::Impl::sim_loop() {
  const auto period = std::chrono::duration_cast<Clock::duration>(
      std::chrono::duration<double>(scenario.dt / std::max(options.speed, 1e-9)));
  const auto frame_gap = std::chrono::milliseconds(50);  // 20 Hz
  std::set<std::string> sigma;
  std::set<std::string> last_sampled;
  bool running = options.autostart;
  auto last_frame = Clock::time_point{};
  auto next = Clock::now();

  auto status = [&] {
    std::lock_guard lock(sim_mutex);
    broadcast(status_frame(sim.status(), running), false, true);
  };
  status();

  while (true) {
    std::deque<ClientMessage> batch;
    {
      std::unique_lock lock(inbox_mutex);
      if (!running || sim.done()) {
        inbox_cv.wait_for(lock, std::chrono::milliseconds(20), [&] { return stopping || !inbox.empty(); });
        next = Clock::now();
      } else {
        inbox_cv.wait_until(lock, next, [&] { return stopping; });
      }
      if (stopping) return;
      batch.swap(inbox);
    }
    for (const auto& m : batch) {
      switch (m.type) {
        case ClientMessage::Type::SetEvents: {
          std::lock_guard lock(sim_mutex);
          sigma = m.events;
          changepoints.push_back({wall(), sim.time(), sigma});
          note("changepoint wall=" + std::to_string(wall()) + " t=" + std::to_string(sim.time()) + " events=" +
               json(sigma).dump());
          broadcast(ack_frame(sigma));
          break;
        }
        case ClientMessage::Type::Start:
          running = true;
          status();
          break;
        case ClientMessage::Type::Pause:
          running = false;
          status();
          break;
        case ClientMessage::Type::Reset: {
          std::lock_guard lock(sim_mutex);
          sim.reset();
          sigma.clear();
          last_sampled.clear();
          note("reset");
          broadcast(status_frame(sim.status(), running), false, true);
          break;
        }
      }
    }
    if (!running || sim.done() || Clock::now() < next) continue;

    std::lock_guard lock(sim_mutex);
    const SampleRecord& rec = sim.step(sigma);
    if (rec.sigma != last_sampled || rec.t == 0.0) {
      note("sample t=" + std::to_string(rec.t) + " sigma=" + json(rec.sigma).dump() + " state=" + rec.state);
      last_sampled = rec.sigma;
    }
    for (const auto& e : rec.feedback) broadcast(feedback_frame(e));
    auto now = Clock::now();
    if (now - last_frame >= frame_gap || sim.done()) {
      broadcast(state_frame(rec, sim.safe_sets()), true);
      last_frame = now;
    }
    if (sim.done()) {
      note("terminal " + to_string(sim.status()) + " t=" + std::to_string(rec.t));
      broadcast(status_frame(sim.status(), running), false, true);
    }
    next += period;
  }
}

Server::Server(const Scenario& scenario, const CompiledSpec& compiled, ServeOptions options)
    : impl_(std::make_unique<Impl>(scenario, compiled, std::move(options))) {}

Server::~Server() { stop(); }

std::uint16_t Server::start() {
  auto& d = *impl_;
  tcp::endpoint endpoint(net::ip::make_address(d.options.address), d.options.port);
  d.acceptor.open(endpoint.protocol());
  d.acceptor.set_option(net::socket_base::reuse_address(true));
  d.acceptor.bind(endpoint);
  d.acceptor.listen();
  d.accept();
  d.io_thread = std::thread([&d] {
    auto guard = net::make_work_guard(d.ioc);
    d.ioc.run();
  });
  d.sim_thread = std::thread([&d] { d.sim_loop(); });
  return d.acceptor.local_endpoint().port();
}

void Server::stop() {
  auto& d = *impl_;
  {
    std::lock_guard lock(d.inbox_mutex);
    if (d.stopping && !d.io_thread.joinable()) return;
    d.stopping = true;
  }
  d.inbox_cv.notify_all();
  if (d.sim_thread.joinable()) d.sim_thread.join();
  if (d.io_thread.joinable()) {
    net::post(d.ioc, [&d] {
      beast::error_code ec;
      d.acceptor.close(ec);
      for (const auto& s : d.sessions) s->close();
      d.sessions.clear();
      d.ioc.stop();
    });
    d.io_thread.join();
  }
  d.sessions.clear();
}

std::vector<Changepoint> Server::changepoints() const {
  std::lock_guard lock(impl_->sim_mutex);
  return impl_->changepoints;
}

RunLog Server::log() const {
  std::lock_guard lock(impl_->sim_mutex);
  return impl_->sim.log();
}

}  // namespace evstl
