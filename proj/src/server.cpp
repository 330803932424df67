#include "kakari/server.hpp"

#include <chrono>
#include <deque>
#include <iostream>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast.hpp>

#include "kakari/error.hpp"

namespace kakari {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point epoch) {
  return std::chrono::duration<double, std::milli>(Clock::now() - epoch).count();
}

constexpr auto kTickPeriod = std::chrono::milliseconds(20);

class WsSession : public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(tcp::socket&& socket, SessionService& service, std::string id, Clock::time_point epoch)
      : ws_(std::move(socket)), timer_(ws_.get_executor()), service_(service), id_(std::move(id)), epoch_(epoch) {}

  void run(http::request<http::string_body> req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req, beast::bind_front_handler(&WsSession::on_accept, shared_from_this()));
  }

 private:
  void on_accept(beast::error_code ec) {
    if (ec) return;
    read();
    schedule_tick();
  }

  void read() { ws_.async_read(buffer_, beast::bind_front_handler(&WsSession::on_read, shared_from_this())); }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) {
      closed_ = true;
      timer_.cancel();
      return;
    }
    const std::string text = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    try {
      send(service_.handle_message(id_, text, ms_since(epoch_)));
    } catch (const Error& e) {
      send({std::string("{\"v\":1,\"type\":\"error\",\"code\":\"") + std::string(e.category()) +
            "\",\"message\":\"session not available\"}"});
    }
    read();
  }

  void schedule_tick() {
    timer_.expires_after(kTickPeriod);
    timer_.async_wait([self = shared_from_this()](beast::error_code ec) {
      if (ec || self->closed_) return;
      try {
        self->send(self->service_.tick(self->id_, ms_since(self->epoch_)));
      } catch (const std::exception&) {
      }
      self->schedule_tick();
    });
  }

  void send(std::vector<std::string> frames) {
    for (auto& f : frames) queue_.push_back(std::move(f));
    if (!writing_) write_next();
  }

  void write_next() {
    if (queue_.empty() || closed_) {
      writing_ = false;
      return;
    }
    writing_ = true;
    ws_.text(true);
    ws_.async_write(asio::buffer(queue_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      self->queue_.pop_front();
      if (ec) {
        self->closed_ = true;
        self->writing_ = false;
        return;
      }
      self->write_next();
    });
  }

  websocket::stream<beast::tcp_stream> ws_;
  asio::steady_timer timer_;
  beast::flat_buffer buffer_;
  std::deque<std::string> queue_;
  bool writing_ = false;
  bool closed_ = false;
  SessionService& service_;
  std::string id_;
  Clock::time_point epoch_;
};

class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket&& socket, SessionService& service, Clock::time_point epoch)
      : stream_(std::move(socket)), service_(service), epoch_(epoch) {}

  void run() {
    asio::dispatch(stream_.get_executor(), beast::bind_front_handler(&HttpSession::read, shared_from_this()));
  }

 private:
  void read() {
    req_ = {};
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, req_, beast::bind_front_handler(&HttpSession::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) {
      stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
      return;
    }
    if (websocket::is_upgrade(req_)) {
      if (auto id = stream_target(std::string(req_.target())); id && service_has(*id)) {
        stream_.expires_never();
        std::make_shared<WsSession>(stream_.release_socket(), service_, *id, epoch_)->run(std::move(req_));
        return;
      }
      respond(HttpReply{404, "application/json",
                        R"({"error":{"category":"not-found","message":"unknown session stream"}})"});
      return;
    }
    respond(route_http(service_, std::string(req_.method_string()), std::string(req_.target()), req_.body()));
  }

  bool service_has(const std::string& id) {
    try {
      service_.state(id);  // also recovers journaled sessions
      return true;
    } catch (const Error&) {
      return false;
    }
  }

  void respond(const HttpReply& reply) {
    auto res = std::make_shared<http::response<http::string_body>>(static_cast<http::status>(reply.status),
                                                                    req_.version());
    res->set(http::field::server, "kakari");
    res->set(http::field::content_type, reply.content_type);
    res->keep_alive(req_.keep_alive());
    if (req_.method() != http::verb::head) res->body() = reply.body;
    res->prepare_payload();
    http::async_write(stream_, *res, [self = shared_from_this(), res](beast::error_code ec, std::size_t) {
      if (ec) return;
      if (!res->keep_alive()) {
        self->stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
        return;
      }
      self->read();
    });
  }

  beast::tcp_stream stream_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> req_;
  SessionService& service_;
  Clock::time_point epoch_;
};

}  // namespace

struct Server::Impl {
  SessionService& service;
  asio::io_context ioc;
  tcp::acceptor acceptor;
  int threads;
  std::vector<std::thread> workers;
  Clock::time_point epoch = Clock::now();

  Impl(SessionService& s, int n) : service(s), ioc(n), acceptor(asio::make_strand(ioc)), threads(n) {}

  void accept() {
    acceptor.async_accept(asio::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
      if (ec) {
        if (ec == asio::error::operation_aborted) return;
      } else {
        std::make_shared<HttpSession>(std::move(socket), service, epoch)->run();
      }
      accept();
    });
  }
};

Server::Server(SessionService& service, const std::string& host, int port, int threads)
    : impl_(std::make_unique<Impl>(service, std::max(1, threads))) {
  beast::error_code ec;
  const auto address = asio::ip::make_address(host, ec);
  if (ec) throw ConfigError("bad listen address '" + host + "'");
  const tcp::endpoint endpoint(address, static_cast<unsigned short>(port));
  auto& a = impl_->acceptor;
  a.open(endpoint.protocol(), ec);
  if (!ec) a.set_option(asio::socket_base::reuse_address(true), ec);
  if (!ec) a.bind(endpoint, ec);
  if (!ec) a.listen(asio::socket_base::max_listen_connections, ec);
  if (ec) throw IoError("cannot listen on " + host + ":" + std::to_string(port) + ": " + ec.message());
}

Server::~Server() { stop(); }

std::uint16_t Server::port() const { return impl_->acceptor.local_endpoint().port(); }

void Server::start() {
  if (!impl_->workers.empty()) return;
  impl_->accept();
  for (int i = 0; i < impl_->threads; ++i) impl_->workers.emplace_back([this] { impl_->ioc.run(); });
}

void Server::run(bool install_signals) {
  std::unique_ptr<asio::signal_set> signals;
  if (install_signals) {
    signals = std::make_unique<asio::signal_set>(impl_->ioc, SIGINT, SIGTERM);
    signals->async_wait([this](beast::error_code, int) { impl_->ioc.stop(); });
  }
  start();
  for (auto& t : impl_->workers)
    if (t.joinable()) t.join();
  impl_->workers.clear();
}

void Server::stop() {
  impl_->ioc.stop();
  for (auto& t : impl_->workers)
    if (t.joinable() && t.get_id() != std::this_thread::get_id()) t.join();
  impl_->workers.clear();
}

}  // namespace kakari
