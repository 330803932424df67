#pragma once

// HTTP + WebSocket front end for SessionService (Boost.Beast).

#include <cstdint>
#include <memory>

#include "kakari/service.hpp"

namespace kakari {

class Server {
 public:
  // Binds immediately; port 0 picks a free port.
  Server(SessionService& service, const std::string& host, int port, int threads = 2);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  std::uint16_t port() const;
  // Starts the worker threads and returns.
  void start();
  // Blocks until stop() (or SIGINT/SIGTERM when install_signals was set).
  void run(bool install_signals = false);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace kakari
