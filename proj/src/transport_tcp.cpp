// Copyright 2026 The vgc Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// =============================================================================

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <cstring>
#include <thread>

#include "vgc/error.hpp"
#include "vgc/transport.hpp"

namespace vgc {

namespace {

constexpr int kConnectRetries = 200;
constexpr auto kRetryDelay = std::chrono::milliseconds(25);

void write_all(int fd, const void* data, std::size_t len, std::uint32_t who) {
  const auto* p = static_cast<const std::uint8_t*>(data);
  while (len > 0) {
    const ssize_t n = ::write(fd, p, len);
    if (n <= 0) throw comm_error(who, "socket write failed");
    p += n;
    len -= static_cast<std::size_t>(n);
  }
}

void read_all(int fd, void* data, std::size_t len, std::uint32_t who) {
  auto* p = static_cast<std::uint8_t*>(data);
  while (len > 0) {
    const ssize_t n = ::read(fd, p, len);
    if (n == 0) throw comm_error(who, "peer disconnected");
    if (n < 0) throw comm_error(who, "socket read failed");
    p += n;
    len -= static_cast<std::size_t>(n);
  }
}

void write_u32(int fd, std::uint32_t v, std::uint32_t who) {
  std::uint8_t b[4] = {static_cast<std::uint8_t>(v), static_cast<std::uint8_t>(v >> 8),
                       static_cast<std::uint8_t>(v >> 16), static_cast<std::uint8_t>(v >> 24)};
  write_all(fd, b, 4, who);
}

std::uint32_t read_u32(int fd, std::uint32_t who) {
  std::uint8_t b[4];
  read_all(fd, b, 4, who);
  return static_cast<std::uint32_t>(b[0]) | static_cast<std::uint32_t>(b[1]) << 8 |
         static_cast<std::uint32_t>(b[2]) << 16 | static_cast<std::uint32_t>(b[3]) << 24;
}

void write_frame(int fd, std::span<const std::uint8_t> payload, std::uint32_t who) {
  write_u32(fd, static_cast<std::uint32_t>(payload.size()), who);
  if (!payload.empty()) write_all(fd, payload.data(), payload.size(), who);
}

Payload read_frame(int fd, std::uint32_t who) {
  const std::uint32_t len = read_u32(fd, who);
  Payload p(len);
  if (len > 0) read_all(fd, p.data(), len, who);
  return p;
}

sockaddr_in make_addr(const std::string& host, std::uint16_t port) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    throw config_error("rendezvous host must be an IPv4 address: " + host);
  }
  return addr;
}

void set_nodelay(int fd) {
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
}

}  // namespace

std::pair<std::string, std::uint16_t> parse_endpoint(const std::string& endpoint) {
  const auto colon = endpoint.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == endpoint.size()) {
    throw config_error("rendezvous must be host:port, got '" + endpoint + "'");
  }
  const std::string host = endpoint.substr(0, colon);
  const int port = std::stoi(endpoint.substr(colon + 1));
  if (port < 0 || port > 65535) throw config_error("rendezvous port out of range");
  return {host, static_cast<std::uint16_t>(port)};
}

TcpTransport::TcpTransport(std::uint32_t rank, std::uint32_t world_size,
                           const std::string& host, std::uint16_t port)
    : rank_(rank), world_(world_size) {
  if (world_size == 0 || rank >= world_size) throw config_error("bad rank/world size");

  if (rank_ == 0) {
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0) throw comm_error(0, "cannot create listen socket");
    int one = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    sockaddr_in addr = make_addr(host, port);
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
      throw comm_error(0, "cannot bind rendezvous " + host + ":" + std::to_string(port));
    }
    if (::listen(listen_fd_, static_cast<int>(world_size)) != 0) {
      throw comm_error(0, "listen failed");
    }
    sockaddr_in bound{};
    socklen_t len = sizeof(bound);
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&bound), &len);
    port_ = ntohs(bound.sin_port);
    peer_fds_.assign(world_size, -1);
  } else {
    port_ = port;
    sockaddr_in addr = make_addr(host, port);
    for (int attempt = 0;; ++attempt) {
      hub_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
      if (hub_fd_ < 0) throw comm_error(rank_, "cannot create socket");
      if (::connect(hub_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) == 0) break;
      ::close(hub_fd_);
      hub_fd_ = -1;
      if (attempt >= kConnectRetries) {
        throw comm_error(rank_, "cannot reach rendezvous " + host + ":" + std::to_string(port));
      }
      std::this_thread::sleep_for(kRetryDelay);
    }
    set_nodelay(hub_fd_);
    write_u32(hub_fd_, rank_, rank_);  // hello
  }
}

TcpTransport::~TcpTransport() {
  if (hub_fd_ >= 0) ::close(hub_fd_);
  for (int fd : peer_fds_) {
    if (fd >= 0) ::close(fd);
  }
  if (listen_fd_ >= 0) ::close(listen_fd_);
}

void TcpTransport::accept_peers() {
  for (std::uint32_t n = 1; n < world_; ++n) {
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) throw comm_error(0, "accept failed");
    set_nodelay(fd);
    const std::uint32_t peer_rank = read_u32(fd, 0);
    if (peer_rank == 0 || peer_rank >= world_ || peer_fds_[peer_rank] != -1) {
      ::close(fd);
      throw comm_error(peer_rank, "invalid or duplicate rank in hello");
    }
    peer_fds_[peer_rank] = fd;
  }
  peers_accepted_ = true;
}

std::vector<Payload> TcpTransport::allgatherv(std::span<const std::uint8_t> payload) {
  if (rank_ == 0) {
    if (!peers_accepted_) accept_peers();

    std::vector<Payload> all(world_);
    all[0].assign(payload.begin(), payload.end());
    for (std::uint32_t r = 1; r < world_; ++r) {
      all[r] = read_frame(peer_fds_[r], r);
    }
    for (std::uint32_t r = 1; r < world_; ++r) {
      write_u32(peer_fds_[r], world_, r);
      for (const Payload& p : all) write_frame(peer_fds_[r], p, r);
    }
    return all;
  }

  write_frame(hub_fd_, payload, 0);
  const std::uint32_t count = read_u32(hub_fd_, 0);
  if (count != world_) throw comm_error(0, "hub announced wrong world size");
  std::vector<Payload> all(world_);
  for (std::uint32_t r = 0; r < world_; ++r) {
    all[r] = read_frame(hub_fd_, 0);
  }
  return all;
}

}  // namespace vgc
