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
//
// Byte-level allgatherv transports. Each participant contributes one opaque
// payload per round and receives every participant's payload, ordered by
// rank. Calls are blocking with barrier semantics.

#pragma once

#include <condition_variable>
#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

namespace vgc {

using Payload = std::vector<std::uint8_t>;

class Transport {
 public:
  virtual ~Transport() = default;

  virtual std::uint32_t rank() const = 0;
  virtual std::uint32_t world_size() const = 0;

  // Blocks until every rank has contributed, then returns all payloads in
  // rank order (index == rank).
  virtual std::vector<Payload> allgatherv(std::span<const std::uint8_t> payload) = 0;
};

// Shared rendezvous for threads of one process. Create one group, then one
// transport per worker thread.
class InprocGroup {
 public:
  explicit InprocGroup(std::uint32_t world_size);

  std::uint32_t world_size() const { return world_; }

 private:
  friend class InprocTransport;

  std::uint32_t world_;
  std::mutex mutex_;
  std::condition_variable cv_;
  std::uint64_t generation_ = 0;
  std::uint32_t arrived_ = 0;
  std::vector<Payload> slots_;
  std::vector<Payload> published_;
};

class InprocTransport final : public Transport {
 public:
  InprocTransport(std::shared_ptr<InprocGroup> group, std::uint32_t rank);

  std::uint32_t rank() const override { return rank_; }
  std::uint32_t world_size() const override { return group_->world_size(); }
  std::vector<Payload> allgatherv(std::span<const std::uint8_t> payload) override;

 private:
  std::shared_ptr<InprocGroup> group_;
  std::uint32_t rank_;
};

// TCP transport with rank 0 acting as the rendezvous hub. Peers connect to
// host:port and announce their rank; every round each peer sends one
// length-prefixed frame and receives the full rank-ordered set back. Frames
// are [u32 length][payload], little-endian.
class TcpTransport final : public Transport {
 public:
  // Rank 0 binds and listens immediately (port 0 picks a free port; see
  // port()). Other ranks connect, retrying until the hub is up.
  TcpTransport(std::uint32_t rank, std::uint32_t world_size, const std::string& host,
               std::uint16_t port);
  ~TcpTransport() override;

  TcpTransport(const TcpTransport&) = delete;
  TcpTransport& operator=(const TcpTransport&) = delete;

  std::uint32_t rank() const override { return rank_; }
  std::uint32_t world_size() const override { return world_; }
  std::vector<Payload> allgatherv(std::span<const std::uint8_t> payload) override;

  // Actual listening port of the hub (only meaningful on rank 0).
  std::uint16_t port() const { return port_; }

 private:
  void accept_peers();

  std::uint32_t rank_;
  std::uint32_t world_;
  std::uint16_t port_ = 0;
  int listen_fd_ = -1;
  int hub_fd_ = -1;                 // peer's connection to the hub
  std::vector<int> peer_fds_;       // hub's connections, indexed by rank
  bool peers_accepted_ = false;
};

// Parses "host:port"; throws config_error on malformed input.
std::pair<std::string, std::uint16_t> parse_endpoint(const std::string& endpoint);

}  // namespace vgc
