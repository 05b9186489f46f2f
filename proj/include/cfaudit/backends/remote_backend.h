/*
 * Copyright 2026 The cfaudit Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef CFAUDIT_BACKENDS_REMOTE_BACKEND_H_
#define CFAUDIT_BACKENDS_REMOTE_BACKEND_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "cfaudit/backends/backend.h"
#include "cfaudit/backends/channel.h"
#include "cfaudit/core/errors.h"
#include "json.hpp"

namespace cfaudit {

// Client for externally served models speaking newline-delimited JSON:
//
//   -> {"op":"hello","version":1}
//   <- {"ok":true,"latent_dim":D,"image_shape":[...],"has_encoder":bool}
//   -> {"id":N,"op":"generate"|"encode"|"classify","batch":[[...],...]}
//   <- {"id":N,"ok":true,"result":[[...],...]}  or  {"id":N,"ok":false,...}
//
// One request is in flight at a time; calls are serialised by a mutex. A
// failed request is retried once (after reconnecting if the transport broke)
// and then surfaced as BackendError.
class RemoteBackend final : public Backend {
 public:
  using ChannelFactory = std::function<std::unique_ptr<LineChannel>()>;

  static constexpr int kProtocolVersion = 1;
  static constexpr std::size_t kMaxBatch = 1024;

  // Connects and performs the handshake. Throws BackendError on failure.
  explicit RemoteBackend(ChannelFactory connect);

  const BackendDescriptor& descriptor() const override { return desc_; }
  std::vector<ImageTensor> Generate(std::span<const LatentCode> zs) override;
  std::vector<LatentCode> Encode(std::span<const ImageTensor> xs) override;
  std::vector<double> ClassifyProb(std::span<const ImageTensor> xs) override;

  // Requests issued, counting retries.
  std::uint64_t requests_sent() const { return next_id_ - 1; }

 private:
  void Connect();
  // Sends one request and returns its validated "result" rows.
  std::vector<std::vector<double>> Call(const std::string& op,
                                        const nlohmann::json& batch,
                                        std::size_t row_width);
  std::vector<std::vector<double>> CallOnce(const std::string& op,
                                            const nlohmann::json& batch,
                                            std::size_t expected_rows,
                                            std::size_t row_width);

  static std::vector<std::vector<double>> ParseResult(
      const nlohmann::json& reply, std::uint64_t id, const std::string& op,
      std::size_t expected_rows, std::size_t row_width);

  ChannelFactory connect_;
  std::unique_ptr<LineChannel> channel_;
  BackendDescriptor desc_;
  std::uint64_t next_id_ = 1;
  std::mutex mu_;
};

// Raised inside the client when the server answered ok:false; the channel is
// still usable.
class RemoteRequestError : public BackendError {
 public:
  using BackendError::BackendError;
};

}  // namespace cfaudit

#endif  // CFAUDIT_BACKENDS_REMOTE_BACKEND_H_
