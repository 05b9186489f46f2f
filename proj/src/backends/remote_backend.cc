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

#include "cfaudit/backends/remote_backend.h"

#include <cmath>

#include "cfaudit/core/errors.h"

namespace cfaudit {

using nlohmann::json;

namespace {

void RequireFinite(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw InputError(std::string("non-finite value in ") + what +
                       " cannot be sent to a remote backend");
    }
  }
}

}  // namespace

RemoteBackend::RemoteBackend(ChannelFactory connect)
    : connect_(std::move(connect)) {
  Connect();
}

void RemoteBackend::Connect() {
  channel_.reset();
  channel_ = connect_();
  channel_->WriteLine(json{{"op", "hello"}, {"version", kProtocolVersion}}
                          .dump());
  std::optional<std::string> line = channel_->ReadLine();
  if (!line) throw BackendError("backend closed the connection during hello");
  BackendDescriptor desc;
  try {
    const json reply = json::parse(*line);
    if (!reply.value("ok", false)) {
      throw BackendError("backend rejected hello: " +
                         reply.value("error", std::string("no reason given")));
    }
    desc.latent_dim = reply.at("latent_dim").get<std::size_t>();
    desc.image_shape = reply.at("image_shape").get<std::vector<std::size_t>>();
    desc.has_encoder = reply.at("has_encoder").get<bool>();
  } catch (const json::exception& e) {
    throw BackendError(std::string("malformed hello reply: ") + e.what());
  }
  if (desc.latent_dim < 1 || desc.image_shape.empty() ||
      desc.image_size() == 0) {
    throw BackendError("hello reply declares an empty latent or image space");
  }
  if (desc_.latent_dim != 0 &&
      (desc.latent_dim != desc_.latent_dim ||
       desc.image_shape != desc_.image_shape ||
       desc.has_encoder != desc_.has_encoder)) {
    throw BackendError("backend changed its descriptor after reconnecting");
  }
  desc_ = std::move(desc);
}

std::vector<std::vector<double>> RemoteBackend::CallOnce(
    const std::string& op, const json& batch, std::size_t expected_rows,
    std::size_t row_width) {
  const std::uint64_t id = next_id_++;
  channel_->WriteLine(json{{"id", id}, {"op", op}, {"batch", batch}}.dump());
  std::optional<std::string> line = channel_->ReadLine();
  if (!line) throw BackendError("backend closed the connection");
  json reply;
  try {
    reply = json::parse(*line);
  } catch (const json::parse_error& e) {
    throw BackendError(std::string("malformed reply: ") + e.what());
  }
  try {
    return ParseResult(reply, id, op, expected_rows, row_width);
  } catch (const json::exception& e) {
    throw RemoteRequestError(op + " reply is malformed: " + e.what());
  }
}

std::vector<std::vector<double>> RemoteBackend::ParseResult(
    const json& reply, std::uint64_t id, const std::string& op,
    std::size_t expected_rows, std::size_t row_width) {
  if (!reply.is_object() || !reply.contains("id") ||
      reply["id"] != json(id)) {
    throw BackendError("reply id does not match request " +
                       std::to_string(id));
  }
  if (!reply.value("ok", false)) {
    throw RemoteRequestError(
        op + " failed on backend: " +
        reply.value("error", std::string("no reason given")));
  }
  const json& result = reply.contains("result") ? reply["result"] : json();
  if (!result.is_array() || result.size() != expected_rows) {
    throw RemoteRequestError(op + " reply has the wrong number of rows");
  }
  std::vector<std::vector<double>> rows;
  rows.reserve(expected_rows);
  for (const json& row : result) {
    std::vector<double> values;
    // A bare number is accepted for single-value rows (classify).
    if (row.is_number() && row_width == 1) {
      values.push_back(row.get<double>());
    } else if (row.is_array() && row.size() == row_width) {
      for (const json& v : row) {
        if (!v.is_number()) {
          throw RemoteRequestError(op + " reply holds a non-numeric value");
        }
        values.push_back(v.get<double>());
      }
    } else {
      throw RemoteRequestError(op + " reply row has the wrong width");
    }
    for (double v : values) {
      if (!std::isfinite(v)) {
        throw RemoteRequestError(op + " reply holds a non-finite value");
      }
    }
    rows.push_back(std::move(values));
  }
  return rows;
}

std::vector<std::vector<double>> RemoteBackend::Call(const std::string& op,
                                                     const json& batch,
                                                     std::size_t row_width) {
  std::lock_guard<std::mutex> lock(mu_);
  const std::size_t rows = batch.size();
  try {
    return CallOnce(op, batch, rows, row_width);
  } catch (const RemoteRequestError& first) {
    try {
      return CallOnce(op, batch, rows, row_width);
    } catch (const BackendError& second) {
      throw BackendError(std::string("giving up after retry: ") +
                         second.what() + " (first attempt: " + first.what() +
                         ")");
    }
  } catch (const BackendError& first) {
    // The transport is in an unknown state; start over on a new connection.
    try {
      Connect();
      return CallOnce(op, batch, rows, row_width);
    } catch (const BackendError& second) {
      throw BackendError(std::string("giving up after reconnect: ") +
                         second.what() + " (first attempt: " + first.what() +
                         ")");
    }
  }
}

std::vector<ImageTensor> RemoteBackend::Generate(
    std::span<const LatentCode> zs) {
  CheckLatent(zs);
  std::vector<ImageTensor> out;
  out.reserve(zs.size());
  for (std::size_t start = 0; start < zs.size(); start += kMaxBatch) {
    const std::size_t end = std::min(zs.size(), start + kMaxBatch);
    json batch = json::array();
    for (std::size_t s = start; s < end; ++s) {
      RequireFinite(zs[s].values, "latent code");
      batch.push_back(zs[s].values);
    }
    for (auto& row : Call("generate", batch, desc_.image_size())) {
      out.emplace_back(desc_.image_shape, std::move(row));
    }
  }
  return out;
}

std::vector<LatentCode> RemoteBackend::Encode(std::span<const ImageTensor> xs) {
  if (!desc_.has_encoder) throw UnsupportedError("remote backend has no encoder");
  CheckImages(xs);
  std::vector<LatentCode> out;
  out.reserve(xs.size());
  for (std::size_t start = 0; start < xs.size(); start += kMaxBatch) {
    const std::size_t end = std::min(xs.size(), start + kMaxBatch);
    json batch = json::array();
    for (std::size_t s = start; s < end; ++s) {
      RequireFinite(xs[s].values, "image");
      batch.push_back(xs[s].values);
    }
    for (auto& row : Call("encode", batch, desc_.latent_dim)) {
      out.emplace_back(std::move(row));
    }
  }
  return out;
}

std::vector<double> RemoteBackend::ClassifyProb(
    std::span<const ImageTensor> xs) {
  CheckImages(xs);
  std::vector<double> out;
  out.reserve(xs.size());
  for (std::size_t start = 0; start < xs.size(); start += kMaxBatch) {
    const std::size_t end = std::min(xs.size(), start + kMaxBatch);
    json batch = json::array();
    for (std::size_t s = start; s < end; ++s) {
      RequireFinite(xs[s].values, "image");
      batch.push_back(xs[s].values);
    }
    for (const auto& row : Call("classify", batch, 1)) {
      if (!(row[0] >= 0.0 && row[0] <= 1.0)) {
        throw BackendError("classify returned a value outside [0,1]");
      }
      out.push_back(row[0]);
    }
  }
  return out;
}

}  // namespace cfaudit
