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

#ifndef CFAUDIT_BACKENDS_CHANNEL_H_
#define CFAUDIT_BACKENDS_CHANNEL_H_

#include <chrono>
#include <memory>
#include <optional>
#include <string>

#include <sys/types.h>

namespace cfaudit {

// A bidirectional newline-delimited text stream.
class LineChannel {
 public:
  virtual ~LineChannel() = default;
  // Appends '\n'. Throws BackendError on transport failure.
  virtual void WriteLine(const std::string& line) = 0;
  // Next line without its terminator; nullopt at end of stream. Throws
  // BackendError on transport failure or timeout.
  virtual std::optional<std::string> ReadLine() = 0;
};

// Channel over a pair of file descriptors, which it owns and closes. The
// two may be the same descriptor (a socket).
class FdChannel : public LineChannel {
 public:
  FdChannel(int read_fd, int write_fd,
            std::chrono::milliseconds timeout = std::chrono::seconds(120));
  ~FdChannel() override;
  FdChannel(const FdChannel&) = delete;
  FdChannel& operator=(const FdChannel&) = delete;

  void WriteLine(const std::string& line) override;
  std::optional<std::string> ReadLine() override;

 private:
  int read_fd_;
  int write_fd_;
  std::chrono::milliseconds timeout_;
  std::string buffer_;
  bool eof_ = false;
};

// Connects to host:port over TCP.
std::unique_ptr<LineChannel> ConnectTcp(const std::string& host, int port);

// Runs `command` through /bin/sh and talks to its stdin/stdout. The child is
// reaped when the channel is destroyed.
class ChildProcessChannel : public LineChannel {
 public:
  explicit ChildProcessChannel(const std::string& command);
  ~ChildProcessChannel() override;
  ChildProcessChannel(const ChildProcessChannel&) = delete;
  ChildProcessChannel& operator=(const ChildProcessChannel&) = delete;

  void WriteLine(const std::string& line) override { io_->WriteLine(line); }
  std::optional<std::string> ReadLine() override { return io_->ReadLine(); }

 private:
  pid_t pid_ = -1;
  std::unique_ptr<FdChannel> io_;
};

}  // namespace cfaudit

#endif  // CFAUDIT_BACKENDS_CHANNEL_H_
