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

#include <cmath>
#include <functional>
#include <memory>

#include "cfaudit/backends/factory.h"
#include "cfaudit/backends/oracle_backend.h"
#include "cfaudit/backends/remote_backend.h"
#include "cfaudit/core/errors.h"
#include "cfaudit/core/latent.h"
#include "cfaudit/core/rng.h"
#include "cfaudit/metrics/sensitivity.h"
#include "gtest/gtest.h"
#include "protocol_server.h"
#include "test_util.h"

namespace cfaudit {
namespace {

using testing::ServerBehavior;
using testing::TcpTestServer;

// The reference model: identity generator on 3 dims, f(x) = sigmoid(x_0).
SyntheticOracleSpec EchoSpec() { return testing::LinearOracle({1.0, 0.0, 0.0}); }

struct Fixture {
  std::unique_ptr<OracleBackend> served;
  std::unique_ptr<TcpTestServer> server;
  std::unique_ptr<Backend> backend;
};

using FixtureFactory = std::function<Fixture()>;

struct NamedFactory {
  std::string name;
  FixtureFactory make;
};

void PrintTo(const NamedFactory& f, std::ostream* os) { *os << f.name; }

std::vector<NamedFactory> AllBackends() {
  return {
      {"oracle",
       [] {
         Fixture f;
         f.backend = std::make_unique<OracleBackend>(EchoSpec());
         return f;
       }},
      {"tcp",
       [] {
         Fixture f;
         f.served = std::make_unique<OracleBackend>(EchoSpec());
         f.server = std::make_unique<TcpTestServer>(*f.served);
         f.backend = OpenBackend(f.server->locator());
         return f;
       }},
      {"stdio",
       [] {
         Fixture f;
         f.backend = OpenBackend(std::string("stdio:") + CFAUDIT_TEST_SERVER +
                                 " --identity 3");
         return f;
       }},
  };
}

class BackendContract : public ::testing::TestWithParam<NamedFactory> {
 protected:
  void SetUp() override { fixture_ = GetParam().make(); }
  Backend& backend() { return *fixture_.backend; }
  Fixture fixture_;
};

TEST_P(BackendContract, Descriptor) {
  const auto& d = backend().descriptor();
  EXPECT_EQ(d.latent_dim, 3u);
  EXPECT_EQ(d.image_shape, (std::vector<std::size_t>{3}));
  EXPECT_TRUE(d.has_encoder);
}

TEST_P(BackendContract, GenerateEchoes) {
  EXPECT_EQ(backend().GenerateOne(LatentCode({1.0, 2.0, 3.0})).values,
            (std::vector<double>{1.0, 2.0, 3.0}));
}

TEST_P(BackendContract, EncodeInvertsGenerate) {
  const auto zs = SamplePrior(5, 1000, 3);
  const auto back = backend().Encode(backend().Generate(zs));
  ASSERT_EQ(back.size(), zs.size());
  for (std::size_t s = 0; s < zs.size(); ++s)
    for (std::size_t k = 0; k < 3; ++k) ASSERT_NEAR(back[s][k], zs[s][k], 1e-9);
}

TEST_P(BackendContract, ClassifyMatchesSigmoid) {
  for (double x : {-3.0, 0.0, 0.25, 2.0}) {
    EXPECT_NEAR(backend().ClassifyOne(ImageTensor({3}, {x, 9.0, -9.0})),
                testing::PlainSigmoid(x), 1e-15);
  }
  EXPECT_EQ(ClassifyBinary(backend(), ImageTensor({3}, {0.0, 0.0, 0.0}), 0.5), 1);
}

TEST_P(BackendContract, BatchesPreserveOrder) {
  Rng rng(17, "test");
  for (int round = 0; round < 4; ++round) {
    const std::size_t n = 1 + rng.UniformIndex(2500);
    const auto zs = SamplePrior(round, n, 3);
    const auto probs = backend().ClassifyLatent(zs);
    ASSERT_EQ(probs.size(), n);
    for (std::size_t s = 0; s < n; ++s) {
      ASSERT_NEAR(probs[s], testing::PlainSigmoid(zs[s][0]), 1e-15);
    }
  }
}

TEST_P(BackendContract, RejectsWrongDimensions) {
  EXPECT_THROW(backend().GenerateOne(LatentCode({1.0})), DimensionError);
  EXPECT_THROW(backend().ClassifyOne(ImageTensor({2}, {1.0, 2.0})), DimensionError);
}

TEST_P(BackendContract, SensitivityMatchesInProcessOracle) {
  OracleBackend reference(EchoSpec());
  const auto zs = SamplePrior(2, 3000, 3);
  const std::vector<double> d = {0.6, 0.8, 0.0};
  const Estimate a = SensitivityContinuous(backend(), d, zs);
  const Estimate b = SensitivityContinuous(reference, d, zs);
  // Doubles round-trip exactly through the JSON encoding.
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.stderr_, b.stderr_);
}

INSTANTIATE_TEST_SUITE_P(AllTransports, BackendContract,
                         ::testing::ValuesIn(AllBackends()),
                         [](const auto& info) { return info.param.name; });

TEST(RemoteBackend, MissingEncoderIsUnsupported) {
  OracleBackend model(EchoSpec());
  ServerBehavior b;
  b.expose_encoder = false;
  TcpTestServer server(model, b);
  auto remote = OpenBackend(server.locator());
  EXPECT_FALSE(remote->descriptor().has_encoder);
  EXPECT_THROW(remote->EncodeOne(ImageTensor({3}, {0, 0, 0})), UnsupportedError);
  EXPECT_THROW(ReconstructionDiagnostic(*remote, SamplePrior(0, 2, 3)),
               UnsupportedError);
}

TEST(RemoteBackend, StdioWithoutEncoder) {
  auto remote = OpenBackend(std::string("stdio:") + CFAUDIT_TEST_SERVER +
                            " --identity 3 --no-encoder");
  EXPECT_THROW(remote->EncodeOne(ImageTensor({3}, {0, 0, 0})), UnsupportedError);
}

TEST(RemoteBackend, RetriesAFailedRequestOnce) {
  OracleBackend model(EchoSpec());
  ServerBehavior b;
  b.fail_first = 1;
  TcpTestServer server(model, b);
  RemoteBackend remote([&] { return ConnectTcp("127.0.0.1", server.port()); });
  EXPECT_EQ(remote.GenerateOne(LatentCode({1, 2, 3})).values,
            (std::vector<double>{1, 2, 3}));
  EXPECT_EQ(remote.requests_sent(), 2u);
}

TEST(RemoteBackend, SurfacesRepeatedFailure) {
  OracleBackend model(EchoSpec());
  ServerBehavior b;
  b.fail_first = 2;
  TcpTestServer server(model, b);
  auto remote = OpenBackend(server.locator());
  try {
    remote->GenerateOne(LatentCode({1, 2, 3}));
    FAIL() << "expected BackendError";
  } catch (const BackendError& e) {
    EXPECT_NE(std::string(e.what()).find("injected"), std::string::npos);
  }
}

TEST(RemoteBackend, ReconnectsAfterDroppedConnection) {
  OracleBackend model(EchoSpec());
  ServerBehavior b;
  b.drop_at = 1;
  TcpTestServer server(model, b);
  auto remote = OpenBackend(server.locator());
  EXPECT_EQ(remote->GenerateOne(LatentCode({4, 5, 6})).values,
            (std::vector<double>{4, 5, 6}));
  EXPECT_EQ(server.connections(), 2);
}

TEST(RemoteBackend, MismatchedReplyIdIsAnError) {
  OracleBackend model(EchoSpec());
  ServerBehavior b;
  b.wrong_id = true;
  TcpTestServer server(model, b);
  auto remote = OpenBackend(server.locator());
  EXPECT_THROW(remote->GenerateOne(LatentCode({1, 2, 3})), BackendError);
}

TEST(RemoteBackend, RejectedHandshake) {
  OracleBackend model(EchoSpec());
  ServerBehavior b;
  b.reject_hello = true;
  TcpTestServer server(model, b);
  EXPECT_THROW(OpenBackend(server.locator()), BackendError);
}

TEST(RemoteBackend, ChildThatExitsImmediately) {
  EXPECT_THROW(OpenBackend("stdio:true"), BackendError);
}

TEST(RemoteBackend, NonFiniteInputsAreNotSent) {
  OracleBackend model(EchoSpec());
  TcpTestServer server(model);
  auto remote = OpenBackend(server.locator());
  EXPECT_THROW(remote->GenerateOne(LatentCode({NAN, 0, 0})), InputError);
}

TEST(RemoteBackend, NonFiniteRepliesAreProtocolErrors) {
  // A server whose generator emits NaN: serialised as null by the JSON layer.
  class NanModel final : public Backend {
   public:
    NanModel() : inner_(EchoSpec()) {}
    const BackendDescriptor& descriptor() const override { return inner_.descriptor(); }
    std::vector<ImageTensor> Generate(std::span<const LatentCode> zs) override {
      auto out = inner_.Generate(zs);
      for (auto& x : out) x.values[0] = NAN;
      return out;
    }
    std::vector<LatentCode> Encode(std::span<const ImageTensor> xs) override {
      return inner_.Encode(xs);
    }
    std::vector<double> ClassifyProb(std::span<const ImageTensor> xs) override {
      return inner_.ClassifyProb(xs);
    }

   private:
    OracleBackend inner_;
  } model;
  TcpTestServer server(model);
  auto remote = OpenBackend(server.locator());
  EXPECT_THROW(remote->GenerateOne(LatentCode({1, 2, 3})), BackendError);
}

}  // namespace
}  // namespace cfaudit
