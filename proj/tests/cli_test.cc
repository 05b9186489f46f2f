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

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "cfaudit/cli/commands.h"
#include "cfaudit/core/errors.h"
#include "gtest/gtest.h"
#include "json.hpp"
#include "test_util.h"

namespace cfaudit::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using testing::ReadFile;
using testing::TempDir;
using testing::WriteFile;

struct Result {
  int code;
  std::string out, err;
};

Result Cfaudit(std::vector<std::string> args) {
  args.insert(args.begin(), "cfaudit");
  std::ostringstream out, err;
  const int code = RunCli(args, out, err);
  return {code, out.str(), err.str()};
}

// An oracle world: config.json, oracle_spec.json, records.jsonl, vectors/.
struct World {
  fs::path root;
  std::string config() const { return (root / "gen/config.json").string(); }
  std::string backend() const { return "oracle:" + (root / "gen/oracle_spec.json").string(); }
  std::string records() const { return (root / "gen/records.jsonl").string(); }
  std::string vectors() const { return (root / "est/vectors").string(); }
};

World MakeWorld(const std::string& name, const std::string& attrs = "Smiling,Young,Wavy",
                std::vector<std::string> extra = {}) {
  World w{TempDir(name)};
  std::vector<std::string> gen = {"--seed", "3", "--out", (w.root / "gen").string(),
                                  "oracle-gen", "--attrs", attrs + ",Male",
                                  "--records", "1200"};
  gen.insert(gen.end(), extra.begin(), extra.end());
  const Result g = Cfaudit(gen);
  EXPECT_EQ(g.code, kExitOk) << g.err;
  const Result e = Cfaudit({"--config", w.config(), "--out", (w.root / "est").string(),
                        "estimate-attrs", "--records", w.records(), "--attrs", attrs});
  EXPECT_EQ(e.code, kExitOk) << e.err;
  // Keep audits quick.
  json cfg = json::parse(ReadFile(w.config()));
  cfg["sample_count"] = 2000;
  WriteFile(w.config(), cfg.dump(2));
  return w;
}

std::map<std::string, std::string> Snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) files[fs::relative(e.path(), dir).string()] = ReadFile(e.path());
  }
  return files;
}

TEST(ExitCodes, MapErrorKinds) {
  EXPECT_EQ(ExitCodeFor(InputError("x")), kExitInput);
  EXPECT_EQ(ExitCodeFor(DimensionError("x")), kExitInput);
  EXPECT_EQ(ExitCodeFor(GuardrailError("x")), kExitGuardrail);
  EXPECT_EQ(ExitCodeFor(BackendError("x")), kExitBackend);
}

TEST(Cli, VersionAndUsage) {
  const Result v = Cfaudit({"--version"});
  EXPECT_EQ(v.code, kExitOk);
  EXPECT_NE(v.out.find(kVersion), std::string::npos);
  EXPECT_EQ(Cfaudit({}).code, kExitInput);
  EXPECT_EQ(Cfaudit({"no-such-command"}).code, kExitInput);
}

TEST(Cli, AuditWritesOneSweepPerAttributeAndSummary) {
  const World w = MakeWorld("audit");
  const fs::path out = w.root / "audit";
  const Result r = Cfaudit({"--config", w.config(), "--backend", w.backend(), "--out",
                        out.string(), "audit", "--vectors", w.vectors(), "--pairs", "200"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  for (const char* a : {"Smiling", "Young", "Wavy"}) {
    const std::string csv = ReadFile(out / "sweeps" / (std::string("sweep_") + a + ".csv"));
    EXPECT_EQ(csv.rfind("i,s_f,stderr\n", 0), 0u);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 22);
  }
  const std::string flips = ReadFile(out / "flips.csv");
  EXPECT_EQ(flips.rfind("attribute,s_1to0,s_0to1\n", 0), 0u);
  EXPECT_EQ(std::count(flips.begin(), flips.end(), '\n'), 4);
  const json summary = json::parse(ReadFile(out / "summary.json"));
  EXPECT_EQ(summary["sensitivity"].size(), 3u);
  std::map<std::string, json> by_attr;
  for (const auto& row : summary["sensitivity"]) by_attr[row["attribute"]] = row;
  // The classifier reads Smiling, so its vector moves the output most.
  const double smiling = by_attr.at("Smiling")["s_f"];
  const double young = by_attr.at("Young")["s_f"];
  EXPECT_GT(std::abs(smiling), std::abs(young));
  EXPECT_TRUE(by_attr.at("Smiling")["flagged"].get<bool>());
  EXPECT_EQ(summary["interpolation_consistency"]["positive"], 1.0);
  EXPECT_EQ(summary["interpolation_consistency"]["negative"], 1.0);
  EXPECT_LT(summary["reconstruction_error"].get<double>(), 1e-9);
  const json run = json::parse(ReadFile(out / "run.json"));
  EXPECT_EQ(run["command"], "audit");
  EXPECT_EQ(run["seed"], 3);
  EXPECT_EQ(run["attribute_vectors"].size(), 3u);
}

TEST(Cli, AuditRerunIsByteIdentical) {
  const World w = MakeWorld("rerun", "Smiling,Young");
  std::vector<std::map<std::string, std::string>> snaps;
  for (const char* dir : {"a", "b"}) {
    const Result r = Cfaudit({"--config", w.config(), "--backend", w.backend(), "--out",
                          (w.root / dir).string(), "audit", "--vectors", w.vectors(),
                          "--pairs", "100"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    snaps.push_back(Snapshot(w.root / dir));
  }
  EXPECT_FALSE(snaps[0].empty());
  EXPECT_EQ(snaps[0], snaps[1]);
}

TEST(Cli, EstimateAttrsOutputs) {
  const World w = MakeWorld("est", "Smiling,Young");
  const fs::path est = w.root / "est";
  EXPECT_TRUE(fs::exists(est / "vectors/Smiling.json"));
  EXPECT_TRUE(fs::exists(est / "vectors/Young.json"));
  const json v = json::parse(ReadFile(est / "vectors/Young.json"));
  EXPECT_EQ(v["attr"], "Young");
  EXPECT_EQ(v["dim"], 8);
  EXPECT_EQ(v["seed"], 3);
  const std::string csv = ReadFile(est / "probe_accuracy.csv");
  EXPECT_EQ(csv.rfind("attribute,test_accuracy,train_count,test_count\nSmiling,", 0), 0u);
}

TEST(Cli, GuardrailRefusesBlockedAttributeAndWritesNothing) {
  const World w = MakeWorld("guard", "Smiling");
  const fs::path out = w.root / "blocked";
  const Result r = Cfaudit({"--config", w.config(), "--out", out.string(), "estimate-attrs",
                        "--records", w.records(), "--attrs", "Smiling,Male"});
  EXPECT_EQ(r.code, kExitGuardrail);
  EXPECT_NE(r.err.find("Male"), std::string::npos);
  EXPECT_FALSE(fs::exists(out));

  // A blocked vector handed to audit is refused too.
  fs::create_directories(w.root / "male");
  json v = json::parse(ReadFile(fs::path(w.vectors()) / "Smiling.json"));
  v["attr"] = "Male";
  WriteFile(w.root / "male/Male.json", v.dump());
  const Result a = Cfaudit({"--config", w.config(), "--backend", w.backend(), "--out",
                        (w.root / "audit").string(), "audit", "--vectors",
                        (w.root / "male").string()});
  EXPECT_EQ(a.code, kExitGuardrail);
  EXPECT_FALSE(fs::exists(w.root / "audit"));
}

TEST(Cli, MalformedRecordLineIsNamed) {
  const World w = MakeWorld("malformed", "Smiling");
  std::istringstream in(ReadFile(w.records()));
  std::string lines, line;
  for (int k = 1; std::getline(in, line) && k <= 20; ++k) {
    lines += (k == 17 ? std::string("{\"id\": \"bad\", \"z\": [1, 2") : line) + "\n";
  }
  const fs::path bad = w.root / "bad.jsonl";
  WriteFile(bad, lines);
  const Result r = Cfaudit({"--config", w.config(), "--out", (w.root / "o").string(),
                        "estimate-attrs", "--records", bad.string(), "--attrs", "Smiling"});
  EXPECT_EQ(r.code, kExitInput);
  EXPECT_NE(r.err.find("line 17"), std::string::npos) << r.err;
}

TEST(Cli, RecordDimensionMismatch) {
  const World w = MakeWorld("dims", "Smiling");
  json cfg = json::parse(ReadFile(w.config()));
  cfg["latent_dim"] = 9;
  WriteFile(w.root / "cfg9.json", cfg.dump());
  const Result r = Cfaudit({"--config", (w.root / "cfg9.json").string(), "--out",
                        (w.root / "o").string(), "estimate-attrs", "--records",
                        w.records(), "--attrs", "Smiling"});
  EXPECT_EQ(r.code, kExitInput);
  const Result a = Cfaudit({"--config", (w.root / "cfg9.json").string(), "--backend",
                        w.backend(), "--out", (w.root / "a").string(), "sweep",
                        "--vectors", w.vectors()});
  EXPECT_EQ(a.code, kExitInput);
}

TEST(Cli, UnknownConfigKeyIsRejected) {
  const fs::path dir = TempDir("cfgkey");
  WriteFile(dir / "cfg.json", R"({"seed": 1, "sample_cnt": 5})");
  const Result r = Cfaudit({"--config", (dir / "cfg.json").string(), "--out",
                        (dir / "o").string(), "oracle-gen"});
  EXPECT_EQ(r.code, kExitInput);
  EXPECT_NE(r.err.find("sample_cnt"), std::string::npos) << r.err;
}

TEST(Cli, OutputDirectoryCollision) {
  const World w = MakeWorld("collide", "Smiling");
  const fs::path out = w.root / "c";
  const std::vector<std::string> args = {"--config", w.config(), "--backend", w.backend(),
                                         "--out", out.string(), "flip-report",
                                         "--vectors", w.vectors()};
  ASSERT_EQ(Cfaudit(args).code, kExitOk);
  const auto before = Snapshot(out);
  EXPECT_EQ(Cfaudit(args).code, kExitInput);
  EXPECT_EQ(Snapshot(out), before);
  std::vector<std::string> again = args;
  again.insert(again.begin(), "--overwrite");
  EXPECT_EQ(Cfaudit(again).code, kExitOk);
}

TEST(Cli, SweepAndInterpCheck) {
  const World w = MakeWorld("sweep", "Smiling");
  const std::string vec = w.vectors() + "/Smiling.json";
  const Result s = Cfaudit({"--config", w.config(), "--backend", w.backend(), "--out",
                        (w.root / "s").string(), "sweep", "--vector", vec});
  ASSERT_EQ(s.code, kExitOk) << s.err;
  const json curve = json::parse(ReadFile(w.root / "s/sweep_Smiling.json"));
  EXPECT_EQ(curve["values"].size(), 21u);
  EXPECT_EQ(curve["values"][10], 0.0);
  const Result i = Cfaudit({"--config", w.config(), "--backend", w.backend(), "--out",
                        (w.root / "i").string(), "interp-check", "--pairs", "50"});
  ASSERT_EQ(i.code, kExitOk) << i.err;
  const json j = json::parse(ReadFile(w.root / "i/interpolation.json"));
  EXPECT_EQ(j["positive"], 1.0);
}

TEST(Cli, GridWritesEveryCell) {
  const World w = MakeWorld("grid", "Smiling", {"--image-shape", "4x4"});
  const fs::path out = w.root / "g";
  const Result r = Cfaudit({"--config", w.config(), "--backend", w.backend(), "--out",
                        out.string(), "grid", "--vector", w.vectors() + "/Smiling.json",
                        "--z-seeds", "1,2,3,4,5"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const json m = json::parse(ReadFile(out / "manifest.json"));
  ASSERT_EQ(m["cells"].size(), 105u);
  bool any_flip = false;
  for (const auto& cell : m["cells"]) {
    const fs::path image = out / cell["image"].get<std::string>();
    ASSERT_TRUE(fs::exists(image)) << image;
    if (cell["i"] == 0.0) EXPECT_FALSE(cell["flip"].get<bool>());
    // The flag is relative to the unshifted cell of the same row.
    any_flip = any_flip || cell["flip"].get<bool>();
  }
  EXPECT_TRUE(any_flip);
  const std::string pgm = ReadFile(out / m["cells"][0]["image"].get<std::string>());
  EXPECT_EQ(pgm.rfind("P5\n4 4\n255\n", 0), 0u);
  EXPECT_EQ(Cfaudit({"--config", w.config(), "--backend", w.backend(), "--out",
                 (w.root / "g2").string(), "grid", "--vector",
                 w.vectors() + "/Smiling.json", "--z-seeds", "1,x"})
                .code,
            kExitInput);
}

TEST(Cli, CorrelationMatrix) {
  const World w = MakeWorld("corr", "Smiling,Young");
  const Result r = Cfaudit({"--config", w.config(), "--out", (w.root / "c").string(), "corr",
                        "--records", w.records(), "--attrs", "Smiling,Young"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const std::string csv = ReadFile(w.root / "c/correlation.csv");
  EXPECT_EQ(csv.rfind("attribute,Smiling,Young\nSmiling,1.000000,", 0), 0u);
}

TEST(Cli, DisaggregatedFixture) {
  const fs::path dir = TempDir("disagg");
  // 4 TP, 1 FN, 3 TN, 2 FP; Young marks the first five.
  const int label[10] = {1, 1, 1, 1, 1, 0, 0, 0, 0, 0};
  const int pred[10] = {1, 1, 1, 1, 0, 0, 0, 0, 1, 1};
  std::string lines;
  for (int k = 0; k < 10; ++k) {
    lines += json{{"id", std::to_string(k)}, {"label", label[k]}, {"pred", pred[k]},
                  {"attrs", {{"Young", k < 5 ? 1 : 0}}}}
                 .dump() +
             "\n";
  }
  WriteFile(dir / "pred.jsonl", lines);
  const Result r = Cfaudit({"--out", (dir / "o").string(), "disagg", "--predictions",
                        (dir / "pred.jsonl").string(), "--slices", "Young"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(ReadFile(dir / "o/disaggregated.csv"),
            "Data split,Accuracy,FPR,FNR\n"
            "Total,70.000%,40.000%,20.000%\n"
            "Young=0,60.000%,40.000%,null\n"
            "Young=1,80.000%,null,20.000%\n");
  WriteFile(dir / "bad.jsonl", "{\"label\": 2, \"pred\": 0}\n");
  EXPECT_EQ(Cfaudit({"--out", (dir / "b").string(), "disagg", "--predictions",
                 (dir / "bad.jsonl").string()})
                .code,
            kExitInput);
}

std::string ServerLocator(const std::string& flags) {
  return std::string("stdio:") + CFAUDIT_TEST_SERVER + " " + flags;
}

TEST(Cli, RemoteBackendDimensionMismatch) {
  const World w = MakeWorld("remote_dim", "Smiling");
  const Result r = Cfaudit({"--config", w.config(), "--backend",
                        ServerLocator("--identity 8 --declare-dim 6"), "--out",
                        (w.root / "o").string(), "sweep", "--vectors", w.vectors()});
  EXPECT_EQ(r.code, kExitInput) << r.err;
  EXPECT_FALSE(fs::exists(w.root / "o"));
}

TEST(Cli, RemoteBackendHandshakeFailure) {
  const World w = MakeWorld("remote_hello", "Smiling");
  const Result r = Cfaudit({"--config", w.config(), "--backend",
                        ServerLocator("--identity 8 --reject-hello"), "--out",
                        (w.root / "o").string(), "sweep", "--vectors", w.vectors()});
  EXPECT_EQ(r.code, kExitBackend) << r.err;
}

TEST(Cli, RemoteBackendAudit) {
  const World w = MakeWorld("remote_ok", "Smiling");
  const Result r = Cfaudit({"--config", w.config(), "--backend",
                        ServerLocator("--spec " + (w.root / "gen/oracle_spec.json").string()),
                        "--out", (w.root / "remote").string(), "flip-report", "--vectors",
                        w.vectors()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const Result l = Cfaudit({"--config", w.config(), "--backend", w.backend(), "--out",
                        (w.root / "local").string(), "flip-report", "--vectors",
                        w.vectors()});
  ASSERT_EQ(l.code, kExitOk) << l.err;
  EXPECT_EQ(ReadFile(w.root / "remote/flips.csv"), ReadFile(w.root / "local/flips.csv"));
}

TEST(Cli, BadBackendLocator) {
  const World w = MakeWorld("locator", "Smiling");
  EXPECT_EQ(Cfaudit({"--config", w.config(), "--backend", "ftp:nowhere", "--out",
                 (w.root / "o").string(), "sweep", "--vectors", w.vectors()})
                .code,
            kExitInput);
}

// The installed binary maps errors to the same exit codes.
int RunBinary(const std::string& args) {
  const std::string cmd = std::string(CFAUDIT_CLI_BINARY) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(CliBinary, ExitCodes) {
  const World w = MakeWorld("binary", "Smiling");
  EXPECT_EQ(RunBinary("--version"), kExitOk);
  EXPECT_EQ(RunBinary("--config " + w.config() + " --out " + (w.root / "o").string() +
                      " estimate-attrs --records " + w.records() + " --attrs Male"),
            kExitGuardrail);
  EXPECT_FALSE(fs::exists(w.root / "o"));
  EXPECT_EQ(RunBinary("--out " + (w.root / "o").string() + " corr --records /nonexistent"),
            kExitInput);
  EXPECT_EQ(RunBinary("--config " + w.config() + " --backend 'stdio:true' --out " +
                      (w.root / "o").string() + " sweep --vectors " + w.vectors()),
            kExitBackend);
}

}  // namespace
}  // namespace cfaudit::cli
