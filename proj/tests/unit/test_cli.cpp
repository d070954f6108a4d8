#include <doctest.h>

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "fixtures.hpp"
#include "isb/checkpoint.hpp"
#include "isb/image_io.hpp"
#include "isb/run_config.hpp"

using namespace isb;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result isb_run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) out.push_back(line);
  return out;
}

// toy -> prepare -> train once, shared by the cases below.
struct Workspace {
  fixture::TempDir dir{"cli"};
  fs::path data = dir / "data", corpus = dir / "corpus", ckpt = dir / "ckpt";

  Workspace() {
    REQUIRE(isb_run({"toy", "--out", data.string(), "--clips", "2", "--frames", "4"}).code == 0);
    REQUIRE(isb_run({"prepare", "--data-root", data.string(), "--out", corpus.string()}).code == 0);
    const Result r = isb_run({"train", "--corpus", corpus.string(), "--checkpoint-dir", ckpt.string(), "--max-steps", "10",
                              "--profile", "tiny", "--checkpoint-every", "5"});
    INFO(r.err);
    REQUIRE(r.code == 0);
  }
};

Workspace& workspace() {
  static Workspace w;
  return w;
}

}  // namespace

TEST_CASE("exit codes per error class") {
  CHECK(cli::exit_code_for(ErrorCode::UnreadableSource) == 2);
  CHECK(cli::exit_code_for(ErrorCode::BadIndex) == 2);
  CHECK(cli::exit_code_for(ErrorCode::InvalidConfig) == 2);
  CHECK(cli::exit_code_for(ErrorCode::VersionMismatch) == 3);
  CHECK(cli::exit_code_for(ErrorCode::ShapeMismatch) == 3);
  CHECK(cli::exit_code_for(ErrorCode::NonFiniteLoss) == 4);
  CHECK(cli::exit_code_for(ErrorCode::IoError) == 1);
  CHECK(isb_run({"bogus"}).code == 2);
  CHECK(isb_run({}).code == 2);
  CHECK(isb_run({"--help"}).code == 0);
}

TEST_CASE("prepare builds the corpus tree and is idempotent") {
  Workspace& w = workspace();
  for (const char* sub : {"lr", "hr", "flows", "split.json"}) CHECK(fs::exists(w.corpus / sub));
  CHECK(fs::exists(w.corpus / "lr" / "toy_000" / "000000.png"));
  CHECK(fs::exists(w.corpus / "flows" / "toy_000" / "t000003_k2.flo1"));
  const auto before = fixture::snapshot_tree(w.corpus);
  const Result again = isb_run({"prepare", "--data-root", w.data.string(), "--out", w.corpus.string()});
  CHECK(again.code == 0);
  const json report = json::parse(again.out);
  CHECK(report.at("frames_written") == 0);
  CHECK(report.at("flows_written") == 0);
  CHECK(fixture::snapshot_tree(w.corpus) == before);
}

TEST_CASE("prepare without a data root fails with exit 2") {
  fixture::TempDir dir("noroot");
  const Result r = isb_run({"prepare", "--data-root", (dir / "missing").string(), "--out", (dir / "c").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("UnreadableSource") != std::string::npos);
}

TEST_CASE("train writes one log record per step and echoes its config") {
  Workspace& w = workspace();
  const auto log = lines_of(fixture::read_file(w.ckpt / "train_log.jsonl"));
  REQUIRE(log.size() == 10);
  CHECK(json::parse(log.back()).at("step") == 10);
  CHECK(fs::exists(w.ckpt / "checkpoint_00000005.isbc"));
  CHECK(fs::exists(w.ckpt / "latest.isbc"));
  const json cfg = json::parse(fixture::read_file(w.ckpt / "run_config.json"));
  CHECK(cfg.at("train.max_steps") == 10);
  CHECK(cfg.at("profile") == "tiny");
}

TEST_CASE("train resumes from a checkpoint") {
  Workspace& w = workspace();
  fixture::TempDir dir("resume");
  const Result r = isb_run({"train", "--corpus", w.corpus.string(), "--checkpoint-dir", dir.path().string(), "--max-steps",
                            "12", "--resume", (w.ckpt / "latest.isbc").string()});
  REQUIRE(r.code == 0);
  const json s = json::parse(r.out);
  CHECK(s.at("start_step") == 10);
  CHECK(s.at("final_step") == 12);
  CHECK(lines_of(fixture::read_file(dir / "train_log.jsonl")).size() == 2);
}

TEST_CASE("l1 ablation logs zeroed non-L1 components") {
  Workspace& w = workspace();
  fixture::TempDir dir("l1");
  const Result r = isb_run({"train", "--corpus", w.corpus.string(), "--checkpoint-dir", dir.path().string(), "--max-steps",
                            "3", "--ablation", "l1_only"});
  REQUIRE(r.code == 0);
  for (const auto& line : lines_of(fixture::read_file(dir / "train_log.jsonl"))) {
    const json j = json::parse(line);
    CHECK(j.at("l1").get<double>() > 0.0);
    for (const char* k : {"mse", "perceptual", "adversarial", "tv", "d_loss"}) CHECK(j.at(k).get<double>() == 0.0);
  }
}

TEST_CASE("config file and --set overrides") {
  Workspace& w = workspace();
  fixture::TempDir dir("cfg");
  std::ofstream(dir / "run.json") << json{{"train.max_steps", 2}, {"train.seed", 9}}.dump();
  const Result r = isb_run({"train", "--config", (dir / "run.json").string(), "--corpus", w.corpus.string(),
                            "--checkpoint-dir", (dir / "ck").string(), "--set", "train.learning_rate=0.002"});
  REQUIRE(r.code == 0);
  CHECK(r.err.find("effective config:") != std::string::npos);
  const json cfg = json::parse(fixture::read_file(dir / "ck" / "run_config.json"));
  CHECK(cfg.at("train.max_steps") == 2);
  CHECK(cfg.at("train.seed") == 9);
  CHECK(cfg.at("train.learning_rate") == 0.002);
  CHECK(isb_run({"train", "--set", "train.bogus=1", "--corpus", w.corpus.string(), "--checkpoint-dir",
                 (dir / "x").string()})
            .code == 2);
}

TEST_CASE("upscale produces frames four times larger") {
  Workspace& w = workspace();
  fixture::TempDir dir("up");
  const Result r = isb_run({"upscale", "--input", (w.data / "toy_000").string(), "--checkpoint",
                            (w.ckpt / "latest.isbc").string(), "--out", dir.path().string(), "--no-video"});
  REQUIRE(r.code == 0);
  CHECK(r.err.find("ffmpeg") == std::string::npos);
  for (int t = 0; t < 4; ++t) {
    const Frame f = read_png(dir / frame_file_name(t));
    CHECK(f.height() == 128);
    CHECK(f.width() == 128);
  }
}

TEST_CASE("upscale rejects a corrupt checkpoint") {
  Workspace& w = workspace();
  fixture::TempDir dir("bad");
  std::string bytes = fixture::read_file(w.ckpt / "latest.isbc");
  bytes[4] = 9;
  std::ofstream(dir / "bad.isbc", std::ios::binary) << bytes;
  const Result r = isb_run({"upscale", "--input", (w.data / "toy_000").string(), "--checkpoint",
                            (dir / "bad.isbc").string(), "--out", (dir / "o").string(), "--no-video"});
  CHECK(r.code == 3);
  CHECK(r.err.find("VersionMismatch") != std::string::npos);
}

TEST_CASE("evaluate reports perfect scores for identical frames") {
  Workspace& w = workspace();
  const fs::path hr = w.corpus / "hr" / "toy_000";
  const Result r = isb_run({"evaluate", "--sr", hr.string(), "--hr", hr.string()});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j.at("mean_psnr_db").is_null());
  CHECK(j.at("mean_ssim").get<double>() == doctest::Approx(1.0));

  const Result gt = isb_run({"evaluate", "--corpus", w.corpus.string(), "--split", "all", "--model", "ground_truth"});
  REQUIRE(gt.code == 0);
  CHECK(json::parse(gt.out).size() == 2);
  const Result ck = isb_run({"evaluate", "--corpus", w.corpus.string(), "--clip", "toy_001", "--model", "checkpoint",
                             "--checkpoint", (w.ckpt / "latest.isbc").string()});
  REQUIRE(ck.code == 0);
  CHECK(json::parse(ck.out).at("mean_psnr_db").get<double>() > 0.0);
}

TEST_CASE("ablate prints a deterministic six-row table") {
  const Result a = isb_run({"ablate", "--steps", "2", "--profile", "tiny"});
  REQUIRE(a.code == 0);
  const json j = json::parse(a.out);
  CHECK(j.at("rows").size() == 6);
  CHECK(isb_run({"ablate", "--steps", "2", "--profile", "tiny"}).out == a.out);
  const Result t = isb_run({"ablate", "--steps", "0", "--modes", "l1_only,full", "--table"});
  REQUIRE(t.code == 0);
  CHECK(t.out.find("L1_ONLY") != std::string::npos);
  CHECK(t.out.find("FULL") != std::string::npos);
}

TEST_CASE("profile writes a frames x width image and rejects bad rows") {
  Workspace& w = workspace();
  fixture::TempDir dir("profile");
  const Result ok = isb_run({"profile", "--input", (w.data / "toy_000").string(), "--row", "5", "--out",
                             (dir / "p.png").string()});
  REQUIRE(ok.code == 0);
  const Frame p = read_png(dir / "p.png");
  CHECK(p.height() == 4);
  CHECK(p.width() == 32);
  const Result bad = isb_run({"profile", "--input", (w.data / "toy_000").string(), "--row", "32", "--out",
                              (dir / "q.png").string()});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("BadIndex") != std::string::npos);
}
