#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "json.hpp"
#include "latent_reach/store.hpp"

using namespace latent_reach;
using Json = nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "latent-reach");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "latent_reach_cli_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

void write_text(const std::filesystem::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("usage errors exit 2, help exits 0") {
    CHECK(run_cli({}).code == cli::kExitUsage);
    CHECK(run_cli({"bogus"}).code == cli::kExitUsage);
    const auto r = run_cli({"gen-toy", "--no-such-flag"});
    CHECK(r.code == cli::kExitUsage);
    CHECK_FALSE(r.err.empty());
    for (const char* sub : {"gen-toy", "train", "monitor", "steer", "eval", "oracle-compare", "validate", "sweep"}) {
      const auto h = run_cli({sub, "--help"});
      CHECK(h.code == cli::kExitOk);
      CHECK(h.out.find("--") != std::string::npos);
    }
    const auto h = run_cli({"train", "--help"});
    CHECK(h.out.find("--gamma FLOAT [0.99]") != std::string::npos);
    CHECK(h.out.find("--lr") != std::string::npos);
  }

  TEST_CASE("pipeline: gen-toy, validate, train, monitor, eval, oracle-compare, steer") {
    const auto data = scratch("toy.jsonl"), ckpt = scratch("net.ckpt"), reports = scratch("reports.jsonl");
    auto r = run_cli({"gen-toy", "--count", "80", "--horizon", "10", "--seed", "3", "--out", data.string()});
    REQUIRE(r.code == 0);
    CHECK(Json::parse(r.out)["trajectories"] == 80);

    r = run_cli({"validate", "--data", data.string()});
    CHECK(r.code == 0);
    CHECK(Json::parse(r.out)["valid"] == true);

    r = run_cli({"train", "--mode", "rl", "--data", data.string(), "--out", ckpt.string(), "--hidden1", "32",
                 "--hidden2", "8", "--epochs", "2"});
    REQUIRE(r.code == 0);
    const auto rep = Json::parse(r.out);
    CHECK(rep["config"]["gamma"] == 0.99);
    CHECK(rep["config"]["lr"] == 3e-5);
    CHECK(rep["epoch_loss"].size() == 2);

    r = run_cli({"monitor", "--ckpt", ckpt.string(), "--data", data.string(), "--verbose"});
    REQUIRE(r.code == 0);
    write_text(reports, r.out);
    std::istringstream lines(r.out);
    std::string line;
    std::size_t n = 0;
    while (std::getline(lines, line)) {
      const auto j = Json::parse(line);
      CHECK(j["index"] == n);
      CHECK(j["values"].size() == 11);
      CHECK(j["flagged"] == !j["first_flag_index"].is_null());
      ++n;
    }
    CHECK(n == 80);

    const auto times = scratch("times.json");
    write_text(times, "[1.0, 3.0]");
    r = run_cli({"eval", "--reports", reports.string(), "--data", data.string(), "--times", times.string()});
    REQUIRE(r.code == 0);
    const auto m = Json::parse(r.out);
    CHECK(m["inference_time"] == 2.0);
    CHECK(m.contains("f1"));
    CHECK(m.contains("first_token_index"));

    r = run_cli({"oracle-compare", "--ckpt", ckpt.string(), "--res", "11", "--bounds", "-2,2"});
    REQUIRE(r.code == 0);
    const auto oc = Json::parse(r.out);
    CHECK(oc["grid_meta"]["nodes"] == 121);
    CHECK(oc["sign_agreement"].get<double>() >= 0.0);

    const auto steered = scratch("steered.jsonl");
    r = run_cli({"steer", "--ckpt", ckpt.string(), "--alpha", "0.1", "--radius", "0.5", "--count", "10",
                 "--horizon", "10", "--out", steered.string()});
    REQUIRE(r.code == 0);
    const auto s = Json::parse(r.out);
    CHECK(s["max_control_norm"].get<double>() <= 0.5);
    CHECK(run_cli({"validate", "--data", steered.string()}).code == 0);

    r = run_cli({"monitor", "--ckpt", ckpt.string(), "--data", scratch("missing.jsonl").string()});
    CHECK(r.code == cli::kExitFailure);
  }

  TEST_CASE("commands are deterministic") {
    const auto a = run_cli({"gen-toy", "--count", "5", "--horizon", "4", "--seed", "11"});
    const auto b = run_cli({"gen-toy", "--count", "5", "--horizon", "4", "--seed", "11"});
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    const auto s1 = run_cli({"steer", "--oracle", "rollout", "--alpha", "0.1", "--radius", "0.6", "--count", "8"});
    const auto s2 = run_cli({"steer", "--oracle", "rollout", "--alpha", "0.1", "--radius", "0.6", "--count", "8"});
    CHECK(s1.code == 0);
    CHECK(s1.out == s2.out);
  }

  TEST_CASE("validate rejects malformed files with exit 1") {
    const auto bad = scratch("bad.jsonl");
    write_text(bad, R"({"schema":"nope","dim":2,"source":"t","layer_index":0,"target_name":"x","pooling":"mean"})");
    const auto r = run_cli({"validate", "--data", bad.string()});
    CHECK(r.code == cli::kExitFailure);
    CHECK(Json::parse(r.out)["valid"] == false);
  }

  TEST_CASE("validate accepts an extractor-shaped dataset") {
    // What the language-model extractor emits: classifier labels in [-0.5, 0.5],
    // a nonzero layer index, word tokens and pooled embeddings.
    const auto p = scratch("extracted.jsonl");
    write_text(p,
               R"({"schema":"latent-reach/trajectories/v1","dim":4,"source":"tiny-lm","layer_index":20,"target_name":"offensive-classifier","pooling":"mean"})"
               "\n"
               R"({"states":[[0.1,0.2,0.3,0.4],[0.5,-0.25,1e-3,2.5],[1,2,3,4]],"ell":[0.49,0.1,-0.3],"tokens":["you","are"],"prompt_embedding":[0.1,0.2,0.3,0.4],"response_embedding":[0.75,0.875,1.5,3.25]})"
               "\n");
    const auto r = run_cli({"validate", "--data", p.string()});
    CHECK(r.code == 0);
    const auto ds = store::read_dataset(p);
    CHECK(ds.header.layer_index == 20);
    CHECK(ds.trajectories[0].tokens->size() == 2);
  }

  TEST_CASE("config file supplies flags and explicit flags win") {
    const auto cfg = scratch("cfg.json");
    write_text(cfg, R"({"count": 4, "seed": 2, "gen-toy": {"horizon": 3}})");
    auto r = run_cli({"gen-toy", "--config", cfg.string()});
    REQUIRE(r.code == 0);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 5);
    CHECK(r.out == run_cli({"gen-toy", "--count", "4", "--seed", "2", "--horizon", "3"}).out);
    r = run_cli({"gen-toy", "--config", cfg.string(), "--count", "2"});
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 3);

    write_text(cfg, R"({"gen-toy": {"horizn": 3}})");
    CHECK(run_cli({"gen-toy", "--config", cfg.string()}).code == cli::kExitUsage);
    CHECK(run_cli({"gen-toy", "--config", scratch("none.json").string()}).code == cli::kExitUsage);
  }

  TEST_CASE("sweep reports every cell and the best by summed score") {
    const auto grid = scratch("grid.json");
    write_text(grid, R"({"alpha": [0.0, 0.1], "radius": [0.3, 0.6]})");
    const auto r = run_cli({"sweep", "--grid", grid.string(), "--oracle", "rollout", "--count", "30", "--horizon", "15"});
    REQUIRE(r.code == 0);
    const auto j = Json::parse(r.out);
    CHECK(j["cells"].size() == 4);
    double best = -1e9;
    for (const auto& c : j["cells"]) {
      if (c["score"].is_null()) continue;
      CHECK(c["score"].get<double>() ==
            doctest::Approx(c["safety_rate"].get<double>() + c["coherence"].get<double>() + c["diversity"].get<double>()));
      best = std::max(best, c["score"].get<double>());
    }
    if (!j["best"].is_null()) CHECK(j["best"]["score"].get<double>() == best);

    const auto d = run_cli({"sweep", "--oracle", "rollout", "--count", "10", "--horizon", "10"});
    REQUIRE(d.code == 0);
    const auto dj = Json::parse(d.out);
    std::set<double> alphas;
    for (const auto& c : dj["cells"]) alphas.insert(c["alpha"].get<double>());
    CHECK(alphas == std::set<double>{0.0, 0.1, 0.2, 0.3});
  }
}
