#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "blockframe/cli.hpp"
#include "blockframe/frame_io.hpp"
#include "blockframe/metrics.hpp"
#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace blockframe;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) : path(fs::temp_directory_path() / ("blockframe-test-" + tag)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("fnv1a") {
    CHECK(cli::fnv1a("") == 0xcbf29ce484222325ull);
    CHECK(cli::fnv1a("a") == 0xaf63dc4c8601ec8cull);
    CHECK(cli::hex64(0xabcull) == "0000000000000abc");
  }

  TEST_CASE("construct writes a loadable frame") {
    TempDir d("construct");
    const Run r = run({"--out-dir", d.path.string(), "construct", "--set", "hadamard-16-6", "--blocks", "4:4:2", "-o",
                       "w.frame"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("etf: yes") != std::string::npos);
    const Frame f = load_frame(d / "w.frame", 2);
    REQUIRE(f.spec().has_value());
    CHECK(f.spec()->rows == std::vector<int>{0, 2, 5, 6, 14, 15});
    CHECK(average_capacity(f, ChannelParams::from_db(30)).mean == doctest::Approx(52.908976291832765).epsilon(1e-12));
  }

  TEST_CASE("exit codes") {
    TempDir d("codes");
    const std::string dir = d.path.string();
    CHECK(run({"--bogus"}).code == 2);
    CHECK(run({"--out-dir", dir, "construct", "--rows", "0,1", "--base", "hadamard", "--blocks", "4:4:2", "--perm",
               "0,0,1,2,3,4,5,6,7,8,9,10,11,12,13,14"})
              .code == 2);
    CHECK(run({"--out-dir", dir, "construct", "--rows", "0,1", "--base", "hadamard", "--blocks", "3:4:2"}).code == 2);
    const Run big = run({"--out-dir", dir, "search", "--kind", "petf", "--set", "hadamard-64-28", "--blocks", "16:4:4",
                         "--mode", "exhaustive"});
    CHECK(big.code == 3);
    CHECK(big.err.find("stochastic") != std::string::npos);
    CHECK(run({"--out-dir", dir, "eval", "--frame", d / "missing.frame", "--blocks", "4:4:2"}).code == 2);
  }

  TEST_CASE("repeated runs give identical files and the stamp carries the config hash") {
    TempDir a("repeat-a"), b("repeat-b");
    for (const TempDir* d : {&a, &b}) {
      const Run r = run({"--out-dir", d->path.string(), "--format", "csv", "--seed", "9", "search", "--kind", "petf",
                         "--set", "hadamard-16-6", "--blocks", "4:4:2", "--restarts", "2", "--iters", "200"});
      REQUIRE(r.code == 0);
    }
    for (const char* name : {"trace.csv", "best.frame", "search.json"})
      CHECK(slurp(a / name) == slurp(b / name));
    const auto doc = nlohmann::json::parse(slurp(a / "search.json"));
    const std::string hash = doc["meta"]["config_hash"];
    CHECK(hash.size() == 16);
    CHECK(slurp(a / "trace.csv").rfind("# blockframe 0.1.0 config_hash=" + hash + " seed=9\n", 0) == 0);

    TempDir c("repeat-c");
    REQUIRE(run({"--out-dir", c.path.string(), "--format", "csv", "--seed", "10", "search", "--kind", "petf", "--set",
                 "hadamard-16-6", "--blocks", "4:4:2", "--restarts", "2", "--iters", "200"})
                .code == 0);
    CHECK(nlohmann::json::parse(slurp(c / "search.json"))["meta"]["config_hash"] != hash);
  }

  TEST_CASE("eval and spectrum CSV outputs are byte-identical across runs") {
    TempDir a("csv-a"), b("csv-b");
    for (const TempDir* d : {&a, &b}) {
      const std::string dir = d->path.string();
      REQUIRE(run({"--out-dir", dir, "--format", "csv", "--seed", "3", "eval", "--frame", "catalog:hadamard-64-20-almost",
                   "--blocks", "16:4:4", "--monte-carlo", "--samples", "300", "--snr-sweep", "0:20:10", "--gnuplot"})
                  .code == 0);
      REQUIRE(run({"--out-dir", dir, "--format", "csv", "--seed", "3", "spectrum", "--frame",
                   "catalog:hadamard-64-20-almost", "--blocks", "16:4:4", "--monte-carlo", "--samples", "200"})
                  .code == 0);
    }
    for (const std::string name : {"capacity.csv", "capacity_curve.csv", "outage_curve.csv", "capacity.gp", "spectrum.csv",
                             "histogram.csv", "selections.csv", "kl.csv"}) {
      CAPTURE(name);
      const std::string x = slurp(a / name);
      CHECK_FALSE(x.empty());
      CHECK(x == slurp(b / name));
    }
  }

  TEST_CASE("resume reuses the checkpoint") {
    TempDir d("resume");
    const std::vector<std::string> args{"--out-dir", d.path.string(), "search",  "--kind",  "butf",
                                        "--set",     "hadamard-16-6", "--blocks", "4:4:2", "--restarts",
                                        "3",         "--iters",       "150"};
    REQUIRE(run(args).code == 0);
    const std::string first = slurp(d / "search.json");
    auto resumed = args;
    resumed.push_back("--resume");
    REQUIRE(run(resumed).code == 0);
    CHECK(slurp(d / "search.json") == first);

    auto changed = resumed;
    changed[changed.size() - 2] = "151";
    CHECK(run(changed).code == 2);
  }

  TEST_CASE("spectrum warns on a single bin") {
    TempDir d("spectrum");
    const Run r = run({"--out-dir", d.path.string(), "spectrum", "--frame", "catalog:hadamard-16-6", "--blocks", "4:4:2",
                       "--bins", "1"});
    CHECK(r.code == 0);
    CHECK(r.err.find("single histogram bin") != std::string::npos);
    const auto kl = nlohmann::json::parse(slurp(d / "kl.json"));
    CHECK(kl.contains("meta"));
  }

  TEST_CASE("eval CSV layout") {
    TempDir d("eval");
    const Run r = run({"--out-dir", d.path.string(), "--format", "csv", "eval", "--frame", "catalog:hadamard-16-6",
                       "--blocks", "4:4:2", "--snr-sweep", "0:20:10"});
    REQUIRE(r.code == 0);
    const std::string cap = slurp(d / "capacity.csv");
    CHECK(cap.find("\nseries,source,M,K,beta_inv,snr_db,capacity,orthogonality_bound,outage_0.98\n") !=
          std::string::npos);
    CHECK(cap.find("manova") != std::string::npos);
  }

  TEST_CASE("catalog verify passes on the bundled catalog") {
    const Run r = run({"catalog", "verify"});
    CHECK(r.code == 0);
  }
}
