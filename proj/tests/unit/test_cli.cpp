#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "stegarmor/harness.hpp"
#include "stegarmor/jpeg_codec.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(STEGARMOR_CLI) + " " + args + " 2>&1";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::array<char, 512> buf{};
  while (std::fgets(buf.data(), buf.size(), p)) r.out += buf.data();
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Workdir {
  fs::path dir;
  Workdir() {
    dir = fs::temp_directory_path() / ("stegarmor_cli_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    const auto cover = stegarmor::compress(stegarmor::synthetic_image(5, 128, 128), 75);
    stegarmor::write_file((dir / "c.jpg").string(), stegarmor::serialize_jpeg(cover));
  }
  ~Workdir() { fs::remove_all(dir); }
  std::string p(const std::string& name) const { return (dir / name).string(); }
};

}  // namespace

TEST_CASE("embed writes stego, recipe, report and message; extract recovers it") {
  Workdir w;
  const Run e = run("embed --cover " + w.p("c.jpg") + " --payload 0.1 --seed 7 --lossless --out " + w.p("s"));
  REQUIRE(e.code == 0);
  CHECK(fs::exists(w.p("s.jpg")));
  CHECK(fs::exists(w.p("s.report.json")));
  const auto recipe = nlohmann::json::parse(slurp(w.p("s.recipe.json")));
  CHECK(recipe["e_n"] == 1);
  CHECK(recipe["t"] == 1);
  CHECK(recipe["cover_qf"] == 75);

  const Run x = run("extract --stego " + w.p("s.jpg") + " --recipe " + w.p("s.recipe.json") + " --out " +
                    w.p("got.bits") + " --truth " + w.p("s.message.bits"));
  CHECK(x.code == 0);
  CHECK(x.out.find("R_error=0") != std::string::npos);
  CHECK(slurp(w.p("got.bits")) == slurp(w.p("s.message.bits")));
}

TEST_CASE("embed, simulate and extract through the channel") {
  Workdir w;
  const Run e = run("embed --cover " + w.p("c.jpg") + " --payload 0.1 --q-channel 75 --seed 7 --out " + w.p("s"));
  REQUIRE(e.code == 0);
  const Run s = run("simulate --stego " + w.p("s.jpg") + " --q-channel 75 --out " + w.p("r.jpg"));
  REQUIRE(s.code == 0);
  const Run x = run("extract --stego " + w.p("r.jpg") + " --recipe " + w.p("s.recipe.json") + " --out " +
                    w.p("got.bits") + " --truth " + w.p("s.message.bits"));
  const auto pos = x.out.find("R_error=");
  REQUIRE(pos != std::string::npos);
  CHECK(std::stod(x.out.substr(pos + 8)) <= 1e-4);
}

TEST_CASE("the channel defaults to the cover quality") {
  Workdir w;
  const Run e = run("embed --cover " + w.p("c.jpg") + " --payload 0.05 --out " + w.p("s"));
  REQUIRE(e.code == 0);
  const auto report = nlohmann::json::parse(slurp(w.p("s.report.json")));
  CHECK(report["channel_quality"] == 75);
}

TEST_CASE("explicit message files and CRC auto extraction") {
  Workdir w;
  {
    std::ofstream m(w.p("m.bits"));
    m << "1011001110001111\n0101 0101\n";
  }
  const Run e = run("embed --cover " + w.p("c.jpg") + " --message " + w.p("m.bits") + " --crc --out " + w.p("s"));
  REQUIRE(e.code == 0);
  const Run x = run("extract --stego " + w.p("s.jpg") + " --auto --n-m 24 --out " + w.p("got.bits"));
  CHECK(x.code == 0);
  CHECK(slurp(w.p("got.bits")) == "101100111000111101010101\n");
}

TEST_CASE("errors and usage") {
  Workdir w;
  const Run zero = run("embed --cover " + w.p("c.jpg") + " --payload 0 --out " + w.p("s"));
  CHECK(zero.code == 1);
  CHECK(zero.out.find("InvalidPayload") != std::string::npos);

  const Run no_recipe = run("extract --stego " + w.p("c.jpg"));
  CHECK(no_recipe.code == 64);
  CHECK(no_recipe.out.find("--recipe") != std::string::npos);

  const Run no_payload = run("embed --cover " + w.p("c.jpg"));
  CHECK(no_payload.code == 64);

  const Run missing = run("embed --cover " + w.p("nope.jpg") + " --payload 0.1");
  CHECK(missing.code != 0);

  const Run not_found = run("extract --stego " + w.p("c.jpg") + " --auto --n-m 50 --out " + w.p("x.bits"));
  CHECK(not_found.code == 2);
  CHECK(not_found.out.find("NotFound") != std::string::npos);
}

TEST_CASE("bench and ablate emit CSV") {
  Workdir w;
  const Run b = run("bench --corpus-size 3 --corpus-dim 48 --payloads 0.05,0.1 --no-timing --quiet --out " +
                    w.p("b.csv"));
  REQUIRE(b.code == 0);
  const std::string csv = slurp(w.p("b.csv"));
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 6 + 2);
  const Run b2 = run("bench --corpus-size 3 --corpus-dim 48 --payloads 0.05,0.1 --no-timing --quiet --out " +
                     w.p("b2.csv"));
  REQUIRE(b2.code == 0);
  CHECK(slurp(w.p("b2.csv")) == csv);

  {
    std::ofstream cfg(w.p("spec.json"));
    cfg << R"({"corpus_size": 2, "corpus_dim": 48, "payloads": [0.1], "timing": false})";
  }
  const Run a = run("ablate --mode capability --config " + w.p("spec.json") + " --quiet --out " + w.p("a.csv"));
  REQUIRE(a.code == 0);
  const std::string acsv = slurp(w.p("a.csv"));
  CHECK(std::count(acsv.begin(), acsv.end(), '\n') == 1 + 26 + 13);
  CHECK(run("ablate --mode sideways --corpus-size 1 --quiet").code == 1);
}
