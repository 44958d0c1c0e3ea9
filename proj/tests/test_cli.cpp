#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace {

struct CmdResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Runs the installed binary with stdout/stderr captured to scratch files.
CmdResult run_cli(const std::string& args) {
  const std::string out = "cli_out.tmp", err = "cli_err.tmp";
  std::string cmd = std::string(FAMDYN_CLI_BIN) + " " + args + " > " + out +
                    " 2> " + err;
  int rc = std::system(cmd.c_str());
  CmdResult r;
#ifdef _WIN32
  r.code = rc;
#else
  r.code = WEXITSTATUS(rc);
#endif
  r.out = slurp(out);
  r.err = slurp(err);
  std::remove(out.c_str());
  std::remove(err.c_str());
  return r;
}

std::string corpus(const char* leaf) {
  return std::string(FAMDYN_CORPUS_DIR) + "/" + leaf;
}

}  // namespace

TEST_CASE("cli: omega report on stdout") {
  std::string args = "omega --family " + corpus("powersplus1.json") +
                     " --z0 0.5+0i --budget 128 --cluster-eps 1e-6";
  CmdResult r = run_cli(args);
  CHECK(r.code == 0);
  CHECK(r.err.empty());
  nlohmann::json j = nlohmann::json::parse(r.out);
  CHECK(j["property"] == "omega-limit");
  CHECK(j["verdict"] == "nonempty");
  REQUIRE(j["params"]["omega"].is_array());
  REQUIRE(j["params"]["omega"].size() == 1);
  CHECK(j["params"]["omega"][0] == "1+0i");
  CHECK(j["tool_version"] == "0.1.0");

  // identical invocations produce identical bytes
  CmdResult again = run_cli(args);
  CHECK(again.out == r.out);
}

TEST_CASE("cli: julia accepts a bare window and writes a pgm") {
  std::string pgm = "cli_julia.tmp.pgm";
  CmdResult r = run_cli("julia --family " + corpus("sq.json") +
                        " --window -1.5,-1.5,1.5,1.5 --px 16 --budget 8"
                        " --threshold 100 --out " + pgm);
  CHECK(r.code == 0);
  nlohmann::json meta = nlohmann::json::parse(r.out);
  CHECK(meta["pixels"][0] == 16);
  CHECK(meta["window"] == "rect:-1.5,-1.5,1.5,1.5");
  std::string head = slurp(pgm).substr(0, 2);
  CHECK(head == "P5");
  std::remove(pgm.c_str());
  std::remove((pgm + ".json").c_str());
}

TEST_CASE("cli: transitive subcommand round-trips a report") {
  CmdResult r = run_cli("transitive --family " + corpus("ntimesz.json") +
                        " --z0 0+0i --radii 0.5 --net rect:-10,-10,10,10"
                        " --net-eps 5 --eps 0.1 --budget 64");
  CHECK(r.code == 0);
  nlohmann::json j = nlohmann::json::parse(r.out);
  CHECK(j["property"] == "is_transitive_at");
  CHECK(j["verdict"] == "holds-with-witness");
}

TEST_CASE("cli: usage errors exit 1 with json on stderr") {
  CmdResult missing = run_cli("omega --z0 1+0i");
  CHECK(missing.code == 1);

  CmdResult badsub = run_cli("frobnicate");
  CHECK(badsub.code == 1);

  CmdResult badpoint = run_cli("omega --family " + corpus("powers.json") +
                               " --z0 nonsense --budget 32");
  CHECK(badpoint.code == 1);
  nlohmann::json e = nlohmann::json::parse(badpoint.err);
  CHECK(e.contains("error"));
  CHECK(e.contains("message"));

  CmdResult badfile = run_cli("omega --family no_such_file.json --z0 1+0i");
  CHECK(badfile.code == 1);
}

TEST_CASE("cli: numeric breakdown exits 3") {
  // the exponential tower reaches exp(inf) within a few members
  CmdResult r = run_cli("orbit --family " + corpus("expiter.json") +
                        " --z0 10+0i --budget 6");
  CHECK(r.code == 3);
  nlohmann::json e = nlohmann::json::parse(r.err);
  CHECK(e["error"] == "essential");
}

TEST_CASE("cli: help exits 0") {
  CHECK(run_cli("--help").code == 0);
  CHECK(run_cli("julia --help").code == 0);
}
