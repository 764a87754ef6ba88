#include <catch_amalgamated.hpp>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <memory>
#include <string>

#include <json.hpp>

namespace {

const std::string kCli = GQW_CLI_PATH;
const std::string kDir = GQW_SYSTEMS_DIR;

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = kCli + " " + args + " 2>/dev/null";
  std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmd.c_str(), "r"), pclose);
  REQUIRE(pipe);
  std::string out;
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), pipe.get()) != nullptr) out += buf.data();
  const int status = pclose(pipe.release());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

}  // namespace

TEST_CASE("exit codes", "[cli]") {
  CHECK(run("check --suite poisson").code == 0);
  CHECK(run("check --system " + kDir + "/broken_exact.spec").code == 2);
  CHECK(run("check --system " + kDir + "/flipped_beta.spec --suite circle-iso").code == 2);
  CHECK(run("check --system " + kDir + "/flipped_beta.spec --no-validate --suite circle-iso").code == 1);
  CHECK(run("check --system " + kDir + "/missing.spec").code == 2);
  CHECK(run("check --suite bogus").code == 2);
  CHECK(run("check --format yaml").code == 2);
  CHECK(run("group selftest").code == 0);
  CHECK(run("demo a1").code == 0);
  CHECK(run("demo a2").code == 0);
  CHECK(run("demo a2 --angle 2*pi").code == 2);
  CHECK(run("poisson -f p -g q").code == 0);
  CHECK(run("poisson -f 'p +' -g q").code == 2);
  CHECK(run("--help").code == 0);
}

TEST_CASE("json output is byte-identical for a fixed seed", "[cli][determinism]") {
  const std::string args =
      "check --system " + kDir + "/appendix_a.spec --suite all --samples 32 --tol 1e-9 --seed 42 --hbar 1 --format json";
  Run a = run(args);
  Run b = run(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  auto j = nlohmann::json::parse(a.out);
  CHECK(j["suite"] == "all");
  CHECK(j["checks"].size() > 40);
}

TEST_CASE("poisson prints the bracket", "[cli]") {
  Run r = run("poisson -f 'p^2' -g 'p*q' --format json");
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["bracket"] == "-2*p^2");
  CHECK(j["routes_agree"] == true);
}

TEST_CASE("hbar is honoured", "[cli]") {
  Run r = run("check --suite dirac --hbar 3 --format json");
  CHECK(r.code == 0);
}
