#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include <json.hpp>

#ifndef TERRACINI_CLI
#error "TERRACINI_CLI must point at the command-line binary"
#endif

using nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

// stdin_text must not contain single quotes.
Run run(const std::string& args, const std::string& stdin_text = "") {
  std::string cmd = std::string(TERRACINI_CLI) + " " + args + " 2>/dev/null";
  if (!stdin_text.empty()) cmd = "printf '%s' '" + stdin_text + "' | " + cmd;
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p);
  return std::string(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
}

std::filesystem::path scratch() {
  auto dir = std::filesystem::temp_directory_path() / "terracini_cli_test";
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("exit codes") {
  Run r = run("terracini --cone psd:3 --random-rays 2 --seed 1");
  CHECK(r.code == 0);
  CHECK(json::parse(r.out).at("passed") == true);

  r = run("terracini --cone square-cone --rays '[[1,1,1],[-1,-1,1]]'");
  CHECK(r.code == 2);
  json v = json::parse(r.out);
  CHECK(v.at("passed") == false);
  CHECK(v.at("certificate_residual").get<double>() >= 0.1);

  r = run("terracini --cone '{\"kind\": bad' --rays '[[1,0]]'");
  CHECK(r.code == 1);
  CHECK(json::parse(r.out).at("error").at("kind") == "usage");

  r = run("terracini --cone psd:2 --rays '[[1,0,0]]' --mode sideways");
  CHECK(r.code == 1);

  r = run("recover lp --d 10 --n 5 --k 1 --trials 2");
  CHECK(r.code == 1);
  CHECK(json::parse(r.out).at("error").at("detail").get<std::string>().find("--seed") !=
        std::string::npos);

  r = run("neighborly --cone psd:2 --k 1");
  CHECK(r.code == 1);
  CHECK(json::parse(r.out).at("error").at("kind") == "unsupported-operation");
}

TEST_CASE("hyperbolic commands") {
  Run r = run("hyperbolic eig --poly 'x1 x2 x3' --e 1,1,1 --x 3,1,2");
  REQUIRE(r.code == 0);
  json ev = json::parse(r.out).at("eigenvalues");
  REQUIRE(ev.size() == 3);
  CHECK(ev[0].get<double>() == doctest::Approx(3.0));
  CHECK(ev[1].get<double>() == doctest::Approx(2.0));
  CHECK(ev[2].get<double>() == doctest::Approx(1.0));

  r = run("hyperbolic localize --poly 'x1 x2 x3' --x 0,0,1");
  CHECK(json::parse(r.out).at("mult") == 2);
  r = run("hyperbolic derivative --poly 'x1 x2 x3'");
  CHECK(json::parse(r.out).at("degree") == 2);
  r = run("hyperbolic lineality --poly 'x1^2 - x2^2' --e 1,0");
  CHECK(r.code == 0);
  r = run("hyperbolic mult3 --poly 'x1 x2 x3 x4 x5 x6' --x 0,0,0,1,1,1");
  CHECK(r.code == 0);
  r = run("hyperbolic eig --poly 'x1^2 + x2^2' --e 1,0 --x 0,1");
  CHECK(r.code == 1);
  CHECK(json::parse(r.out).at("error").at("kind") == "not-hyperbolic");
}

TEST_CASE("neighborly and veronese commands") {
  Run r = run("neighborly --cone square-cone --k 2");
  CHECK(r.code == 2);
  CHECK(json::parse(r.out).at("failing_subset") == json({0, 2}));
  CHECK(run("neighborly --cone orthant:4 --k 4").code == 0);

  r = run("veronese double-vanish --points blekherman-s --n 4 --deg 4");
  REQUIRE(r.code == 0);
  json d = json::parse(r.out);
  CHECK(d.at("dim").get<int>() >= 7);
  CHECK(d.at("sos_span_dim").get<int>() <= 6);

  r = run("veronese certificate --points '[[1,0]]' --d 2");
  CHECK(json::parse(r.out).at("coefficients") == json({0.0, 0.0, 1.0, 0.0, 1.0}));
  // Stochastic commands insist on a seed.
  CHECK(run("veronese growth --points '[[1,0]]' --d 2 --samples 50").code == 1);
  r = run("veronese growth --points '[[1,0]]' --d 2 --samples 200 --seed 3");
  REQUIRE(r.code == 0);
  json g = json::parse(r.out);
  CHECK(g.at("mu").get<double>() >= g.at("analytic_bound").get<double>());
}

TEST_CASE("stdin payloads and csv") {
  Run r = run("terracini --cone - --rays '[[1,0,0],[0,0,1]]'", "\"psd:2\"");
  CHECK(r.code == 0);
  r = run("recover sdp --config -", R"({"kind":"sdp","d":3,"n":5,"k":1,"trials":3,"seed":4})");
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out).at("summary").at("valid") == 3);
  r = run("hyperbolic eig --poly - --x 1,2", "x1 x2");
  CHECK(r.code == 0);
  r = run("recover lp --d 8 --n 4 --k 1 --trials 2 --seed 1 --format csv");
  CHECK(r.out.rfind("key,value\n", 0) == 0);
  CHECK(r.out.find("summary.rate,") != std::string::npos);
}

TEST_CASE("outputs are reproducible and manifests are separate") {
  const auto dir = scratch();
  const std::string cmds[] = {
      "terracini --cone veronese:2:6 --random-rays 3",
      "recover lp --d 20 --n 10 --k 2 --trials 10",
      "recover dt-study --d 8 --n 4 --k 1 --maps 3 --plants 3",
      "veronese regularity --points '[[1,0]]' --deg 4 --samples 200",
  };
  int i = 0;
  for (const std::string& c : cmds) {
    const auto a = dir / ("a" + std::to_string(i) + ".json");
    const auto b = dir / ("b" + std::to_string(i) + ".json");
    ++i;
    run(c + " --seed 5 --out " + a.string());
    run(c + " --seed 5 --jobs 3 --out " + b.string());
    const std::string sa = slurp(a);
    CHECK_FALSE(sa.empty());
    CHECK(sa == slurp(b));
    json m = json::parse(slurp(a.string() + ".manifest.json"));
    CHECK(m.contains("wall_time_seconds"));
    CHECK(m.at("seed") == 5);
    CHECK(m.at("config").at("seed") == "5");
    CHECK(sa.find("wall_time") == std::string::npos);
  }
}
