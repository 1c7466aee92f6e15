#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

struct Run {
  int code = -1;
  std::string out;
};

const fs::path& workdir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "kcsi_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

Run cli(const std::string& args) {
  const std::string cmd = "cd '" + workdir().string() + "' && '" KCSI_CLI "' " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p);
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

bool has_line(const std::string& text, const std::string& line) {
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) {
    if (l == line) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("usage errors") {
  CHECK(cli("").code == 1);
  CHECK(cli("nosuch").code == 1);
  CHECK(cli("cocycle --bounds 5x").code == 1);
  CHECK(cli("cocycle --bounds 5,-1").code == 1);
  CHECK(cli("pair --seed abc").code == 1);
  CHECK(cli("pair --vol cauchy").code == 1);
  CHECK(cli("--help").code == 0);
}

TEST_CASE("v2") {
  Run r = cli("v2 --knot trefoil_plus");
  CHECK(r.code == 0);
  CHECK(has_line(r.out, "v2_pair_count 1"));
  CHECK(has_line(r.out, "v2_oracle 1"));
  CHECK(has_line(r.out, "conway 1 + z^2"));

  r = cli("v2 --knot unknot");
  CHECK(has_line(r.out, "v2_pair_count 0"));
  CHECK(has_line(r.out, "v2_oracle 0"));
  CHECK(has_line(r.out, "conway 1"));

  r = cli("v2 --knot granny");
  CHECK(has_line(r.out, "v2_pair_count 2"));
  CHECK(has_line(r.out, "v2_oracle 2"));
  CHECK(has_line(r.out, "conway 1 + 2z^2 + z^4"));

  std::ofstream(workdir() / "t.knot") << "kcsi-knot 1\ngauss: o1- u2- o3- u1- o2- u3-\n";
  r = cli("v2 --knot t.knot");
  CHECK(r.code == 0);
  CHECK(has_line(r.out, "v2_oracle 1"));

  std::ofstream(workdir() / "bad.knot") << "kcsi-knot 1\ngauss: o1+ o1+\n";
  CHECK(cli("v2 --knot bad.knot").code == 2);
  CHECK(cli("v2 --knot missing.knot").code == 2);
}

TEST_CASE("cocycle reports and cache") {
  Run r = cli("cocycle --bounds 5,1 --cache c51.json");
  CHECK(r.code == 0);
  CHECK(has_line(r.out, "kernel dimension 26"));
  CHECK(r.out.find("nontrivalent kernel elements 26") != std::string::npos);

  r = cli("cocycle --bounds 2,0 --cache c20.json");
  CHECK(r.code == 0);
  CHECK(has_line(r.out, "kernel dimension 0"));

  CHECK(cli("cocycle --bounds 9,9").code == 3);

  r = cli("cocycle --bounds 5,4 --out manifest.json");
  CHECK(r.code == 0);
  CHECK(has_line(r.out, "representative (9 graphs):"));
  CHECK(has_line(r.out, "potentially nonzero faces 0"));
  CHECK(fs::exists(workdir() / "kcsi_cocycle.json"));
  std::ifstream m(workdir() / "manifest.json");
  const auto j = nlohmann::json::parse(m);
  CHECK(j["command"] == "cocycle");
  CHECK(j["outputs"]["representative"].size() == 9);
  CHECK(j.contains("wall_time_s"));
  CHECK(j["versions"].contains("code"));
}

TEST_CASE("pair reproducibility and cache versioning") {
  REQUIRE(cli("cocycle --bounds 5,4").code == 0);
  const Run a = cli("pair --knot trefoil_plus --samples 20000 --seed 3 --threads 1");
  const Run b = cli("pair --knot trefoil_plus --samples 20000 --seed 3 --threads 2");
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find("estimate ") != std::string::npos);
  CHECK(a.out.find("v2 1") != std::string::npos);

  // A cache from another code version is refused.
  std::ifstream in(workdir() / "kcsi_cocycle.json");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto at = text.find("\"code_version\"");
  REQUIRE(at != std::string::npos);
  const auto q1 = text.find('"', text.find(':', at));
  const auto q2 = text.find('"', q1 + 1);
  text.replace(q1 + 1, q2 - q1 - 1, "0.0.0-old");
  std::ofstream(workdir() / "old.json") << text;
  CHECK(cli("pair --samples 1000 --cache old.json").code == 5);

  std::ofstream(workdir() / "g.knot") << "kcsi-knot 1\ngauss: o1+ u2+ o3+ u1+ o2+ u3+\n";
  CHECK(cli("pair --samples 1000 --knot g.knot").code == 2);
}

TEST_CASE("faces") {
  Run r = cli("faces --graph 'i=3 f=2 edges=14,15,24,35,45'");
  CHECK(r.code == 0);
  CHECK(r.out.find("{1,4,5}  Vanishes(involution/valence)") != std::string::npos);

  r = cli("faces --graph 'i=2 f=0 edges=12'");
  CHECK(r.code == 0);
  CHECK(r.out.find("{1,2}  Principal") != std::string::npos);
  CHECK(r.out.find("Vanishes") == std::string::npos);

  r = cli("faces --graph 'i=4 f=1 edges=15,25,35,45'");
  CHECK(r.out.find("{1,2,3,4,5}  Vanishes(degree)") != std::string::npos);

  r = cli("faces --witness 100 --graph 'i=3 f=2 edges=14,15,24,35,45'");
  CHECK(r.code == 0);
  CHECK(r.out.find("{1,4,5}  involution/valence max violation") != std::string::npos);

  CHECK(cli("faces --graph 'i=2 f=0 edges=19'").code == 2);
}
