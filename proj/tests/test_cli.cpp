#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "fixtures.hpp"
#include "tracial/io.hpp"

using namespace tracial;

namespace {

struct CliRun {
  int exit_code = -1;
  std::string out;
};

CliRun cli(const std::string& args) {
  const std::string cmd = std::string("\"") + TRACIAL_CLI + "\" " + args + " 2>/dev/null";
  CliRun run;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) run.out.append(buf.data(), got);
  const int status = pclose(pipe);
  run.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return run;
}

std::string data(const std::string& name) { return "\"" + fixtures::data_path(name).string() + "\""; }

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("tracial_cli_test_" + name);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("cli check") {
  const CliRun flat = cli("--format text check " + data("exconv.json") + " -k 2");
  CHECK(flat.exit_code == 0);
  CHECK(flat.out.find("psd=true rank(M1)=2 rank(M2)=2 flat=true") != std::string::npos);

  const CliRun nonflat = cli("--format text check " + data("expsd.json") + " -k 2");
  CHECK(nonflat.exit_code == 2);
  CHECK(nonflat.out.find("psd=true") != std::string::npos);
  CHECK(nonflat.out.find("flat=false") != std::string::npos);

  const CliRun json = cli("check " + data("exconv.json"));
  CHECK(json.exit_code == 0);
  const Json j = Json::parse(json.out);
  CHECK(j["flat"] == true);
  CHECK(j["rank"] == 2);

  CHECK(cli("check " + data("nontracial.json") + " -k 2").exit_code == 64);
  CHECK(cli("check /nonexistent/file.json").exit_code == 64);
  CHECK(cli("check " + data("exconv.json") + " -k 3").exit_code == 64);
}

TEST_CASE("cli check reports non-PSD data") {
  const std::filesystem::path p = temp_file("nonpsd.json");
  write_sequence(p, TracialSequence::from_entries(1, 2, std::vector<std::pair<Word, double>>{
                                                            {Word{}, 1.0}, {Word{0}, 2.0}, {Word{0, 0}, 1.0}}));
  CHECK(cli("check \"" + p.string() + "\" -k 1").exit_code == 3);
  std::filesystem::remove(p);
}

TEST_CASE("cli extend") {
  const std::filesystem::path out = temp_file("ext.json");
  const CliRun run = cli("extend " + data("exconv.json") + " -k 2 --target-k 3 -o \"" + out.string() + "\"");
  CHECK(run.exit_code == 0);
  const TracialSequence y = read_sequence(out);
  CHECK(y.order() == 6);
  CHECK(y(Word{0, 0, 0, 0, 0}) == doctest::Approx(fixtures::kExconvA).epsilon(1e-10));
  CHECK(y(Word{0, 0, 0, 0, 0, 0}) == doctest::Approx(1.0).epsilon(1e-10));
  std::filesystem::remove(out);

  const CliRun ones = cli("extend " + data("all_ones.json") + " --target-k 4");
  CHECK(ones.exit_code == 0);
  const TracialSequence z = sequence_from_json(Json::parse(ones.out));
  for (const auto& [w, v] : z.values()) CHECK(v == doctest::Approx(1.0).epsilon(1e-10));

  CHECK(cli("extend " + data("expsd.json") + " -k 2 --target-k 3").exit_code == 2);
  CHECK(cli("extend " + data("exconv.json")).exit_code == 64);
}

TEST_CASE("cli represent") {
  const std::filesystem::path out = temp_file("rep.json");
  const CliRun run = cli("represent " + data("exconv.json") + " -k 2 -o \"" + out.string() + "\"");
  CHECK(run.exit_code == 0);
  const Json j = Json::parse(run.out);
  CHECK(j["residual"].get<double>() <= 1e-9);
  const TracialRepresentation rep = representation_from_json(read_json_file(out));
  REQUIRE(rep.atoms.size() == 2);
  double weights[2] = {rep.atoms[0].weight, rep.atoms[1].weight};
  std::sort(weights, weights + 2);
  CHECK(weights[0] == doctest::Approx(1.0 - std::sqrt(0.5)).epsilon(1e-9));
  CHECK(weights[1] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));
  std::filesystem::remove(out);

  const CliRun ones = cli("represent " + data("all_ones.json"));
  CHECK(ones.exit_code == 0);
  CHECK(Json::parse(ones.out)["atoms"].size() == 1);

  CHECK(cli("represent " + data("expsd.json") + " -k 2").exit_code == 2);
}

TEST_CASE("cli theta2") {
  CHECK(cli("theta2 \"X^2\" -k 1").exit_code == 0);
  const CliRun comm = cli("theta2 \"X*Y - Y*X\" -k 1");
  CHECK(comm.exit_code == 0);
  CHECK(Json::parse(comm.out)["squares"].empty());
  const CliRun neg = cli("theta2 \"X^2 - 1\" -k 1");
  CHECK(neg.exit_code == 1);
  CHECK(Json::parse(neg.out)["verdict"] == "not_member");
  CHECK(cli("theta2 \"X^3\" -k 1").exit_code == 2);
  CHECK(cli("theta2 \"X +\" -k 1").exit_code == 64);
  CHECK(cli("theta2 \"X^2\"").exit_code == 64);
}

TEST_CASE("cli theta2 reads polynomial files") {
  const CliRun run = cli("theta2 " + data("motzkin_nc.txt") + " -k 1");
  // deg M_nc = 6 > 2k.
  CHECK(run.exit_code == 2);
}

TEST_CASE("cli witness") {
  const std::filesystem::path out = temp_file("wit.json");
  const CliRun run = cli("witness \"X^2 - 1\" -k 1 -o \"" + out.string() + "\"");
  CHECK(run.exit_code == 0);
  const TracialSequence y = read_sequence(out);
  CHECK(riesz_eval(y, parse_poly("X^2 - 1", 1)) < 0.0);
  std::filesystem::remove(out);
  CHECK(cli("witness \"X^2\" -k 1").exit_code == 1);
}

TEST_CASE("cli riesz") {
  const CliRun m = cli("--format text riesz " + data("motzkin_m3.json") + " " + data("motzkin_nc.txt"));
  CHECK(m.exit_code == 0);
  CHECK(std::stod(m.out) == doctest::Approx(-0.3125).epsilon(1e-12));
  const CliRun one = cli("riesz " + data("exconv.json") + " 1");
  CHECK(one.exit_code == 0);
  CHECK(Json::parse(one.out)["value"] == 1.0);
  CHECK(cli("riesz " + data("exconv.json") + " \"X^5\"").exit_code == 2);
}

TEST_CASE("cli usage errors") {
  CHECK(cli("").exit_code == 64);
  CHECK(cli("frobnicate").exit_code == 64);
  CHECK(cli("--tol -1 check " + data("exconv.json")).exit_code == 64);
  CHECK(cli("--format xml check " + data("exconv.json")).exit_code == 64);
  CHECK(cli("--help").exit_code == 0);
}

TEST_CASE("cli output is deterministic") {
  const std::filesystem::path a = temp_file("det_a.json");
  const std::filesystem::path b = temp_file("det_b.json");
  const std::string args = "--seed 3 theta2 \"X^4 + Y^4 + X*Y*Y*X + 1\" -k 2 -o ";
  CHECK(cli(args + "\"" + a.string() + "\"").exit_code == 0);
  CHECK(cli(args + "\"" + b.string() + "\"").exit_code == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK_FALSE(slurp(a).empty());
  std::filesystem::remove(a);
  std::filesystem::remove(b);

  const CliRun r1 = cli("--seed 5 represent " + data("exconv.json"));
  const CliRun r2 = cli("--seed 5 represent " + data("exconv.json"));
  CHECK(r1.out == r2.out);
}
