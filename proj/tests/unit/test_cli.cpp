#include <doctest.h>

#include <json.hpp>

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "algoselect/greedy.hpp"
#include "algoselect/io.hpp"
#include "algoselect/online.hpp"
#include "cli.hpp"

using namespace algoselect;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "algoselect");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = algoselect::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "algoselect_test_cli";
  fs::create_directories(dir);
  const auto p = dir / name;
  fs::remove_all(p);
  return p;
}

std::vector<std::string> csv_row(const std::string& text, std::size_t row) {
  std::istringstream in(text);
  std::string line;
  for (std::size_t i = 0; i <= row; ++i) std::getline(in, line);
  std::vector<std::string> cells;
  std::istringstream l(line);
  std::string cell;
  while (std::getline(l, cell, ',')) cells.push_back(cell);
  return cells;
}

}  // namespace

TEST_CASE("erm-greedy") {
  SUBCASE("empty directory") {
    const auto dir = scratch("empty");
    fs::create_directories(dir);
    const auto r = invoke({"erm-greedy", "--instances", dir.string()});
    CHECK(r.code == cli::exit_io);
    CHECK(r.err.find("no instances") != std::string::npos);
    CHECK(json::parse(r.err)["error"] == "io");
  }
  SUBCASE("hard instance file puts the optimum inside (r, s)") {
    const auto file = scratch("hard.json");
    io::write_file_atomic(file, io::mwis_to_json(online::build_hard_instance({5, 0.25, 0.75})));
    const auto r = invoke({"erm-greedy", "--instances", file.string()});
    REQUIRE(r.code == cli::exit_ok);
    CHECK(csv_row(r.out, 0)[0] == "rho");
    const auto row = csv_row(r.out, 1);
    const double rho = std::stod(row[0]);
    CHECK(rho > 0.25);
    CHECK(rho < 0.75);
    CHECK(std::stod(row[3]) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("parse errors carry the line number") {
    const auto file = scratch("bad.jsonl");
    io::write_file_atomic(file, "{\"n\":1,\"edges\":[],\"weights\":[0.5]}\n{\"n\":2,\n");
    const auto r = invoke({"erm-greedy", "--instances", file.string()});
    CHECK(r.code == cli::exit_parse);
    const auto j = json::parse(r.err);
    CHECK(j["error"] == "parse");
    CHECK(j["line"] == 2);
  }
  SUBCASE("argument errors") {
    CHECK(invoke({"erm-greedy"}).code == cli::exit_usage);
    CHECK(invoke({"erm-greedy", "--random", "3", "--family", "knapsack"}).code == cli::exit_usage);
    CHECK(invoke({"erm-greedy", "--random", "3", "--lo", "0.5", "--hi", "0.1"}).code == cli::exit_usage);
    CHECK(invoke({"erm-greedy", "--random", "x"}).code == cli::exit_usage);
    CHECK(invoke({}).code == cli::exit_usage);
  }
}

TEST_CASE("adversary instances replay to cost one") {
  const auto r = invoke({"adversary", "--n-budget", "1500", "--horizon", "10", "--seed", "9"});
  REQUIRE(r.code == cli::exit_ok);
  std::istringstream in(r.out);
  std::string line;
  std::vector<json> rows;
  while (std::getline(in, line)) rows.push_back(json::parse(line));
  REQUIRE(rows.size() == 10);
  const double r_last = rows.back()["r"], s_last = rows.back()["s"];
  const auto family = greedy::ParamGreedyFamily::mwis(false);
  for (std::size_t t = 0; t < rows.size(); ++t) {
    CHECK(rows[t]["step"] == t);
    CHECK(rows[t]["m"] == 10);
    const auto x = io::parse_mwis_json(rows[t].dump());
    for (double f : {0.1, 0.5, 0.9}) {
      const double rho = r_last + f * (s_last - r_last);
      CHECK(greedy::run_greedy(family, rho, x).cost == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("pdim-probe") {
  const auto constant = invoke({"pdim-probe", "--random", "4", "--family", "constant", "--seed", "2"});
  REQUIRE(constant.code == cli::exit_ok);
  const auto j = json::parse(constant.out);
  REQUIRE(j["results"].size() == 4);
  for (const auto& r : j["results"]) CHECK(r["shattered"] == false);

  // Two instances whose costs realize all four labelings over the cells.
  const auto file = scratch("pair.jsonl");
  const auto x1 = greedy::make_mwis(6, std::vector<greedy::Edge>{{0, 1}, {0, 4}, {0, 5}, {1, 3}, {2, 4}, {2, 5}, {3, 5}, {4, 5}},
                                    {0.54, 0.3, 0.61, 0.26, 0.79, 0.9});
  const auto x2 = greedy::make_mwis(
      6, std::vector<greedy::Edge>{{0, 3}, {0, 4}, {0, 5}, {1, 2}, {1, 4}, {2, 3}, {2, 4}, {2, 5}, {4, 5}},
      {0.59, 0.6, 0.89, 0.17, 0.57, 0.29});
  io::write_file_atomic(file, io::mwis_to_json(x1) + "\n" + io::mwis_to_json(x2) + "\n");
  const auto pair = invoke({"pdim-probe", "--instances", file.string()});
  REQUIRE(pair.code == cli::exit_ok);
  const auto jp = json::parse(pair.out);
  CHECK(jp["results"][1]["shattered"] == true);
  CHECK(jp["results"][1]["labelings"] == 4);
  CHECK(jp["results"][1]["witnesses"].size() == 2);
  const auto cpair = invoke({"pdim-probe", "--instances", file.string(), "--family", "constant"});
  CHECK(json::parse(cpair.out)["results"][1]["shattered"] == false);
}

TEST_CASE("gd-tune") {
  const auto single = invoke({"gd-tune", "--random", "4", "--net", "0.25"});
  REQUIRE(single.code == cli::exit_ok);
  CHECK(csv_row(single.out, 1)[0] == "0.25");

  const auto file = scratch("gd.jsonl");
  io::write_file_atomic(file, "{\"lambdas\":[1],\"z0\":[0.9]}\n{\"lambdas\":[1],\"z0\":[-0.4]}\n");
  const auto r = invoke({"gd-tune", "--instances", file.string(), "--rho-l", "0.5", "--rho-u", "1.25", "--L", "1.5",
                      "--m-sc", "0.5", "--c", "0.25", "--nu", "0.1"});
  REQUIRE(r.code == cli::exit_ok);
  CHECK(std::stod(csv_row(r.out, 1)[0]) == doctest::Approx(1.0).epsilon(1e-3));

  const auto bad = invoke({"gd-tune", "--random", "2", "--rho-l", "0.5", "--rho-u", "0.1"});
  CHECK(bad.code == cli::exit_usage);
}

TEST_CASE("every subcommand is deterministic") {
  const std::vector<std::vector<std::string>> commands{
      {"erm-greedy", "--random", "6", "--seed", "5"},
      {"erm-greedy", "--random", "6", "--problem", "knapsack", "--best-of", "2", "--seed", "5"},
      {"gd-tune", "--random", "5", "--dim", "3", "--seed", "5"},
      {"online", "--horizon", "50", "--net-size", "200", "--seed", "5"},
      {"adversary", "--n-budget", "200", "--horizon", "5", "--seed", "5"},
      {"pdim-probe", "--random", "3", "--seed", "5"},
      {"epm", "--random", "20", "--seed", "5"},
      {"sort-bench", "--n", "32", "--train", "50", "--tests", "20", "--seed", "5"},
  };
  for (const auto& c : commands) {
    const auto a = invoke(c);
    const auto b = invoke(c);
    CHECK_MESSAGE(a.code == cli::exit_ok, c[0]);
    CHECK_MESSAGE(a.out == b.out, c[0]);
    CHECK(!a.out.empty());
  }
  // A different seed changes the random draws.
  CHECK(invoke({"sort-bench", "--n", "32", "--train", "50", "--tests", "5", "--seed", "1"}).out !=
        invoke({"sort-bench", "--n", "32", "--train", "50", "--tests", "5", "--seed", "2"}).out);
}

TEST_CASE("--out writes the file") {
  const auto file = scratch("out") / "nested" / "bench.csv";
  const auto r = invoke({"sort-bench", "--n", "16", "--train", "10", "--tests", "3", "--out", file.string()});
  REQUIRE(r.code == cli::exit_ok);
  CHECK(r.out.empty());
  const auto text = io::read_file(file);
  CHECK(text.rfind("array,comparisons,route,insertion,merge,fallback,mergesort,correct\n", 0) == 0);
}

TEST_CASE("sort-bench reads CSV arrays") {
  const auto train = scratch("train.csv");
  const auto tests = scratch("tests.csv");
  io::write_file_atomic(train, "1,2,3\n4,5,6\n");
  io::write_file_atomic(tests, "3,2,1\n9,-1,4\n");
  const auto r = invoke({"sort-bench", "--samples", train.string(), "--arrays", tests.string()});
  REQUIRE(r.code == cli::exit_ok);
  CHECK(csv_row(r.out, 1).back() == "1");
  CHECK(csv_row(r.out, 2).back() == "1");

  io::write_file_atomic(tests, "3,2\n");
  CHECK(invoke({"sort-bench", "--samples", train.string(), "--arrays", tests.string()}).code == cli::exit_usage);
}

TEST_CASE("epm output") {
  const auto r = invoke({"epm", "--random", "25", "--seed", "3", "--rhos", "0,1"});
  REQUIRE(r.code == cli::exit_ok);
  const auto j = json::parse(r.out);
  CHECK(j["models"].size() == 2);
  CHECK(j["schema"] == "mwis-basic-v1");
  CHECK(j["models"][0]["coefficients"].size() == 6);
}
