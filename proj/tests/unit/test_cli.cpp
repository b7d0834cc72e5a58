#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "critwave_cli/checks.hpp"
#include "critwave_cli/io.hpp"
#include "doctest.h"

using namespace critwave::cli;
namespace fs = std::filesystem;

TEST_CASE("number formatting") {
  CHECK(format_real(1.0) == "1.0000000000000000e+00");
  CHECK(format_real(-0.1) == "-1.0000000000000001e-01");
  CHECK(format_real(32.0) == "3.2000000000000000e+01");
  CHECK(std::stod(format_real(0.1 + 0.2)) == 0.1 + 0.2);
}

TEST_CASE("csv rendering") {
  CsvTable t;
  t.add("x", {1.0, 2.0});
  t.add("y", {0.5, -3.0});
  CHECK(t.render() ==
        "x,y\n1.0000000000000000e+00,5.0000000000000000e-01\n2.0000000000000000e+00,-3.0000000000000000e+00\n");
  CHECK_THROWS_AS(t.add("z", {1.0}), std::logic_error);
}

TEST_CASE("atomic writes") {
  const fs::path dir = fs::temp_directory_path() / "critwave_unit_cli";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto target = dir / "out.csv";
  write_atomic(target, "first\n");
  write_atomic(target, "second\n");
  std::ifstream in(target);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == "second\n");
  CHECK(std::distance(fs::directory_iterator(dir), fs::directory_iterator()) == 1);
  fs::remove_all(dir);
}

TEST_CASE("sidecar path") {
  CHECK(sidecar_json("a/trace.csv") == fs::path("a/trace.json"));
  CHECK(sidecar_json("trace") == fs::path("trace.json"));
}

TEST_CASE("json rendering is stable") {
  Json j;
  j["b"] = 1;
  j["a"] = 2;
  CHECK(render_json(j) == "{\n  \"b\": 1,\n  \"a\": 2\n}\n");
}

TEST_CASE("worker cap from the environment") {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  setenv("CRITWAVE_THREADS", "1", 1);
  CHECK(worker_count() == 1);
  setenv("CRITWAVE_THREADS", "1000", 1);
  CHECK(worker_count() == hw);
  setenv("CRITWAVE_THREADS", "junk", 1);
  CHECK(worker_count() == hw);
  unsetenv("CRITWAVE_THREADS");
  CHECK(worker_count() == hw);
}

TEST_CASE("acceptance check plumbing") {
  const auto r = run_check(1, 1);
  CHECK(r.id == 1);
  CHECK(r.anchor == "pohozaev=32");
  CHECK(r.pass);
  CHECK(format_check(r, false).find("PASS") != std::string::npos);
  CHECK_THROWS_AS(run_check(13, 1), std::out_of_range);
  CHECK_THROWS_AS(run_check(0, 1), std::out_of_range);
}
