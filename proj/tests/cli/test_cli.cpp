// Drives the installed command-line tool as a subprocess.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class Workdir {
 public:
  Workdir() {
    dir_ = fs::temp_directory_path() / ("isac_cli_" + std::to_string(::getpid()) + "_" +
                                        std::to_string(counter_++));
    fs::create_directories(dir_);
  }
  ~Workdir() {
    std::error_code ec;
    fs::remove_all(dir_, ec);
  }
  fs::path path(const std::string& name) const { return dir_ / name; }

  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name)) << text;
    return path(name);
  }

  Outcome run(const std::string& args) const {
    const std::string cmd = std::string("cd '") + dir_.string() + "' && '" ISAC_CLI_PATH "' " + args +
                            " > stdout.txt 2> stderr.txt";
    const int status = std::system(cmd.c_str());
    Outcome o;
    o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    o.out = slurp(path("stdout.txt"));
    o.err = slurp(path("stderr.txt"));
    return o;
  }

 private:
  fs::path dir_;
  static inline int counter_ = 0;
};

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("solve: default scenario converges and writes the solution") {
  Workdir w;
  w.write("cfg.json", R"({"n_tx": 16, "n_users": 4, "p_t_dbm": 20})");
  const Outcome o = w.run("solve --config cfg.json --seed 3 --out sol.json --full-check");
  INFO(o.out << o.err);
  REQUIRE(o.code == 0);
  const auto doc = nlohmann::json::parse(slurp(w.path("sol.json")));
  CHECK(doc["schema_version"] == 1);
  CHECK(doc["solver"]["status"] == "converged");
  CHECK(doc["beamformers"].size() == 16);
  CHECK(o.out.find("crb_objective") != std::string::npos);
  CHECK(o.out.find("FAIL") == std::string::npos);
}

TEST_CASE("solve: infeasible power budget exits 2 and reports p_low") {
  Workdir w;
  w.write("cfg.json", R"({"n_tx": 16, "n_users": 4, "p_t_dbm": -5})");
  const Outcome o = w.run("solve --config cfg.json");
  CHECK(o.code == 2);
  CHECK(o.err.find("p_low") != std::string::npos);
  CHECK(o.err.find("dBm") != std::string::npos);
  const Outcome allowed = w.run("solve --config cfg.json --allow-infeasible");
  CHECK(allowed.code == 0);
}

TEST_CASE("solve: single-user channel in the degenerate regime gives 0.16") {
  Workdir w;
  w.write("cfg.json", R"({"n_tx": 4, "n_users": 1, "p_t_dbm": 20, "gamma_db": 10,
    "channel": [[[1, 0]], [[1, 0]], [[0, 0]], [[0, 0]]]})");
  const Outcome o = w.run("solve --config cfg.json --out sol.json --full-check");
  INFO(o.out << o.err);
  REQUIRE(o.code == 0);
  const auto doc = nlohmann::json::parse(slurp(w.path("sol.json")));
  CHECK(doc["degenerate"] == true);
  CHECK(doc["origin"] == "degenerate_witness");
  CHECK(std::abs(doc["crb_objective"].get<double>() - 0.16) < 1e-9);
}

TEST_CASE("configuration errors exit 1 with a message") {
  Workdir w;
  w.write("bad_field.json", R"({"n_tx": 16, "n_user": 4})");
  Outcome o = w.run("solve --config bad_field.json");
  CHECK(o.code == 1);
  CHECK(o.err.find("n_user") != std::string::npos);

  w.write("bad_json.json", "{\"n_tx\": 16,\n  \"n_users\": }");
  o = w.run("solve --config bad_json.json");
  CHECK(o.code == 1);
  CHECK(o.err.find("line") != std::string::npos);

  w.write("bad_value.json", R"({"n_tx": 2, "n_users": 4})");
  CHECK(w.run("solve --config bad_value.json").code == 1);
  CHECK(w.run("solve --config missing.json").code == 1);
  CHECK(w.run("no-such-command").code != 0);
}

TEST_CASE("sweep: deterministic apart from timing columns") {
  Workdir w;
  w.write("cfg.json", R"({"n_tx": 8, "n_users": 2, "p_t_dbm": 20, "trials": 2,
    "sweep": {"parameter": "Nt", "values": [6, 8]}})");
  REQUIRE(w.run("sweep --config cfg.json --out a.csv").code == 0);
  REQUIRE(w.run("sweep --config cfg.json --out b.csv").code == 0);
  const std::string raw = slurp(w.path("a.csv"));
  CHECK(raw.find("\r\n") != std::string::npos);
  const auto a = csv_rows(raw);
  const auto b = csv_rows(slurp(w.path("b.csv")));
  REQUIRE(a.size() == b.size());
  REQUIRE(a.size() == 1 + 2 * (2 + 2));  // header, then trials + mean + median per point
  const auto& header = a[0];
  CHECK(header[0] == "trial");
  CHECK(header.size() == 12);
  for (std::size_t r = 1; r < a.size(); ++r) {
    REQUIRE(a[r].size() == header.size());
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (header[c].find("seconds") != std::string::npos) continue;
      CHECK_MESSAGE(a[r][c] == b[r][c], "row " << r << " column " << header[c]);
    }
  }
}

TEST_CASE("sweep over K: fewer users give a lower CRB") {
  Workdir w;
  w.write("cfg.json", R"({"n_tx": 64, "p_t_dbm": 20, "trials": 1,
    "sweep": {"parameter": "K", "values": [4, 8]}})");
  const Outcome o = w.run("sweep --config cfg.json --out k.csv");
  INFO(o.err);
  REQUIRE(o.code == 0);
  const auto rows = csv_rows(slurp(w.path("k.csv")));
  const auto& header = rows[0];
  const auto col = std::find(header.begin(), header.end(), "crb_objective") - header.begin();
  const auto users = std::find(header.begin(), header.end(), "n_users") - header.begin();
  double crb4 = NAN, crb8 = NAN;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r][0] != "0") continue;
    (rows[r][users] == "4" ? crb4 : crb8) = std::stod(rows[r][col]);
  }
  CHECK(crb4 < crb8);
}

TEST_CASE("feasibility prints p_low per trial") {
  Workdir w;
  w.write("cfg.json", R"({"n_tx": 8, "n_users": 2, "trials": 3})");
  const Outcome o = w.run("feasibility --config cfg.json");
  REQUIRE(o.code == 0);
  CHECK(csv_rows(o.out).size() >= 4);
  CHECK(o.out.find("p_low") != std::string::npos);
}

TEST_CASE("verify: quick suite passes, flipped Z sign fails") {
  Workdir w;
  const Outcome ok = w.run("verify");
  INFO(ok.out);
  CHECK(ok.code == 0);
  const Outcome flipped = w.run("verify --flip-z-sign");
  CHECK(flipped.code == 3);
}
