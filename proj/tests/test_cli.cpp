#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "schurlab/cli.hpp"
#include "schurlab/schurlab.hpp"

using nlohmann::json;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  Run r;
  r.code = schurlab::cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::vector<json> records(const std::string& text) {
  std::vector<json> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(json::parse(line));
  return out;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("version and help") {
    const auto v = run({"--version"});
    CHECK(v.code == 0);
    CHECK(v.out.find(schurlab::kVersion) != std::string::npos);
    CHECK(run({"--help"}).code == 0);
    CHECK(run({}).code == schurlab::cli::kExitValidation);
  }

  TEST_CASE("phi prints the Folner law as CSV") {
    const auto r = run({"phi", "--group", "Z1", "--f", "builtin:folner:n=10", "--radius", "25"});
    REQUIRE(r.code == 0);
    const auto ls = lines(r.out);
    REQUIRE(ls.size() == 2 + 1 + 51);
    CHECK(ls[0].rfind("# {", 0) == 0);
    CHECK(ls[2] == "element,value");
    for (std::size_t i = 3; i < ls.size(); ++i) {
      const auto comma = ls[i].find(',');
      const int s = std::stoi(ls[i].substr(1, comma - 2));
      const double v = std::stod(ls[i].substr(comma + 1));
      const double expect = std::max(0.0, 1.0 - std::abs(s) / 21.0);
      CHECK(std::abs(v - expect) < 1e-12);
    }
  }

  TEST_CASE("json output layout") {
    const auto r = run({"phi", "--f", "builtin:dirac", "--radius", "1", "--format", "json"});
    REQUIRE(r.code == 0);
    const auto recs = records(r.out);
    REQUIRE(recs.size() == 2 + 3 + 1);
    CHECK(recs[0].at("record") == "metadata");
    CHECK(recs[0].contains("timestamp"));
    CHECK(recs[1].at("record") == "config");
    CHECK(recs[1].at("subcommand") == "phi");
    CHECK(recs[1].at("params").at("radius") == 1);
    CHECK(recs[3].at("value") == 1.0);
    CHECK(recs.back().at("record") == "phi_summary");
  }

  TEST_CASE("exit codes") {
    CHECK(run({"phi", "--f", "builtin:folner:n=3", "--bogus"}).code == 2);
    CHECK(run({"nonsense"}).code == 2);
    CHECK(run({"phi", "--group", "Q8", "--f", "builtin:dirac"}).code == 2);
    CHECK(run({"decompose", "--builtin", "two-bump", "--p", "2.5"}).code == 2);
    CHECK(run({"percolate", "--model", "bernoulli:q=0.97:cap=20", "--N", "100"}).code == 3);
    const auto bad = run({"phi", "--f", "missing-file.json"});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("missing-file.json") != std::string::npos);
  }

  TEST_CASE("malformed input files report positions") {
    std::ofstream("schurlab_cli_bad.json") << "[[0, 0.5],\n [1, 0.5]\n";
    const auto r = run({"phi", "--f", "schurlab_cli_bad.json"});
    CHECK(r.code == 2);
    CHECK(r.err.find("schurlab_cli_bad.json:3:") != std::string::npos);
    std::remove("schurlab_cli_bad.json");
  }

  TEST_CASE("config file with flag override") {
    std::ofstream("schurlab_cli.ini") << "group = Z1\nseed = 4\n\n[percolate]\nmodel = tiling:L=5\n"
                                         "p = 1.5\nN = 50\n";
    const auto r = run({"--config", "schurlab_cli.ini", "percolate", "--N", "20"});
    REQUIRE(r.code == 0);
    const auto cfg = records(r.out)[1];
    CHECK(cfg.at("seed") == 4);
    CHECK(cfg.at("params").at("model") == "tiling:L=5");
    CHECK(cfg.at("params").at("N") == 20);
    CHECK(cfg.at("params").at("p") == 1.5);
    std::remove("schurlab_cli.ini");
  }

  TEST_CASE("decompose reports the planted profiles") {
    const auto r = run({"decompose", "--builtin", "two-bump", "--n-range", "1:20", "--p", "1.5"});
    REQUIRE(r.code == 0);
    const auto recs = records(r.out);
    const auto& rep = recs[2];
    CHECK(rep.at("status") == "STABLE");
    CHECK(rep.at("xi").at("profiles").size() == 2);
    CHECK(recs.size() == 3 + 20);
    const auto csv = run({"decompose", "--builtin", "two-bump", "--format", "csv"});
    CHECK(lines(csv.out)[2] == "n,residual_pp,residual_inf,dp,sep_0_1");
  }

  TEST_CASE("schur-check") {
    std::ofstream("schurlab_cli_kernel.json")
        << R"({"group": "Z1", "entries": [[0, 1.0], [1, 0.5], [-1, 0.5]]})";
    const auto r = run({"schur-check", "--kernel", "schurlab_cli_kernel.json", "--window-radius",
                        "3", "--trials", "10", "--seed", "2"});
    REQUIRE(r.code == 0);
    const auto rep = records(r.out)[2];
    CHECK(rep.at("violations").at("fin_prop") == 0);
    CHECK(rep.at("violations").at("schur_test") == 0);
    CHECK(rep.at("violations").at("cp_norm").at("upper_violations") == 0);
    CHECK(rep.at("psd").at("psd") == true);
    CHECK(rep.at("bounds").at("fin_prop").get<double>() >=
          rep.at("norms").at("convolution").at("value").get<double>());
    std::remove("schurlab_cli_kernel.json");
  }

  TEST_CASE("delta and amenability-report") {
    const auto d = run({"delta", "--group", "Z1", "--F-radius", "1", "--p", "1.5", "--K", "4",
                        "--restarts", "2", "--oracle"});
    REQUIRE(d.code == 0);
    const auto rec = records(d.out)[2];
    CHECK(rec.at("value").get<double>() <= rec.at("oracle").at("value").get<double>() + 1e-6);
    const auto a = run({"amenability-report", "--group", "Z1", "--F-radii", "1,2", "--p-ladder",
                        "1.2,1.8", "--restarts", "1", "--format", "csv"});
    REQUIRE(a.code == 0);
    CHECK(lines(a.out).size() == 2 + 1 + 4);
  }

  TEST_CASE("percolation commands") {
    const auto p = run({"percolate", "--model", "tiling:L=4", "--p", "1", "--s", "0;1;2", "--N",
                        "1000", "--seed", "3"});
    REQUIRE(p.code == 0);
    const auto recs = records(p.out);
    REQUIRE(recs.size() == 5);
    CHECK(std::abs(recs[2].at("exact").get<double>() - 0.25) < 1e-15);
    const auto m = run({"mtp-check", "--model", "tiling:L=3", "--N", "2000"});
    REQUIRE(m.code == 0);
    CHECK(records(m.out)[2].at("z_score").get<double>() <= 3.0);
    const auto t = run({"thm54", "--group", "Z1", "--schedule", "builtin:doubling:last=5",
                        "--F-radius", "2", "--N", "200", "--seed", "7"});
    REQUIRE(t.code == 0);
    CHECK(records(t.out).back().at("rising") == true);
    std::ofstream("schurlab_cli_schedule.json")
        << R"([{"L": 2, "p": 1.5}, {"L": 4, "p": 1.8}, {"q": 0.3, "p": 1.9}])";
    const auto s = run({"thm54", "--schedule", "schurlab_cli_schedule.json", "--N", "300"});
    REQUIRE(s.code == 0);
    CHECK(records(s.out).size() == 2 + 3 + 1);
    std::remove("schurlab_cli_schedule.json");
  }

  TEST_CASE("selftest passes") {
    const auto r = run({"selftest"});
    CHECK(r.code == 0);
    CHECK(records(r.out).back().at("passed") == true);
  }

  TEST_CASE("output to a file") {
    const auto r = run({"--output", "schurlab_cli_out.json", "phi", "--f", "builtin:dirac",
                        "--format", "json"});
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    std::ifstream in("schurlab_cli_out.json");
    std::stringstream buf;
    buf << in.rdbuf();
    CHECK(records(buf.str()).size() == 4);
    in.close();
    std::remove("schurlab_cli_out.json");
  }
}
