#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "schurlab/errors.hpp"
#include "schurlab/io.hpp"

using namespace schurlab;
using nlohmann::json;

namespace {

std::string write_temp(const std::string& name, const std::string& text) {
  const std::string path = "schurlab_io_" + name;
  std::ofstream(path) << text;
  return path;
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("element round trips") {
    for (const auto* spec : {"Z1", "Z3", "F2", "C12"}) {
      const Group g = Group::parse(spec);
      for (const auto& x : *g.ball_at_identity(2)) {
        CHECK(io::element_from_json(g, io::element_to_json(g, x)) == x);
        CHECK(io::parse_element(g, g.format(x)) == x);
      }
    }
    const Group f2 = Group::free(2);
    CHECK(io::element_to_json(f2, f2.word("a B a")) == json("a B a"));
    const Group z2 = Group::zd(2);
    CHECK(io::parse_element(z2, "-1,2") == z2.coords({-1, 2}));
    CHECK(io::parse_element_list(z2, "[1,0];0,1") ==
          std::vector<Element>{z2.coords({1, 0}), z2.coords({0, 1})});
  }

  TEST_CASE("element errors name their location") {
    const Group z2 = Group::zd(2);
    try {
      io::elements_from_json(z2, json::parse(R"({"elements": [[1, 0], [1, "x"]]})"));
      FAIL("expected a ValidationError");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find("/elements/1/1") != std::string::npos);
    }
    const Group c5 = Group::cyclic(5);
    CHECK_THROWS_AS(io::element_from_json(c5, json(7)), ValidationError);
    CHECK_THROWS_AS(io::parse_element(z2, "1,"), ValidationError);
  }

  TEST_CASE("function and kernel round trips") {
    const Group f2 = Group::free(2);
    const auto f = SparseFunction::make(f2, {{f2.word("a"), 0.5}, {f2.word("B A"), 0.25}});
    CHECK(io::function_from_json(io::function_to_json(f)) == f);
    const auto k = phi_kernel(f);
    CHECK(io::kernel_from_json(io::kernel_to_json(k)) == k);
    CHECK_THROWS_AS(io::function_from_json(io::function_to_json(f), Group::zd(1)), ValidationError);
    CHECK_THROWS_AS(io::function_from_json(json::parse(R"({"entries": [[0, 0.5]]})")),
                    ValidationError);
    const auto bare = io::function_from_json(json::parse(R"([[0, 0.5], [3, 1]])"), Group::zd(1));
    CHECK(bare.support_size() == 2);
    try {
      io::function_from_json(json::parse(R"({"group": "Z1", "entries": [[0, 0.5], [1, 1.5]]})"));
      FAIL("expected a ValidationError");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find("/entries/1/1") != std::string::npos);
    }
  }

  TEST_CASE("sequences") {
    const auto j = json::parse(R"({"group": "Z1", "sequence": [[[0, 1]], [[1, 0.5], [2, 0.5]]]})");
    const auto fs = io::sequence_from_json(j);
    REQUIRE(fs.size() == 2);
    CHECK(fs[1].support_size() == 2);
    const auto list = json::parse(R"([{"group": "Z2", "entries": [[[0, 0], 1]]}, {"entries": []}])");
    CHECK(io::sequence_from_json(list).size() == 2);
  }

  TEST_CASE("files report positions") {
    const auto path = write_temp("bad.json", "{\n  \"group\": \"Z1\",\n  \"entries\": [[0, ]]\n}\n");
    try {
      io::read_json_file(path);
      FAIL("expected a ValidationError");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find(path + ":3:") != std::string::npos);
    }
    std::remove(path.c_str());
    CHECK_THROWS_AS(io::read_json_file("no/such/file.json"), ValidationError);
  }

  TEST_CASE("csv") {
    const Group f2 = Group::free(2);
    const std::vector<Entry> rows{{f2.identity(), 0.1}, {f2.word("a"), 1.0 / 3.0}};
    CHECK(io::entries_to_csv(f2, rows) == "element,value\ne,0.1\na,0.3333333333333333\n");
    const Group z2 = Group::zd(2);
    const std::vector<Entry> zrows{{z2.coords({1, -2}), 0.5}};
    CHECK(io::entries_to_csv(z2, zrows) == "element,value\n\"[1,-2]\",0.5\n");
    CHECK(io::csv_field("a\"b") == "\"a\"\"b\"");
  }

  TEST_CASE("xi serialization") {
    const Group z1 = Group::zd(1);
    const SparseFunction parts[] = {dirac(z1, z1.coords({4}), 0.5)};
    const auto j = io::xi_to_json(Xi::make(z1, 1.5, parts));
    CHECK(j.at("profiles").size() == 1);
    CHECK(j.at("profiles")[0].at("entries") == json::parse("[[[0], 0.5]]"));
  }
}
