#include <doctest.h>

#include <cmath>
#include <limits>
#include <string>

#include "rlab/error.hpp"
#include "rlab/report.hpp"

using namespace rlab;

TEST_CASE("numbers use 17 significant digits") {
  CHECK(Json(0.1).dump() == "0.10000000000000001");
  CHECK(Json(1.0).dump() == "1");
  CHECK(Json(-2.5e-300).dump() == "-2.5e-300");
  CHECK(Json(42).dump() == "42");
  CHECK(Json(std::numeric_limits<double>::quiet_NaN()).dump() == "null");
  CHECK(Json(INFINITY).dump() == "null");
}

TEST_CASE("objects keep insertion order") {
  Json o = Json::object();
  o.set("zeta", 1).set("alpha", "a\"b\n").set("mid", true);
  CHECK(o.dump(-1) == R"({"zeta":1,"alpha":"a\"b\n","mid":true})");
  o.set("zeta", 2);
  CHECK(o.as_object().front().second.as_number() == 2.0);
  CHECK(o.find("mid")->as_bool());
  CHECK(o.find("missing") == nullptr);
}

TEST_CASE("arrays of scalars stay on one line") {
  Json o = Json::object();
  SmallVec v(3);
  v << 1, 2, 3;
  o.set("v", to_json(v)).set("rows", Json::array().push(Json::object().set("a", 1)));
  const std::string s = o.dump();
  CHECK(s.find("\"v\": [1, 2, 3]") != std::string::npos);
  CHECK(s.find("\"a\": 1") != std::string::npos);
}

TEST_CASE("csv rendering") {
  Json rows = Json::array();
  rows.push(Json::object().set("x", 1).set("tag", "Degenerate"));
  rows.push(Json::object().set("x", 2).set("tag", "a,b"));
  CHECK(render_csv(rows) == "x,tag\n1,Degenerate\n2,\"a,b\"\n");

  Json nested = Json::object();
  SmallVec v(2);
  v << 0.5, 0.25;
  nested.set("seed", 7).set("point", to_json(v)).set("res", Json::object().set("sym", 0));
  CHECK(render_csv(nested) == "seed,point[0],point[1],res.sym\n7,0.5,0.25,0\n");
}

TEST_CASE("pretty rendering and formats") {
  Json o = Json::object();
  o.set("name", "s4").set("chi", 2.0);
  const std::string p = render_pretty(o);
  CHECK(p.find("name: s4") != std::string::npos);
  CHECK(p.find("chi: 2") != std::string::npos);
  CHECK(parse_output_format("csv") == OutputFormat::Csv);
  CHECK(parse_output_format("pretty") == OutputFormat::Pretty);
  CHECK_THROWS_AS(parse_output_format("xml"), InvalidArgument);
  CHECK(render(o, OutputFormat::Json) == o.dump() + "\n");
}
