#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "fman/cli.hpp"
#include "fman/errors.hpp"

using namespace fman;
using Json = nlohmann::ordered_json;

namespace {

std::string fixture(const std::string& name) { return std::string(FMAN_FIXTURE_DIR) + "/" + name; }

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome fman_run(std::vector<std::string> args, const std::string& input = "") {
  std::istringstream in(input);
  std::ostringstream out, err;
  int code = cli::run(args, in, out, err);
  return {code, out.str(), err.str()};
}

ModelFile parse(const std::string& text) {
  std::istringstream in(text);
  return parse_model(in, "t.fman");
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

std::string drop_timing(std::string json) {
  Json j = Json::parse(json);
  j.erase("timing");
  return j.dump();
}

std::filesystem::path temp_file(const std::string& name, const std::string& text) {
  auto p = std::filesystem::temp_directory_path() / ("fman_test_" + name);
  std::ofstream(p) << text;
  return p;
}

const char* kFixtures[] = {"ex51.fman",       "ex52.fman",        "ex51-base.fman",
                           "ex52-base.fman",  "semisimple2.fman", "nilpotent3.fman",
                           "regular2d.fman",  "plane-gamma-const.fman", "plane-gamma-x1.fman"};

}  // namespace

// ------------------------------------------------------------ model files

TEST(ModelFile, FixturesRoundTrip) {
  for (const char* f : kFixtures) {
    ModelFile m = load_model(fixture(f));
    EXPECT_EQ(parse(save_model(m)), m) << f;
    EXPECT_EQ(save_model(parse(save_model(m))), save_model(m)) << f;
  }
}

TEST(ModelFile, ConstructedModelsRoundTrip) {
  for (const char* kind : {"tangent", "cotangent", "generalized"}) {
    Outcome r = fman_run({"prolong", kind, fixture("plane-gamma-x1.fman")});
    ASSERT_EQ(r.code, 0) << r.err;
    ModelFile m = parse(r.out);
    EXPECT_EQ(m.chart.k(), kind == std::string("generalized") ? 4 : 2);
    EXPECT_EQ(parse(save_model(m)), m) << kind;
  }
}

TEST(ModelFile, Example51Contents) {
  ModelFile m = load_model(fixture("ex51.fman"));
  EXPECT_EQ(m.name, "ex51");
  EXPECT_EQ(m.chart.n(), 1);
  EXPECT_EQ(m.chart.k(), 1);
  EXPECT_EQ(m.components.star.at({0, 0, 0}), RatFunc(1));
  EXPECT_EQ(m.components.l.at({0, 0, 0}), RatFunc(1));
  EXPECT_TRUE(m.components.D.is_zero());
  ASSERT_EQ(m.euler.size(), 1u);
  EXPECT_EQ(m.euler[0].first, "E1");
  EXPECT_EQ(m.candidate("E1").beta[0], parse_expr("x+5", std::vector<std::string>{"x"}));
  EXPECT_EQ(m.candidate("E1").lambda[0], RatFunc(1));
  EXPECT_FALSE(m.connection);
}

TEST(ModelFile, MissingEntriesAreZeroAndFormsAntisymmetric) {
  ModelFile m = parse("[chart]\nbase = a b c\n[connection]\n[gamma]\n1 3 = a\n[H]\n1 2 3 = 2\n");
  EXPECT_TRUE(m.components.star.is_zero());
  ASSERT_TRUE(m.connection);
  EXPECT_TRUE(m.connection->gamma.is_zero());
  ASSERT_TRUE(m.gamma);
  EXPECT_EQ(m.gamma->g.at({2, 0}), -parse_expr("a", std::vector<std::string>{"a"}));
  ASSERT_TRUE(m.H);
  EXPECT_EQ(m.H->h.at({2, 1, 0}), RatFunc(-2));
  EXPECT_EQ(m.H->h.at({1, 2, 0}), RatFunc(2));
}

TEST(ModelFile, ConnectionLayout) {
  ModelFile m = parse("[chart]\nbase = u v\n[connection]\n2 1 2 = 1/v\n");
  EXPECT_EQ(m.connection->gamma.at({0, 1, 1}), parse_expr("1/v", std::vector<std::string>{"v"}));
  EXPECT_EQ(m.connection->gamma.at({1, 0, 1}), RatFunc(0));
}

TEST(ModelFile, ErrorsCarryLineNumbers) {
  const std::string chart = "[chart]\nbase = x\nfiber = xi\n";
  EXPECT_NE(error_of(chart + "[stars]\n").find("t.fman:4: unknown section [stars]"), std::string::npos);
  EXPECT_NE(error_of(chart + "[star]\n1 1 = 1\n").find("t.fman:5: expected 3 indices"), std::string::npos);
  EXPECT_NE(error_of(chart + "[star]\n1 1 2 = 1\n").find("t.fman:5: index 2 out of range"), std::string::npos);
  EXPECT_NE(error_of(chart + "[star]\n1 1 x = 1\n").find("t.fman:5: bad index 'x'"), std::string::npos);
  EXPECT_NE(error_of(chart + "\n\n[l]\n1 1 1 = 1 +\n").find("t.fman:7:"), std::string::npos);
  EXPECT_NE(error_of("x = 1\n").find("t.fman:1: entry outside of a section"), std::string::npos);
  EXPECT_NE(error_of(chart + "[unit]\ny = 1\n").find("t.fman:5: unknown coordinate 'y'"), std::string::npos);
  EXPECT_NE(error_of(chart + "[star]\n[star]\n").find("t.fman:5: duplicate section"), std::string::npos);
  EXPECT_NE(error_of("[meta]\nname = a\n").find("missing [chart]"), std::string::npos);
  EXPECT_NE(error_of("[chart]\nbase = x y\n[gamma]\n2 1 = 1\n").find("t.fman:4: two-form entries need i < j"),
            std::string::npos);
  EXPECT_NE(error_of("[chart]\nbase = x y z\n[H]\n1 3 2 = 1\n").find("t.fman:4:"), std::string::npos);
}

TEST(ModelFile, UnknownVariableIsParseErrorWithOffset) {
  try {
    parse("[chart]\nbase = x\n[star]\n1 1 1 = x + y\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("t.fman:4: unknown variable 'y'"), std::string::npos);
    EXPECT_EQ(e.offset(), 4u);
  }
}

TEST(ModelFile, FiberDependentComponentsRejected) {
  EXPECT_THROW(parse("[chart]\nbase = x\nfiber = xi\n[l]\n1 1 1 = xi\n"), InputError);
}

TEST(ModelFile, QuadraticEulerCandidateRejected) {
  std::string msg;
  try {
    load_model(fixture("ex51-bad.fman"));
  } catch (const InputError& e) {
    msg = e.what();
  }
  EXPECT_NE(msg.find("ex51-bad.fman:"), std::string::npos) << msg;
  EXPECT_NE(msg.find("not fiberwise linear"), std::string::npos) << msg;
}

TEST(ModelFile, LookupErrors) {
  ModelFile m = parse("[chart]\nbase = x\n");
  EXPECT_THROW(m.require_unit(), InputError);
  EXPECT_THROW(m.candidate("E"), InputError);
  EXPECT_THROW(load_model(fixture("no-such-file.fman")), InputError);
}

// ------------------------------------------------------------ commands

TEST(Command, CheckExample51) {
  Outcome r = fman_run({"check", fixture("ex51.fman")});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("verdict: pass"), std::string::npos);
  Json j = Json::parse(fman_run({"--json", "check", fixture("ex51.fman")}).out);
  EXPECT_EQ(j["verdict"], "pass");
  EXPECT_EQ(j["records"].size(), 6u);
}

TEST(Command, EulerCheckExample51) {
  Outcome r = fman_run({"euler-check", fixture("ex51.fman"), "--candidate", "E1"});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  Outcome bad = fman_run({"euler-check", fixture("ex51-bad.fman")});
  EXPECT_EQ(bad.code, cli::kInputError);
  EXPECT_NE(bad.err.find("not fiberwise linear"), std::string::npos);
  Outcome missing = fman_run({"euler-check", fixture("ex51.fman"), "--candidate", "E9"});
  EXPECT_EQ(missing.code, cli::kInputError);
}

TEST(Command, TangentPipeline) {
  Outcome p = fman_run({"prolong", "tangent", fixture("ex52-base.fman")});
  ASSERT_EQ(p.code, 0) << p.err;
  Outcome c = fman_run({"check", "-"}, p.out);
  EXPECT_EQ(c.code, 0) << c.out;
  Outcome e = fman_run({"euler-check", "-"}, p.out);
  EXPECT_EQ(e.code, 0) << e.out;
}

TEST(Command, DualizeTwiceIsIdentity) {
  Outcome p = fman_run({"prolong", "cotangent", fixture("ex52-base.fman")});
  ASSERT_EQ(p.code, 0);
  Outcome d1 = fman_run({"dualize", "-"}, p.out);
  Outcome d2 = fman_run({"dualize", "-"}, d1.out);
  ASSERT_EQ(d2.code, 0) << d2.err;
  ModelFile a = parse(p.out), b = parse(d2.out);
  EXPECT_EQ(a.components, b.components);
  EXPECT_EQ(a.unit, b.unit);
  EXPECT_EQ(a.euler, b.euler);
  EXPECT_EQ(fman_run({"check", "-"}, d1.out).code, 0);
}

TEST(Command, DualizeNeedsConnection) {
  Outcome r = fman_run({"dualize", fixture("ex52.fman")});
  EXPECT_EQ(r.code, cli::kInputError);
  EXPECT_NE(r.err.find("connection"), std::string::npos);
  auto conn = temp_file("conn.fman", "[chart]\nbase = x1 x2\n[connection]\n");
  EXPECT_EQ(fman_run({"dualize", fixture("ex52.fman"), "--connection", conn.string()}).code, 0);
  auto wrong = temp_file("conn3.fman", "[chart]\nbase = y1 y2\n[connection]\n");
  EXPECT_EQ(fman_run({"dualize", fixture("ex52.fman"), "--connection", wrong.string()}).code, cli::kInputError);
}

TEST(Command, FlatFixturesProlongToFManifolds) {
  for (const char* f : {"ex51-base.fman", "ex52-base.fman", "semisimple2.fman", "nilpotent3.fman"})
    for (const char* kind : {"tangent", "cotangent", "generalized"}) {
      Outcome p = fman_run({"prolong", kind, fixture(f)});
      ASSERT_EQ(p.code, 0) << f << " " << kind << p.err;
      EXPECT_EQ(fman_run({"check", "-"}, p.out).code, 0) << f << " " << kind;
    }
}

TEST(Command, BFieldAndClassification) {
  Outcome c = fman_run({"prolong", "generalized", fixture("plane-gamma-const.fman")});
  Outcome b = fman_run({"bfield", "-"}, c.out);
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_EQ(fman_run({"courant-classify", "-"}, b.out).code, 0);

  Outcome x = fman_run({"prolong", "generalized", fixture("plane-gamma-x1.fman")});
  Outcome bx = fman_run({"bfield", "-"}, x.out);
  Outcome cl = fman_run({"--json", "courant-classify", "-"}, bx.out);
  EXPECT_EQ(cl.code, cli::kCheckFailure);
  Json j = Json::parse(cl.out);
  std::map<std::string, std::string> verdicts;
  for (const auto& r : j["records"]) verdicts[r["identity"]] = r["verdict"];
  EXPECT_EQ(verdicts["anchor-l"], "pass");
  EXPECT_EQ(verdicts["pairing-image"], "pass");
  EXPECT_EQ(verdicts["dorfman-l"], "fail");
  EXPECT_EQ(verdicts["courant-predicate"], "fail");
  for (const auto& r : j["records"])
    if (r["identity"] == "courant-predicate") EXPECT_EQ(r["condition"], "nabla-gamma");

  EXPECT_EQ(fman_run({"bfield", fixture("ex52.fman")}).code, cli::kInputError);
}

TEST(Command, FiveFieldIdentity) {
  for (const char* f : {"ex51-base.fman", "ex52-base.fman"}) {
    Outcome a = fman_run({"lemma53", fixture(f)});
    Outcome b = fman_run({"five-field", fixture(f)});
    EXPECT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
  }
  EXPECT_EQ(fman_run({"lemma53", fixture("ex51.fman")}).code, cli::kInputError);
}

TEST(Command, BaseCheckWithConnection) {
  Outcome r = fman_run({"check", fixture("ex52-base.fman"), "--candidate", "E"});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("euler-flat"), std::string::npos);
  Outcome plain = fman_run({"check", fixture("regular2d.fman")});
  EXPECT_EQ(plain.code, 0);
  EXPECT_EQ(plain.out.find("flat"), std::string::npos);
}

// ------------------------------------------------------------ exit codes and rendering

TEST(ExitCodes, AllFour) {
  EXPECT_EQ(fman_run({"check", fixture("ex51.fman")}).code, cli::kPass);

  std::string bad = "[chart]\nbase = x\nfiber = xi\n[star]\n1 1 1 = 1\n[l]\n1 1 1 = 2\n[unit]\nx = 1\n";
  Outcome fail = fman_run({"check", "-"}, bad);
  EXPECT_EQ(fail.code, cli::kCheckFailure);
  EXPECT_NE(fail.out.find("FAIL  associativity"), std::string::npos) << fail.out;

  EXPECT_EQ(fman_run({"check", fixture("missing.fman")}).code, cli::kInputError);
  EXPECT_EQ(fman_run({"check", "-"}, "[star]\n").code, cli::kInputError);
  EXPECT_EQ(fman_run({"frobnicate"}).code, cli::kInputError);
  EXPECT_EQ(fman_run({"prolong", "sideways", fixture("ex51-base.fman")}).code, cli::kInputError);

  Outcome g = fman_run({"prolong", "generalized", fixture("ex52-base.fman")});
  auto curved = temp_file("curved.fman", "[chart]\nbase = x1 x2\n[connection]\n1 2 2 = x1\n");
  Outcome pre = fman_run({"courant-classify", "-", "--connection", curved.string()}, g.out);
  EXPECT_EQ(pre.code, cli::kPreconditionError) << pre.out << pre.err;
  EXPECT_NE(pre.out.find("precondition"), std::string::npos);
  Json j = Json::parse(fman_run({"--json", "courant-classify", "-", "--connection", curved.string()}, g.out).out);
  EXPECT_EQ(j["verdict"], "precondition");
}

TEST(ExitCodes, HelpIsSuccess) {
  Outcome r = fman_run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("courant-classify"), std::string::npos);
}

TEST(Rendering, JsonAndTextAgree) {
  std::string fail_model = "[chart]\nbase = x y\n[star]\n1 1 1 = 1\n2 1 2 = 1\n2 2 1 = x\n[unit]\nx = 1\n";
  std::vector<std::pair<std::vector<std::string>, std::string>> cases{
      {{"check", fixture("ex51.fman")}, ""},
      {{"check", fixture("ex52-base.fman"), "--candidate", "E"}, ""},
      {{"check", "-"}, fail_model},
      {{"euler-check", fixture("ex52.fman")}, ""},
      {{"lemma53", fixture("ex52-base.fman")}, ""},
  };
  for (auto& [args, input] : cases) {
    Outcome text = fman_run(args, input);
    auto jargs = args;
    jargs.insert(jargs.begin(), "--json");
    Outcome js = fman_run(jargs, input);
    EXPECT_EQ(text.code, js.code);
    Json j = Json::parse(js.out);
    std::istringstream lines(text.out);
    std::vector<std::string> verdicts;
    for (std::string line; std::getline(lines, line);) {
      if (line.rfind("  pass  ", 0) == 0) verdicts.push_back("pass");
      if (line.rfind("  FAIL  ", 0) == 0) verdicts.push_back("fail");
      if (line.rfind("  skip  ", 0) == 0) verdicts.push_back("skipped");
    }
    ASSERT_EQ(verdicts.size(), j["records"].size()) << text.out;
    for (std::size_t i = 0; i < verdicts.size(); ++i) EXPECT_EQ(verdicts[i], j["records"][i]["verdict"]);
    EXPECT_NE(text.out.find("verdict: " + j["verdict"].get<std::string>()), std::string::npos);
  }
}

TEST(Rendering, WitnessIsOneBased) {
  std::string model = "[chart]\nbase = x y\n[star]\n1 1 1 = 1\n2 1 2 = 1\n2 2 1 = x\n[unit]\nx = 1\n";
  Json j = Json::parse(fman_run({"--json", "check", "-"}, model).out);
  EXPECT_EQ(j["verdict"], "fail");
  const Json* failed = nullptr;
  for (const auto& r : j["records"])
    if (r["verdict"] == "fail") {
      failed = &r;
      break;
    }
  ASSERT_NE(failed, nullptr);
  ASSERT_TRUE(failed->contains("witness"));
  for (const auto& w : (*failed)["witness"]) {
    EXPECT_GE(w["index"].get<int>(), 1);
    EXPECT_LE(w["index"].get<int>(), 2);
  }
}

TEST(Rendering, ByteStable) {
  Outcome g = fman_run({"prolong", "generalized", fixture("plane-gamma-x1.fman")});
  Outcome b = fman_run({"bfield", "-"}, g.out);
  for (int pass = 0; pass < 2; ++pass) {
    std::vector<std::string> args{"courant-classify", "-"};
    if (pass) args.insert(args.begin(), "--json");
    Outcome r1 = fman_run(args, b.out);
    Outcome r2 = fman_run(args, b.out);
    if (pass) {
      EXPECT_EQ(drop_timing(r1.out), drop_timing(r2.out));
      EXPECT_TRUE(Json::parse(r1.out)["timing"].contains("seconds"));
    } else {
      EXPECT_EQ(r1.out, r2.out);
    }
  }
  EXPECT_EQ(fman_run({"prolong", "generalized", fixture("plane-gamma-x1.fman")}).out, g.out);
}

TEST(Rendering, OutFlagWritesFile) {
  auto path = std::filesystem::temp_directory_path() / "fman_test_out.fman";
  std::filesystem::remove(path);
  Outcome r = fman_run({"prolong", "tangent", fixture("ex51-base.fman"), "--out", path.string()});
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(load_model(path.string()).name, "ex51-base-tangent");
}
