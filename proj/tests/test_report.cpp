#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "mapwalk/report.hpp"

using namespace mapwalk;

namespace {

const std::string kData = MAPWALK_DATA_DIR;
const std::string kCli = MAPWALK_CLI_PATH;

std::filesystem::path scratch() {
  const auto dir = std::filesystem::temp_directory_path() / "mapwalk_test_report";
  std::filesystem::create_directories(dir);
  return dir;
}

void write(const std::filesystem::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string slurp(const std::filesystem::path& p) { return detail::read_file(p.string()); }

// Runs the CLI and returns its exit status; stdout goes to `out`.
int run_cli(const std::string& args, const std::filesystem::path& out) {
  const std::string cmd = "\"" + kCli + "\" " + args + " > \"" + out.string() + "\" 2> \"" +
                          (out.string() + ".err") + "\"";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string error_of(const std::string& text) {
  try {
    law_from_json(detail::parse_json_text(text, "law"));
  } catch (const InputError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(LawJson, ParsesBothImageForms) {
  const auto a = law_from_json(Json::parse(R"j({"n":5,"generators":[[2,3,4,1,5],"[2,5,5,2,4]"],"weights":["1/2","1/2"]})j"));
  EXPECT_EQ(a, example_law());
  EXPECT_EQ(load_law(kData + "/example_two_maps.json"), example_law());
  EXPECT_EQ(law_from_json(law_to_json(example_law())), example_law());
  const auto thirds = law_from_json(Json::parse(R"j({"n":2,"generators":[[1,1],[2,2],[2,1]],"weights":["1/3","1/3","1/3"]})j"));
  EXPECT_EQ(thirds.support().size(), 3u);
}

TEST(LawJson, FieldDiagnostics) {
  EXPECT_NE(error_of(R"j({"n":5,"generators":[[2,3,4,1,5]]})j").find("missing field \"weights\""), std::string::npos);
  EXPECT_NE(error_of(R"j({"n":3,"generators":[[1,2,4]],"weights":["1"]})j").find("law.generators[0][2]"),
            std::string::npos);
  EXPECT_NE(error_of(R"j({"n":3,"generators":[[1,2]],"weights":["1"]})j").find("law.generators[0]"),
            std::string::npos);
  EXPECT_NE(error_of(R"j({"n":2,"generators":[[1,2],[2,1]],"weights":["1/2","x"]})j").find("law.weights[1]"),
            std::string::npos);
  EXPECT_NE(error_of(R"j({"n":2,"generators":[[1,2]],"weights":["1","1"]})j").find("1 generators but 2"),
            std::string::npos);
  EXPECT_NE(error_of(R"j({"n":0,"generators":[[1]],"weights":["1"]})j").find("law.n"), std::string::npos);
  EXPECT_NE(error_of("{\"n\":2,\n \"generators\": [[1,2]]\n ,,}").find("law:3:3"), std::string::npos);
  EXPECT_THROW(load_law(kData + "/bad_sum.json"), InputError);
  EXPECT_THROW(load_law(kData + "/does_not_exist.json"), InputError);
}

TEST(ConfigJson, ReadsEveryField) {
  const auto req = simulation_request_from_json(Json::parse(R"j({
    "law_file": "x.json", "mode": "nonstationary", "replications": 1200, "k_min": -50, "k_max": 2,
    "k": 1, "window": 2, "seed": 9, "alpha": 0.01,
    "family": {"c": ["1/4", "3/4"], "Lambda_W": [{"(2,4,5)": "1"}, {"(1,3,5)": "1/2", "(2,4,5)": "1/2"}]}})j"));
  EXPECT_EQ(req.law_file, "x.json");
  EXPECT_EQ(req.config.replications, 1200u);
  EXPECT_EQ(req.config.k_min, -50);
  EXPECT_EQ(req.config.k, 1);
  EXPECT_EQ(req.config.window, 2u);
  EXPECT_EQ(req.config.seed, 9u);
  ASSERT_TRUE(req.family);
  EXPECT_EQ(req.family->c[1], Rational(3, 4));
  EXPECT_EQ(req.family->lambda_W[1].weight(Tuple::from_one_based({1, 3, 5})), Rational(1, 2));
  EXPECT_THROW(simulation_request_from_json(Json::parse(R"j({"mode":"nonstationary"})j")), InputError);
  EXPECT_THROW(simulation_request_from_json(Json::parse(R"j({"mode":"other"})j")), InputError);
  EXPECT_THROW(simulation_request_from_json(Json::parse(R"j({"seed":"x"})j")), InputError);
  EXPECT_THROW(simulation_request_from_json(Json::parse(R"j({"Lambda_W":{"(2,4,5)":"-1"}})j")), InputError);
}

TEST(AnalysisJson, ExampleValues) {
  const auto j = analysis_json(analyze(example_law()));
  EXPECT_EQ(j["semigroup"]["size"], 28);
  EXPECT_EQ(j["semigroup"]["kernel_size"], 24);
  EXPECT_EQ(j["rees"]["e"], "[4,2,2,4,5]");
  EXPECT_EQ(j["rees"]["p"], 1);
  EXPECT_EQ(j["rees"]["H_equals_G"], true);
  EXPECT_EQ(j["limits"]["eta_L"]["[4,2,2,4,5]"], "2/3");
  EXPECT_EQ(j["limits"]["eta_L"]["[1,3,3,1,5]"], "1/3");
  EXPECT_EQ(j["limits"]["eta_equals_nu"], true);
  EXPECT_EQ(j["cliques"]["W"], Json::parse("[[2,4,5]]"));
  EXPECT_EQ(j["invariant_law"]["first_marginal"], Json::parse(R"j(["1/9","2/9","1/9","2/9","1/3"])j"));
}

TEST(AnalysisJson, IdentityLaw) {
  const auto j = analysis_json(analyze(load_law(kData + "/identity.json")));
  EXPECT_EQ(j["semigroup"]["size"], 1);
  EXPECT_EQ(j["rees"]["e"], "[1,2,3,4]");
  EXPECT_EQ(j["limits"]["nu"], Json::parse(R"j({"[1,2,3,4]":"1/1"})j"));
  EXPECT_EQ(j["cliques"]["m_mu"], 4);
}

TEST(TextRendering, ContainsKeysAndValues) {
  Json j = {{"a", 1}, {"b", {{"c", "x"}}}, {"d", Json::array({1, 2})}};
  const auto text = render_text(j);
  EXPECT_NE(text.find("a: 1"), std::string::npos);
  EXPECT_NE(text.find("c: x"), std::string::npos);
}

TEST(Cli, AnalyzeIsDeterministicWithoutTimestamp) {
  const auto dir = scratch();
  ASSERT_EQ(run_cli("analyze --law " + kData + "/example_two_maps.json --no-timestamp", dir / "a1.json"), 0);
  ASSERT_EQ(run_cli("analyze --law " + kData + "/example_two_maps.json --no-timestamp", dir / "a2.json"), 0);
  EXPECT_EQ(slurp(dir / "a1.json"), slurp(dir / "a2.json"));
  const auto j = Json::parse(slurp(dir / "a1.json"));
  EXPECT_EQ(j["tool_version"], kToolVersion);
  EXPECT_FALSE(j.contains("timestamp"));
  ASSERT_EQ(run_cli("analyze --law " + kData + "/example_two_maps.json", dir / "a3.json"), 0);
  EXPECT_TRUE(Json::parse(slurp(dir / "a3.json")).contains("timestamp"));
  ASSERT_EQ(run_cli("analyze --text --law " + kData + "/hexagon_p3.json", dir / "a4.txt"), 0);
  EXPECT_NE(slurp(dir / "a4.txt").find("p: 3"), std::string::npos);
}

TEST(Cli, InputErrorsExitThree) {
  const auto dir = scratch();
  EXPECT_EQ(run_cli("analyze --law " + kData + "/bad_sum.json", dir / "e1.json"), 3);
  EXPECT_NE(slurp(dir / "e1.json.err").find("weights"), std::string::npos);
  EXPECT_EQ(run_cli("analyze --law " + (dir / "missing.json").string(), dir / "e2.json"), 3);
  EXPECT_EQ(run_cli("analyze", dir / "e3.json"), 3);
  EXPECT_EQ(run_cli("simulate --law " + kData + "/example_two_maps.json --replications 0", dir / "e4.json"), 3);
  EXPECT_EQ(run_cli("simulate --law " + kData + "/example_two_maps.json --replications 10", dir / "e5.json"), 3);
  EXPECT_EQ(run_cli("frobnicate", dir / "e6.json"), 3);
  EXPECT_EQ(run_cli("analyze --json --text --law " + kData + "/identity.json", dir / "e7.json"), 3);
}

TEST(Cli, SimulateSeededReportsReproduce) {
  const auto dir = scratch();
  const std::string args = "simulate --law " + kData +
                           "/hexagon_p3.json --replications 1500 --k-min -200 --seed 7 --no-timestamp";
  ASSERT_EQ(run_cli(args, dir / "s1.json"), 0);
  ASSERT_EQ(run_cli(args, dir / "s2.json"), 0);
  EXPECT_EQ(slurp(dir / "s1.json"), slurp(dir / "s2.json"));
  const auto j = Json::parse(slurp(dir / "s1.json"));
  EXPECT_EQ(j["seed"], 7);
  EXPECT_EQ(j["simulation"]["config"]["replications"], 1500);
  EXPECT_EQ(j["simulation"]["verification"]["exact_ok"], true);
}

TEST(Cli, NonstationaryConfig) {
  const auto dir = scratch();
  write(dir / "cfg.json", R"j({"law_file": ")j" + kData + R"j(/cyclic3.json", "mode": "nonstationary",
    "replications": 1000, "k_min": -20, "seed": 3,
    "family": {"c": ["1/2", "1/2", "0"], "Lambda_W": [{"(1,2,3)": "1"}, {"(1,3,2)": "1"}, {}]}})j");
  ASSERT_EQ(run_cli("simulate --no-timestamp --config " + (dir / "cfg.json").string(), dir / "n1.json"), 0);
  const auto j = Json::parse(slurp(dir / "n1.json"));
  EXPECT_EQ(j["simulation"]["mode"], "nonstationary");
  EXPECT_EQ(j["simulation"]["Y_C_Z_W_expected"][2], Json::parse(R"j(["0/1","0/1"])j"));
  // Flags override the file.
  ASSERT_EQ(run_cli("simulate --no-timestamp --seed 4 --config " + (dir / "cfg.json").string(), dir / "n2.json"), 0);
  EXPECT_EQ(Json::parse(slurp(dir / "n2.json"))["seed"], 4);
}

TEST(Cli, StatisticalFailureExitsOne) {
  const auto dir = scratch();
  // With alpha near one essentially every goodness-of-fit test rejects.
  EXPECT_EQ(run_cli("simulate --law " + kData + "/example_two_maps.json --replications 1000 --alpha 0.999",
                    dir / "f1.json"),
            1);
}

TEST(Cli, ExampleCommand) {
  const auto dir = scratch();
  ASSERT_EQ(run_cli("example --replications 2000 --k-min -300 --no-timestamp --out " + (dir / "x.json").string(),
                    dir / "x.stdout"),
            0);
  const auto j = Json::parse(slurp(dir / "x.json"));
  EXPECT_EQ(j["rees"]["e"], "[4,2,2,4,5]");
  EXPECT_EQ(j["verification_extras"]["mono_projection"]["exact_ok"], true);
  EXPECT_EQ(j["verification_extras"]["Te_tail"]["unobserved"], 0);
  EXPECT_EQ(j["verification_extras"]["Te_tail"]["witness_word"].size(), 3u);
}
