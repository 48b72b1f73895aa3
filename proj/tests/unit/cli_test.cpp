#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const fs::path kPrograms = FLOWLOG_PROGRAMS_DIR;

int flowlog(const std::string& args) {
  const std::string cmd = std::string(FLOWLOG_BINARY) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() / ("flowlog_cli_" + std::to_string(::getpid()));
    fs::create_directories(root_ / "facts");
    std::ofstream(root_ / "facts" / "edge.facts") << "1\t2\n2\t3\n3\t1\n";
    std::ofstream(root_ / "facts" / "target.facts") << "3\n";
  }
  void TearDown() override { fs::remove_all(root_); }
  std::string dir(const std::string& name) const { return (root_ / name).string(); }
  fs::path root_;
};

}  // namespace

TEST_F(Cli, RunWritesSortedOutput) {
  ASSERT_EQ(flowlog("run " + (kPrograms / "reach_even.dl").string() + " --facts " + dir("facts") + " --out " +
                    dir("out") + " --stats " + dir("stats.jsonl")),
            0);
  EXPECT_EQ(slurp(root_ / "out" / "reach.facts"), "1\n2\n3\n");
  EXPECT_NE(slurp(root_ / "stats.jsonl").find("\"type\":\"summary\""), std::string::npos);
}

TEST_F(Cli, TogglesPreserveOutput) {
  const std::string prog = (kPrograms / "reach_even.dl").string();
  ASSERT_EQ(flowlog("run " + prog + " --facts " + dir("facts") + " --out " + dir("a")), 0);
  ASSERT_EQ(flowlog("run " + prog + " --facts " + dir("facts") + " --out " + dir("b") +
                    " --no-sip --no-plan-opt --no-fusion --no-sharing --count-diffs --workers 3"),
            0);
  EXPECT_EQ(slurp(root_ / "a" / "reach.facts"), slurp(root_ / "b" / "reach.facts"));
}

TEST_F(Cli, OracleMatchesRun) {
  const std::string prog = (kPrograms / "reach_even.dl").string();
  ASSERT_EQ(flowlog("oracle " + prog + " --facts " + dir("facts") + " --out " + dir("o")), 0);
  ASSERT_EQ(flowlog("run " + prog + " --facts " + dir("facts") + " --out " + dir("r")), 0);
  EXPECT_EQ(slurp(root_ / "o" / "reach.facts"), slurp(root_ / "r" / "reach.facts"));
}

TEST_F(Cli, ExplainDoesNotEvaluate) {
  EXPECT_EQ(flowlog("run " + (kPrograms / "reach_even.dl").string() + " --explain --facts " + dir("facts") +
                    " --out " + dir("x")),
            0);
  EXPECT_FALSE(fs::exists(root_ / "x"));
}

TEST_F(Cli, ErrorExitCodes) {
  std::ofstream(root_ / "bad.dl") << ".decl p(x:number)\n.decl e(x:number)\n.decl q(x:number)\n"
                                     "p(x) :- q(x).\nq(x) :- !p(x), e(x).\n";
  EXPECT_EQ(flowlog("run " + dir("bad.dl") + " --out " + dir("o")), 8);
  std::ofstream(root_ / "syntax.dl") << ".decl p(x:number)\np(x) :- \n";
  EXPECT_EQ(flowlog("run " + dir("syntax.dl") + " --out " + dir("o")), 3);
  // target.facts is required, edge.facts present but malformed.
  std::ofstream(root_ / "facts" / "edge.facts") << "1\t2\t3\n";
  EXPECT_EQ(flowlog("run " + (kPrograms / "reach_even.dl").string() + " --facts " + dir("facts") + " --out " +
                    dir("o")),
            15);
  EXPECT_EQ(flowlog("run " + (kPrograms / "reach_even.dl").string() + " --facts " + dir("missing") + " --out " +
                    dir("o")),
            16);
  EXPECT_EQ(flowlog("run " + (kPrograms / "reach_even.dl").string() + " --workers 0"), 2);
}

TEST_F(Cli, GenIsDeterministic) {
  ASSERT_EQ(flowlog("gen --nodes 40 --prob 0.1 --seed 9 --out " + dir("g1")), 0);
  ASSERT_EQ(flowlog("gen --nodes 40 --prob 0.1 --seed 9 --out " + dir("g2")), 0);
  EXPECT_EQ(slurp(root_ / "g1"), slurp(root_ / "g2"));
  EXPECT_FALSE(slurp(root_ / "g1").empty());
}
