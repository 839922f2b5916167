#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const std::string kCli = TIESTRENGTH_CLI;
const std::string kData = TIESTRENGTH_DATA;

struct Run {
  int code;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("tiestrength_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

Run run(const std::string& args) {
  const auto out = scratch() / "stdout.txt", err = scratch() / "stderr.txt";
  const std::string cmd = kCli + " " + args + " >" + out.string() + " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

std::string write_file(const std::string& name, const std::string& text) {
  const auto p = scratch() / name;
  std::ofstream(p, std::ios::binary) << text;
  return p.string();
}

const std::string kPair = kData + "/pair.jsonl";
const std::string kTriple = kData + "/triple.csv";
const std::string kMeetings = kData + "/meetings.jsonl";

}  // namespace

TEST(Cli, ComputeLinearOnPair) {
  const auto r = run("compute --input " + kPair + " --measure linear");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "person_a,person_b,score\nu,v,0.5\n");
  EXPECT_NE(r.err.find("config: subcommand=compute"), std::string::npos);
  EXPECT_NE(r.err.find("katz_gamma=2"), std::string::npos);
}

TEST(Cli, ComputeDeltaOnTriple) {
  const auto r = run("compute --input " + kTriple + " --measure delta");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "person_a,person_b,score\na,b,0.333333333\na,c,0.333333333\nb,c,0.333333333\n");
}

TEST(Cli, ComputeKatzShortWalks) {
  const auto r = run("compute --input " + kPair + " --measure katz --katz-gamma 2 --katz-max-len 2");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "person_a,person_b,score\nu,v,0.25\n");
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run("compute --input " + kPair + " --measure nope").code, 2);
  EXPECT_EQ(run("compute --input " + kPair + " --rwr-alpha 1.5 --measure rwr").code, 2);
  EXPECT_EQ(run("compute --bogus-flag").code, 2);
  EXPECT_EQ(run("compute").code, 2);
  EXPECT_EQ(run("compute --input /nonexistent.jsonl").code, 3);
  EXPECT_EQ(run("compute --input " + write_file("bad.jsonl", "{nope\n")).code, 3);
  const auto r = run("compute --input " + kMeetings + " --measure simrank --max-iterations 2");
  EXPECT_EQ(r.code, 4);
  EXPECT_NE(r.err.find("residual"), std::string::npos);
}

TEST(Cli, OrderCensusOnTriple) {
  const auto results = (scratch() / "census.csv").string();
  fs::remove(results);
  const auto r = run("order-census --input " + kTriple + " --results " + results + " --dataset-label triple");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "3 pairs, 0 incomparable (0.00%)\n");
  EXPECT_EQ(slurp(results), "dataset,total,count,percentage\ntriple,3,0,0.000000\n");
}

TEST(Cli, ConflictsDeltaZeroJaccardAboveTemporal) {
  const auto delta = run("conflicts --input " + kMeetings + " --measure delta");
  ASSERT_EQ(delta.code, 0) << delta.err;
  EXPECT_NE(delta.out.find(" 0 conflicts"), std::string::npos);
  auto count = [](const std::string& out) {
    const auto comma = out.find(", ");
    return std::stoull(out.substr(comma + 2));
  };
  const auto jac = run("conflicts --input " + kMeetings + " --measure jaccard");
  const auto tmp = run("conflicts --input " + kMeetings + " --measure temporal");
  ASSERT_EQ(jac.code, 0);
  ASSERT_EQ(tmp.code, 0);
  EXPECT_GT(count(jac.out), 0u);
  EXPECT_GT(count(jac.out), count(tmp.out));
}

TEST(Cli, TauOfDuplicateMeasure) {
  const auto r = run("tau --input " + kData + "/figure.csv --measures delta,delta");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out,
            "# kendall tau-b; keys=ties; missing scores read as 0\n"
            "measure,delta,delta\ndelta,1.000000,1.000000\ndelta,1.000000,1.000000\n");
  // A constant ranking has no defined correlation and reads as 0.
  const auto flat = run("tau --input " + kTriple + " --measures delta,delta");
  EXPECT_NE(flat.out.find("delta,1.000000,0.000000"), std::string::npos);
}

TEST(Cli, Histogram) {
  const auto in = write_file("h.csv", "e1,a\ne1,b\ne2,c\ne2,d\ne3,a\ne3,b\ne3,c\ne3,d\ne3,e\n");
  const auto r = run("histogram --input " + in);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "size,count\n2,2\n5,1\n");
}

TEST(Cli, DotUniformScores) {
  const auto r = run("dot --input " + kTriple + " --measure delta --width-scale 3");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out,
            "graph tiestrength {\n  \"a\" -- \"b\" [penwidth=3];\n  \"a\" -- \"c\" [penwidth=3];\n"
            "  \"b\" -- \"c\" [penwidth=3];\n}\n");
}

TEST(Cli, AxiomsDeltaAllPass) {
  const auto out = (scratch() / "axioms.json").string();
  const auto r = run("axioms --measure delta --trials 1000 --seed 7 --out " + out);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("delta,pass,pass,pass,pass,pass,pass,pass,pass,pass,pass"), std::string::npos) << r.out;
  EXPECT_EQ(r.out.find("discrepancy"), std::string::npos);
}

TEST(Cli, AxiomsJaccardViolatesAndIsDeterministic) {
  const auto a = (scratch() / "j1.json").string(), b = (scratch() / "j2.json").string();
  const auto r1 = run("axioms --measure jaccard --trials 300 --out " + a);
  const auto r2 = run("axioms --measure jaccard --trials 300 --out " + b);
  ASSERT_EQ(r1.code, 0) << r1.err;
  EXPECT_NE(slurp(a).find("\"violated\""), std::string::npos);
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_EQ(r1.out, r2.out);
}

TEST(Cli, AxiomsOnInputGraph) {
  const auto r = run("axioms --input " + kTriple + " --measure common --trials 50");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("\"trials\": 50"), std::string::npos);
}

TEST(Cli, Linext) {
  const auto r = run("linext --input " + kMeetings);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("profile,value\n", 0), 0u);
  EXPECT_NE(r.err.find(" 0 violations"), std::string::npos);
}
