#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "meso/cli.hpp"
#include "meso/datasets.hpp"
#include "meso/report.hpp"

using namespace meso;

namespace {

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "meso_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

void write_file(const std::filesystem::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(MESO_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

cli::AnalyzeOptions small_analysis(const std::filesystem::path& path) {
  cli::AnalyzeOptions opts;
  opts.input.path = path.string();
  opts.chain.total_samples = 600;
  opts.chain.burn_in = 100;
  opts.chain.chains = 2;
  opts.chain.seed = 12;
  opts.chain.coassign = true;
  return opts;
}

}  // namespace

TEST(Datasets, KarateMatchesCanonicalHash) {
  auto g = load_dataset("karate");
  EXPECT_EQ(g.n(), 34u);
  EXPECT_EQ(g.m(), 78u);
  EXPECT_EQ(sha256_hex(to_edge_list(g)), "8ba57feda2f7c6f218352288fe38ba98c5c0e0eaac7df74bf1735f142617b415");
  EXPECT_THROW(load_dataset("football"), ConfigError);
}

TEST(Datasets, BundledFileAgreesWithEmbeddedCopy) {
  auto from_disk = parse_edge_list(read_text_file(data_directory() / "karate.txt"));
  EXPECT_EQ(from_disk, load_dataset("karate"));
}

TEST(Datasets, MissingDolphinsExplainsWhereToPutIt) {
  if (std::filesystem::exists(data_directory() / "dolphins.txt")) GTEST_SKIP() << "dolphins.txt present";
  try {
    load_dataset("dolphins");
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("dolphins.txt"), std::string::npos);
  }
}

TEST(Report, JsonIsByteIdenticalAcrossRuns) {
  auto path = scratch("report_graph.txt");
  write_file(path, "a b\nb c\nc a\nc d\nd e\ne f\nf d\n");
  auto opts = small_analysis(path);
  const auto first = report_to_json(cli::cmd_analyze(opts).report).dump(2);
  const auto second = report_to_json(cli::cmd_analyze(opts).report).dump(2);
  EXPECT_EQ(first, second);
  opts.chain.threads = 2;
  EXPECT_EQ(first, report_to_json(cli::cmd_analyze(opts).report).dump(2));
  const auto r = cli::cmd_analyze(opts).report;
  EXPECT_EQ(report_to_csv(r), report_to_csv(cli::cmd_analyze(opts).report));
}

TEST(Report, JsonSchema) {
  auto path = scratch("schema_graph.txt");
  write_file(path, "a b\nb c\nc a\nc d\n");
  auto opts = small_analysis(path);
  auto j = report_to_json(cli::cmd_analyze(opts).report);
  EXPECT_EQ(j["schema_version"], report_schema_version);
  EXPECT_EQ(j["input"]["n"], 4);
  EXPECT_EQ(j["input"]["m"], 4);
  EXPECT_EQ(j["membership"].size(), 4u);
  EXPECT_EQ(j["membership"][0]["node"], "a");
  EXPECT_EQ(j["group_size"].size(), 5u);
  EXPECT_EQ(j["coassignment"].size(), 4u);
  EXPECT_EQ(j["verdict"]["per_chain"].size(), 2u);
  EXPECT_FALSE(j.contains("timing"));
  const double total =
      j["verdict"]["assortative"].get<double>() + j["verdict"]["core_periphery"].get<double>() +
      j["verdict"]["disassortative"].get<double>();
  EXPECT_NEAR(total, 1.0, 1e-12);
  opts.timing = true;
  EXPECT_TRUE(report_to_json(cli::cmd_analyze(opts).report).contains("timing"));
}

TEST(Report, NonFiniteValuesAreRejected) {
  AnalysisReport r;
  r.verdict.p_assortative = std::nan("");
  EXPECT_THROW(report_to_json(r), NumericalError);
}

TEST(Report, CsvWriters) {
  SweepResult s;
  s.rows.push_back({0.05, 0.9, 0.01, 0.08, 0.01, 0.02, 0.005, 20});
  EXPECT_EQ(sweep_to_csv(s),
            "p12,mean_assortative,se_assortative,mean_cp,se_cp,mean_disassortative,se_disassortative,replicates\n"
            "0.05,0.9,0.01,0.08,0.01,0.02,0.005,20\n");
  EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_field("say \"x\""), "\"say \"\"x\"\"\"");
}

TEST(CliOptions, ParseGrid) {
  auto g = cli::parse_grid("0.05:0.25:0.025");
  ASSERT_EQ(g.size(), 9u);
  EXPECT_NEAR(g.back(), 0.25, 1e-12);
  EXPECT_EQ(cli::parse_grid("0.1,0.2").size(), 2u);
  EXPECT_THROW(cli::parse_grid("0.1:0.2"), ConfigError);
  EXPECT_THROW(cli::parse_grid("0.1,x"), ConfigError);
  EXPECT_THROW(cli::parse_grid("0.5,1.5"), ConfigError);
}

TEST(CliOptions, GeneratorSizes) {
  cli::GenerateOptions opts;
  opts.n = 10;
  opts.n1 = 3;
  opts.n2 = 6;
  EXPECT_THROW(cli::generator_spec(opts), ConfigError);
  opts.n2 = 7;
  EXPECT_EQ(cli::generator_spec(opts).n1, 3u);
  opts.fraction = 0.5;
  EXPECT_THROW(cli::generator_spec(opts), ConfigError);
}

TEST(CliOptions, InputSourceIsExclusive) {
  cli::InputOptions in;
  EXPECT_THROW(cli::load_input(in), ConfigError);
  in.path = "x";
  in.dataset = "karate";
  EXPECT_THROW(cli::load_input(in), ConfigError);
}

TEST(CliBinary, ExitCodes) {
  auto tri = scratch("tri.txt");
  write_file(tri, "a b\nb c\nc a\n");
  auto bad = scratch("bad.txt");
  write_file(bad, "a b\nc\n");
  auto loop = scratch("loop.txt");
  write_file(loop, "a b\nb b\n");
  auto big = scratch("big.txt");
  std::string chain;
  for (int i = 0; i < 19; ++i) chain += std::to_string(i) + " " + std::to_string(i + 1) + "\n";
  write_file(big, chain);

  EXPECT_EQ(run_cli("analyze " + tri.string() + " --samples 200 --burn-in 50"), 0);
  EXPECT_EQ(run_cli("analyze " + tri.string() + " --samples 100 --burn-in 200"), 1);
  EXPECT_EQ(run_cli("analyze " + tri.string() + " --a0 -1"), 1);
  EXPECT_EQ(run_cli("analyze " + bad.string()), 2);
  EXPECT_EQ(run_cli("analyze " + loop.string()), 2);
  EXPECT_EQ(run_cli("analyze " + scratch("missing.txt").string()), 2);
  EXPECT_EQ(run_cli("generate --p11 1.2"), 1);
  EXPECT_EQ(run_cli("oracle " + big.string()), 1);
  EXPECT_EQ(run_cli("bogus"), 1);
  EXPECT_EQ(run_cli("simulate --grid 0.1:0.2"), 1);
}

TEST(CliBinary, OracleOutput) {
  auto tri = scratch("tri_oracle.txt");
  write_file(tri, "a b\nb c\nc a\n");
  auto out = scratch("tri_oracle.json");
  ASSERT_EQ(run_cli("oracle " + tri.string() + " --out " + out.string()), 0);
  auto j = nlohmann::json::parse(slurp(out));
  const double a = j["verdict"]["assortative"], c = j["verdict"]["core_periphery"], d = j["verdict"]["disassortative"];
  EXPECT_NEAR(a + c + d, 1.0, 1e-12);
  EXPECT_NEAR(a, 23.0 / 90, 1e-10);
  EXPECT_EQ(j["diagnostics"]["label_vectors"], 8);
}

TEST(CliBinary, GenerateRoundTripsThroughAnalyze) {
  auto graph = scratch("gen.txt"), labels = scratch("gen_labels.txt"), rep1 = scratch("r1.json"),
       rep2 = scratch("r2.json");
  ASSERT_EQ(run_cli("generate --n 20 --p11 0.5 --p12 0.05 --p22 0.4 --seed 3 --out " + graph.string() + " --labels " +
                    labels.string()),
            0);
  EXPECT_EQ(parse_edge_list(slurp(graph)).n(), 20u);
  const std::string args = "analyze " + graph.string() + " --samples 400 --burn-in 100 --seed 5 --out ";
  ASSERT_EQ(run_cli(args + rep1.string()), 0);
  ASSERT_EQ(run_cli(args + rep2.string()), 0);
  EXPECT_EQ(slurp(rep1), slurp(rep2));
}
