#include <fstream>
#include <sstream>

#include "doctest.h"
#include "genbench/cli.hpp"
#include "support.hpp"

using namespace genbench;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = GENBENCH_FIXTURES;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct Blobs {
  gbtest::TempDir dir;
  std::vector<std::string> external, test;
  std::string text;

  explicit Blobs(int datasets = 1) {
    for (int d = 0; d < datasets; ++d) {
      const auto e = dir / ("ext" + std::to_string(d) + ".gbe");
      const auto t = dir / ("test" + std::to_string(d) + ".gbe");
      save_embedding_set(gbtest::blob_set(10 + d, 30, 16, 3, 0.15, SourceKind::generative), e);
      save_embedding_set(gbtest::blob_set(100 + d, 40, 16, 3, 0.15, SourceKind::test), t);
      external.push_back(e.string());
      test.push_back(t.string());
    }
    // text rows: the first sample of each class
    const auto proto = gbtest::blob_set(7, 1, 16, 3, 0.15, SourceKind::text);
    text = (dir / "text.gbe").string();
    save_embedding_set(proto, text);
  }
};

}  // namespace

TEST_CASE("cost subcommand prints the headline figure") {
  const auto r = run_cli({"cost", "--kind", "generative", "--shots", "500", "--categories", "1638"});
  CHECK(r.code == 0);
  CHECK(r.out == "208.03\n");
  const auto group = run_cli({"cost", "--kind", "original", "--shots", "500", "--group", "common", "--manifests",
                              (kFixtures / "manifests").string()});
  CHECK(group.out == "9828.00\n");
  const auto curve = run_cli({"cost", "--kind", "generative", "--shots", "100", "--shots", "500", "--categories",
                              "1638", "--format", "csv"});
  CHECK(curve.out == "shots,usd\n100,41.61\n500,208.03\n");
  CHECK(run_cli({"cost", "--kind", "text", "--shots", "1", "--categories", "1"}).code == 1);
}

TEST_CASE("prompts subcommand emits the defined template") {
  const auto r = run_cli({"prompts", "--manifest", (kFixtures / "manifests" / "oxford-pets.json").string(),
                          "--category", "British Shorthair", "--strategy", "dt", "-n", "1"});
  CHECK(r.code == 0);
  CHECK(r.out.find("\"positive\":\"a photo of a British Shorthair, a type of pet.\"") != std::string::npos);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 1);

  const auto ce = run_cli({"prompts", "--manifest", (kFixtures / "manifests" / "cifar-10.json").string(),
                           "--category", "airplane", "--strategy", "ce", "-n", "1"});
  CHECK(ce.code == 1);
  CHECK(ce.err.find("--ce") != std::string::npos);

  std::vector<std::string> args = {"prompts", "--manifest", (kFixtures / "manifests" / "cifar-10.json").string(),
                                   "--strategy", "dt+np+rd", "-n", "12", "--seed", "5"};
  CHECK(run_cli(args).out == run_cli(args).out);
  CHECK(run_cli(args).out.size() > 0);
}

TEST_CASE("every subcommand answers --help with exit 0") {
  CHECK(run_cli({"--help"}).code == 0);
  for (const char* sub : {"cler", "probe", "fid", "clipscore", "mts", "retrieve", "prompts", "cost", "report",
                          "correlate", "timings"}) {
    const auto r = run_cli({sub, "--help"});
    CHECK_MESSAGE(r.code == 0, sub);
    CHECK(r.out.find("Usage") != std::string::npos);
  }
}

TEST_CASE("usage and input errors exit 1") {
  CHECK(run_cli({}).code == 1);
  CHECK(run_cli({"bogus"}).code == 1);
  CHECK(run_cli({"cler", "--external", "/nonexistent.gbe", "--test", "/nonexistent.gbe"}).code == 1);
  CHECK(run_cli({"cost", "--kind", "generative"}).code == 1);
  gbtest::TempDir dir;
  {
    std::ofstream junk(dir / "junk.gbe");
    junk << "not a gbe file";
  }
  const auto bad = run_cli({"fid", "--a", (dir / "junk.gbe").string(), "--b", (dir / "junk.gbe").string()});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("magic") != std::string::npos);
}

TEST_CASE("numerical failures exit 2") {
  gbtest::TempDir dir;
  EmbeddingSet set;
  set.vectors = Matrix<float>(2, 2, {0.0f, 0.0f, 1.0f, 1.0f});
  set.labels = {0, 0};
  set.class_names = {"a"};
  set.normalized = false;
  save_embedding_set(set, dir / "zero.gbe");
  const auto r = run_cli({"cler", "--external", (dir / "zero.gbe").string(), "--test", (dir / "zero.gbe").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("row 0") != std::string::npos);
}

TEST_CASE("cler, probe and fid on separable blobs") {
  Blobs blobs;
  const auto cler = run_cli({"cler", "--external", blobs.external[0], "--test", blobs.test[0], "--text", blobs.text,
                             "--ensemble"});
  REQUIRE(cler.code == 0);
  CHECK(cler.out.starts_with("cler\t1.000000\n"));
  CHECK(cler.out.find("zero_shot\t") != std::string::npos);
  CHECK(cler.out.find("delta\t") != std::string::npos);
  CHECK(cler.out.find("ensemble\t") != std::string::npos);

  const auto probe = run_cli({"probe", "--train", blobs.external[0], "--test", blobs.test[0]});
  REQUIRE(probe.code == 0);
  CHECK(probe.out.starts_with("probe_accuracy\t1.000000\n"));

  const auto fid = run_cli({"fid", "--a", blobs.external[0], "--b", blobs.external[0]});
  REQUIRE(fid.code == 0);
  CHECK(fid.out == "fid\t0.000000\n");

  const auto clip = run_cli({"clipscore", "--images", blobs.test[0], "--text", blobs.text});
  CHECK(clip.code == 0);
  CHECK(clip.out.starts_with("clip_score\t0."));

  CHECK(run_cli({"cler", "--external", blobs.external[0], "--test", blobs.test[0], "--ensemble"}).code == 1);
}

TEST_CASE("threads fan out across datasets and merge in input order") {
  Blobs blobs(4);
  std::vector<std::string> args = {"cler", "--format", "csv"};
  for (int d = 0; d < 4; ++d) {
    args.insert(args.end(), {"--external", blobs.external[d], "--test", blobs.test[d]});
  }
  const auto serial = run_cli(args);
  args.insert(args.end(), {"--threads", "4"});
  const auto parallel = run_cli(args);
  REQUIRE(serial.code == 0);
  CHECK(serial.out == parallel.out);
  CHECK(std::count(serial.out.begin(), serial.out.end(), '\n') == 5);
  CHECK(serial.out.find("test0,external,none,30,cler,") != std::string::npos);
}

TEST_CASE("manifest mismatch is reported before scoring") {
  Blobs blobs;
  const auto r = run_cli({"cler", "--external", blobs.external[0], "--test", blobs.test[0], "--manifest",
                          (kFixtures / "manifests" / "cifar-10.json").string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("does not match manifest") != std::string::npos);
}

TEST_CASE("report and correlate over record files") {
  const auto table = (kFixtures / "table2.csv").string();
  const auto report = run_cli({"report", "--records", table});
  REQUIRE(report.code == 0);
  CHECK(report.out.find("cler\tGLIDE\tST\t48.4772") != std::string::npos);
  const auto json = run_cli({"report", "--records", table, "--format", "json"});
  CHECK(nlohmann::json::parse(json.out)[0]["row_means"].size() == 8);

  gbtest::TempDir dir;
  {
    std::ofstream out(dir / "pairs.csv");
    out << "dataset,model,strategy,shots,metric,value,baseline,delta\n";
    for (int i = 1; i <= 6; ++i) {
      out << "d" << i << ",m,s,20,cler," << i << ",,\n";
      out << "d" << i << ",m,s,20,probe," << 2 * i + 1 << ",,\n";
    }
  }
  const auto corr = run_cli({"correlate", "--records", (dir / "pairs.csv").string(), "--x", "cler", "--y", "probe"});
  CHECK(corr.code == 0);
  CHECK(corr.out == "pearson\t1.000000\nn\t6\n");
}

TEST_CASE("retrieval subcommands") {
  gbtest::TempDir dir;
  std::mt19937_64 rng(5);
  const auto corpus = gbtest::random_set(rng, 50, 8, 1);
  save_embedding_set(corpus, dir / "corpus.gbe");
  {
    std::ofstream ids(dir / "ids.txt");
    for (int i = 0; i < 50; ++i) ids << "cap" << i << "\n";
  }
  auto queries = gbtest::random_set(rng, 2, 8, 2, true, SourceKind::text);
  save_embedding_set(queries, dir / "queries.gbe");
  const std::vector<std::string> base = {"--corpus", (dir / "corpus.gbe").string(), "--ids",
                                         (dir / "ids.txt").string(), "--queries", (dir / "queries.gbe").string()};
  auto with = [&](std::vector<std::string> head, std::vector<std::string> tail) {
    head.insert(head.end(), base.begin(), base.end());
    head.insert(head.end(), tail.begin(), tail.end());
    return head;
  };
  const auto mts = run_cli(with({"mts"}, {"-k", "5"}));
  REQUIRE(mts.code == 0);
  CHECK(mts.out.find("class_0\t") == 0);
  CHECK(mts.out.find("dataset_mts\t") != std::string::npos);

  const auto hits = run_cli(with({"retrieve"}, {"-k", "10", "-n", "3", "--category", "class_1"}));
  REQUIRE(hits.code == 0);
  CHECK(std::count(hits.out.begin(), hits.out.end(), '\n') == 3);
  CHECK(hits.out.starts_with("class_1\t1\tcap"));
  CHECK(run_cli(with({"retrieve"}, {"-k", "10", "-n", "11"})).code == 1);
  CHECK(run_cli(with({"retrieve"}, {"-k", "51"})).code == 1);
}

TEST_CASE("--out writes the file and identical runs are byte identical") {
  Blobs blobs;
  const auto out1 = (blobs.dir / "r1.csv").string();
  const auto out2 = (blobs.dir / "r2.csv").string();
  CHECK(run_cli({"cler", "--external", blobs.external[0], "--test", blobs.test[0], "--format", "csv", "--out", out1}).code == 0);
  CHECK(run_cli({"--format", "csv", "--out", out2, "cler", "--external", blobs.external[0], "--test", blobs.test[0]}).code == 0);
  CHECK(slurp(out1) == slurp(out2));
  CHECK(slurp(out1).starts_with("dataset,model,strategy"));
}

TEST_CASE("timings report one line per metric") {
  Blobs blobs;
  const auto r = run_cli({"timings", "--external", blobs.external[0], "--test", blobs.test[0], "--text", blobs.text,
                          "--runs", "2"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("cler\t") == 0);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 4);
}
