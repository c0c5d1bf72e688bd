// End-to-end checks of the command-line tool: exit codes, output files,
// manifest replay and job-count independence.

#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#ifndef TRENDLAB_CLI_PATH
#error "TRENDLAB_CLI_PATH must point at the built binary"
#endif

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("trendlab-cli-" + std::to_string(::getpid()) + "-" +
            std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

struct RunResult {
  int exit_code = 0;
  std::string err;
  std::string out;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

RunResult run_cli(const std::string& args, const fs::path& dir) {
  const fs::path out = dir / "stdout.txt";
  const fs::path err = dir / "stderr.txt";
  const std::string cmd = std::string(TRENDLAB_CLI_PATH) + " " + args + " >" +
                          out.string() + " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

int count_lines(const std::string& text) {
  int n = 0;
  for (char c : text) {
    if (c == '\n') ++n;
  }
  return n;
}

// Output files of a run, manifest excluded (it carries a wall-clock stamp).
std::vector<fs::path> output_files(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& item : fs::recursive_directory_iterator(dir)) {
    if (!item.is_regular_file()) continue;
    if (item.path().filename() == "manifest.json") continue;
    files.push_back(item.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

bool dirs_equal(const fs::path& a, const fs::path& b) {
  const auto fa = output_files(a);
  const auto fb = output_files(b);
  if (fa.size() != fb.size()) return false;
  for (std::size_t i = 0; i < fa.size(); ++i) {
    if (fs::relative(fa[i], a) != fs::relative(fb[i], b)) return false;
    if (slurp(fa[i]) != slurp(fb[i])) return false;
  }
  return true;
}

const char* kSmallSynth =
    "--terms 4 --samples 3 --months 24 --rate-min 50 --rate-max 500";

}  // namespace

TEST_CASE("synth writes a catalog and is reproducible from its seed") {
  TempDir dir;
  const auto a = run_cli("synth --seed 5 " + std::string(kSmallSynth) +
                             " --out-dir " + (dir.path / "a").string(),
                         dir.path);
  REQUIRE(a.exit_code == 0);
  CHECK(fs::exists(dir.path / "a" / "panel.csv"));
  CHECK(fs::exists(dir.path / "a" / "catalog" / "index.json"));
  CHECK(fs::exists(dir.path / "a" / "manifest.json"));

  const auto b = run_cli("synth --seed 5 " + std::string(kSmallSynth) +
                             " --out-dir " + (dir.path / "b").string(),
                         dir.path);
  REQUIRE(b.exit_code == 0);
  CHECK(dirs_equal(dir.path / "a", dir.path / "b"));
}

TEST_CASE("synth default config writes the full 14x20x120 panel") {
  TempDir dir;
  const auto r = run_cli("synth --seed 1 --out-dir " + (dir.path / "d").string(),
                         dir.path);
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("14 samples x 20 terms x 120 periods") != std::string::npos);
  int csv_files = 0;
  for (const auto& item :
       fs::recursive_directory_iterator(dir.path / "d" / "catalog")) {
    if (item.is_regular_file() && item.path().extension() == ".csv") ++csv_files;
  }
  CHECK(csv_files == 14 * 20);
}

TEST_CASE("synth rejects a zero sample count with a usage error") {
  TempDir dir;
  const auto r = run_cli("synth --samples 0 --out-dir " +
                             (dir.path / "x").string(),
                         dir.path);
  CHECK(r.exit_code != 0);
  CHECK(r.err.rfind("error:", 0) == 0);
  CHECK(count_lines(r.err) == 1);
}

TEST_CASE("corr emits a matrix per term and honors group averaging") {
  TempDir dir;
  REQUIRE(run_cli("synth --seed 2 --terms 2 --samples 14 --months 24 "
                  "--rate-min 50 --rate-max 500 --out-dir " +
                      (dir.path / "s").string(),
                  dir.path)
              .exit_code == 0);
  const std::string catalog = (dir.path / "s" / "catalog").string();

  const auto r = run_cli("corr --catalog " + catalog +
                             " --term term-00 --out-dir " +
                             (dir.path / "c").string(),
                         dir.path);
  REQUIRE(r.exit_code == 0);
  const std::string csv = slurp(dir.path / "c" / "corr_term-00.csv");
  CHECK(count_lines(csv) == 15);  // header + 14 sample rows

  const auto g = run_cli("corr --catalog " + catalog +
                             " --term term-00 --group-size 7 --out-dir " +
                             (dir.path / "g").string(),
                         dir.path);
  REQUIRE(g.exit_code == 0);
  CHECK(count_lines(slurp(dir.path / "g" / "corr_term-00.csv")) == 3);  // 2x2
  const std::string averages = slurp(dir.path / "g" / "averages_term-00.csv");
  CHECK(averages.rfind("term,period,value\n", 0) == 0);
  CHECK(count_lines(averages) == 1 + 2 * 24);  // two 7-sample group averages

  const auto bad = run_cli("corr --catalog " + catalog +
                               " --term nope --out-dir " +
                               (dir.path / "n").string(),
                           dir.path);
  CHECK(bad.exit_code != 0);
  CHECK(bad.err.rfind("error:", 0) == 0);
}

TEST_CASE("ingest adds a parsed file and load succeeds") {
  TempDir dir;
  const fs::path file = dir.path / "export.csv";
  std::ofstream(file) << "Category: All categories\n\nMonth,gdp: (BR)\n"
                         "2009-01,10\n2009-02,100\n2009-03,50\n";
  const auto r = run_cli("ingest --catalog " + (dir.path / "cat").string() +
                             " --add " + file.string() + " --date 2020-06-01",
                         dir.path);
  REQUIRE(r.exit_code == 0);
  CHECK(fs::exists(dir.path / "cat" / "BR" / "gdp" / "2020-06-01.csv"));

  // Re-adding identical content is a reported no-op.
  const auto again = run_cli("ingest --catalog " + (dir.path / "cat").string() +
                                 " --add " + file.string() +
                                 " --date 2020-06-01",
                             dir.path);
  REQUIRE(again.exit_code == 0);
  CHECK(again.out.find("already present") != std::string::npos);
}

TEST_CASE("simulate: tiny run, setup validation, manifest replay") {
  TempDir dir;
  const std::string common =
      " --reps 1 --terms 6 --samples 4 --months 36 --rate-min 100 "
      "--rate-max 1000 --seed 3";
  const auto r = run_cli("simulate" + common + " --out-dir " +
                             (dir.path / "a").string(),
                         dir.path);
  REQUIRE(r.exit_code == 0);
  const std::string reps = slurp(dir.path / "a" / "replications.csv");
  // Every row belongs to replication 0.
  std::istringstream lines(reps);
  std::string line;
  std::getline(lines, line);  // header
  int rows = 0;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    ++rows;
    const auto first = line.find(',');
    const auto second = line.find(',', first + 1);
    CHECK(line.substr(second + 1, line.find(',', second + 1) - second - 1) ==
          "0");
  }
  CHECK(rows > 0);

  const auto bad = run_cli("simulate --setup 7 --out-dir " +
                               (dir.path / "bad").string(),
                           dir.path);
  CHECK(bad.exit_code != 0);
  CHECK(bad.err.rfind("error:", 0) == 0);

  // Replaying from the manifest reproduces every output byte.
  const auto replay = run_cli(
      "simulate --config " + (dir.path / "a" / "manifest.json").string() +
          " --out-dir " + (dir.path / "b").string(),
      dir.path);
  REQUIRE(replay.exit_code == 0);
  CHECK(dirs_equal(dir.path / "a", dir.path / "b"));
}

TEST_CASE("nowcast: single-sample pool makes proposed equal the single model") {
  TempDir dir;
  REQUIRE(run_cli("synth --seed 4 --terms 3 --samples 1 --months 36 "
                  "--rate-min 100 --rate-max 1000 --out-dir " +
                      (dir.path / "s").string(),
                  dir.path)
              .exit_code == 0);
  // Target on the same monthly grid as the synthetic catalog.
  std::string target = "period,value\n";
  int year = 2009, month = 1;
  for (int i = 0; i < 36; ++i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d,%d\n", year, month,
                  50 + (i * 13) % 40);
    target += buf;
    if (++month == 13) {
      month = 1;
      ++year;
    }
  }
  std::ofstream(dir.path / "target.csv") << target;

  const auto r = run_cli(
      "nowcast --target " + (dir.path / "target.csv").string() + " --catalog " +
          (dir.path / "s" / "catalog").string() +
          " --train 2009-01:2010-12 --eval 2011-01:2011-12 --smooth-window 3 "
          "--out-dir " +
          (dir.path / "n").string(),
      dir.path);
  REQUIRE(r.exit_code == 0);
  const std::string csv = slurp(dir.path / "n" / "report.csv");
  // proposed,worst,best,average are all the same single model.
  std::istringstream lines(csv);
  std::string header, row;
  std::getline(lines, header);
  std::getline(lines, row);
  std::vector<std::string> fields;
  std::istringstream cells(row);
  std::string cell;
  while (std::getline(cells, cell, ',')) fields.push_back(cell);
  REQUIRE(fields.size() == 5);
  CHECK(fields[1] == fields[2]);
  CHECK(fields[2] == fields[3]);
  CHECK(fields[3] == fields[4]);

  const auto overlap = run_cli(
      "nowcast --target " + (dir.path / "target.csv").string() + " --catalog " +
          (dir.path / "s" / "catalog").string() +
          " --train 2009-01:2011-06 --eval 2011-01:2011-12 --out-dir " +
          (dir.path / "o").string(),
      dir.path);
  CHECK(overlap.exit_code != 0);
  CHECK(overlap.err.rfind("error:", 0) == 0);
}

TEST_CASE("vintages: three windows by default, seeded repeat, step check") {
  TempDir dir;
  const std::string common =
      " --seed 11 --panel-months 40 --window-months 24 --rate 50";
  const auto a = run_cli("vintages" + common + " --out-dir " +
                             (dir.path / "a").string(),
                         dir.path);
  REQUIRE(a.exit_code == 0);
  const std::string csv = slurp(dir.path / "a" / "vintages.csv");
  CHECK(csv.find("vintage-0,") != std::string::npos);
  CHECK(csv.find("vintage-2,") != std::string::npos);
  CHECK(csv.find("vintage-3,") == std::string::npos);

  const auto b = run_cli("vintages" + common + " --out-dir " +
                             (dir.path / "b").string(),
                         dir.path);
  REQUIRE(b.exit_code == 0);
  CHECK(dirs_equal(dir.path / "a", dir.path / "b"));

  const auto bad = run_cli("vintages --step 0 --out-dir " +
                               (dir.path / "c").string(),
                           dir.path);
  CHECK(bad.exit_code != 0);
  CHECK(bad.err.rfind("error:", 0) == 0);
}
