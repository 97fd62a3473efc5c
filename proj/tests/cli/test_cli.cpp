#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

const fs::path& work_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::current_path() / "cli_work";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

Result run_cli(const std::string& args, const std::string& env = "") {
  const fs::path out = work_dir() / "stdout.txt", err = work_dir() / "stderr.txt";
  const std::string cmd = (env.empty() ? "" : env + " ") + "'" + SSAL_CLI_PATH + "' " + args + " >'" +
                          out.string() + "' 2>'" + err.string() + "'";
  const int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

// Small enough that a full ssvaal run takes a second or two.
const fs::path& small_config() {
  static const fs::path path = [] {
    const fs::path p = work_dir() / "small.conf";
    std::ofstream(p) << "dataset = moons\nn = 240\nnoise = 0.15\n"
                        "initial_labeled = 10\nbudget = 10\ncycles = 3\n"
                        "hidden_widths = 16,16\nsupervised_epochs = 10\nsemi_epochs = 4\n"
                        "adversarial_epochs = 2\nvae_hidden = 16\ndisc_hidden = 16\n"
                        "sorter_length = 4\nsorter_hidden = 8\nsorter_epochs = 2\n"
                        "sorter_vectors_per_epoch = 64\nsorter_heldout = 32\n";
    return p;
  }();
  return path;
}

const fs::path& sorter_path() {
  static const fs::path path = [] {
    const fs::path p = work_dir() / "sorter.ckpt";
    const Result r = run_cli("pretrain-sorter --config '" + small_config().string() + "' --out '" + p.string() +
                             "' --seed 3");
    REQUIRE(r.code == 0);
    return p;
  }();
  return path;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("help and usage errors") {
  CHECK(run_cli("--help").code == 0);
  for (const char* sub : {"run", "pretrain-sorter", "eval", "compare"}) {
    INFO(sub);
    CHECK(run_cli(std::string(sub) + " --help").code == 0);
  }
  CHECK(run_cli("").code == 2);
  CHECK(run_cli("frobnicate").code == 2);
  CHECK(run_cli("pretrain-sorter --config " + q(small_config()) + " --seed 1").code == 2);
  CHECK(run_cli("run --config " + q(small_config()) + " --seed 1 --strategy random").code == 2);
  CHECK(run_cli("run --config /nonexistent.conf --seed 1 --out-dir x").code == 2);
}

TEST_CASE("pretrain-sorter writes a deterministic checkpoint") {
  const fs::path a = work_dir() / "pa.ckpt", b = work_dir() / "pb.ckpt";
  const Result ra = run_cli("pretrain-sorter --config " + q(small_config()) + " --out " + q(a) + " --seed 5");
  const Result rb = run_cli("pretrain-sorter --config " + q(small_config()) + " --out " + q(b) + " --seed 5");
  REQUIRE(ra.code == 0);
  REQUIRE(rb.code == 0);
  CHECK(ra.out.rfind("heldout_spearman=", 0) == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK_FALSE(slurp(a).empty());
}

TEST_CASE("run without a needed sorter names the dependency") {
  const Result r = run_cli("run --config " + q(small_config()) + " --strategy ssvaal --seed 0 --out-dir " +
                           q(work_dir() / "nosorter"));
  CHECK(r.code == 2);
  CHECK(r.err.find("sorter") != std::string::npos);
  CHECK_FALSE(fs::exists(work_dir() / "nosorter" / "metrics.csv"));
}

TEST_CASE("random runs without any sorter") {
  const fs::path dir = work_dir() / "random";
  const Result r = run_cli("run --config " + q(small_config()) + " --strategy random --seed 2 --out-dir " + q(dir));
  REQUIRE(r.code == 0);
  CHECK(fs::exists(dir / "metrics.csv"));
  CHECK(fs::exists(dir / "model.ckpt"));
  const double acc = std::stod(r.out);
  CHECK(acc >= 0.0);
  CHECK(acc <= 1.0);
}

TEST_CASE("identical runs are byte identical and eval reproduces the final accuracy") {
  const fs::path a = work_dir() / "det_a", b = work_dir() / "det_b";
  const std::string common =
      "run --config " + q(small_config()) + " --strategy ssvaal --seed 4 --sorter " + q(sorter_path());
  const Result ra = run_cli(common + " --out-dir " + q(a));
  const Result rb = run_cli(common + " --out-dir " + q(b));
  REQUIRE(ra.code == 0);
  REQUIRE(rb.code == 0);
  CHECK(slurp(a / "metrics.csv") == slurp(b / "metrics.csv"));
  CHECK(slurp(a / "model.ckpt") == slurp(b / "model.ckpt"));
  CHECK(ra.out == rb.out);

  const auto rows = read_csv(a / "metrics.csv");
  REQUIRE(rows.size() == 4);
  const std::string final_acc = rows.back()[2];
  const Result ev = run_cli("eval --checkpoint " + q(a / "model.ckpt") + " --dataset " + q(small_config()) +
                            " --seed 4");
  REQUIRE(ev.code == 0);
  CHECK(ev.out == final_acc + "\n");
  CHECK(ra.out == final_acc + "\n");
}

TEST_CASE("eval rejects an incompatible dataset") {
  const fs::path dir = work_dir() / "random";
  if (!fs::exists(dir / "model.ckpt")) {
    REQUIRE(run_cli("run --config " + q(small_config()) + " --strategy random --seed 2 --out-dir " + q(dir)).code == 0);
  }
  const fs::path other = work_dir() / "blobs.conf";
  std::ofstream(other) << "dataset = blobs\nn = 200\nclasses = 3\nhidden_widths = 16,16\n";
  const Result r = run_cli("eval --checkpoint " + q(dir / "model.ckpt") + " --dataset " + q(other));
  CHECK(r.code != 0);
  CHECK(r.err.find("expected") != std::string::npos);
}

TEST_CASE("output directory from the environment") {
  const fs::path dir = work_dir() / "from_env";
  const Result r = run_cli("run --config " + q(small_config()) + " --strategy random --seed 1",
                           "SSAL_OUTPUT_DIR=" + q(dir));
  CHECK(r.code == 0);
  CHECK(fs::exists(dir / "metrics.csv"));
}

TEST_CASE("compare runs every pair and summarizes them") {
  const fs::path out = work_dir() / "cmp";
  const Result r = run_cli("compare --config " + q(small_config()) + " --strategies ssvaal,random --seeds 0-2 --jobs 2" +
                           " --sorter " + q(sorter_path()) + " --out " + q(out));
  REQUIRE(r.code == 0);
  std::size_t runs = 0;
  for (const auto& e : fs::directory_iterator(out / "runs")) runs += fs::exists(e.path() / "metrics.csv");
  CHECK(runs == 6);

  const auto summary = read_csv(out / "summary.csv");
  REQUIRE(summary.size() == 1 + 2 * 3);
  CHECK(summary[0] == std::vector<std::string>{"strategy", "cycle", "labeled_count", "runs", "mean_accuracy",
                                               "std_accuracy"});
  for (std::size_t i = 1; i < summary.size(); ++i) {
    const std::string& strategy = summary[i][0];
    const std::size_t cycle = std::stoul(summary[i][1]);
    double sum = 0.0;
    for (int seed = 0; seed < 3; ++seed) {
      const auto rows = read_csv(out / "runs" / (strategy + "_seed" + std::to_string(seed)) / "metrics.csv");
      sum += std::stod(rows[cycle][2]);
    }
    CHECK(std::stod(summary[i][4]) == doctest::Approx(sum / 3.0).epsilon(1e-12));
    CHECK(summary[i][3] == "3");
  }
  const auto paired = read_csv(out / "paired.csv");
  CHECK(paired.size() == 1 + 3 * 3);
  CHECK(r.out == slurp(out / "summary.csv"));

  // Parallel and serial execution give the same files.
  const fs::path serial = work_dir() / "cmp_serial";
  REQUIRE(run_cli("compare --config " + q(small_config()) + " --strategies ssvaal,random --seeds 0-2 --jobs 1" +
                  " --sorter " + q(sorter_path()) + " --out " + q(serial))
              .code == 0);
  CHECK(slurp(serial / "summary.csv") == slurp(out / "summary.csv"));
  CHECK(slurp(serial / "paired.csv") == slurp(out / "paired.csv"));
}

TEST_CASE("compare validates its lists before running") {
  const fs::path out = work_dir() / "cmp_bad";
  CHECK(run_cli("compare --config " + q(small_config()) + " --strategies random --seeds 0-2 --out " + q(out)).code == 2);
  CHECK(run_cli("compare --config " + q(small_config()) + " --strategies random,entropy --seeds 3 --out " + q(out)).code ==
        2);
  const Result bad = run_cli("compare --config " + q(small_config()) + " --strategies random,bogus --seeds 0,1 --out " +
                             q(out));
  CHECK(bad.code == 2);
  CHECK(bad.err.find("bogus") != std::string::npos);
  CHECK_FALSE(fs::exists(out / "runs"));
}
