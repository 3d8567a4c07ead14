#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

const fs::path kScratch = BMD_SCRATCH_DIR;

struct Result {
  int code;
  std::string out, err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Result bmd(const std::string& args) {
  fs::create_directories(kScratch);
  const auto out = kScratch / "stdout.txt", err = kScratch / "stderr.txt";
  const std::string cmd = std::string("\"") + BMD_BINARY + "\" " + args + " >\"" + out.string() + "\" 2>\"" +
                          err.string() + "\"";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

fs::path write(const std::string& name, const std::string& text) {
  fs::create_directories(kScratch);
  const auto p = kScratch / name;
  std::ofstream(p, std::ios::binary) << text;
  return p;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  for (std::string f; std::getline(in, f, ',');) out.push_back(f);
  return out;
}

// Drops the wall_ms column.
std::string without_wall_time(const std::string& csv) {
  std::string out;
  for (const auto& l : lines(csv)) out += l.substr(0, l.rfind(',')) + "\n";
  return out;
}

std::string quadratic_config(const std::string& extra_run = "", const std::string& tail = "", int reps = 1) {
  return R"({
  "schema_version": 1,
  "game": {
    "kind": "quadratic",
    "dims": [1, 1],
    "matrix": [[2, 0.5], [0.5, 2]],
    "linear": [-1, 1],
    "sets": [{"lower": [-1], "upper": [1]}, {"lower": [-1], "upper": [1]}],
    "balls": [{"center": [0], "radius": 0.9}, {"center": [0], "radius": 0.9}]
  },
  "delays": {"kind": "heterogeneous", "mode": "uniform", "c": 0, "alpha_d": 0, "d_bar": 5},
  "run": {"horizon": 10000, "stride": 1000, "replications": )" + std::to_string(reps) + R"(, "seed": 3)" +
         extra_run + R"(},
  "output": {"trace": "q.csv", "oracle": "q.oracle.json"})" +
         tail + "\n}\n";
}

const std::string kHeader = "run_id,iteration,rel_dist,potential_gap,ghat_norm,starved_players,wall_ms";

}  // namespace

TEST_CASE("run without an oracle file: exact header, row count, nan columns") {
  fs::remove_all(kScratch);
  const auto cfg = write("q.json", quadratic_config());
  const auto r = bmd("run --config \"" + cfg.string() + "\"");
  REQUIRE(r.code == 0);
  CHECK(r.err.find("warning: oracle file") != std::string::npos);
  const auto csv = slurp(kScratch / "q.csv");
  CHECK(csv.rfind(kHeader + "\n", 0) == 0);
  const auto rows = lines(csv);
  REQUIRE(rows.size() == 11);
  for (std::size_t j = 1; j < rows.size(); ++j) {
    const auto f = split(rows[j]);
    REQUIRE(f.size() == 7);
    CHECK(f[0] == "0");
    CHECK(f[1] == std::to_string(1000 * j));
    CHECK(f[2] == "nan");
    CHECK(f[3] == "nan");
    CHECK(f[4] != "nan");
  }
  const auto stats = slurp(kScratch / "q.csv.stats.json");
  CHECK(stats.find("\"starvation_count\"") != std::string::npos);
  CHECK(stats.find("\"max_lag\"") != std::string::npos);
  CHECK(stats.find("\"leftover_cache\"") != std::string::npos);
}

TEST_CASE("oracle then run: deterministic bytes and finite distances") {
  fs::remove_all(kScratch);
  const auto cfg = write("q.json", quadratic_config("", "", 2));
  auto r = bmd("oracle --config \"" + cfg.string() + "\"");
  REQUIRE(r.code == 0);
  const auto first = slurp(kScratch / "q.oracle.json");
  REQUIRE(bmd("oracle --config \"" + cfg.string() + "\"").code == 0);
  CHECK(slurp(kScratch / "q.oracle.json") == first);
  CHECK(first.find("\"vi_residual\"") != std::string::npos);
  CHECK(first.find("\"potential\": null") != std::string::npos);

  r = bmd("run --config \"" + cfg.string() + "\" --out \"" + (kScratch / "a.csv").string() + "\"");
  REQUIRE(r.code == 0);
  CHECK(r.err.find("no potential") != std::string::npos);
  REQUIRE(bmd("run --config \"" + cfg.string() + "\" --out \"" + (kScratch / "b.csv").string() + "\"").code == 0);
  const auto a = slurp(kScratch / "a.csv"), b = slurp(kScratch / "b.csv");
  CHECK(without_wall_time(a) == without_wall_time(b));
  const auto rows = lines(a);
  REQUIRE(rows.size() == 21);
  CHECK(split(rows[11])[0] == "1");
  CHECK(split(rows[1])[2] != "nan");
  CHECK(std::stod(split(rows[10])[2]) < std::stod(split(rows[1])[2]) + 1.0);

  REQUIRE(bmd("run --config \"" + cfg.string() + "\" --seed 99 --out \"" + (kScratch / "c.csv").string() + "\"")
              .code == 0);
  CHECK(without_wall_time(slurp(kScratch / "c.csv")) != without_wall_time(a));
  REQUIRE(bmd("run --config \"" + cfg.string() + "\" --estimator single_point --out \"" +
              (kScratch / "d.csv").string() + "\"")
              .code == 0);
  CHECK(without_wall_time(slurp(kScratch / "d.csv")) != without_wall_time(a));
}

TEST_CASE("exit codes") {
  fs::remove_all(kScratch);
  const auto malformed = write("bad.json", "{\n  \"schema_version\": 1,\n  \"game\": [\n");
  auto r = bmd("validate --config \"" + malformed.string() + "\"");
  CHECK(r.code == 2);
  CHECK(r.err.find("line") != std::string::npos);
  CHECK(r.err.find("column") != std::string::npos);

  const auto unknown = write("unknown.json", quadratic_config(R"(, "horizn": 5)"));
  r = bmd("run --config \"" + unknown.string() + "\"");
  CHECK(r.code == 2);
  CHECK(r.err.find("horizn") != std::string::npos);

  CHECK(bmd("run --config \"" + (kScratch / "missing.json").string() + "\"").code == 2);
  CHECK(bmd("run").code == 2);
  CHECK(bmd("frobnicate --config x").code == 2);
  CHECK(bmd("run --config \"" + write("e.json", quadratic_config()).string() + "\" --estimator two_point").code == 2);

  const auto slow = write("slow.json", quadratic_config("", R"(, "oracle": {"max_iter": 1})"));
  r = bmd("oracle --config \"" + slow.string() + "\"");
  CHECK(r.code == 3);
  CHECK(r.err.find("residual") != std::string::npos);

  CHECK(bmd("--help").code == 0);
}

TEST_CASE("validate: advisory by default, failing in strict mode") {
  fs::remove_all(kScratch);
  const auto good = write("good.json", quadratic_config());
  auto r = bmd("validate --config \"" + good.string() + "\" --strict");
  CHECK(r.code == 0);
  CHECK(r.out.find("FAIL") == std::string::npos);

  std::string bad_text = quadratic_config();
  bad_text.insert(bad_text.find("\"run\""), "\"schedules\": {\"alpha_gamma\": 0.4, \"alpha_delta\": 0.2},\n  ");
  const auto bad = write("badsched.json", bad_text);
  r = bmd("validate --config \"" + bad.string() + "\"");
  CHECK(r.code == 0);
  CHECK(r.out.find("FAIL alpha_gamma_range") != std::string::npos);
  CHECK(bmd("validate --config \"" + bad.string() + "\" --strict").code == 2);
  CHECK(bmd("run --config \"" + bad.string() + "\" --strict").code == 2);

  std::string baseline_text = quadratic_config();
  baseline_text.insert(baseline_text.find("\"run\""), "\"schedules\": {\"alpha_delta\": 0.35},\n  ");
  r = bmd("validate --config \"" + write("baseline.json", baseline_text).string() + "\" --strict");
  CHECK(r.code == 0);
  CHECK(r.out.find("note: alpha_delta = 0.34999999999999998") != std::string::npos);
}

TEST_CASE("sweep writes one file per scenario; an empty list writes nothing") {
  fs::remove_all(kScratch);
  const auto empty = write("empty.json", quadratic_config("", R"(, "scenarios": [])"));
  auto r = bmd("sweep --config \"" + empty.string() + "\" --out \"" + (kScratch / "sweep_empty").string() + "\"");
  CHECK(r.code == 0);
  CHECK_FALSE(fs::exists(kScratch / "sweep_empty"));

  const auto two = write("two.json", quadratic_config("", R"(, "scenarios": [
    {"name": "slow", "delays": {"d_bar": 50}},
    {"name": "instant", "delays": {"d_bar": 0}}])"));
  r = bmd("sweep --config \"" + two.string() + "\" --out \"" + (kScratch / "sweep").string() + "\"");
  REQUIRE(r.code == 0);
  for (const char* name : {"slow", "instant"}) {
    const auto csv = slurp(kScratch / "sweep" / (std::string(name) + ".csv"));
    CHECK(lines(csv).size() == 11);
    CHECK(lines(csv)[0] == kHeader);
    CHECK(fs::exists(kScratch / "sweep" / (std::string(name) + ".csv.stats.json")));
  }
  CHECK(bmd("sweep --config \"" + write("none.json", quadratic_config()).string() + "\" --out x").code == 2);
}

TEST_CASE("shipped configurations validate") {
  for (const char* name : {"quadratic_small.json", "thermal_default.json", "thermal_sweep.json",
                           "baseline_comparison.json"}) {
    CAPTURE(name);
    const auto r = bmd(std::string("validate --config \"") + BMD_CONFIG_DIR + "/" + name + "\"");
    CHECK(r.code == 0);
  }
  // The 5k^0.99 scenario deliberately breaks the delay condition.
  const auto sweep = bmd(std::string("validate --config \"") + BMD_CONFIG_DIR + "/thermal_sweep.json\"");
  CHECK(sweep.out.find("FAIL delay_exponent") != std::string::npos);
}
