// End-to-end checks of the pwe executable: exit codes, emitted files, and
// rerun determinism. The binary path and bundled scenario come in through
// compile definitions.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <json.hpp>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "pwe/configurators.hpp"
#include "pwe/layered_net.hpp"
#include "pwe/scenario_io.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kBin = PWE_BIN_PATH;
const std::string kScenario = PWE_SCENARIO_PATH;

fs::path work_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("pwe_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run(const std::string& args, const fs::path& log) {
  const std::string cmd = kBin + " " + args + " > " + log.string() + " 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("validate accepts the bundled scenario") {
  const fs::path dir = work_dir("validate_ok");
  const fs::path log = dir / "out.txt";
  CHECK(run("validate " + kScenario, log) == 0);
  const std::string text = slurp(log);
  CHECK(text.find("scenario: ok") != std::string::npos);
  CHECK(text.find("network: ok") != std::string::npos);
}

TEST_CASE("validate fails cleanly on a missing file") {
  const fs::path dir = work_dir("validate_missing");
  const fs::path log = dir / "out.txt";
  CHECK(run("validate " + (dir / "nope.json").string(), log) == 1);
  CHECK(slurp(log).find("error:") != std::string::npos);
}

TEST_CASE("validate lists problems of an unusable scenario") {
  const fs::path dir = work_dir("validate_bad");
  nlohmann::json doc;
  {
    std::ifstream in(kScenario);
    REQUIRE(in.good());
    doc = nlohmann::json::parse(in);
  }
  doc["physics"]["ray_count"] = 0;
  const fs::path bad = dir / "bad.json";
  std::ofstream(bad) << doc.dump(2);

  const fs::path log = dir / "out.txt";
  CHECK(run("validate " + bad.string(), log) == 1);
  CHECK(slurp(log).find("problem") != std::string::npos);
}

TEST_CASE("train writes its three artifacts and reports convergence") {
  const fs::path dir = work_dir("train");
  const fs::path log = dir / "out.txt";
  const int code =
      run("train " + kScenario + " --out " + (dir / "run").string() + " --seed 1", log);
  CHECK(code == 0);

  CHECK(fs::exists(dir / "run" / "training_curve.csv"));
  CHECK(fs::exists(dir / "run" / "omegas.json"));
  CHECK(fs::exists(dir / "run" / "network.svg"));

  std::ifstream in(dir / "run" / "omegas.json");
  const nlohmann::json doc = nlohmann::json::parse(in);
  CHECK(doc.at("converged") == true);
  CHECK(doc.at("omega").size() == 15);
  CHECK(slurp(log).find("converged") != std::string::npos);
}

TEST_CASE("train is byte-identical across reruns of the same seed") {
  const fs::path dir = work_dir("train_repeat");
  const std::string a = (dir / "a").string();
  const std::string b = (dir / "b").string();
  REQUIRE(run("train " + kScenario + " --out " + a + " --seed 1", dir / "a.txt") == 0);
  REQUIRE(run("train " + kScenario + " --out " + b + " --seed 1", dir / "b.txt") == 0);

  for (const std::string name : {"training_curve.csv", "omegas.json", "network.svg"}) {
    CHECK(slurp(fs::path(a) / name) == slurp(fs::path(b) / name));
  }
}

TEST_CASE("trace consumes a config file and writes the trace artifacts") {
  const fs::path dir = work_dir("trace");
  const pwe::Scenario s = pwe::load_scenario(kScenario);
  const pwe::LayeredNet net = pwe::build_layered_net(s);
  const fs::path config = dir / "kp.json";
  pwe::write_config_json(pwe::kp_config(s, net), config.string());

  const fs::path log = dir / "out.txt";
  const int code = run("trace " + kScenario + " --config " + config.string() +
                           " --out " + (dir / "run").string(),
                       log);
  CHECK(code == 0);
  CHECK(fs::exists(dir / "run" / "segments.csv"));
  CHECK(fs::exists(dir / "run" / "trace.svg"));
  CHECK(fs::exists(dir / "run" / "trace.json"));

  std::ifstream in(dir / "run" / "trace.json");
  const nlohmann::json doc = nlohmann::json::parse(in);
  CHECK(doc.is_object());
  CHECK_FALSE(doc.empty());
}

TEST_CASE("compare runs all three schemes and writes the report set") {
  const fs::path dir = work_dir("compare");
  const fs::path log = dir / "out.txt";
  const int code = run("compare " + kScenario + " --out " + (dir / "run").string(), log);
  CHECK(code == 0);

  CHECK(fs::exists(dir / "run" / "comparison.txt"));
  for (const std::string name : {"regular.svg", "kpconfig.svg", "nnconfig.svg"}) {
    CHECK(fs::exists(dir / "run" / name));
  }

  const std::string csv = slurp(dir / "run" / "comparison.csv");
  std::istringstream lines(csv);
  std::string line;
  REQUIRE(std::getline(lines, line));
  CHECK(line == "scheme,received_dbm,active_tiles_per_layer,cycles,rmse_final,status");
  int rows = 0;
  bool saw_regular = false, saw_kp = false, saw_nn = false;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    ++rows;
    saw_regular = saw_regular || line.rfind("regular,", 0) == 0;
    saw_kp = saw_kp || line.rfind("kpconfig,", 0) == 0;
    saw_nn = saw_nn || line.rfind("nnconfig,", 0) == 0;
  }
  CHECK(rows == 3);
  CHECK(saw_regular);
  CHECK(saw_kp);
  CHECK(saw_nn);
}

TEST_CASE("bad invocations exit nonzero") {
  const fs::path dir = work_dir("badargs");
  CHECK(run("bogus", dir / "a.txt") != 0);
  CHECK(run("train " + kScenario, dir / "b.txt") != 0);  // missing --out
  CHECK(run("", dir / "c.txt") != 0);
}
