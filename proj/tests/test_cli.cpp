#include <catch2/catch.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "slp/config.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kBinary = SLPSIM_BINARY;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / "slpsim_cli_test";
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

int run(const std::string& cmdline) {
  const int status = std::system(cmdline.c_str());
  if (status == -1) return -1;
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

const char* protocol_config = R"([medium]
lambda  = 0.8 um
gamma   = 1.8849555921538759e7 rad_per_s
density = 1e14 per_cm3
length  = 300 um
n_s     = 1.012
n_c     = 1.0

[drive]
profile = gaussian
a       = 100 um
point.0 = 0 s 2.1585056975999996e16 rad2_per_s2 2.1585056975999996e16 rad2_per_s2

[grid]
nz    = 2048
dt    = 3e-15 s
l_sim = 2 mm

[protocol]
delta_over_gamma = 16
l_s      = 300 um
l_sprime = 75 um
n_sprime = 1
v_g      = 0.0327022841546676 m_per_s
r_mode   = 2 um
spreading = off
)";

} // namespace

TEST_CASE("modes subcommand writes the mode table", "[cli]") {
  TempDir tmp;
  const auto out = tmp.path / "run1";
  const std::string cmd = kBinary + " modes --config preset:paper-guided-mode" +
                          " --out " + out.string() + " 2>/dev/null";
  REQUIRE(run(cmd) == 0);
  const std::string csv = slurp(out / "modes.csv");
  REQUIRE(csv.rfind("a_m,R_m,confinement_parameter,z0_control_m,z0_guided_m,"
                    "extension_factor\n",
                    0) == 0);
  // one data row with the reference radius
  std::istringstream rows(csv);
  std::string header, row;
  std::getline(rows, header);
  std::getline(rows, row);
  double a, radius;
  char comma;
  std::istringstream cells(row);
  cells >> a >> comma >> radius;
  REQUIRE(a == Approx(1e-4));
  REQUIRE(radius == Approx(1.28956e-5).epsilon(1e-4));

  // byte-identical on rerun
  const auto out2 = tmp.path / "run2";
  REQUIRE(run(kBinary + " modes --config preset:paper-guided-mode --out " +
              out2.string() + " 2>/dev/null") == 0);
  REQUIRE(slurp(out2 / "modes.csv") == csv);
}

TEST_CASE("propagate with zero amplitude warns and exits cleanly", "[cli]") {
  TempDir tmp;
  std::string text = slp::config_presets().at("demo-propagate");
  text += "[grid]\npulse_amplitude = 0\n[output]\ndir = " +
          (tmp.path / "out").string() + "\n";
  const auto cfg_path = tmp.path / "zero.cfg";
  std::ofstream(cfg_path) << text;
  const auto log = tmp.path / "log.txt";
  REQUIRE(run(kBinary + " propagate --config " + cfg_path.string() + " 2> " +
              log.string()) == 0);
  REQUIRE(slurp(log).find("empty trajectory") != std::string::npos);
  // header-only trajectory
  REQUIRE(slurp(tmp.path / "out" / "trajectory.csv") ==
          "t_s,centroid_m,rms_width_m,norm,matching_residual,phase_rad\n");
}

TEST_CASE("propagate emits a trajectory and optional snapshots", "[cli]") {
  TempDir tmp;
  const auto out = tmp.path / "out";
  REQUIRE(run(kBinary + " propagate --config preset:demo-propagate --out " +
              out.string() + " --snapshot-stride 200 2>/dev/null") == 0);
  const std::string csv = slurp(out / "trajectory.csv");
  // header plus a healthy number of rows
  REQUIRE(std::count(csv.begin(), csv.end(), '\n') > 10);
  REQUIRE(fs::exists(out / "snapshots" / "snap_000000.bin"));
  // snapshot header: "nz dz t"
  std::ifstream snap(out / "snapshots" / "snap_000000.bin", std::ios::binary);
  int nz;
  double dz, t0;
  snap >> nz >> dz >> t0;
  REQUIRE(nz == 1024);
  REQUIRE(dz == Approx(1.0 / 1024));
  // payload: four envelopes, nz complex doubles each, after the header line
  snap.ignore(1); // newline
  const auto header_end = snap.tellg();
  snap.seekg(0, std::ios::end);
  REQUIRE(snap.tellg() - header_end ==
          static_cast<std::streamoff>(4 * nz * 2 * sizeof(double)));
}

TEST_CASE("protocol subcommand emits the report", "[cli]") {
  TempDir tmp;
  const auto cfg_path = tmp.path / "proto.cfg";
  std::ofstream(cfg_path) << protocol_config;
  const auto out = tmp.path / "out";
  REQUIRE(run(kBinary + " protocol --config " + cfg_path.string() + " --out " +
              out.string() + " 2>/dev/null") == 0);
  const std::string body = slurp(out / "protocol.json");
  auto j = nlohmann::json::parse(body);
  REQUIRE(j.contains("phi_numeric_rad"));
  REQUIRE(j.contains("phi_analytic_rad"));
  REQUIRE(j.contains("phi_bound_rad"));
  REQUIRE(j.contains("loss_probability"));
  REQUIRE(j.contains("config_echo"));
  const double phi = j["phi_numeric_rad"];
  REQUIRE(phi == Approx(j["phi_analytic_rad"].get<double>()).epsilon(1e-3));
  REQUIRE(phi <= j["phi_bound_rad"].get<double>());

  // the echoed config re-parses to an equal ScenarioConfig
  auto echoed = slp::parse_config_text(j["config_echo"].get<std::string>());
  auto original = slp::parse_config(cfg_path.string());
  original.output.dir = out.string();
  REQUIRE(echoed == original);

  // byte-identical on rerun
  const auto out2 = tmp.path / "out2";
  REQUIRE(run(kBinary + " protocol --config " + cfg_path.string() + " --out " +
              out2.string() + " 2>/dev/null") == 0);
  auto j2 = nlohmann::json::parse(slurp(out2 / "protocol.json"));
  j2["config_echo"] = "";
  auto j1 = nlohmann::json::parse(body);
  j1["config_echo"] = "";
  REQUIRE(j1.dump() == j2.dump()); // only the output dir differs in the echo
}

TEST_CASE("sweep over the detuning is monotone and resumable", "[cli]") {
  TempDir tmp;
  const auto cfg_path = tmp.path / "proto.cfg";
  std::ofstream(cfg_path) << protocol_config;
  const auto out = tmp.path / "out";
  const std::string cmd = kBinary + " sweep --config " + cfg_path.string() +
                          " --out " + out.string() +
                          " --param protocol.delta_over_gamma" +
                          " --values 8,16,32,64 --workers 2 2>/dev/null";
  REQUIRE(run(cmd) == 0);
  const std::string rows = slurp(out / "sweep" / "results.jsonl");
  std::istringstream lines(rows);
  std::string line;
  double prev_phi = 1e9, prev_loss = 1e9;
  int count = 0;
  while (std::getline(lines, line)) {
    auto j = nlohmann::json::parse(line);
    const double phi = j["phi_numeric_rad"];
    const double loss = j["loss_probability"];
    REQUIRE(phi < prev_phi);
    REQUIRE(loss < prev_loss);
    prev_phi = phi;
    prev_loss = loss;
    ++count;
  }
  REQUIRE(count == 4);

  // rerun resumes from the manifest and reproduces the same bytes
  REQUIRE(run(cmd) == 0);
  REQUIRE(slurp(out / "sweep" / "results.jsonl") == rows);
}

TEST_CASE("validation failures exit with code 1", "[cli]") {
  TempDir tmp;
  const auto cfg_path = tmp.path / "broken.cfg";
  std::ofstream(cfg_path) << "[medium]\nlambda = 0.8\n";
  REQUIRE(run(kBinary + " modes --config " + cfg_path.string() +
              " 2>/dev/null") == 1);
  REQUIRE(run(kBinary + " modes --config preset:nope 2>/dev/null") == 1);
  REQUIRE(run(kBinary + " modes 2>/dev/null") == 1); // missing --config
}

TEST_CASE("reproduce-paper prints one line per criterion", "[cli]") {
  TempDir tmp;
  const auto log = tmp.path / "table.txt";
  REQUIRE(run(kBinary + " reproduce-paper > " + log.string() +
              " 2>/dev/null") == 0);
  const std::string table = slurp(log);
  int pass_lines = 0;
  std::istringstream lines(table);
  std::string line;
  while (std::getline(lines, line))
    if (line.rfind("[PASS]", 0) == 0) ++pass_lines;
  REQUIRE(pass_lines == 12);
  REQUIRE(table.find("[FAIL]") == std::string::npos);
}
