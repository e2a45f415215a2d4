// Acceptance run: one PASS/FAIL line per criterion, exit status 0 iff all pass.
// Criteria 1-11 run in process; criterion 12 drives the fraclossy executable.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "fraclossy/acceptance.hpp"

namespace fs = std::filesystem;
using namespace fraclossy;

namespace {

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string("\"") + FRACLOSSY_CLI + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

acceptance::CheckResult cli_determinism(bool criteria_pass) {
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path dir = fs::temp_directory_path() / "fraclossy_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string config = std::string("\"") + FRACLOSSY_REFERENCE_CONFIG + "\"";
  std::ostringstream m;
  bool ok = true;

  const int a = run_cli("simulate " + config + " -o \"" + (dir / "a.csv").string() + "\"", dir / "a.log");
  const int b = run_cli("simulate " + config + " -o \"" + (dir / "b.csv").string() + "\"", dir / "b.log");
  const std::string ca = slurp(dir / "a.csv"), cb = slurp(dir / "b.csv");
  const bool same = a == 0 && b == 0 && !ca.empty() && ca == cb;
  ok = ok && same;
  m << "simulate x2 " << (same ? "byte-identical" : "DIFFER") << " (" << ca.size() << " bytes, exit " << a << "/" << b
    << ")";

  const int v = run_cli("verify --level full", dir / "verify.log");
  const int want = criteria_pass ? 0 : 1;
  ok = ok && v == want;
  m << "; verify --level full exit " << v << " (expect " << want << ")";

  const int t = run_cli("verify --level quick --tolerance-scale 0", dir / "tamper.log");
  ok = ok && t == 1;
  m << "; zero-tolerance verify exit " << t << " (expect 1)";

  fs::remove_all(dir);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {12, "CLI determinism and verify exit code", ok, m.str(), secs};
}

}  // namespace

int main() {
  auto results = acceptance::run(acceptance::Level::full, 1.0, acceptance::threads_from_env());
  for (const auto& r : results) std::cout << acceptance::format_line(r) << '\n' << std::flush;
  const bool core = acceptance::all_passed(results);
  results.push_back(cli_determinism(core));
  std::cout << acceptance::format_line(results.back()) << '\n';
  const bool pass = acceptance::all_passed(results);
  std::size_t failed = 0;
  for (const auto& r : results) failed += r.passed ? 0 : 1;
  std::cout << (pass ? "acceptance: all 12 criteria pass" : "acceptance: " + std::to_string(failed) + " of 12 criteria fail")
            << '\n';
  return pass ? EXIT_SUCCESS : EXIT_FAILURE;
}
