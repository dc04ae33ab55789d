// Acceptance suite: one line per criterion. Exits nonzero only when a
// criterion outside the documented known-red set fails.
#include <cstdlib>
#include <iostream>
#include <set>
#include <string>

#include "automorph/acceptance.hpp"

int main(int argc, char** argv) {
  namespace acc = automorph::acceptance;
  std::set<std::string> select;
  std::string baselines;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--baselines" && i + 1 < argc) baselines = argv[++i];
    else select.insert(arg);
  }
  acc::Context ctx(baselines);
  int regressions = 0, failures = 0;
  acc::run(ctx, select, [&](const acc::Result& r) {
    std::cout << acc::format(r) << '\n';
    if (r.status != acc::Status::Fail) return;
    ++failures;
    const auto it = acc::known_red().find(r.id);
    if (it == acc::known_red().end()) {
      ++regressions;
    } else {
      std::cout << "      known red: " << it->second << '\n';
    }
    std::cout.flush();
  });
  std::cout << "acceptance: " << failures << " failing criteria, " << regressions << " unexpected\n";
  return regressions == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
