#include <cstdio>
#include <cstring>
#include <iostream>
#include <string>

#include "ocsim/acceptance.hpp"

int main(int argc, char** argv) {
  bool fast = false;
  for (int i = 1; i < argc; ++i) {
    if (!std::strcmp(argv[i], "--suite") && i + 1 < argc) {
      std::string s = argv[++i];
      if (s == "fast") {
        fast = true;
      } else if (s == "full") {
        fast = false;
      } else {
        std::fprintf(stderr, "unknown suite '%s' (want fast|full)\n",
                     s.c_str());
        return 2;
      }
    } else {
      std::fprintf(stderr, "usage: %s [--suite fast|full]\n", argv[0]);
      return 2;
    }
  }

  auto results = ocsim::acceptance::run_suite(fast, std::cerr);
  bool all = true;
  for (const auto& r : results) {
    std::printf("%-4s %-36s %s  [%6.1fs]  %s\n", r.id.c_str(),
                r.name.c_str(), r.pass ? "PASS" : "FAIL", r.seconds,
                r.detail.c_str());
    all = all && r.pass;
  }
  std::printf("%s\n", all ? "acceptance: all criteria hold"
                          : "acceptance: FAILURES above");
  return all ? 0 : 1;
}
