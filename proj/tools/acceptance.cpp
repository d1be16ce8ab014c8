#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "detproc/acceptance.hpp"

// One line per criterion; exit 0 only when every counted criterion passes.
// Usage: acceptance [--fast] [--inject-fault] [--seed S] [--report path.json]
int main(int argc, char** argv) {
  detproc::acceptance::Options opt;
  std::string report;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--fast") opt.full = false;
    else if (a == "--inject-fault") opt.inject_fault = true;
    else if (a == "--seed" && i + 1 < argc) opt.seed = std::stoull(argv[++i]);
    else if (a == "--report" && i + 1 < argc) report = argv[++i];
    else {
      std::cerr << "usage: acceptance [--fast] [--inject-fault] [--seed S] [--report file]\n";
      return 2;
    }
  }
  const auto rs = detproc::acceptance::run(opt, [](const auto& r) {
    std::cout << detproc::acceptance::format_line(r) << std::endl;
  });
  const bool ok = detproc::acceptance::all_pass(rs);
  std::cout << (ok ? "ALL CRITERIA PASS" : "SOME CRITERIA FAIL") << std::endl;
  if (!report.empty()) std::ofstream(report) << detproc::acceptance::to_json(rs, opt).dump(2) << "\n";
  return ok ? 0 : 4;
}
