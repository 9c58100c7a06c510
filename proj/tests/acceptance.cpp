#include "orbitdens/verify/verify.hpp"

#include <cstdlib>
#include <iostream>

int main(int argc, char** argv) {
  orbitdens::VerifyOptions opt;
  opt.horizonK = 7;
  if (argc > 1) opt.horizonK = std::atoi(argv[1]);
  int failed = 0;
  orbitdens::runVerification(opt, [&](const orbitdens::CriterionResult& r) {
    std::cout << formatResult(r) << std::flush;
    failed += !r.pass;
  });
  std::cout << (failed ? std::to_string(failed) + " criteria failed\n" : "all criteria pass\n");
  return failed ? 1 : 0;
}
