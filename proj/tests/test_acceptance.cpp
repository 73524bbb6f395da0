#include <doctest.h>

#include <iostream>

#include "penrose/acceptance.hpp"

using namespace penrose;

TEST_CASE("acceptance suite: all criteria pass") {
  const auto results = run_acceptance();
  REQUIRE(results.size() == 10);
  for (const auto& r : results) {
    CAPTURE(r.name);
    CAPTURE(r.detail);
    CHECK(r.pass);
    std::cout << (r.pass ? "PASS" : "FAIL") << "  " << r.index << ". "
              << r.name << "  [" << r.detail << "]\n";
  }
}
