#include <iostream>

#include "metriclab/cli.hpp"

int main(int argc, char** argv) {
  return metriclab::dispatch(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
