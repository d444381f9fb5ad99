#include "jdgamma/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
  return jdgamma::cli_main(argc, argv, std::cout, std::cerr);
}
