#include "gestauth/cli.hpp"

int main(int argc, char** argv) {
  return gestauth::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
