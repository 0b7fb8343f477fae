#include "olog/cli.hpp"

int main(int argc, char** argv) {
  return olog::cli::run(argc, argv);
}
