#include <iostream>
#include <string>
#include <vector>

#include "crypt/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    const cryptsim::Invocation invocation = cryptsim::parse_invocation(args);
    return cryptsim::run_command(invocation, std::cout, std::cerr);
  } catch (const cryptsim::HelpRequested& help) {
    std::cout << help.text;
    return 0;
  } catch (const cryptsim::UsageError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
}
