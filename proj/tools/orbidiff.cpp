#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include "orbidiff/orbidiff.hpp"

int main(int argc, char** argv) {
  CLI::App app{"orbidiff: adapted differential forms on orbifold charts"};
  std::string input;
  orbidiff::Exponent bound = 6;
  std::string format = "text";
  app.add_option("input", input, "script file (stdin when omitted)");
  app.add_option("--degree-bound", bound, "default coefficient degree bound")->capture_default_str();
  app.add_option("--format", format, "output format")->check(CLI::IsMember({"text"}))->capture_default_str();
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  std::string src;
  if (input.empty() || input == "-") {
    src.assign(std::istreambuf_iterator<char>(std::cin), {});
  } else {
    std::ifstream in(input);
    if (!in) {
      std::cerr << "cannot open " << input << "\n";
      return 2;
    }
    src.assign(std::istreambuf_iterator<char>(in), {});
  }

  orbidiff::script::Script script;
  try {
    script = orbidiff::script::parse(src);
  } catch (const orbidiff::script::ParseError& e) {
    std::cerr << (input.empty() ? "<stdin>" : input) << ": line " << e.line << ", column " << e.column << ": " << e.what()
              << "\n";
    return 2;
  }
  const auto res = orbidiff::script::execute(script, bound);
  std::cout << res.text;
  return res.failed ? 1 : 0;
}
