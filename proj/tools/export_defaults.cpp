// Writes the built-in template set and prompt catalog as JSON so they can be
// copied and edited.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "cins/compiler.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: " << argv[0] << " <out-dir>\n";
    return 2;
  }
  const std::filesystem::path dir(argv[1]);
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "templates.json") << cins::TemplateSet::defaults().to_json_text();
  std::ofstream(dir / "prompts.json") << cins::PromptCatalog::defaults().to_json_text();
  return 0;
}
