// Runs every ```console block in README.md and compares the output.

#include "doctest.h"

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct Example {
  std::size_t line = 0;
  std::string command;
  std::string expected;
};

std::vector<Example> examples(const fs::path& readme) {
  std::ifstream in(readme);
  std::vector<Example> out;
  bool inside = false;
  std::size_t n = 0;
  for (std::string l; std::getline(in, l);) {
    ++n;
    if (!inside) {
      inside = l == "```console";
      continue;
    }
    if (l == "```") {
      inside = false;
    } else if (l.rfind("$ ", 0) == 0) {
      out.push_back({n, l.substr(2), ""});
    } else if (!out.empty()) {
      out.back().expected += l + '\n';
    }
  }
  return out;
}

std::string shell(const std::string& cmd) {
  std::string out;
  FILE* p = ::popen(cmd.c_str(), "r");
  REQUIRE(p);
  char buf[4096];
  std::size_t k;
  while ((k = std::fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, k);
  ::pclose(p);
  return out;
}

}  // namespace

TEST_CASE("README examples") {
  const fs::path root(TMLAB_SOURCE_DIR);
  const auto all = examples(root / "README.md");
  REQUIRE(all.size() >= 20);
  const fs::path store = fs::temp_directory_path() / ("tmlab-readme-" + std::to_string(::getpid()));
  const std::string prefix = "cd '" + root.string() + "'; export PATH='" + fs::path(TMLAB_CLI).parent_path().string() +
                             "':\"$PATH\"; export TMLAB_CORPUS='" + store.string() + "'; ";
  for (const Example& e : all) {
    INFO("README.md line " << e.line << ": " << e.command);
    CHECK(shell(prefix + e.command) == e.expected);
  }
  fs::remove_all(store);
}
