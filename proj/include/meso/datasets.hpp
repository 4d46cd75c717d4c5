#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "meso/errors.hpp"
#include "meso/graph.hpp"
#include "meso/hash.hpp"

#ifndef MESO_DATA_DIR
#define MESO_DATA_DIR "data"
#endif

namespace meso {

namespace datasets {

// Zachary (1977) karate club, 1-based member ids.
inline constexpr std::string_view karate_edge_list = R"(
1 2
1 3
1 4
1 5
1 6
1 7
1 8
1 9
1 11
1 12
1 13
1 14
1 18
1 20
1 22
1 32
2 3
2 4
2 8
2 14
2 18
2 20
2 22
2 31
3 4
3 8
3 9
3 10
3 14
3 28
3 29
3 33
4 8
4 13
4 14
5 7
5 11
6 7
6 11
6 17
7 17
9 31
9 33
9 34
10 34
14 34
15 33
15 34
16 33
16 34
19 33
19 34
20 34
21 33
21 34
23 33
23 34
24 26
24 28
24 30
24 33
24 34
25 26
25 28
25 32
26 32
27 30
27 34
28 34
29 32
29 34
30 33
30 34
31 33
31 34
32 33
32 34
33 34
)";

}  // namespace datasets

struct DatasetInfo {
  std::string name;
  std::size_t n = 0;
  std::size_t m = 0;
  std::string sha256;      // of the canonical edge list; empty when unpinned
  std::string_view embedded;  // empty when the data is read from disk
  std::string file;        // file name under the data directory
};

inline const std::vector<DatasetInfo>& dataset_registry() {
  static const std::vector<DatasetInfo> registry{
      {"karate", 34, 78, "8ba57feda2f7c6f218352288fe38ba98c5c0e0eaac7df74bf1735f142617b415",
       datasets::karate_edge_list, "karate.txt"},
      {"dolphins", 62, 159, "", {}, "dolphins.txt"},
  };
  return registry;
}

/// Directory searched for on-disk datasets: $MESO_DATA_DIR if set, otherwise
/// the path configured at build time.
inline std::filesystem::path data_directory() {
  if (const char* env = std::getenv("MESO_DATA_DIR"); env && *env) return env;
  return MESO_DATA_DIR;
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/// Loads a named dataset and checks its node count, edge count and (when
/// pinned) the hash of its canonical edge list.
inline Graph load_dataset(std::string_view name) {
  for (const auto& info : dataset_registry()) {
    if (info.name != name) continue;
    std::string text;
    if (!info.embedded.empty()) {
      text = std::string(info.embedded);
    } else {
      const auto path = data_directory() / info.file;
      if (!std::filesystem::exists(path))
        throw DataError("dataset '" + info.name + "' is not bundled; place its edge list at '" + path.string() +
                        "' or point MESO_DATA_DIR at the directory holding " + info.file);
      text = read_text_file(path);
    }
    Graph g = parse_edge_list(text);
    if (g.n() != info.n || g.m() != info.m)
      throw DataError("dataset '" + info.name + "' has n=" + std::to_string(g.n()) + " m=" + std::to_string(g.m()) +
                      ", expected n=" + std::to_string(info.n) + " m=" + std::to_string(info.m));
    if (!info.sha256.empty() && sha256_hex(to_edge_list(g)) != info.sha256)
      throw DataError("dataset '" + info.name + "' does not match its canonical edge list");
    return g;
  }
  throw ConfigError("unknown dataset '" + std::string(name) + "' (known: karate, dolphins)");
}

}  // namespace meso
