// Line-oriented embedding service used by the service-provider tests.
//   fake_embed_service [--dim N] [--seed S] [--crash-after K] [--hang-after K]
//                      [--garbage] [--grow-after K]
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <iostream>
#include <string>
#include <thread>

#include "ftd/embed.hpp"
#include "json.hpp"

int main(int argc, char** argv) {
  std::size_t dim = 8;
  std::uint64_t seed = 1;
  long crash_after = -1, hang_after = -1, grow_after = -1;
  bool garbage = false;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    auto next = [&] { return i + 1 < argc ? std::strtol(argv[++i], nullptr, 10) : 0L; };
    if (a == "--dim") dim = static_cast<std::size_t>(next());
    else if (a == "--seed") seed = static_cast<std::uint64_t>(next());
    else if (a == "--crash-after") crash_after = next();
    else if (a == "--hang-after") hang_after = next();
    else if (a == "--grow-after") grow_after = next();
    else if (a == "--garbage") garbage = true;
  }
  const ftd::embed::TestEmbedder small(seed, dim), large(seed, dim + 1);
  long served = 0;
  std::string line;
  while (std::getline(std::cin, line)) {
    if (crash_after >= 0 && served >= crash_after) return 3;
    if (hang_after >= 0 && served >= hang_after) std::this_thread::sleep_for(std::chrono::hours(1));
    if (garbage) {
      std::cout << "not json" << std::endl;
      continue;
    }
    const auto request = nlohmann::json::parse(line);
    const auto& model = (grow_after >= 0 && served >= grow_after) ? large : small;
    nlohmann::json vectors = nlohmann::json::array();
    for (const auto& t : request.at("texts")) vectors.push_back(model.embed_one(t.get<std::string>()));
    std::cout << nlohmann::json{{"vectors", vectors}}.dump() << std::endl;
    ++served;
  }
  return 0;
}
