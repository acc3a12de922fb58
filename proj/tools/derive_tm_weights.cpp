// Re-derives the built-in TM property weights from the bundled dataset and the
// published TM totals in the reference file.
//
//   derive_tm_weights data/ivmf-2024.json data/ivmf-2024.reference.json

#include <array>
#include <cstdio>
#include <exception>
#include <vector>

#include <fmt/format.h>

#include "ivmf/dataset_io.hpp"
#include "ivmf/reproduction.hpp"
#include "tm_weight_solve.hpp"

int main(int argc, char** argv) {
  if (argc != 3) {
    fmt::print(stderr, "usage: derive_tm_weights <dataset> <reference>\n");
    return 2;
  }
  try {
    const auto dataset = ivmf::load_dataset(argv[1]);
    const auto reference = ivmf::load_reference(argv[2]);

    std::vector<std::array<int, 6>> scores;
    std::vector<double> targets;
    for (const auto& ref : reference.tm) {
      const auto* p = dataset.find(ref.name);
      if (p == nullptr) {
        fmt::print(stderr, "protocol '{}' not in dataset\n", ref.name);
        return 1;
      }
      std::array<int, 6> row{};
      for (auto prop : ivmf::all_properties) row[ivmf::index_of(prop)] = p->score(prop);
      scores.push_back(row);
      targets.push_back(ref.raw);
    }

    const auto solve = ivmf::tools::solve_tm_weights(scores, targets);
    fmt::print("equations {}  unknowns 6  rank {}\n", scores.size(), solve.rank);
    for (auto prop : ivmf::all_properties) {
      fmt::print("  w_{:<5} {:>10.6f}\n", ivmf::property_symbol(prop),
                 solve.weights[ivmf::index_of(prop)]);
    }
    fmt::print("max |residual| {:.3e}\n", solve.max_residual);
    const bool ok = solve.rank == 6 && solve.max_residual < 1e-3;
    fmt::print("{}\n", ok ? "unique solution, all equations reproduced"
                          : "FAILED: rank deficient or residual too large");
    return ok ? 0 : 1;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
}
