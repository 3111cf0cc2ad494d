// Prints the discord of a three-qubit and a four-qubit state as the phase-flip
// strength grows; the four-qubit curve stays flat until p* and then decays.

#include <cstdio>

#include "qdiscord/qdiscord.hpp"

int main() {
  using namespace qdiscord;
  const auto three = FamilyCoefficients::make(3, 0.3, 0.2, 0.1);
  const auto four = FamilyCoefficients::make(4, 0.8, 0.4, 0.5);
  const auto grid = uniform_p_grid(20);
  const auto d3 = discord_trajectory(three, grid);
  const auto d4 = discord_trajectory(four, grid);

  std::printf("%6s %14s %14s\n", "p", "D(N=3)", "D(N=4)");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::printf("%6.3f %14.10f %14.10f\n", grid[i], *d3[i].discord_bits, *d4[i].discord_bits);
  }
  std::printf("transition at p* = %.6f\n", transition_point(four).analytic);
}
