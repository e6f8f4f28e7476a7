// Empty-box proportion for 100 balls in 100 equiprobable boxes: exact value,
// order-1/n approximation, certified band, and a short simulation.
#include <cstdio>

#include <occupancy/occupancy.hpp>

int main() {
  using namespace occupancy;
  const AllocationModel model(100, equiprobable_profile(100));

  const auto expansion = mean_expansion(model, 0);
  const auto band = r1_bounds(0, model.beta());
  std::printf("exact E[q0]      %.12f\n", exact_mean(model, 0));
  std::printf("approximation    %.12f\n", expansion.value());
  std::printf("remainder R1     %.6f in [%g, %g]\n", residual_r1(model, 0), band.lower, band.upper);

  SimulationOptions opts;
  opts.replicates = 20'000;
  const auto sim = simulate(model, opts);
  std::printf("simulated E[q0]  %.6f +- %.6f\n", sim.means.at(0), sim.std_errors.at(0));
}
