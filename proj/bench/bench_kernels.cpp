// Serial vs OpenMP timing of the per-vehicle kernels.
// usage: bench_kernels [vehicles] [repeats]
#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <random>

#include "roadchat/sim.hpp"

using namespace roadchat::sim;
using Clock = std::chrono::steady_clock;

template <class F>
double best_ms(int repeats, F f) {
  double best = std::numeric_limits<double>::infinity();
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = Clock::now();
    f();
    best = std::min(best, std::chrono::duration<double, std::milli>(Clock::now() - t0).count());
  }
  return best;
}

int main(int argc, char** argv) {
  const std::size_t n = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 1'000'000;
  const int repeats = argc > 2 ? std::atoi(argv[2]) : 5;
  const double inf = std::numeric_limits<double>::infinity();

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  SpeedInputs s;
  EmissionInputs e;
  for (std::size_t i = 0; i < n; ++i) {
    s.speed.push_back(15.0 * u(rng));
    s.desired_speed.push_back(13.89);
    s.max_accel.push_back(2.6);
    s.comfortable_decel.push_back(4.5);
    s.gap.push_back(u(rng) < 0.3 ? inf : 1.0 + 80.0 * u(rng));
    s.leader_speed.push_back(15.0 * u(rng));
    s.stop_distance.push_back(u(rng) < 0.8 ? inf : 100.0 * u(rng));
    e.speed_before.push_back(s.speed.back());
    e.speed_after.push_back(15.0 * u(rng));
    e.electric.push_back(u(rng) < 0.5);
  }

  IdmParams idm;
  EmissionParams ep;
  std::vector<double> vs, vo;
  std::vector<StepEmissions> es, eo;
  const double t_idm_s = best_ms(repeats, [&] { idm_speeds_serial(s, idm, 1.0, vs); });
  const double t_idm_o = best_ms(repeats, [&] { idm_speeds_omp(s, idm, 1.0, vo); });
  const double t_em_s = best_ms(repeats, [&] { emissions_serial(e, ep, 1.0, es); });
  const double t_em_o = best_ms(repeats, [&] { emissions_omp(e, ep, 1.0, eo); });

  bool same = vs == vo;
  for (std::size_t i = 0; same && i < n; ++i) {
    same = es[i].co2 == eo[i].co2 && es[i].fuel == eo[i].fuel && es[i].electricity == eo[i].electricity;
  }
  std::printf("vehicles %zu, threads %d\n", n, omp_get_max_threads());
  std::printf("idm        serial %8.2f ms   omp %8.2f ms   speedup %.2fx\n", t_idm_s, t_idm_o, t_idm_s / t_idm_o);
  std::printf("emissions  serial %8.2f ms   omp %8.2f ms   speedup %.2fx\n", t_em_s, t_em_o, t_em_s / t_em_o);
  std::printf("results identical: %s\n", same ? "yes" : "NO");
  return same ? 0 : 1;
}
