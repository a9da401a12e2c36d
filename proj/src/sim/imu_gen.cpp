#include <cmath>
#include <random>

#include "gpeio/sim/generators.hpp"

namespace gpeio {

std::uint64_t sub_seed(std::uint64_t seed, SeedStream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

ImuStream gen_imu(const TruthModel& truth, const ScenarioSpec& spec) {
  std::mt19937_64 rng(sub_seed(spec.seed, SeedStream::kImu));
  std::normal_distribution<double> n01(0.0, 1.0);
  auto noise = [&]() { return Vec3(n01(rng), n01(rng), n01(rng)); };

  const double dt = 1.0 / spec.imu_rate;
  const long n = static_cast<long>(std::floor(spec.duration * spec.imu_rate + 1e-9));
  ImuStream out;
  out.samples.reserve(n + 1);
  BiasState b{spec.gyro_bias, spec.accel_bias};
  for (long i = 0; i <= n; ++i) {
    const double t = i * dt;
    const TruthState s = truth.at(t);
    InertialSample m = ideal_sample(t, s.x.T.C(), s.x.w, s.x.dw, spec.gravity, b);
    m.gyro += spec.gyro_sigma * noise();
    m.accel += spec.accel_sigma * noise();
    out.samples.push_back(m);
    out.biases.push_back(b);
    b.bg += spec.gyro_walk * std::sqrt(dt) * noise();
    b.ba += spec.accel_walk * std::sqrt(dt) * noise();
  }
  return out;
}

}  // namespace gpeio
