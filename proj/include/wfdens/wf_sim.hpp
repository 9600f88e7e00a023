#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace wfdens {

//! Allele-count trajectories of the neutral discrete Wright-Fisher chain.
//! data is row-major: trajectory i occupies [i*(n_gen+1), (i+1)*(n_gen+1)).
struct TrajectoryEnsemble
{
  std::uint32_t two_n = 0;
  std::uint32_t n_gen = 0;
  double x0 = 0.0;
  std::uint32_t initial_count = 0; //!< round(x0 * 2N)
  std::uint32_t n_traj = 0;
  std::uint64_t seed = 0;
  std::vector<std::uint16_t> data;

  std::uint16_t count(std::size_t trajectory, std::size_t generation) const
  {
    return data[trajectory * (n_gen + 1) + generation];
  }
  std::span<const std::uint16_t> trajectory(std::size_t i) const
  {
    return {data.data() + i * (n_gen + 1), n_gen + 1};
  }
  //! Generation index of scaled time t = n / 2N, rounded to nearest.
  //! Throws DomainError outside [0, n_gen].
  std::size_t generation_at(double t) const;

  bool operator==(const TrajectoryEnsemble&) const = default;
};

//! Each generation is Binomial(2N, previous / 2N). Trajectory i draws from
//! derive_seed(seed, i), so results do not depend on `workers`.
TrajectoryEnsemble simulate_ensemble(std::uint32_t two_n,
                                     std::uint32_t n_gen,
                                     double x0,
                                     std::uint32_t n_traj,
                                     std::uint64_t seed,
                                     unsigned workers = 0);

//! Frequencies X_n / 2N of every trajectory at n = round(t 2N).
std::vector<double> marginal_at(const TrajectoryEnsemble& ensemble, double t);

struct FixationStats
{
  double lost;  //!< fraction of trajectories at 0
  double fixed; //!< fraction of trajectories at 2N
};

FixationStats fixation_stats(const TrajectoryEnsemble& ensemble, double t);

//! Compact binary format: magic "WFENSMBL", u32 version, metadata block,
//! then row-major little-endian u16 counts.
void write_ensemble(const TrajectoryEnsemble& ensemble, const std::filesystem::path& path);
TrajectoryEnsemble read_ensemble(const std::filesystem::path& path);

//! CSV export with columns trajectory,generation,count.
void write_ensemble_csv(const TrajectoryEnsemble& ensemble, const std::filesystem::path& path);

} // namespace wfdens
