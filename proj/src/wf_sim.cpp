#include "wfdens/wf_sim.hpp"

#include "wfdens/errors.hpp"
#include "wfdens/io.hpp"
#include "wfdens/numerics.hpp"

#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

namespace wfdens {

namespace {

constexpr std::array<char, 8> kMagic{'W', 'F', 'E', 'N', 'S', 'M', 'B', 'L'};
constexpr std::uint32_t kFormatVersion = 1;

template <typename T>
void
put_le(std::ostream& os, T value)
{
  std::array<unsigned char, sizeof(T)> bytes{};
  std::uint64_t bits = 0;
  if constexpr (std::is_floating_point_v<T>) {
    static_assert(sizeof(T) == 8);
    std::memcpy(&bits, &value, 8);
  } else {
    bits = static_cast<std::uint64_t>(value);
  }
  for (std::size_t i = 0; i < sizeof(T); ++i)
    bytes[i] = static_cast<unsigned char>(bits >> (8 * i));
  os.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <typename T>
T
get_le(std::istream& is)
{
  std::array<unsigned char, sizeof(T)> bytes{};
  is.read(reinterpret_cast<char*>(bytes.data()), sizeof(T));
  if (!is)
    throw IoError("ensemble file truncated");
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i)
    bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  if constexpr (std::is_floating_point_v<T>) {
    T value;
    std::memcpy(&value, &bits, 8);
    return value;
  } else {
    return static_cast<T>(bits);
  }
}

} // namespace

std::size_t
TrajectoryEnsemble::generation_at(double t) const
{
  const double n = std::round(t * static_cast<double>(two_n));
  if (!(t >= 0.0) || !(n <= static_cast<double>(n_gen))) {
    std::ostringstream os;
    os << "t = " << t << " maps to generation " << n << ", outside [0, " << n_gen << "]";
    throw DomainError(os.str());
  }
  return static_cast<std::size_t>(n);
}

TrajectoryEnsemble
simulate_ensemble(std::uint32_t two_n,
                  std::uint32_t n_gen,
                  double x0,
                  std::uint32_t n_traj,
                  std::uint64_t seed,
                  unsigned workers)
{
  if (two_n < 2 || two_n > std::numeric_limits<std::uint16_t>::max())
    throw ParameterError("population size 2N must lie in [2, 65535]");
  if (!(x0 >= 0.0 && x0 <= 1.0))
    throw ParameterError("x0 must lie in [0, 1]");
  if (n_traj == 0)
    throw ParameterError("n_traj must be positive");

  TrajectoryEnsemble ensemble;
  ensemble.two_n = two_n;
  ensemble.n_gen = n_gen;
  ensemble.x0 = x0;
  ensemble.initial_count = static_cast<std::uint32_t>(std::lround(x0 * two_n));
  ensemble.n_traj = n_traj;
  ensemble.seed = seed;
  const std::size_t stride = static_cast<std::size_t>(n_gen) + 1;
  ensemble.data.resize(stride * n_traj);

  parallel_for(
    n_traj,
    [&](std::size_t i) {
      std::mt19937_64 engine(derive_seed(seed, i));
      std::uint16_t* row = ensemble.data.data() + i * stride;
      int count = static_cast<int>(ensemble.initial_count);
      row[0] = static_cast<std::uint16_t>(count);
      const int n = static_cast<int>(two_n);
      for (std::size_t g = 1; g < stride; ++g) {
        if (count != 0 && count != n) {
          std::binomial_distribution<int> draw(n, static_cast<double>(count) / n);
          count = draw(engine);
        }
        row[g] = static_cast<std::uint16_t>(count);
      }
    },
    workers);
  return ensemble;
}

std::vector<double>
marginal_at(const TrajectoryEnsemble& ensemble, double t)
{
  const std::size_t g = ensemble.generation_at(t);
  std::vector<double> out(ensemble.n_traj);
  const double scale = 1.0 / static_cast<double>(ensemble.two_n);
  for (std::size_t i = 0; i < ensemble.n_traj; ++i)
    out[i] = ensemble.count(i, g) * scale;
  return out;
}

FixationStats
fixation_stats(const TrajectoryEnsemble& ensemble, double t)
{
  const std::size_t g = ensemble.generation_at(t);
  std::size_t lost = 0;
  std::size_t fixed = 0;
  for (std::size_t i = 0; i < ensemble.n_traj; ++i) {
    const auto c = ensemble.count(i, g);
    lost += c == 0;
    fixed += c == ensemble.two_n;
  }
  const double n = static_cast<double>(ensemble.n_traj);
  return {static_cast<double>(lost) / n, static_cast<double>(fixed) / n};
}

void
write_ensemble(const TrajectoryEnsemble& ensemble, const std::filesystem::path& path)
{
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw IoError("cannot open " + path.string() + " for writing");
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, kFormatVersion);
  put_le<std::uint32_t>(out, ensemble.two_n);
  put_le<std::uint32_t>(out, ensemble.n_gen);
  put_le<std::uint32_t>(out, ensemble.n_traj);
  put_le<std::uint32_t>(out, ensemble.initial_count);
  put_le<double>(out, ensemble.x0);
  put_le<std::uint64_t>(out, ensemble.seed);
  for (std::uint16_t c : ensemble.data)
    put_le<std::uint16_t>(out, c);
  if (!out)
    throw IoError("failed writing " + path.string());
}

TrajectoryEnsemble
read_ensemble(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot open " + path.string());
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic)
    throw IoError(path.string() + ": not an ensemble file");
  const auto version = get_le<std::uint32_t>(in);
  if (version != kFormatVersion)
    throw IoError(path.string() + ": unsupported ensemble format version " + std::to_string(version));
  TrajectoryEnsemble e;
  e.two_n = get_le<std::uint32_t>(in);
  e.n_gen = get_le<std::uint32_t>(in);
  e.n_traj = get_le<std::uint32_t>(in);
  e.initial_count = get_le<std::uint32_t>(in);
  e.x0 = get_le<double>(in);
  e.seed = get_le<std::uint64_t>(in);
  e.data.resize(static_cast<std::size_t>(e.n_gen + 1) * e.n_traj);
  for (auto& c : e.data)
    c = get_le<std::uint16_t>(in);
  return e;
}

void
write_ensemble_csv(const TrajectoryEnsemble& ensemble, const std::filesystem::path& path)
{
  std::ostringstream os;
  io::write_schema_line(os, "wfdens.ensemble");
  os << "trajectory,generation,count\n";
  for (std::size_t i = 0; i < ensemble.n_traj; ++i) {
    for (std::size_t g = 0; g <= ensemble.n_gen; ++g)
      os << i << ',' << g << ',' << ensemble.count(i, g) << '\n';
  }
  io::write_text(path, os.str());
}

} // namespace wfdens
