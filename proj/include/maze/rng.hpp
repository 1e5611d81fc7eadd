#pragma once

#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <random>
#include <vector>

namespace maze {

// Deterministic RNG used throughout. All sampling goes through this wrapper
// so the only serialized state is the mt19937_64 engine itself.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // [0, 1)
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // [0, n)
  int uniform_int(int n) {
    return static_cast<int>(static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) *
         static_cast<unsigned __int128>(n)) >> 64));
  }

  // Box-Muller, computed fresh each call so the engine is the whole state.
  double normal() {
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (int i = static_cast<int>(v.size()) - 1; i > 0; --i) {
      std::swap(v[i], v[uniform_int(i + 1)]);
    }
  }

  void save(std::ostream& os) const { os << eng_; }
  void load(std::istream& is) { is >> eng_; }

 private:
  std::mt19937_64 eng_;
};

// Stateless seed derivation (splitmix64 chain); lets resumed runs recreate
// the same per-generation / per-pair streams without storing them.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t s = mix_seed(base ^ 0x243f6a8885a308d3ULL);
  s = mix_seed(s ^ a);
  s = mix_seed(s ^ b);
  s = mix_seed(s ^ c);
  return s;
}

}  // namespace maze
