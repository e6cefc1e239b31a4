#pragma once
#include <array>
#include <cstdint>
#include <vector>

namespace cdkpop {

// xoshiro256** with splitmix64 state seeding. Deterministic across
// platforms so instance generation is reproducible from the seed alone.
class Xoshiro256 {
  public:
    explicit Xoshiro256(std::uint64_t seed);

    std::uint64_t next64();

    // 53-bit mantissa in [0, 1)
    double uniform01();

    // Box-Muller draw consuming exactly two uniforms, redrawing the radius
    // uniform while it is zero
    double normal();

    // Fisher-Yates from the top, j = next64() mod (i + 1)
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i-- > 1;) {
            size_t j = static_cast<size_t>(next64() % (i + 1));
            std::swap(v[i], v[j]);
        }
    }

  private:
    std::array<std::uint64_t, 4> s_;
};

}  // namespace cdkpop
