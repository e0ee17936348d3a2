#include "volcascade/rng.hpp"

#include <cstring>

namespace volcascade {

std::uint64_t stage_seed(std::uint64_t root_seed, const char* stage_name) {
    // FNV-1a over the stage name, then mixed with the root seed.
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (const char* p = stage_name; *p; ++p) {
        h ^= static_cast<unsigned char>(*p);
        h *= 0x100000001B3ULL;
    }
    std::uint64_t s = root_seed ^ h;
    return splitmix64(s);
}

}  // namespace volcascade
