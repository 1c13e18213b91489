#include "ridgeboot/rng.hpp"

#include <boost/random/normal_distribution.hpp>

namespace ridgeboot {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kChain = 0xD1342543DE82EF95ULL;

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

std::uint64_t seed_split(std::uint64_t master, std::span<const std::uint64_t> path) noexcept {
  std::uint64_t h = mix64(master + kGolden);
  std::uint64_t k = 1;
  for (std::uint64_t idx : path) {
    h = mix64(h * kChain + mix64(idx + k * kGolden));
    ++k;
  }
  return h;
}

std::uint64_t seed_split(std::uint64_t master,
                         std::initializer_list<std::uint64_t> path) noexcept {
  return seed_split(master, std::span<const std::uint64_t>(path.begin(), path.size()));
}

Rng::Rng(std::uint64_t seed) noexcept {
  std::uint64_t x = seed;
  for (auto& word : s_) {
    x += kGolden;
    word = mix64(x);
  }
}

Rng::result_type Rng::operator()() noexcept {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

std::size_t Rng::index(std::size_t n) noexcept {
  const unsigned __int128 product =
      static_cast<unsigned __int128>((*this)()) * static_cast<unsigned __int128>(n);
  return static_cast<std::size_t>(product >> 64);
}

double Rng::uniform() noexcept {
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  boost::random::normal_distribution<double> dist;
  return dist(*this);
}

}  // namespace ridgeboot
