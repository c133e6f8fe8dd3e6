#ifndef TMLAB_BIGNAT_HPP_
#define TMLAB_BIGNAT_HPP_

#include <cstdint>
#include <limits>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace tmlab {

using BigNat = boost::multiprecision::cpp_int;

inline std::string to_decimal(const BigNat& n) { return n.str(); }

// Throws std::invalid_argument unless text is a plain decimal natural.
BigNat parse_bignat(std::string_view text);
// Also accepts "<d>e<k>" and "<d>^<k>" (so 1e6 and 10^6 both mean 1000000).
BigNat parse_count(std::string_view text);

inline bool fits_u64(const BigNat& n) { return n >= 0 && n <= std::numeric_limits<std::uint64_t>::max(); }

inline std::uint64_t saturate_u64(const BigNat& n) {
  return fits_u64(n) ? static_cast<std::uint64_t>(n) : std::numeric_limits<std::uint64_t>::max();
}

// Step counter with a 64-bit fast path; spills into a BigNat on overflow.
class StepCounter {
 public:
  void add(std::uint64_t k) {
    if (low_ > std::numeric_limits<std::uint64_t>::max() - k) {
      high_ += low_;
      low_ = 0;
    }
    low_ += k;
  }
  BigNat value() const { return high_ + low_; }
  bool is_small() const { return high_ == 0; }
  std::uint64_t low() const { return low_; }

 private:
  std::uint64_t low_ = 0;
  BigNat high_ = 0;
};

}  // namespace tmlab

#endif  // TMLAB_BIGNAT_HPP_
