#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace driqa {

/// Six input switches of a DR IQA module, written b1..b6 left to right:
///   b1 FR/RR(PR, DR)   b2 DR image   b3 NR(DR)
///   b4 FR/RR(DR, FD)   b5 FD image   b6 NR(FD)
class ArchCode {
 public:
  constexpr ArchCode() = default;
  constexpr explicit ArchCode(std::uint8_t bits) : bits_(bits & 0x3f) {}

  /// Parses a six-character string of '0'/'1'.
  static std::optional<ArchCode> parse(std::string_view s) {
    if (s.size() != 6) return std::nullopt;
    std::uint8_t b = 0;
    for (char c : s) {
      if (c != '0' && c != '1') return std::nullopt;
      b = static_cast<std::uint8_t>((b << 1) | (c == '1'));
    }
    return ArchCode(b);
  }

  /// Switch i in 1..6.
  constexpr bool bit(int i) const { return (bits_ >> (6 - i)) & 1u; }
  constexpr std::uint8_t bits() const { return bits_; }

  std::string str() const {
    std::string s(6, '0');
    for (int i = 1; i <= 6; ++i) s[i - 1] = bit(i) ? '1' : '0';
    return s;
  }

  friend constexpr bool operator==(ArchCode, ArchCode) = default;

 private:
  std::uint8_t bits_ = 0;
};

enum class ArchType { Type0, Type1, Invalid };

inline std::string_view to_string(ArchType t) {
  switch (t) {
    case ArchType::Type0: return "Type-0";
    case ArchType::Type1: return "Type-1";
    case ArchType::Invalid: return "Invalid";
  }
  return "?";
}

/// Invalid when the module sees nothing of the DR side (b1..b4 all off) or
/// nothing of the FD side (b4..b6 all off); otherwise b1 splits Type-1 from Type-0.
constexpr ArchType classify_arch(ArchCode code) {
  const bool dr_side = code.bit(1) || code.bit(2) || code.bit(3) || code.bit(4);
  const bool fd_side = code.bit(4) || code.bit(5) || code.bit(6);
  if (!dr_side || !fd_side) return ArchType::Invalid;
  return code.bit(1) ? ArchType::Type1 : ArchType::Type0;
}

inline constexpr ArchCode kScenario1{0b100100};  // FR(PR,DR) + FR(DR,FD)
inline constexpr ArchCode kScenario2{0b001100};  // NR(DR) + FR(DR,FD)

}  // namespace driqa
