#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pedrole {

/// Pedagogical role of a document. Enumerator order is the canonical order
/// used by every report, tie-break and table in the library.
enum class Role : std::uint8_t {
  Survey = 0,
  Tutorial,
  Resource,
  ReferenceWork,
  EmpiricalResults,
  SoftwareManual,
  Other,
};

inline constexpr std::size_t kNumRoles = 7;

inline constexpr std::array<Role, kNumRoles> kAllRoles = {
    Role::Survey,           Role::Tutorial,       Role::Resource, Role::ReferenceWork,
    Role::EmpiricalResults, Role::SoftwareManual, Role::Other,
};

constexpr std::size_t role_index(Role r) { return static_cast<std::size_t>(r); }

std::string_view role_name(Role r);

/// Short label used in table row headers ("Sur.", "Tut.", ...).
std::string_view role_abbrev(Role r);

std::optional<Role> parse_role(std::string_view name);

/// Like parse_role but throws InputError on unknown names.
Role role_from_string(std::string_view name);

/// Subset of the seven roles, stored as a bitmask.
class RoleSet {
 public:
  constexpr RoleSet() = default;
  constexpr RoleSet(std::initializer_list<Role> roles) {
    for (Role r : roles) insert(r);
  }

  static constexpr RoleSet from_bits(std::uint8_t bits) {
    RoleSet s;
    s.bits_ = bits & kFullMask;
    return s;
  }

  constexpr void insert(Role r) { bits_ |= bit(r); }
  constexpr void erase(Role r) { bits_ &= static_cast<std::uint8_t>(~bit(r)); }
  constexpr bool contains(Role r) const { return (bits_ & bit(r)) != 0; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::uint8_t bits() const { return bits_; }

  constexpr std::size_t size() const {
    std::size_t n = 0;
    for (std::uint8_t b = bits_; b != 0; b &= static_cast<std::uint8_t>(b - 1)) ++n;
    return n;
  }

  /// First member in canonical order; empty sets have none.
  std::optional<Role> first() const;

  /// Members in canonical order.
  std::vector<Role> roles() const;

  /// Canonical "A; B" rendering used for combination keys.
  std::string to_string(std::string_view sep = "; ") const;

  friend constexpr bool operator==(RoleSet a, RoleSet b) = default;
  friend constexpr RoleSet operator|(RoleSet a, RoleSet b) { return from_bits(a.bits_ | b.bits_); }
  friend constexpr RoleSet operator&(RoleSet a, RoleSet b) { return from_bits(a.bits_ & b.bits_); }
  friend constexpr RoleSet operator^(RoleSet a, RoleSet b) { return from_bits(a.bits_ ^ b.bits_); }

 private:
  static constexpr std::uint8_t kFullMask = (1u << kNumRoles) - 1;
  static constexpr std::uint8_t bit(Role r) { return static_cast<std::uint8_t>(1u << role_index(r)); }

  std::uint8_t bits_ = 0;
};

}  // namespace pedrole
