#include "pedrole/role.hpp"

#include "pedrole/error.hpp"

namespace pedrole {

namespace {

constexpr std::array<std::string_view, kNumRoles> kNames = {
    "Survey", "Tutorial", "Resource", "ReferenceWork", "EmpiricalResults", "SoftwareManual", "Other",
};

constexpr std::array<std::string_view, kNumRoles> kAbbrevs = {
    "Sur.", "Tut.", "Res.", "Ref.", "Emp.", "Sof.", "Oth.",
};

}  // namespace

std::string_view role_name(Role r) { return kNames[role_index(r)]; }

std::string_view role_abbrev(Role r) { return kAbbrevs[role_index(r)]; }

std::optional<Role> parse_role(std::string_view name) {
  for (Role r : kAllRoles) {
    if (kNames[role_index(r)] == name) return r;
  }
  return std::nullopt;
}

Role role_from_string(std::string_view name) {
  if (auto r = parse_role(name)) return *r;
  throw InputError("unknown role name '" + std::string(name) + "'");
}

std::optional<Role> RoleSet::first() const {
  for (Role r : kAllRoles) {
    if (contains(r)) return r;
  }
  return std::nullopt;
}

std::vector<Role> RoleSet::roles() const {
  std::vector<Role> out;
  for (Role r : kAllRoles) {
    if (contains(r)) out.push_back(r);
  }
  return out;
}

std::string RoleSet::to_string(std::string_view sep) const {
  std::string out;
  for (Role r : roles()) {
    if (!out.empty()) out += sep;
    out += role_name(r);
  }
  return out;
}

}  // namespace pedrole
