#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>

namespace tnm {

// Opaque integer identifier, distinct per tag so object, interface and
// connection ids cannot be mixed up.
template <class Tag>
struct Id {
  std::uint64_t value = 0;

  constexpr Id() = default;
  constexpr explicit Id(std::uint64_t v) : value(v) {}

  constexpr auto operator<=>(const Id&) const = default;

  std::string str() const { return std::to_string(value); }
};

struct ObjectTag;
struct InterfaceTag;
struct ConnectionTag;

using ObjectId = Id<ObjectTag>;
using InterfaceId = Id<InterfaceTag>;
using ConnectionId = Id<ConnectionTag>;

// The hierarchy anchor. It is never a graph vertex.
inline constexpr ObjectId kRootId{0};

}  // namespace tnm

template <class Tag>
struct std::hash<tnm::Id<Tag>> {
  std::size_t operator()(const tnm::Id<Tag>& id) const noexcept {
    return std::hash<std::uint64_t>{}(id.value);
  }
};
