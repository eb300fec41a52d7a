#pragma once

#include <memory>
#include <string_view>

namespace hydra::sim {

// Base for all simulated wire messages. Payloads are shared immutable
// records; handlers downcast on the type tag.
struct Message {
  virtual ~Message() = default;
  virtual std::string_view type() const = 0;
};

using MessagePtr = std::shared_ptr<const Message>;

template <class T, class... Args>
MessagePtr make_message(Args&&... args) {
  return std::make_shared<const T>(std::forward<Args>(args)...);
}

}  // namespace hydra::sim
